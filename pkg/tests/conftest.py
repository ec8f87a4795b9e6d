import numpy as np
import pytest


@pytest.fixture(scope="session")
def iris():
    datasets = pytest.importorskip("sklearn.datasets")
    data = datasets.load_iris()
    return np.asarray(data.data, dtype=np.float64), np.asarray(data.target, dtype=np.int64)


@pytest.fixture(scope="session")
def iris_csv(tmp_path_factory, iris):
    X, y = iris
    names = ["setosa", "versicolor", "virginica"]
    path = tmp_path_factory.mktemp("data") / "iris.csv"
    lines = ["sepal_length,sepal_width,petal_length,petal_width,class"]
    lines += [",".join(repr(float(v)) for v in row) + "," + names[c] for row, c in zip(X, y)]
    path.write_text("\n".join(lines) + "\n")
    return path


def two_blobs(n_per=20, distance=100.0, seed=0, spread=1.0):
    rng = np.random.default_rng(seed)
    X = spread * rng.normal(size=(2 * n_per, 2))
    X[n_per:, 0] += distance
    return X, np.repeat([0, 1], n_per)


def pytest_terminal_summary(terminalreporter):
    module = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get("tests.test_acceptance")
    lines = getattr(module, "LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
