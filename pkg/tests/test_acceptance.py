"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as they are
produced; they are also repeated in the terminal summary.
"""

import os
import time
from pathlib import Path

import numpy as np
import pytest
from threadpoolctl import threadpool_limits

from biclique import bench
from biclique.checks import check_cut_equivalence, check_fast_vs_tensor, check_objective_chain
from biclique.dataio import load_csv
from biclique.evaluation import SweepConfig, sweep
from biclique.heat import circle_sampler, convergence_experiment
from biclique.kernels import KernelSpec, biclique_gram_fast, biclique_gram_tensor, gram
from biclique.tensor_core import is_half_symmetric, semidefinite_probe

LINES: list[str] = []
DATA_DIR = Path(os.environ.get("BICLIQUE_DATA_DIR", Path(__file__).resolve().parents[1] / "data"))


def report(criterion: str, passed: bool, detail: str) -> None:
    line = f"{'PASS' if passed else 'FAIL'} criterion {criterion}: {detail}"
    LINES.append(line)
    print(line)
    assert passed, line


@pytest.fixture(scope="module")
def iris_sweep(iris):
    X, y = iris
    start = time.perf_counter()
    result = sweep(X, y, SweepConfig(k=3, modelings=("biclique", "gd-max")), workers=1)
    return result, time.perf_counter() - start


def best(result, modeling, group):
    rows = [s for s in result.summary() if s["modeling"] == modeling and s["kernel"] == "gaussian"
            and s["group"] == group]
    return rows[0]


def test_criterion_01_fast_gram_oracle():
    start = time.perf_counter()
    res = check_fast_vs_tensor(seed=0, sizes=range(2, 7), orders=(2, 4, 6), repeats=50, tol=1e-10)
    elapsed = time.perf_counter() - start
    report("1", res.passed and elapsed < 10,
           f"worst relative error {res.worst:.2e} over {res.instances} instances in {elapsed:.2f}s")


def test_criterion_02_contracted_gram_psd():
    rng = np.random.default_rng(2)
    worst = np.inf
    for trial in range(100):
        n = int(rng.integers(2, 11))
        X = rng.normal(size=(n, int(rng.integers(1, 5))))
        spec = (KernelSpec.gaussian(float(10 ** rng.uniform(-2, 1))) if trial % 2 == 0
                else KernelSpec.polynomial(int(rng.integers(1, 6)), float(rng.uniform(0, 2))))
        K = gram(X, spec)
        for m in range(2, 21, 2):
            Km = biclique_gram_fast(K, m)
            worst = min(worst, np.linalg.eigvalsh(Km)[0] / np.linalg.norm(Km))
    report("2", worst >= -1e-8, f"smallest eigenvalue / Frobenius norm {worst:.2e} (100 grams, m=2..20)")


def test_criterion_03_gram_tensor_semidefinite():
    rng = np.random.default_rng(3)
    failures, count = 0, 0
    for n in range(1, 5):
        for m in (2, 4):
            for spec in (KernelSpec.gaussian(1.0), KernelSpec.polynomial(3, 1.0), KernelSpec.linear()):
                T = biclique_gram_tensor(gram(rng.normal(size=(n, 3)), spec), m)
                ok = semidefinite_probe(T, trials=1000, seed=count) and is_half_symmetric(T, tol=1e-12)
                failures += not ok
                count += 1
    report("3", failures == 0, f"{count - failures}/{count} gram tensors pass probe and half-symmetry")


def test_criterion_04_objective_chain():
    chain, plain = check_objective_chain(seed=0, instances=30, max_n=12, m=4, tol=1e-8)
    report("4", chain.passed and plain.passed,
           f"chain worst {chain.worst:.2e}, weighted k-means worst {plain.worst:.2e}")


def test_criterion_05_cut_equivalence():
    angles, cut = check_cut_equivalence(seed=0, instances=20, m=4, max_n=6)
    report("5", angles.passed and cut.passed,
           f"largest principal angle {angles.worst:.2e}, cut vs trace form {cut.worst:.2e}")


def test_criterion_06_iris_table(iris_sweep):
    result, elapsed = iris_sweep
    m2 = best(result, "biclique", "m=2")["mean_error"]
    m4 = best(result, "biclique", "m>=4")["mean_error"]
    gd = best(result, "gd-max", "m=3")["mean_error"]
    ok = 0.08 <= m2 <= 0.13 and 0.05 <= m4 <= 0.10 and m4 <= m2 and 0.05 <= gd <= 0.12 and elapsed < 300
    report("6", ok, f"m=2 {m2:.4f}, m>=4 {m4:.4f}, gd-max {gd:.4f}, sweep {elapsed:.1f}s")


@pytest.mark.parametrize("name,k,target", [("spine", 2, 0.2807), ("ovarian", 2, 0.0841)])
def test_criterion_06_optional_dataset(name, k, target):
    path = DATA_DIR / f"{name}.csv"
    if not path.is_file():
        pytest.skip(f"{path} not available")
    X, y = load_csv(path, -1)
    result = sweep(X, y, SweepConfig(k=k, modelings=("biclique",)), workers=1)
    got = best(result, "biclique", "m>=4")["mean_error"]
    report(f"6 ({name})", abs(got - target) <= 0.05, f"best m>=4 mean error {got:.4f}, reference {target}")


def test_criterion_07_order_trend(iris_sweep):
    by_m = iris_sweep[0].best_error_by_m()
    argmin = min(by_m, key=by_m.get)
    report("7", argmin > 2 and by_m[argmin] < by_m[2],
           f"best error minimized at m={argmin} ({by_m[argmin]:.4f} vs m=2 {by_m[2]:.4f})")


def test_criterion_08_heat_convergence():
    start = time.perf_counter()
    details, ok = [], True
    for m in (2, 4):
        errs = convergence_experiment(circle_sampler, np.sin, np.sin, [100, 200, 400], 1.0, m,
                                      range(10)).mean_errors()
        ok &= bool(np.all(np.diff(errs) < 0))
        details.append(f"m={m} " + " > ".join(f"{e:.4f}" for e in errs))
    elapsed = time.perf_counter() - start
    report("8", ok and elapsed < 120, "; ".join(details) + f" in {elapsed:.1f}s")


def test_criterion_09a_gram_time_independent_of_order():
    with threadpool_limits(limits=1):
        rows = bench.gram_timings(2000, (4, 20), repeats=5)
    t4, t20 = rows[0]["seconds"], rows[1]["seconds"]
    ratio = max(t4, t20) / min(t4, t20)
    report("9a", ratio < 2, f"n=2000 gram time m=4 {t4:.4f}s, m=20 {t20:.4f}s, ratio {ratio:.2f}")


@pytest.mark.slow
def test_criterion_09b_pipeline_cubic_scaling():
    # The dense eigensolver is cubic, but at these sizes gram construction,
    # k-means and BLAS efficiency gains keep the fitted exponent below 2.5.
    with threadpool_limits(limits=1):
        rows = bench.pipeline_timings((250, 500, 1000), m=4, restarts=1, repeats=3)
    slope = bench.loglog_slope([r["n"] for r in rows], [r["seconds"] for r in rows])
    times = ", ".join(f"n={r['n']} {r['seconds']:.3f}s" for r in rows)
    report("9b", 2.5 <= slope <= 3.5, f"log-log slope {slope:.2f} ({times})")


def test_criterion_10_determinism(iris):
    X, y = iris
    cfg = SweepConfig(k=3, modelings=("biclique", "gd-max", "dh2"), gammas=(0.1, 1.0), m_values=(2, 4, 8),
                      restarts=20, seed=11)
    runs = [sweep(X, y, cfg, workers=w) for w in (1, 2, 3)]
    same = all(r.to_csv() == runs[0].to_csv() and r.to_json() == runs[0].to_json() for r in runs)
    report("10", same, f"CSV and JSON reports byte-identical across worker counts 1, 2, 3 "
                       f"({len(runs[0].rows)} rows)")
