"""Download benchmark datasets into CSV files with the class label in the last column.

    python3 scripts/fetch_datasets.py [--dest data] [--iris-from-sklearn] [--ovarian PATH]

No checksums are pinned; compare the printed SHA-256 digests against a
trusted copy if provenance matters.
"""

import argparse
import csv
import hashlib
import io
import shutil
import sys
import urllib.request
import zipfile
from pathlib import Path

IRIS_URL = "https://archive.ics.uci.edu/ml/machine-learning-databases/iris/iris.data"
SPINE_URL = "https://archive.ics.uci.edu/ml/machine-learning-databases/00212/vertebral_column_data.zip"


def download(url: str) -> bytes:
    with urllib.request.urlopen(url, timeout=60) as resp:
        payload = resp.read()
    print(f"{url}: {len(payload)} bytes sha256={hashlib.sha256(payload).hexdigest()}")
    return payload


def write_rows(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def fetch_iris(dest: Path) -> None:
    text = download(IRIS_URL).decode()
    rows = [line.split(",") for line in text.splitlines() if line.strip()]
    write_rows(dest / "iris.csv", ["sepal_length", "sepal_width", "petal_length", "petal_width", "class"], rows)


def iris_from_sklearn(dest: Path) -> None:
    from sklearn.datasets import load_iris

    data = load_iris()
    rows = [[repr(float(v)) for v in x] + [data.target_names[t]] for x, t in zip(data.data, data.target)]
    write_rows(dest / "iris.csv", ["sepal_length", "sepal_width", "petal_length", "petal_width", "class"], rows)


def fetch_spine(dest: Path) -> None:
    with zipfile.ZipFile(io.BytesIO(download(SPINE_URL))) as zf:
        text = zf.read("column_2C.dat").decode()
    rows = [line.split() for line in text.splitlines() if line.strip()]
    header = [f"x{i}" for i in range(1, len(rows[0]))] + ["class"]
    write_rows(dest / "spine.csv", header, rows)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dest", default="data", help="output directory (default: data)")
    parser.add_argument("--iris-from-sklearn", action="store_true",
                        help="export iris from scikit-learn instead of downloading it")
    parser.add_argument("--ovarian", help="copy a local ovarian CSV (label in last column) into place")
    args = parser.parse_args(argv)
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    failed = False
    steps = [iris_from_sklearn if args.iris_from_sklearn else fetch_iris, fetch_spine]
    for step in steps:
        try:
            step(dest)
        except OSError as exc:
            print(f"{step.__name__}: {exc}", file=sys.stderr)
            failed = True
    if args.ovarian:
        shutil.copyfile(args.ovarian, dest / "ovarian.csv")
        print(f"copied {args.ovarian} to {dest / 'ovarian.csv'}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
