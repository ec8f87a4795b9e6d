"""Parameter sweeps and error-rate reports.

Every grid point runs one spectral embedding followed by ``restarts`` k-means
restarts; the report records the mean and standard deviation of the error
rate across those restarts.  Rows are sorted canonically and contain no
timing information, so a report depends only on the data, the grid and the
seed, never on the number of worker processes.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from numpy.linalg import LinAlgError
from threadpoolctl import threadpool_limits

from .baselines import MODELINGS as ORDER3_MODELINGS
from .baselines import cluster_order3
from .errors import BicliqueError, ConfigError
from .kernels import KernelSpec, as_data_matrix
from .matching import error_rate
from .spectral import SpectralOptions, cluster_biclique

__all__ = [
    "EvalReport",
    "GridPoint",
    "SweepConfig",
    "error_rate",
    "run_point",
    "sweep",
]

REPORT_SCHEMA_VERSION = 1
GAMMA_DECADES = tuple(10.0**p for p in range(-3, 6))
POLY_DEGREES = (1, 3, 5, 7, 9)
POLY_OFFSETS = (0.0, 1.0)
M_VALUES = tuple(range(2, 21, 2))
MODELINGS = ("biclique",) + ORDER3_MODELINGS
ROW_FIELDS = ("modeling", "kernel", "gamma", "degree", "offset", "m",
              "mean_error", "std_error", "best_objective_error", "status")


@dataclass(frozen=True)
class SweepConfig:
    """Grid and pipeline settings for :func:`sweep`.

    Kernel grids apply to ``biclique`` and ``gd-max``; ``affine`` and ``dh2``
    use ``gammas`` directly; ``gendot`` has no parameters.
    """

    k: int
    modelings: tuple[str, ...] = ("biclique",)
    kernels: tuple[str, ...] = ("gaussian",)
    gammas: tuple[float, ...] = GAMMA_DECADES
    degrees: tuple[int, ...] = POLY_DEGREES
    offsets: tuple[float, ...] = POLY_OFFSETS
    m_values: tuple[int, ...] = M_VALUES
    restarts: int = 100
    seed: int = 42
    max_iters: int = 300
    row_normalize: bool = False
    shift: str = "none"

    def __post_init__(self):
        for name in ("modelings", "kernels", "gammas", "degrees", "offsets", "m_values"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        bad = [mod for mod in self.modelings if mod not in MODELINGS]
        if bad:
            raise ConfigError(f"unknown modeling(s) {bad}; expected from {MODELINGS}")
        if not self.modelings:
            raise ConfigError("no modeling selected")
        if "biclique" in self.modelings:
            odd = [m for m in self.m_values if m < 2 or m % 2]
            if odd or not self.m_values:
                raise ConfigError(f"biclique modeling needs even m >= 2, got {list(self.m_values)}")
        if self.k < 1 or self.restarts < 1:
            raise ConfigError("k and restarts must be positive")

    def options(self) -> SpectralOptions:
        return SpectralOptions(restarts=self.restarts, seed=self.seed, max_iters=self.max_iters,
                               row_normalize=self.row_normalize, shift=self.shift)

    def kernel_specs(self) -> list[KernelSpec]:
        specs = []
        for kind in self.kernels:
            if kind == "gaussian":
                specs += [KernelSpec.gaussian(g) for g in self.gammas]
            elif kind == "polynomial":
                specs += [KernelSpec.polynomial(d, c) for d in self.degrees for c in self.offsets]
            elif kind == "linear":
                specs.append(KernelSpec.linear())
            else:
                raise ConfigError(f"unknown kernel kind {kind!r}")
        return specs

    def grid(self) -> list["GridPoint"]:
        points = []
        for modeling in self.modelings:
            if modeling == "biclique":
                points += [GridPoint.from_spec(modeling, s, m)
                           for s in self.kernel_specs() for m in self.m_values]
            elif modeling == "gd-max":
                points += [GridPoint.from_spec(modeling, s, 3) for s in self.kernel_specs()]
            elif modeling in ("affine", "dh2"):
                points += [GridPoint(modeling, "gaussian-type", g, None, None, 3) for g in self.gammas]
            else:
                points.append(GridPoint(modeling, "dot", None, None, None, 3))
        return sorted(points, key=GridPoint.sort_key)


@dataclass(frozen=True)
class GridPoint:
    modeling: str
    kernel: str
    gamma: float | None
    degree: int | None
    offset: float | None
    m: int

    @classmethod
    def from_spec(cls, modeling: str, spec: KernelSpec, m: int) -> "GridPoint":
        if spec.kind == "polynomial":
            return cls(modeling, spec.kind, None, spec.degree, spec.offset, m)
        return cls(modeling, spec.kind, spec.gamma, None, None, m)

    def spec(self) -> KernelSpec:
        if self.kernel == "polynomial":
            return KernelSpec.polynomial(self.degree, self.offset)
        if self.kernel == "linear":
            return KernelSpec.linear()
        return KernelSpec.gaussian(self.gamma)

    def sort_key(self) -> tuple:
        def num(x):
            return (0, 0.0) if x is None else (1, float(x))

        return (self.modeling, self.kernel, num(self.gamma), num(self.degree), num(self.offset), self.m)


def run_point(data, truth, k: int, point: GridPoint, opts: SpectralOptions) -> dict:
    """Cluster one grid point and summarize error rates across restarts."""
    row = asdict(point)
    try:
        if point.modeling == "biclique":
            result = cluster_biclique(data, point.spec(), point.m, k, opts)
        elif point.modeling == "gd-max":
            result = cluster_order3(data, "gd-max", k, opts, spec=point.spec())
        elif point.modeling in ("affine", "dh2"):
            result = cluster_order3(data, point.modeling, k, opts, gamma=point.gamma)
        else:
            result = cluster_order3(data, point.modeling, k, opts)
    except (BicliqueError, LinAlgError, FloatingPointError) as exc:
        row.update(mean_error=None, std_error=None, best_objective_error=None,
                   status=f"error: {type(exc).__name__}: {exc}")
        return row
    errors = np.array([error_rate(labels, truth) for labels in result.restart_labels])
    row.update(mean_error=float(errors.mean()), std_error=float(errors.std()),
               best_objective_error=float(error_rate(result.labels, truth)), status="ok")
    return row


_shared: dict = {}


def _init_worker(data, truth, k, opts):
    _shared.update(data=data, truth=truth, k=k, opts=opts)


def _worker(point: GridPoint) -> tuple[dict, float]:
    start = time.perf_counter()
    with threadpool_limits(limits=1):
        row = run_point(_shared["data"], _shared["truth"], _shared["k"], point, _shared["opts"])
    return row, time.perf_counter() - start


@dataclass
class EvalReport:
    """Sweep results: canonical rows, best-per-modeling summary and the resolved config.

    ``timings`` (seconds per grid point) is kept apart from the serialized
    report so that reports stay byte-identical across runs.
    """

    config: dict
    rows: list[dict]
    timings: list[dict] = field(default_factory=list)

    def summary(self) -> list[dict]:
        """Lowest mean error per (modeling, kernel, order group)."""
        best: dict[tuple, dict] = {}
        for row in self.rows:
            if row["status"] != "ok":
                continue
            if row["modeling"] == "biclique":
                group = "m=2" if row["m"] == 2 else "m>=4"
            else:
                group = f"m={row['m']}"
            key = (row["modeling"], row["kernel"], group)
            if key not in best or row["mean_error"] < best[key]["mean_error"]:
                best[key] = {"modeling": row["modeling"], "kernel": row["kernel"], "group": group,
                             **{f: row[f] for f in ("gamma", "degree", "offset", "m",
                                                     "mean_error", "std_error")}}
        return [best[key] for key in sorted(best)]

    def best_error_by_m(self, modeling: str = "biclique", kernel: str = "gaussian") -> dict[int, float]:
        """For each order ``m``, the lowest mean error over kernel parameters."""
        out: dict[int, float] = {}
        for row in self.rows:
            if row["modeling"] == modeling and row["kernel"] == kernel and row["status"] == "ok":
                out[row["m"]] = min(out.get(row["m"], math.inf), row["mean_error"])
        return dict(sorted(out.items()))

    def to_json(self) -> str:
        payload = {"schema_version": REPORT_SCHEMA_VERSION, "config": self.config,
                   "rows": self.rows, "summary": self.summary()}
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# schema_version={REPORT_SCHEMA_VERSION}\n")
        for key in sorted(self.config):
            buf.write(f"# {key}={_fmt(self.config[key])}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(ROW_FIELDS)
        for row in self.rows:
            writer.writerow([_fmt(row[f]) for f in ROW_FIELDS])
        return buf.getvalue()

    def timings_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["modeling", "kernel", "gamma", "degree", "offset", "m", "seconds"])
        for t in self.timings:
            writer.writerow([_fmt(t[f]) for f in ("modeling", "kernel", "gamma", "degree",
                                                  "offset", "m", "seconds")])
        return buf.getvalue()


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return " ".join(_fmt(v) for v in value)
    return str(value)


def sweep(data, truth, cfg: SweepConfig, workers: int = 1) -> EvalReport:
    """Run every grid point of ``cfg`` and collect an :class:`EvalReport`.

    A failing grid point becomes a row with an error status.  With
    ``workers > 1`` grid points run in separate processes, each limited to a
    single BLAS thread.
    """
    X = as_data_matrix(data)
    truth = np.asarray(truth)
    if truth.shape != (X.shape[0],):
        raise ConfigError(f"{truth.shape[0]} labels for {X.shape[0]} points")
    points = cfg.grid()
    opts = cfg.options()
    if workers <= 1:
        _init_worker(X, truth, cfg.k, opts)
        results = [_worker(p) for p in points]
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                                 initargs=(X, truth, cfg.k, opts)) as pool:
            results = list(pool.map(_worker, points))
    rows = [row for row, _ in results]
    timings = [{**asdict(p), "seconds": sec} for p, (_, sec) in zip(points, results)]
    config = {**asdict(cfg), "n": int(X.shape[0]), "d": int(X.shape[1])}
    return EvalReport(config=config, rows=rows, timings=timings)
