"""Command-line interface.

Subcommands: ``cluster``, ``sweep``, ``oracle-check``, ``heat-convergence``
and ``bench``.  Settings resolve in this order, later winning: built-in
defaults, ``--config`` file (``key=value`` lines), the ``BICLIQUE_SEED``
environment variable (seed only), explicit command-line flags.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 numerical failure, 4 oracle-check violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bench, checks, tensor_core
from .baselines import cluster_order3
from .dataio import load_csv
from .errors import BicliqueError, ConfigError, DataError, OracleViolation
from .evaluation import MODELINGS, SweepConfig, sweep
from .heat import circle_sampler, convergence_experiment, interval_sampler
from .hypergraph import read_edge_list, star_adjacency
from .kernels import KernelSpec
from .matching import error_rate
from .spectral import SpectralOptions, cluster_biclique, cluster_matrix

DEFAULTS = {
    "seed": 42,
    "oracle.max_entries": tensor_core.DEFAULT_MAX_ENTRIES,
    "kmeans.restarts": 100,
    "kmeans.max_iters": 300,
    "embed.row_normalize": False,
    "gram.shift": "none",
    "gram.shift_constant": 0.0,
    "workers": len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1),
}

# command-line dest name for each config key that has a flag
FLAG_FOR_KEY = {
    "seed": "seed",
    "oracle.max_entries": "oracle_max_entries",
    "kmeans.restarts": "restarts",
    "kmeans.max_iters": "max_iters",
    "embed.row_normalize": "row_normalize",
    "gram.shift": "shift",
    "gram.shift_constant": "shift_constant",
    "workers": "workers",
}


def _coerce(key: str, text: str):
    default = DEFAULTS[key]
    try:
        if isinstance(default, bool):
            lowered = text.strip().lower()
            if lowered not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(text)
            return lowered in ("true", "1", "yes")
        if isinstance(default, int):
            return int(float(text)) if "e" in text.lower() else int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {text!r}") from None
    return text.strip()


def read_config_file(path) -> dict:
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    out = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(read_config_file(args.config))
    env_seed = os.environ.get("BICLIQUE_SEED")
    if env_seed:
        cfg["seed"] = _coerce("seed", env_seed)
    for key, dest in FLAG_FOR_KEY.items():
        value = getattr(args, dest, None)
        if value is not None:
            cfg[key] = value
    if cfg["gram.shift"] not in ("none", "shift_min_to_zero", "add_constant"):
        raise ConfigError(f"unknown gram.shift {cfg['gram.shift']!r}")
    if cfg["workers"] < 1 or cfg["kmeans.restarts"] < 1:
        raise ConfigError("workers and kmeans.restarts must be positive")
    return cfg


def spectral_options(cfg: dict) -> SpectralOptions:
    return SpectralOptions(restarts=cfg["kmeans.restarts"], seed=cfg["seed"],
                           max_iters=cfg["kmeans.max_iters"], row_normalize=cfg["embed.row_normalize"],
                           shift=cfg["gram.shift"], shift_constant=cfg["gram.shift_constant"])


def config_header(items: dict) -> str:
    return "".join(f"# {key}={_fmt(items[key])}\n" for key in sorted(items))


def _fmt(value) -> str:
    if isinstance(value, (list, tuple)):
        return ",".join(str(v) for v in value)
    return "" if value is None else str(value)


def _emit(text: str, path) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from None


def _label_column(text):
    if text is None:
        return None
    return int(text) if text.lstrip("-").isdigit() else text


def _load_input(args):
    return load_csv(args.input, _label_column(args.label_column), args.labels_file)


def _kernel_spec(args) -> KernelSpec:
    if args.kernel == "gaussian":
        return KernelSpec.gaussian(args.gamma if args.gamma is not None else 1.0)
    if args.kernel == "polynomial":
        return KernelSpec.polynomial(args.degree if args.degree is not None else 1,
                                     args.offset if args.offset is not None else 0.0)
    return KernelSpec.linear()


def cmd_cluster(args, cfg) -> int:
    opts = spectral_options(cfg)
    truth = None
    if args.input_hypergraph:
        if args.k is None:
            raise ConfigError("--k is required")
        G = read_edge_list(args.input_hypergraph)
        result = cluster_matrix(star_adjacency(G), args.k, opts,
                                {"modeling": "hypergraph-star", "m": G.m, "input": str(args.input_hypergraph)})
    else:
        if not args.input:
            raise ConfigError("one of --input or --input-hypergraph is required")
        X, truth = _load_input(args)
        k = args.k if args.k is not None else (int(truth.max()) + 1 if truth is not None else None)
        if k is None:
            raise ConfigError("--k is required when no labels are given")
        if args.modeling == "biclique":
            m = args.m if args.m is not None else 4
            if m % 2 or m < 2:
                raise ConfigError(f"--m {m}: the biclique modeling needs an even order m >= 2")
            result = cluster_biclique(X, _kernel_spec(args), m, k, opts)
        elif args.modeling == "gd-max":
            result = cluster_order3(X, "gd-max", k, opts, spec=_kernel_spec(args))
        elif args.modeling in ("affine", "dh2"):
            result = cluster_order3(X, args.modeling, k, opts,
                                    gamma=args.gamma if args.gamma is not None else 1.0)
        else:
            result = cluster_order3(X, "gendot", k, opts)
    # resolved settings first, so they head the report
    report = {"resolved_config": dict(sorted(cfg.items())), **result.to_dict()}
    if truth is not None:
        errors = np.array([error_rate(lab, truth) for lab in result.restart_labels])
        report["error_rate"] = {"best_objective": error_rate(result.labels, truth),
                                "mean": float(errors.mean()), "std": float(errors.std())}
    _emit(json.dumps(report, indent=2, default=_json_default) + "\n", args.output)
    if args.labels_out:
        Path(args.labels_out).write_text("".join(f"{v}\n" for v in result.labels))
    return 0


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def cmd_sweep(args, cfg) -> int:
    X, truth = _load_input(args)
    if truth is None:
        raise ConfigError("sweep needs labels (--label-column or --labels-file)")
    kwargs = {}
    if args.gammas:
        kwargs["gammas"] = _float_list(args.gammas)
    if args.degrees:
        kwargs["degrees"] = _int_list(args.degrees)
    if args.offsets:
        kwargs["offsets"] = _float_list(args.offsets)
    if args.m_values:
        kwargs["m_values"] = _int_list(args.m_values)
    scfg = SweepConfig(
        k=args.k if args.k is not None else int(truth.max()) + 1,
        modelings=tuple(args.modelings.split(",")),
        kernels=tuple(args.kernels.split(",")),
        restarts=cfg["kmeans.restarts"], seed=cfg["seed"], max_iters=cfg["kmeans.max_iters"],
        row_normalize=cfg["embed.row_normalize"], shift=cfg["gram.shift"], **kwargs,
    )
    report = sweep(X, truth, scfg, workers=cfg["workers"])
    report.config["input"] = str(args.input)
    _emit(report.to_csv(), args.output)
    if args.json:
        Path(args.json).write_text(report.to_json())
    if args.timings:
        Path(args.timings).write_text(report.timings_csv())
    for row in report.summary():
        print(f"best {row['modeling']} {row['kernel']} {row['group']}: "
              f"mean_error={row['mean_error']:.4f} std={row['std_error']:.4f} "
              f"(gamma={row['gamma']}, degree={row['degree']}, offset={row['offset']}, m={row['m']})",
              file=sys.stderr)
    return 0


def cmd_oracle_check(args, cfg) -> int:
    first = cfg["seed"] if args.first_seed is None else args.first_seed
    lines = [config_header({**cfg, "seeds": args.seeds, "first_seed": first, "perturb": args.perturb})]
    failed = False
    for seed in range(first, first + args.seeds):
        for result in checks.run_all(seed, perturb=args.perturb):
            lines.append(f"seed={seed} {result.line()}\n")
            failed |= not result.passed
    angles = checks.gram_tensor_star_angles(first)
    lines.append(f"info gram-tensor hypergraph: star vs contracted eigenspace angle "
                 f"max={angles.max():.3e} median={np.median(angles):.3e} (not an equivalence)\n")
    _emit("".join(lines), args.output)
    if failed:
        raise OracleViolation("at least one oracle check failed")
    return 0


def cmd_heat(args, cfg) -> int:
    if args.manifold == "circle":
        sampler, f, lap = circle_sampler, np.sin, np.sin
    else:
        two_pi = 2 * np.pi
        sampler = interval_sampler

        def f(s):
            return np.sin(two_pi * s)

        def lap(s):
            return two_pi**2 * np.sin(two_pi * s)

    n_grid = _int_list(args.n_grid)
    seeds = range(args.first_seed, args.first_seed + args.seeds)
    report = convergence_experiment(sampler, f, lap, n_grid, args.alpha, args.m, seeds)
    header = config_header({"manifold": args.manifold, "n_grid": n_grid, "alpha": args.alpha,
                            "m": args.m, "seeds": args.seeds, "first_seed": args.first_seed})
    _emit(header + report.to_csv(), args.output)
    return 0


def cmd_bench(args, cfg) -> int:
    n_grid = _int_list(args.n_grid)
    m_grid = _int_list(args.m_grid)
    gram_rows = bench.gram_timings(args.gram_n, m_grid, args.repeats)
    pipe_rows = bench.pipeline_timings(n_grid, m=args.m, restarts=args.restarts, repeats=args.repeats)
    lines = [config_header({"gram_n": args.gram_n, "m_grid": m_grid, "n_grid": n_grid, "m": args.m,
                            "restarts": args.restarts, "repeats": args.repeats})]
    lines.append("kind,n,m,restarts,seconds\n")
    lines += [f"gram,{r['n']},{r['m']},,{r['seconds']!r}\n" for r in gram_rows]
    lines += [f"pipeline,{r['n']},{r['m']},{r['restarts']},{r['seconds']!r}\n" for r in pipe_rows]
    if len(gram_rows) > 1:
        secs = [r["seconds"] for r in gram_rows]
        lines.append(f"# gram max/min time ratio across m: {max(secs) / min(secs):.3f}\n")
    if len(pipe_rows) > 1:
        slope = bench.loglog_slope([r["n"] for r in pipe_rows], [r["seconds"] for r in pipe_rows])
        lines.append(f"# pipeline log-log slope: {slope:.3f}\n")
    _emit("".join(lines), args.output)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="biclique", description="Biclique-kernel hypergraph spectral clustering.")
    parser.add_argument("--config", help="key=value configuration file")
    parser.add_argument("--seed", type=int, help="master seed (default 42)")
    parser.add_argument("--oracle-max-entries", type=int, help="dense tensor entry budget")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_input(p, labels=True):
        p.add_argument("--input", help="CSV file of features")
        if labels:
            p.add_argument("--label-column", help="label column (index or header name)")
            p.add_argument("--labels-file", help="one label per line")

    def add_pipeline(p):
        p.add_argument("--restarts", type=int, help="k-means restarts (default 100)")
        p.add_argument("--max-iters", type=int, help="Lloyd iterations per restart (default 300)")
        p.add_argument("--row-normalize", action="store_const", const=True,
                       help="normalize embedding rows before k-means")
        p.add_argument("--shift", choices=["none", "shift_min_to_zero", "add_constant"])
        p.add_argument("--shift-constant", type=float)

    p = sub.add_parser("cluster", help="cluster one configuration")
    add_input(p)
    p.add_argument("--input-hypergraph", help="edge list 'v1 ... vm weight' (0-based)")
    p.add_argument("--modeling", choices=MODELINGS, default="biclique")
    p.add_argument("--kernel", choices=["gaussian", "polynomial", "linear"], default="gaussian")
    p.add_argument("--gamma", type=float)
    p.add_argument("--degree", type=int)
    p.add_argument("--offset", type=float)
    p.add_argument("--m", type=int, help="biclique order (even, default 4)")
    p.add_argument("--k", type=int, help="number of clusters (default: number of labels)")
    p.add_argument("--output", help="JSON report path (default stdout)")
    p.add_argument("--labels-out", help="write predicted labels here")
    add_pipeline(p)
    p.set_defaults(handler=cmd_cluster)

    p = sub.add_parser("sweep", help="grid sweep with error rates")
    add_input(p)
    p.add_argument("--modelings", default="biclique", help="comma list from " + ",".join(MODELINGS))
    p.add_argument("--kernels", default="gaussian", help="comma list: gaussian,polynomial,linear")
    p.add_argument("--gammas", help="comma list (default 1e-3..1e5 decades)")
    p.add_argument("--degrees", help="comma list (default 1,3,5,7,9)")
    p.add_argument("--offsets", help="comma list (default 0,1)")
    p.add_argument("--m-values", help="comma list (default 2,4,...,20)")
    p.add_argument("--k", type=int)
    p.add_argument("--workers", type=int, help="worker processes (default: CPU count)")
    p.add_argument("--output", help="CSV report path (default stdout)")
    p.add_argument("--json", help="structured report path")
    p.add_argument("--timings", help="per-grid-point wall times (CSV)")
    add_pipeline(p)
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("oracle-check", help="randomized cross-checks")
    p.add_argument("--seeds", type=int, default=1, help="number of seeds")
    p.add_argument("--first-seed", type=int, help="first seed (default: master seed)")
    p.add_argument("--perturb", type=float, default=0.0,
                   help="add this to one closed-form gram entry (must then fail)")
    p.add_argument("--output")
    p.set_defaults(handler=cmd_oracle_check)

    p = sub.add_parser("heat-convergence", help="discrete heat-Laplacian convergence")
    p.add_argument("--manifold", choices=["circle", "interval"], default="circle")
    p.add_argument("--n-grid", default="100,200,400")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--first-seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(handler=cmd_heat)

    p = sub.add_parser("bench", help="timing of the gram formula and the pipeline")
    p.add_argument("--gram-n", type=int, default=2000)
    p.add_argument("--m-grid", default="4,20")
    p.add_argument("--n-grid", default="250,500,1000")
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--output")
    p.set_defaults(handler=cmd_bench)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
        tensor_core.set_max_entries(cfg["oracle.max_entries"])
        return args.handler(args, cfg)
    except BicliqueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DataError.exit_code


if __name__ == "__main__":
    sys.exit(main())
