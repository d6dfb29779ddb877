"""Command-line interface: ``compute``, ``sweep``, ``convergence``, ``validate``.

Exit codes: 0 success, 1 usage or configuration error, 2 partial convergence,
3 validation failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import replace

import numpy as np

from . import io, validation
from .model import AdmissibilityError, SpectralParams
from .solver import (
    FLAG_NOT_CONVERGED,
    NewtonSettings,
    QnmQuery,
    QnmResult,
    QnmSolveError,
    continuation_sweep,
    mismatch,
    schwarzschild_seed,
    solve,
)

log = logging.getLogger("kdsqnm")

EXIT_OK, EXIT_USAGE, EXIT_PARTIAL, EXIT_VALIDATION = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


def parse_range(text, cast=float):
    """``start:stop:step`` (inclusive stop), ``start:stop`` (integers), or a comma list."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [p for p in text.split(":")]
            if len(parts) == 2 and cast is int:
                lo, hi = int(parts[0]), int(parts[1])
                return list(range(lo, hi + 1))
            if len(parts) != 3:
                raise ConfigError(f"range {text!r} must be start:stop:step")
            lo, hi, step = (float(p) for p in parts)
            if not step > 0:
                raise ConfigError(f"range {text!r} needs a positive step")
            n = int(np.floor((hi - lo) / step + 1e-9)) + 1
            vals = [lo + i * step for i in range(max(n, 0))]
            vals = [cast(round(v, 12)) for v in vals]
        else:
            vals = [cast(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"cannot parse range {text!r}: {exc}") from exc
    if not vals:
        raise ConfigError(f"range {text!r} is empty")
    if any(not np.isfinite(v) for v in vals):
        raise ConfigError(f"range {text!r} has non-finite entries")
    return vals


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kdsqnm",
        description="Quasi-normal modes of slowly rotating Kerr-de Sitter black holes.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat 'key = value' file; flags override it")
        p.add_argument("--M0", type=float, default=None)
        p.add_argument("--Lambda", type=float, default=None)
        p.add_argument("--m", default=None, help="overtone index or list/range")
        p.add_argument("--l", default=None, help="multipole index")
        p.add_argument("--l-range", default=None, help="e.g. 2:6 or 2,4,6")
        p.add_argument("--k", default=None, help="azimuthal number, or 'all' for |k|<=l")
        p.add_argument("--order", type=int, default=None)
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--jobs", type=int, default=None)
        p.add_argument("--angular", choices=("auto", "barrier_top", "spectral"), default=None)
        p.add_argument("--max-iter", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--fd-step", type=float, default=None)
        p.add_argument("--plot", default=None, help="also render a figure to this path")

    p = sub.add_parser("compute", help="solve individual modes")
    common(p)
    p.add_argument("--a", default=None, help="rotation (or list/range)")
    p.add_argument("--history", action="store_true", help="record per-order frequencies")

    p = sub.add_parser("sweep", help="continuation branches in a")
    common(p)
    p.add_argument("--a-range", default=None, help="start:stop:step")
    p.add_argument("--history", action="store_true")

    p = sub.add_parser("convergence", help="successive-order differences")
    common(p)
    p.add_argument("--a", default=None)

    p = sub.add_parser("validate", help="run the acceptance suite")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    return parser


DEFAULTS = {
    "M0": "1.0",
    "Lambda": "0.03",
    "a": "0.0",
    "m": "0",
    "order": "4",
    "format": "csv",
    "jobs": "1",
    "angular": "auto",
}


def resolve_config(args):
    """Merge defaults, the optional config file and explicit flags."""
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            merged.update(io.read_config(args.config))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    for key, value in vars(args).items():
        if key in ("command", "config", "verbose") or value is None or value is False:
            continue
        merged[key] = str(value) if not isinstance(value, bool) else value
    return merged


def _params(cfg, a=0.0):
    try:
        return SpectralParams(float(cfg["M0"]), float(cfg["Lambda"]), a)
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _newton(cfg):
    kw = {}
    if "max_iter" in cfg:
        kw["max_iter"] = int(cfg["max_iter"])
    if "tol" in cfg:
        kw["tol_abs"] = float(cfg["tol"])
    if "fd_step" in cfg:
        kw["fd_step"] = float(cfg["fd_step"])
    return NewtonSettings(**kw)


def _modes(cfg):
    ms = parse_range(cfg["m"], int)
    if "l_range" in cfg:
        ls = parse_range(cfg["l_range"], int)
    elif "l" in cfg:
        ls = parse_range(cfg["l"], int)
    else:
        raise ConfigError("one of --l or --l-range is required")
    if any(m < 0 for m in ms) or any(l < 0 for l in ls):
        raise ConfigError("m and l must be non-negative")
    kspec = cfg.get("k", "all")
    modes = []
    for m in ms:
        for l in ls:
            if kspec == "all":
                ks = range(-l, l + 1)
            elif kspec == "l":
                ks = [l]
            else:
                ks = parse_range(kspec, int)
            for k in ks:
                if abs(k) > l:
                    raise ConfigError(f"need |k| <= l, got k={k}, l={l}")
                modes.append((m, l, k))
    return modes


def _query(cfg, params, m, l, k):
    try:
        return QnmQuery(
            params, m, l, k, J=int(cfg["order"]), newton=_newton(cfg),
            angular_method=cfg["angular"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _failed(query, exc, seed):
    return QnmResult(
        m=query.m, l=query.l, k=query.k, a=query.params.a, order=query.J,
        omega=complex(exc.omega) if exc.omega is not None else complex("nan"),
        residual=exc.residual if exc.residual is not None else float("nan"),
        iterations=exc.iterations, seed=seed, converged=False,
        flags=[FLAG_NOT_CONVERGED],
    )


def _solve_task(task):
    query, history = task
    seed = schwarzschild_seed(query.params, query.m, query.l)
    try:
        return solve(query, history=history)
    except QnmSolveError as exc:
        return _failed(query, exc, seed)


def _sweep_task(task):
    query, a_values, history = task
    return continuation_sweep(query, a_values, history=history)


def _map(fn, tasks, jobs):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


@contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def cmd_compute(cfg):
    a_values = parse_range(cfg["a"])
    modes = _modes(cfg)
    history = bool(cfg.get("history", False))
    tasks = []
    for a in a_values:
        params = _params(cfg, a)
        for m, l, k in modes:
            tasks.append((_query(cfg, params, m, l, k), history))
    results = _map(_solve_task, tasks, int(cfg["jobs"]))
    results.sort(key=lambda r: (r.m, r.l, r.k, r.a))
    with _output(cfg.get("out")) as fh:
        if cfg["format"] == "csv":
            io.write_csv(results, fh)
        else:
            io.write_json(io.compute_document(_params(cfg, a_values[0]), results, history), fh)
    return EXIT_OK if all(r.converged for r in results) else EXIT_PARTIAL


def cmd_sweep(cfg):
    if "a_range" not in cfg:
        raise ConfigError("--a-range is required for sweep")
    a_values = parse_range(cfg["a_range"])
    base = _params(cfg, 0.0)
    history = bool(cfg.get("history", False))
    tasks = [
        (_query(cfg, base, m, l, k), a_values, history) for m, l, k in _modes(cfg)
    ]
    branches = _map(_sweep_task, tasks, int(cfg["jobs"]))
    branches.sort(key=lambda b: (b[0].m, b[0].l, b[0].k))
    flat = [p for b in branches for p in b]
    with _output(cfg.get("out")) as fh:
        if cfg["format"] == "csv":
            io.write_csv(flat, fh)
        else:
            io.write_json(io.sweep_document(base, branches, history), fh)
    if cfg.get("plot"):
        from .plotting import plot_branches

        plot_branches(branches, cfg["plot"])
    complete = all(p.converged for p in flat) and all(len(b) == len(a_values) for b in branches)
    return EXIT_OK if complete else EXIT_PARTIAL


def cmd_convergence(cfg):
    a = float(parse_range(cfg["a"])[0])
    params = _params(cfg, a)
    J_max = int(cfg["order"])
    rows = []
    tables = {}
    for m, l, k in _modes(cfg):
        query = _query(cfg, params, m, l, k)
        try:
            res = solve(query, history=True)
        except QnmSolveError as exc:
            rows.append(_failed(query, exc, schwarzschild_seed(params, m, l)))
            continue
        tables[(m, l, k)] = res
        for j in range(1, J_max + 1):
            w = res.order_omegas[j]
            resid = abs(mismatch(query, w, j)[0])
            rows.append(replace(res, order=j, omega=w, residual=resid, order_omegas={}))
    rows.sort(key=lambda r: (r.m, r.l, r.k, r.order))
    with _output(cfg.get("out")) as fh:
        if cfg["format"] == "csv":
            io.write_csv(rows, fh)
        else:
            io.write_json(io.compute_document(params, rows), fh)
    if cfg.get("plot") and tables:
        from .plotting import plot_convergence

        keys = sorted(tables, key=lambda t: t[1])
        ls = [key[1] for key in keys]
        diffs = [
            [abs(tables[key].order_omegas[j + 1] - tables[key].order_omegas[j])
             for j in range(1, J_max)]
            for key in keys
        ]
        plot_convergence(ls, diffs, cfg["plot"])
    return EXIT_OK if all(r.converged for r in rows) else EXIT_PARTIAL


def cmd_validate(level):
    print(f"kdsqnm validate --level {level}")
    results = validation.run_checks(level, out=sys.stdout)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_OK if not failed else EXIT_VALIDATION


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    if args.command == "validate":
        return cmd_validate(args.level)
    try:
        cfg = resolve_config(args)
        if args.command == "compute":
            return cmd_compute(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        return cmd_convergence(cfg)
    except (ConfigError, AdmissibilityError) as exc:
        print(f"kdsqnm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"kdsqnm: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
