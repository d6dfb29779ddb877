"""Acceptance checks, runnable from the CLI and from the test suite.

Each check returns a :class:`CheckResult`; tolerances and runtime budgets are
module constants so the tests and the ``validate`` command share them.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .barrier_top import BarrierTopProblem, default_order, solve_expansion
from .model import FrequencySplit, SpectralParams, angular_series, find_r0, radial_series
from .quantization import g_angular, g_radial
from .solver import QnmQuery, continuation_sweep, order_convergence, solve

M0 = 1.0
LAMBDA = 0.03
SCALE = math.sqrt(1.0 - 9.0 * LAMBDA * M0**2) / (3.0 * math.sqrt(3.0) * M0)
ZEEMAN_SLOPE = (2.0 + 9.0 * LAMBDA * M0**2) / (27.0 * M0**2)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float
    budget: float

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.detail} ({self.seconds:.2f}s / {self.budget:.0f}s)"


def _timed(name, budget, fn):
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    if dt > budget:
        ok = False
        detail += f"; runtime {dt:.1f}s over budget"
    return CheckResult(name, bool(ok), detail, dt, budget)


def angular_exactness():
    """a=0: angular symbol equals l(l+1); terms beyond the third vanish."""

    def run():
        params = SpectralParams(M0, LAMBDA, 0.0)
        worst = 0.0
        for lp in range(5):
            for kabs in range(1, 11):
                for k in (kabs, -kabs):
                    l = lp + kabs
                    val = g_angular(params, lp, 0.7 - 0.1j, k, J=6)
                    err = abs(val.total - l * (l + 1)) / l**2
                    tail = max(abs(val.terms[3:])) / l**2
                    worst = max(worst, err, tail)
        return worst <= 1e-9, f"max scaled error {worst:.2e} (tol 1e-9)"

    return _timed("1 angular exactness", 5.0, run)


def radial_closed_forms():
    """a=0: leading radial term and the completed square of the first two."""

    def run():
        params = SpectralParams(M0, LAMBDA, 0.0)
        c = 3.0 * math.sqrt(3.0) * M0 / math.sqrt(1.0 - 9.0 * LAMBDA * M0**2)
        lead = 0.0
        for sigma in (0.5, 1.0, 2.0, 5.0):
            g0 = g_radial(params, 0, complex(sigma, -0.1), 0, J=1).terms[0]
            exact = 27.0 * M0**2 * sigma**2 / (1.0 - 9.0 * LAMBDA * M0**2)
            lead = max(lead, abs(g0 - exact) / exact)
        growth = 0.0
        for m in (0, 1, 2):
            offs = []
            for sigma in (1.0, 2.0, 4.0, 8.0, 16.0):
                w = complex(sigma, -0.1)
                t = g_radial(params, m, w, 0, J=1).terms
                offs.append(abs(t[0] + t[1] - (1j * (m + 0.5) + c * w) ** 2))
            growth = max(growth, max(offs) / offs[0])
        ok = lead <= 1e-10 and growth <= 1.01
        return ok, f"lambda0 rel err {lead:.1e} (tol 1e-10); offset growth {growth:.4f} (tol 1.01)"

    return _timed("2 radial closed forms", 5.0, run)


def schwarzschild_lattice():
    """a=0: distance to the leading lattice is at most C/l with C fit at l=4."""

    def run():
        params = SpectralParams(M0, LAMBDA, 0.0)
        ok = True
        parts = []
        for m in (0, 1):
            errs = {}
            for l in (4, 6, 8, 12):
                w = solve(QnmQuery(params, m, l, l)).omega
                errs[l] = abs(w - SCALE * complex(l + 0.5, -(m + 0.5)))
            C = 4 * errs[4]
            for l in (6, 8, 12):
                ok &= errs[l] <= C / l
            ok &= errs[4] > errs[6] > errs[8] > errs[12]
            parts.append(
                f"m={m}: l*err " + ",".join(f"{l * errs[l]:.6f}" for l in errs)
            )
        return ok, "; ".join(parts) + " (need l*err <= value at l=4)"

    return _timed("3 Schwarzschild-dS lattice", 30.0, run)


def zeeman_splitting():
    """Re omega(k=l) - Re omega(k=l-1) against (2 + 9 Lambda M0^2) a / 27 M0^2."""

    def run():
        worst = 0.0
        for a in (0.01, 0.02):
            params = SpectralParams(M0, LAMBDA, a)
            for l in (4, 6):
                top = solve(QnmQuery(params, 0, l, l)).omega.real
                below = solve(QnmQuery(params, 0, l, l - 1)).omega.real
                rel = abs((top - below) / (ZEEMAN_SLOPE * a) - 1.0)
                worst = max(worst, rel)
        return worst <= 0.30, f"max relative deviation {worst:.3f} (tol 0.30)"

    return _timed("4 Zeeman splitting", 60.0, run)


def homogeneity(n_cases=10, seed=20240):
    """Each term scales as s^(2-j) under (Re omega, k) -> (s Re omega, s k)."""

    def run():
        rng = np.random.default_rng(seed)
        s = 2.0
        worst = 0.0
        for _ in range(n_cases):
            a = rng.uniform(0.0, 0.15)
            params = SpectralParams(M0, LAMBDA, a)
            sigma = rng.uniform(0.4, 1.5)
            nu = rng.uniform(-0.3, -0.02)
            k = rng.uniform(1.0, 4.0) * rng.choice([-1.0, 1.0])
            m = int(rng.integers(0, 3))
            w, ws = complex(sigma, nu), complex(s * sigma, nu)
            for fn, idx in ((g_radial, m), (g_angular, m)):
                t1 = fn(params, idx, w, k, J=4).terms
                t2 = fn(params, idx, ws, s * k, J=4).terms
                for j in range(5):
                    ref = s ** (2 - j) * t1[j]
                    scale = max(abs(ref), abs(t2[j]))
                    if scale == 0.0:
                        continue
                    worst = max(worst, abs(t2[j] - ref) / scale)
        return worst <= 1e-10, f"max relative deviation {worst:.1e} (tol 1e-10)"

    return _timed("5 homogeneity", 5.0, run)


def order_slopes():
    """a=0.1, k=l, m=0, l=2..10: log-log slope of successive-order differences."""

    def run():
        params = SpectralParams(M0, LAMBDA, 0.1)
        ls = np.arange(2, 11)
        diffs = np.array(
            [order_convergence(QnmQuery(params, 0, int(l), int(l)), 4).differences for l in ls]
        )
        slopes = [np.polyfit(np.log(ls), np.log(diffs[:, j]), 1)[0] for j in range(3)]
        ok = all(sl <= -1.0 for sl in slopes)
        txt = ", ".join(f"J={j + 1}: {sl:.3f}" for j, sl in enumerate(slopes))
        return ok, f"slopes {txt} (need <= -1)"

    return _timed("6 order convergence", 120.0, run)


def _engine_cases(n_cases, seed):
    rng = np.random.default_rng(seed)
    for i in range(n_cases):
        a = rng.uniform(0.0, 0.2)
        params = SpectralParams(M0, LAMBDA, a)
        sigma = rng.uniform(0.3, 3.0)
        nu = rng.uniform(-0.5, 0.0)
        m = int(rng.integers(0, 4))
        J = int(rng.integers(2, 7))
        split = FrequencySplit(sigma, nu)
        if i % 2 == 0:
            k = float(rng.integers(-5, 6))

            def data(N, params=params, split=split, k=k):
                r0 = find_r0(params, split.sigma, k)
                return radial_series(params, split, k, r0, N)
        else:
            k = float(rng.integers(1, 9)) * rng.choice([-1.0, 1.0])

            def data(N, params=params, split=split, k=k):
                return angular_series(params, split, k, N)
        yield m, J, data


def engine_residuals(n_cases=50, seed=7):
    """Transport, left-null, gauge and truncation-refinement diagnostics."""

    def run():
        worst = {"transport": 0.0, "null": 0.0, "gauge": 0.0, "refine": 0.0}
        for m, J, data in _engine_cases(n_cases, seed):
            N = default_order(m, J)
            e1 = solve_expansion(BarrierTopProblem(*_split(data(N)), m, J))
            e2 = solve_expansion(BarrierTopProblem(*_split(data(N + 8)), m, J))
            d = e1.diagnostics
            worst["transport"] = max(worst["transport"], *d["transport_residuals"])
            worst["null"] = max(worst["null"], d["left_null_residual"])
            worst["gauge"] = max(worst["gauge"], *d["gauge"])
            floor = 1e-13 * abs(e1.lambdas[0])
            for l1, l2 in zip(e1.lambdas, e2.lambdas):
                dev = abs(l1 - l2) / max(abs(l1), floor / 1e-10, 1e-300)
                worst["refine"] = max(worst["refine"], dev)
        ok = (
            worst["transport"] <= 1e-10
            and worst["null"] <= 1e-12
            and worst["gauge"] <= 1e-12
            and worst["refine"] <= 1e-10
        )
        detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
        return ok, detail + " (tol 1e-10/1e-12/1e-12/1e-10)"

    return _timed("7 engine residuals", 60.0, run)


def _split(data):
    A, B0, B1, B2 = data
    return A, (B0, B1, B2)


def figure_branches(ls=(4, 6), a_step=0.01, a_max=0.25):
    """Zeeman fan: 2l+1 branches meet at a=0 and are ordered by k for a >= 0.05."""

    def run():
        a_values = np.round(np.arange(0.0, a_max + 0.5 * a_step, a_step), 12)
        base = SpectralParams(M0, LAMBDA, 0.0)
        ok = True
        spread_max = 0.0
        worst_gap = math.inf
        for l in ls:
            branches = [
                continuation_sweep(QnmQuery(base, 0, l, k), a_values)
                for k in range(-l, l + 1)
            ]
            if any(len(b) != len(a_values) or not b[-1].converged for b in branches):
                return False, f"l={l}: a branch was truncated"
            at0 = np.array([b[0].omega for b in branches])
            spread = float(np.max(np.abs(at0 - at0[0])))
            spread_max = max(spread_max, spread)
            ok &= spread <= 1e-8
            for i, a in enumerate(a_values):
                if a < 0.05 - 1e-12:
                    continue
                re = np.array([b[i].omega.real for b in branches])
                gap = float(np.min(np.diff(re)))
                worst_gap = min(worst_gap, gap)
                ok &= gap > 0.0
        return ok, f"spread at a=0 {spread_max:.1e} (tol 1e-8); min Re gap for a>=0.05 {worst_gap:.2e} (need > 0)"

    return _timed("8 Zeeman fan ordering", 300.0, run)


QUICK = (angular_exactness, radial_closed_forms, homogeneity, engine_residuals)
FULL = (
    angular_exactness,
    radial_closed_forms,
    schwarzschild_lattice,
    zeeman_splitting,
    homogeneity,
    order_slopes,
    engine_residuals,
    figure_branches,
)


def run_checks(level="quick", out=None):
    checks = QUICK if level == "quick" else FULL
    results = []
    for check in checks:
        res = check()
        results.append(res)
        if out is not None:
            print(res.line(), file=out, flush=True)
    return results
