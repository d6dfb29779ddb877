"""Solve the matching equation ``G^r(m, omega, k) = G^theta(l', omega, k)``.

The symbols depend on ``Re(omega)`` through the trapped point and on
``Im(omega)`` polynomially, so they are not treated as holomorphic: Newton's
method runs on the map ``(sigma, nu) -> (Re h, Im h)`` in two real variables
with a central-difference Jacobian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .model import SpectralParams
from .quantization import g_angular, g_radial

FLAG_NOT_CONVERGED = "not_converged"
FLAG_ANOMALOUS = "im_omega_nonnegative"
FLAG_SPECTRAL = "angular_spectral"
FLAG_NEGATIVE_K = "k_nonpositive"


class QnmSolveError(RuntimeError):
    """Newton iteration failed."""

    def __init__(self, message, omega=None, residual=None, iterations=0):
        super().__init__(message)
        self.omega = omega
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class NewtonSettings:
    max_iter: int = 50
    tol_abs: float | None = None
    fd_step: float = 1e-6
    damping: int = 8

    def tolerance(self, omega):
        if self.tol_abs is not None:
            return self.tol_abs
        return 1e-9 * (1.0 + abs(omega) ** 2)


@dataclass(frozen=True)
class QnmQuery:
    params: SpectralParams
    m: int
    l: int
    k: int
    J: int = 4
    newton: NewtonSettings = field(default_factory=NewtonSettings)
    angular_method: str = "auto"
    m_max: int = 12

    def __post_init__(self):
        if self.l < 0 or self.m < 0:
            raise ValueError("m and l must be non-negative")
        if abs(self.k) > self.l:
            raise ValueError(f"need |k| <= l, got k={self.k}, l={self.l}")
        if self.m > self.m_max:
            raise ValueError(f"m={self.m} exceeds the guard m_max={self.m_max}")
        if self.J < 0:
            raise ValueError("order J must be non-negative")

    @property
    def l_prime(self):
        return self.l - abs(self.k)


@dataclass
class QnmResult:
    m: int
    l: int
    k: int
    a: float
    order: int
    omega: complex
    residual: float
    iterations: int
    seed: complex
    converged: bool = True
    flags: list = field(default_factory=list)
    order_omegas: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "m": self.m,
            "l": self.l,
            "k": self.k,
            "a": self.a,
            "order": self.order,
            "re_omega": self.omega.real,
            "im_omega": self.omega.imag,
            "residual": self.residual,
            "iterations": self.iterations,
            "seed": [self.seed.real, self.seed.imag],
            "converged": self.converged,
            "flags": list(self.flags),
            "order_omegas": {
                str(j): [w.real, w.imag] for j, w in sorted(self.order_omegas.items())
            },
        }


def schwarzschild_seed(params, m, l):
    """``sqrt(1 - 9 Lambda M0^2) / (3 sqrt(3) M0) * ((l + 1/2) - i (m + 1/2))``."""
    return params.scale_factor * complex(l + 0.5, -(m + 0.5))


def mismatch(query, omega, order=None):
    """``G^r - G^theta`` at ``omega`` together with the angular method used."""
    J = query.J if order is None else order
    gr = g_radial(query.params, query.m, omega, query.k, J)
    gt = g_angular(
        query.params, query.l_prime, omega, query.k, J, method=query.angular_method
    )
    return gr.total - gt.total, gt.method


def _as_vec(z):
    return np.array([z.real, z.imag])


def _newton(query, seed, order):
    settings = query.newton
    x = np.array([seed.real, seed.imag])

    def h(x):
        if not x[0] > 0.0:
            raise QnmSolveError(f"iterate left Re(omega) > 0: {x[0]}")
        return _as_vec(mismatch(query, complex(*x), order)[0])

    hx = h(x)
    for it in range(settings.max_iter + 1):
        omega = complex(*x)
        res = float(np.hypot(*hx))
        if res <= settings.tolerance(omega):
            return omega, it
        if it == settings.max_iter:
            break
        step = settings.fd_step * (1.0 + abs(omega))
        jac = np.empty((2, 2))
        for col in range(2):
            e = np.zeros(2)
            e[col] = step
            jac[:, col] = (h(x + e) - h(x - e)) / (2.0 * step)
        if not np.all(np.isfinite(jac)) or abs(np.linalg.det(jac)) < 1e-14 * np.max(
            np.abs(jac)
        ) ** 2:
            raise QnmSolveError("Jacobian is near-singular", omega, res, it)
        dx = np.linalg.solve(jac, -hx)
        t = 1.0
        for _ in range(settings.damping + 1):
            x_new = x + t * dx
            if x_new[0] > 0.0:
                h_new = h(x_new)
                if np.hypot(*h_new) < res:
                    break
            t *= 0.5
        else:
            raise QnmSolveError("damped Newton step did not reduce |h|", omega, res, it)
        x, hx = x_new, h_new
    raise QnmSolveError(
        f"no convergence in {settings.max_iter} iterations",
        complex(*x),
        float(np.hypot(*hx)),
        settings.max_iter,
    )


def solve(query, seed=None, history=False):
    """Solve for the QNM labelled by ``(m, l, k)``.

    Parameters
    ----------
    query : QnmQuery
    seed : complex, optional
        Starting frequency; defaults to :func:`schwarzschild_seed`.
    history : bool
        Also solve at every order ``1 .. J`` and store them in
        ``QnmResult.order_omegas``.

    Raises
    ------
    QnmSolveError
        If the iteration fails.
    """
    if seed is None:
        seed = schwarzschild_seed(query.params, query.m, query.l)
    seed = complex(seed)
    orders = {}
    start = seed
    if history:
        for j in range(1, query.J):
            start, _ = _newton(query, start, j)
            orders[j] = start
    omega, iterations = _newton(query, start, query.J)
    if history:
        orders[query.J] = omega
    diff, method = mismatch(query, omega)
    residual = abs(diff)
    flags = []
    if method == "spectral":
        flags.append(FLAG_SPECTRAL)
    if query.k <= 0 and query.params.a != 0.0 and method != "spectral":
        flags.append(FLAG_NEGATIVE_K)
    if omega.imag >= 0.0:
        flags.append(FLAG_ANOMALOUS)
    return QnmResult(
        m=query.m,
        l=query.l,
        k=query.k,
        a=query.params.a,
        order=query.J,
        omega=omega,
        residual=residual,
        iterations=iterations,
        seed=seed,
        flags=flags,
        order_omegas=orders,
    )


def continuation_sweep(query, a_values, history=False):
    """Follow one ``(m, l, k)`` branch along ``a_values``.

    Each solve is seeded by the previous converged frequency. On failure the
    branch is truncated: a final unconverged :class:`QnmResult` carrying
    ``FLAG_NOT_CONVERGED`` is appended and the sweep stops.
    """
    results = []
    seed = None
    for a in a_values:
        params = SpectralParams(query.params.M0, query.params.Lambda, float(a))
        q = replace(query, params=params)
        try:
            res = solve(q, seed=seed, history=history)
        except QnmSolveError as exc:
            omega = exc.omega if exc.omega is not None else (seed or complex("nan"))
            results.append(
                QnmResult(
                    m=q.m, l=q.l, k=q.k, a=float(a), order=q.J, omega=complex(omega),
                    residual=exc.residual if exc.residual is not None else math.nan,
                    iterations=exc.iterations,
                    seed=seed if seed is not None else schwarzschild_seed(params, q.m, q.l),
                    converged=False, flags=[FLAG_NOT_CONVERGED],
                )
            )
            break
        results.append(res)
        seed = res.omega
    return results


@dataclass
class ConvergenceTable:
    orders: list
    omegas: list

    @property
    def differences(self):
        """``|omega_{J+1} - omega_J|`` for consecutive orders."""
        return [abs(b - a) for a, b in zip(self.omegas, self.omegas[1:])]


def order_convergence(query, J_max=None):
    """Solve at orders ``1 .. J_max``, each seeded from the previous one."""
    J_max = query.J if J_max is None else J_max
    seed = schwarzschild_seed(query.params, query.m, query.l)
    orders, omegas = [], []
    for j in range(1, J_max + 1):
        seed = solve(replace(query, J=j), seed=seed).omega
        orders.append(j)
        omegas.append(seed)
    return ConvergenceTable(orders, omegas)
