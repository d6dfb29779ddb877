"""Barrier-top resonance expansion in Taylor-coefficient space.

For ``P = D_y A(y) D_y + B0 + B1 + B2`` with ``B0`` having a nondegenerate
maximum at ``y = 0``, eigenvalues attached to outgoing WKB solutions
``exp(i psi0) (a_0 + a_1 + ...)`` are expanded as ``lambda_0 + lambda_1 + ...``
with ``lambda_j`` homogeneous of degree ``2 - j``.

The transport equations are linear systems with lower-triangular matrices
acting on Taylor coefficient vectors. The matrix ``M = L0 - B1 + lambda_1`` has
exactly one zero on its diagonal, at row ``m``; the left null functional of
``M`` restricted to rows ``0..m`` gives the solvability condition that fixes
each ``lambda_{j+1}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular, toeplitz

from .series import (
    SeriesError,
    TruncatedSeries,
    derivative,
    mul,
    shift_down,
    shift_up,
    sqrt,
)


class BarrierTopError(ValueError):
    """Input data violate the barrier-top hypotheses."""


class DegenerateSpectrumError(BarrierTopError):
    """A diagonal entry other than the quantization index vanishes."""


DEGENERACY_TOL = 1e-10
CRITICAL_TOL = 1e-8


def default_order(m, J):
    """Coefficient budget: each ``L1`` application consumes two trusted entries."""
    return m + 2 * (J + 1) + 4


@dataclass(frozen=True)
class BarrierTopProblem:
    """Taylor data of the operator together with the quantization index.

    Parameters
    ----------
    A : TruncatedSeries
        Coefficient of the second-order part, ``A(0) != 0``.
    B : tuple of TruncatedSeries
        ``(B0, B1, B2)``; homogeneous parts of degree 2, 1, 0.
    m : int
        Index of the vanishing diagonal entry.
    J : int
        Last order computed.
    """

    A: TruncatedSeries
    B: tuple
    m: int
    J: int

    def __post_init__(self):
        B = tuple(self.B)
        if len(B) != 3:
            raise BarrierTopError("B must hold exactly three series (B0, B1, B2)")
        object.__setattr__(self, "B", B)
        N = self.A.order
        if any(b.order != N for b in B):
            raise BarrierTopError("A and B_j must share one truncation order")
        if self.m < 0 or self.J < 0:
            raise BarrierTopError("m and J must be non-negative")
        need = default_order(self.m, self.J)
        if N < need:
            raise BarrierTopError(f"truncation order {N} below budget {need}")
        if self.A[0] == 0:
            raise BarrierTopError("A(0) must be nonzero")
        B0 = B[0]
        scale = max(abs(B0[0]), abs(B0[2]), 1e-300)
        if abs(B0[1]) > CRITICAL_TOL * scale:
            raise BarrierTopError(
                f"y=0 is not a critical point of B0: B0'(0)={B0[1]!r}"
            )
        if not B0[2].real < 0.0:
            raise BarrierTopError(
                f"B0''(0)/2={B0[2]!r} must have negative real part"
            )

    @property
    def N(self):
        return self.A.order


@dataclass
class ResonanceExpansion:
    lambdas: np.ndarray
    eigen_coeffs: list
    diagnostics: dict = field(default_factory=dict)

    @property
    def total(self):
        return complex(np.sum(self.lambdas))


def compute_u0(problem):
    """``U0`` with ``B0(y) = B0(0) - y^2 U0(y)``; the top two slots are padding."""
    B0 = problem.B[0]
    scale = max(abs(B0[0]), abs(B0[2]), 1e-300)
    if abs(B0[1]) > CRITICAL_TOL * scale:
        raise BarrierTopError(f"B0'(0)={B0[1]!r} is not negligible")
    return -shift_down(B0, 2)


def phase_amplitude(problem, u0=None):
    """``g = sqrt(U0 A)``, so that ``psi0' A = y g``."""
    if u0 is None:
        u0 = compute_u0(problem)
    try:
        return sqrt(mul(u0, problem.A))
    except SeriesError as exc:
        raise BarrierTopError(f"U0*A at y=0 is on the sqrt branch cut: {exc}") from exc


def multiplication_matrix(s):
    """Lower-triangular Toeplitz matrix of ``a -> s * a``."""
    c = s.coeffs
    return toeplitz(c, np.zeros_like(c))


def build_L0(problem, g=None):
    """Matrix of ``a -> 2 i g y a' + i (y g)' a``."""
    if g is None:
        g = phase_amplitude(problem)
    n = g.order + 1
    gc = g.coeffs
    yg = derivative(shift_up(g)).coeffs
    rows, cols = np.tril_indices(n)
    L0 = np.zeros((n, n), dtype=complex)
    d = rows - cols
    L0[rows, cols] = 1j * (2.0 * cols * gc[d] + yg[d])
    return L0


def build_L1(problem):
    """Matrix of ``a -> (A a')'``; entry ``(n, q)`` vanishes for ``q > n + 2``."""
    Ac = problem.A.coeffs
    n = Ac.size
    L1 = np.zeros((n, n), dtype=complex)
    for row in range(n):
        for q in range(max(1, row + 3 - n), min(row + 2, n - 1) + 1):
            L1[row, q] = (row + 1) * q * Ac[row + 2 - q]
    return L1


def lambda1(problem, g0=None):
    """``B1(0) - i (2m + 1) sqrt(U0(0) A(0))``."""
    if g0 is None:
        g0 = phase_amplitude(problem)[0]
    return complex(problem.B[1][0] - 1j * (2 * problem.m + 1) * g0)


def check_diagonal(M, m, g0):
    diag = np.abs(np.diag(M))
    others = np.delete(diag, m)
    if others.size and others.min() < DEGENERACY_TOL * abs(g0):
        bad = int(np.argmin(np.where(np.arange(diag.size) == m, np.inf, diag)))
        raise DegenerateSpectrumError(
            f"diagonal entry {bad} of L0 - B1 + lambda1 vanishes besides m={m}"
        )


def left_null_functional(M, m):
    """Coefficients ``f_0..f_m`` with ``f_m = 1`` and ``f^T M = 0`` on rows ``0..m``."""
    f = np.zeros(m + 1, dtype=M.dtype)
    f[m] = 1.0
    if m > 0:
        f[:m] = solve_triangular(M[:m, :m], -M[m, :m], lower=True, trans="T")
    return f


def apply_functional(f, v):
    return complex(np.dot(f, v[: f.size]))


def kernel_vector(M, m, N=None):
    """Kernel element with entries ``0..m-1`` zero and entry ``m`` equal to one."""
    n = M.shape[0] if N is None else N + 1
    a = np.zeros(n, dtype=M.dtype)
    a[m] = 1.0
    if m + 1 < n:
        rhs = -M[m + 1 : n, m]
        a[m + 1 :] = solve_triangular(M[m + 1 : n, m + 1 : n], rhs, lower=True)
    return a


def solve_gauged(M, rhs, m, f):
    """Solve ``M a = rhs`` skipping row ``m``, with the gauge ``f(a) = 0``.

    Returns the solution and the residual of the skipped row.
    """
    n = M.shape[0]
    a = np.zeros(n, dtype=complex)
    if m > 0:
        a[:m] = solve_triangular(M[:m, :m], rhs[:m], lower=True)
        a[m] = -np.dot(f[:m], a[:m])
    consistency = abs(np.dot(M[m, :m], a[:m]) - rhs[m])
    if m + 1 < n:
        r = rhs[m + 1 :] - M[m + 1 :, : m + 1] @ a[: m + 1]
        a[m + 1 :] = solve_triangular(M[m + 1 :, m + 1 :], r, lower=True)
    return a, consistency


def solve_expansion(problem):
    """Compute ``lambda_0 .. lambda_J`` and the amplitude coefficients.

    Returns
    -------
    ResonanceExpansion
        ``lambdas[j]`` is homogeneous of degree ``2 - j``; ``eigen_coeffs[j]``
        holds the Taylor coefficients of ``a_j``, trustworthy on entries
        ``0 .. N - 2(j + 1)``.
    """
    m, J, N = problem.m, problem.J, problem.N
    B0, B1, B2 = problem.B
    lam0 = complex(B0[0])
    g = phase_amplitude(problem)
    g0 = complex(g[0])
    lam1 = lambda1(problem, g0)

    L0 = build_L0(problem, g)
    L1 = build_L1(problem)
    M = L0 - multiplication_matrix(B1) + lam1 * np.eye(N + 1)
    check_diagonal(M, m, g0)
    f = left_null_functional(M, m)
    a0 = kernel_vector(M, m)
    fa0 = apply_functional(f, a0)

    # B_{l+1} for l >= 1; only B2 is nonzero for quadratic potentials
    Bhigh = {1: multiplication_matrix(B2)}

    lambdas = [lam0, lam1]
    amps = [a0]
    transport, consistency, gauge = [], [], []
    norm_M = np.linalg.norm(M, ord=np.inf)
    null_res = np.linalg.norm((f @ M[: m + 1, :]), ord=np.inf)

    for j in range(1, J + 1):
        rhs = -L1 @ amps[j - 1]
        for l in range(1, j + 1):
            if l in Bhigh:
                rhs = rhs + Bhigh[l] @ amps[j - l]
        for l in range(1, j):
            rhs = rhs - lambdas[l + 1] * amps[j - l]
        lam_next = apply_functional(f, rhs) / fa0
        rhs = rhs - lam_next * a0
        lambdas.append(lam_next)
        aj, cons = solve_gauged(M, rhs, m, f)
        amps.append(aj)
        window = N - 2 * (j + 1) + 1
        res = M[:window] @ aj - rhs[:window]
        scale = max(np.linalg.norm(rhs[:window]), 1e-300)
        transport.append(float(np.linalg.norm(res) / scale))
        consistency.append(float(cons / max(np.linalg.norm(rhs[: m + 1]), 1e-300)))
        gauge.append(abs(apply_functional(f, aj)))

    diagnostics = {
        "g0": g0,
        "f": f,
        "f_a0": fa0,
        "M_mm": abs(M[m, m]),
        "left_null_residual": float(null_res / norm_M),
        "kernel_residual": float(np.linalg.norm(M @ a0, ord=np.inf) / norm_M),
        "transport_residuals": transport,
        "consistency_residuals": consistency,
        "gauge": gauge,
    }
    return ResonanceExpansion(
        lambdas=np.array(lambdas[: J + 1], dtype=complex),
        eigen_coeffs=amps,
        diagnostics=diagnostics,
    )
