"""Radial and angular quantization symbols.

The radial symbol ``G^r(m, omega, k)`` and the angular symbol
``G^theta(l', omega, k)`` are the finite sums ``sum_{j <= J} lambda_j`` of the
barrier-top expansion applied to the two separated operators. A QNM solves
``G^r = G^theta``.

Sign conventions
----------------
* The radial resolvent inverts ``P_r + lambda``, so the radial symbol is minus
  the barrier-top eigenvalue of ``D_r Delta_r D_r + V_r``.
* The angular problem is run on the rotated operator ``-i P_y``; its
  eigenvalue terms are mapped back by ``lambda_j = i lambda'_j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, special

from .barrier_top import (
    BarrierTopProblem,
    default_order,
    solve_expansion,
)
from .model import FrequencySplit, angular_series, find_r0, radial_series


@dataclass
class QuantizationValue:
    total: complex
    terms: np.ndarray
    side: str
    method: str = "barrier_top"
    diagnostics: dict = field(default_factory=dict)


def g_radial(params, m, omega, k, J=4, N=None):
    """Radial symbol through order ``J``.

    Parameters
    ----------
    params : SpectralParams
    m : int
        Radial overtone index.
    omega : complex
        Frequency with positive real part.
    k : float
        Azimuthal number.
    J : int, optional
        Highest order kept.
    N : int, optional
        Taylor truncation order; defaults to the accuracy budget for ``(m, J)``.
    """
    split = FrequencySplit.from_omega(omega)
    if N is None:
        N = default_order(m, J)
    r0 = find_r0(params, split.sigma, k)
    A, B0, B1, B2 = radial_series(params, split, k, r0, N)
    exp = solve_expansion(BarrierTopProblem(A, (B0, B1, B2), m, J))
    terms = -exp.lambdas
    diag = dict(exp.diagnostics, r0=r0)
    return QuantizationValue(complex(terms.sum()), terms, "radial", diagnostics=diag)


def _angular_barrier_top(params, l_prime, omega, k, J, N):
    split = FrequencySplit.from_omega(omega)
    if N is None:
        N = default_order(l_prime, J)
    A, B0, B1, B2 = angular_series(params, split, k, N)
    exp = solve_expansion(BarrierTopProblem(A, (B0, B1, B2), l_prime, J))
    terms = 1j * exp.lambdas
    return QuantizationValue(
        complex(terms.sum()), terms, "angular", diagnostics=exp.diagnostics
    )


def use_barrier_top(l_prime, k):
    """Whether ``(l', k)`` lies in the regime ``l' = O(1)`` relative to ``|k|``.

    Used by ``method="auto"``: the barrier-top expansion is an asymptotic
    series in ``1/|k|`` at fixed ``l'`` and degrades quickly once
    ``l' > |k|``; it is undefined for ``k = 0``.
    """
    return k != 0 and l_prime <= abs(k)


def g_angular(params, l_prime, omega, k, J=4, N=None, method="barrier_top"):
    """Angular symbol through order ``J``.

    ``method`` is ``"barrier_top"`` (the asymptotic expansion), ``"spectral"``
    (:func:`angular_spectral`) or ``"auto"``, which picks the expansion when
    :func:`use_barrier_top` holds and the spectral eigenvalue otherwise. The
    choice is recorded in ``QuantizationValue.method``.
    """
    if l_prime < 0:
        raise ValueError(f"l_prime must be non-negative, got {l_prime}")
    if method not in ("auto", "barrier_top", "spectral"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        method = "barrier_top" if use_barrier_top(l_prime, k) else "spectral"
    if method == "barrier_top":
        return _angular_barrier_top(params, l_prime, omega, k, J, N)
    l = l_prime + abs(int(round(k)))
    value = angular_spectral(params, l, omega, k)
    return QuantizationValue(
        value, np.array([value]), "angular", method="spectral"
    )


def angular_spectral(params, l, omega, k, n_extra=24):
    """Angular eigenvalue from a Galerkin discretization.

    Expands in normalized associated Legendre functions of order ``|k|`` and
    returns the eigenvalue continuously connected to ``l(l+1)`` at ``a = 0``.
    Independent of the barrier-top machinery; ``k`` must be an integer.
    """
    kk = int(round(k))
    if kk != k:
        raise ValueError("angular_spectral needs an integer k")
    mk = abs(kk)
    if l < mk:
        raise ValueError(f"need l >= |k|, got l={l}, k={k}")
    degrees = np.arange(mk, l + n_extra + 1)
    y, w = special.roots_legendre(2 * degrees[-1] + 40)
    P, dP = special.assoc_legendre_p(
        degrees[:, None], mk, y[None, :], norm=True, diff_n=1
    )
    a, alpha = params.a, params.alpha
    gamma = (1.0 + alpha) ** 2
    omega = complex(omega)
    one_m = 1.0 - y * y
    A = one_m * (1.0 + alpha * y * y)
    # (a w (1-y^2) - k)^2 / ((1-y^2)(1+alpha y^2)), 1/(1-y^2) kept only on k^2
    W = gamma * (
        a * a * omega * omega * one_m - 2.0 * a * omega * kk + kk * kk / one_m
    ) / (1.0 + alpha * y * y)
    K = (dP * (w * A)) @ dP.T + (P * (w * W)) @ P.T
    vals, vecs = linalg.eig(K)
    idx = int(np.argmax(np.abs(vecs[l - mk, :])))
    return complex(vals[idx])
