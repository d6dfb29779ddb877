"""Kerr-de Sitter geometry and Taylor data for the radial and angular problems.

Units are geometric (G = c = 1) with the mass ``M0`` as the free length scale.
Frequencies are in inverse length, the cosmological constant in inverse
length squared.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy import optimize

from .series import TruncatedSeries, reciprocal, rotate_variable


class AdmissibilityError(ValueError):
    """The black-hole parameters are outside the supported region."""


class TrappedPointError(RuntimeError):
    """The radial trapped point could not be located."""


@dataclass(frozen=True)
class HorizonData:
    r_minus: float
    r_plus: float


@dataclass(frozen=True)
class FrequencySplit:
    """Real and imaginary parts of a complex frequency, kept separate.

    The homogeneous splitting of the symbols treats ``sigma = Re(omega)`` and
    ``nu = Im(omega)`` differently, so the split is carried explicitly.
    """

    sigma: float
    nu: float

    @classmethod
    def from_omega(cls, omega):
        omega = complex(omega)
        return cls(omega.real, omega.imag)

    @property
    def omega(self):
        return complex(self.sigma, self.nu)


def _delta_poly(M0, Lambda, a):
    # (r^2 + a^2)(1 - Lambda r^2/3) - 2 M0 r, lowest power first
    alpha = Lambda * a * a / 3.0
    return Polynomial([a * a, -2.0 * M0, 1.0 - alpha, 0.0, -Lambda / 3.0])


def _raw_horizons(M0, Lambda, a):
    delta = _delta_poly(M0, Lambda, a)
    roots = delta.roots()
    scale = max(M0, 1.0)
    real = sorted(
        r.real for r in roots if abs(r.imag) <= 1e-7 * scale and r.real > 0.0
    )
    if len(real) < 2:
        raise AdmissibilityError(
            f"Delta_r has no positivity interval (M0={M0}, Lambda={Lambda}, a={a})"
        )
    d1 = delta.deriv()
    polished = []
    for r in real[-2:]:
        try:
            r = optimize.newton(delta, r, fprime=d1, tol=1e-15 * r, maxiter=50)
        except RuntimeError:
            pass
        polished.append(float(r))
    r_minus, r_plus = polished
    if not r_minus < r_plus or delta(0.5 * (r_minus + r_plus)) <= 0.0:
        raise AdmissibilityError(
            f"Delta_r has no positivity interval (M0={M0}, Lambda={Lambda}, a={a})"
        )
    return HorizonData(r_minus, r_plus)


@dataclass(frozen=True)
class SpectralParams:
    """Black-hole parameters ``(M0, Lambda, a)``.

    Construction fails with :class:`AdmissibilityError` unless
    ``M0 > 0``, ``Lambda > 0``, ``9 Lambda M0^2 < 1``, the horizons
    ``r_- < r_+`` exist, and the radial trapped point can be located for
    ``(sigma, k) = (1, 0)``.
    """

    M0: float
    Lambda: float
    a: float = 0.0

    def __post_init__(self):
        for name in ("M0", "Lambda", "a"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise AdmissibilityError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, float(v))
        if self.M0 <= 0.0:
            raise AdmissibilityError(f"M0 must be positive, got {self.M0}")
        if self.Lambda <= 0.0:
            raise AdmissibilityError(f"Lambda must be positive, got {self.Lambda}")
        if 9.0 * self.Lambda * self.M0**2 >= 1.0:
            raise AdmissibilityError(
                f"need 9*Lambda*M0^2 < 1, got {9.0 * self.Lambda * self.M0**2}"
            )
        hz = _raw_horizons(self.M0, self.Lambda, self.a)
        object.__setattr__(self, "_horizons", hz)
        try:
            find_r0(self, 1.0, 0.0)
        except TrappedPointError as exc:
            raise AdmissibilityError(f"rotation a={self.a} too large: {exc}") from exc

    @property
    def alpha(self):
        return self.Lambda * self.a**2 / 3.0

    @property
    def scale_factor(self):
        """The prefactor ``sqrt(1 - 9 Lambda M0^2) / (3 sqrt(3) M0)``."""
        return math.sqrt(1.0 - 9.0 * self.Lambda * self.M0**2) / (
            3.0 * math.sqrt(3.0) * self.M0
        )


def delta_r(params, r):
    """``(r^2 + a^2)(1 - Lambda r^2 / 3) - 2 M0 r``."""
    a2 = params.a**2
    return (r * r + a2) * (1.0 - params.Lambda * r * r / 3.0) - 2.0 * params.M0 * r


def horizons(params):
    """Event and cosmological horizons ``r_- < r_+`` (roots of ``Delta_r``)."""
    return params._horizons


def _r0_equation(params, sigma, k):
    # Numerator of dB0/dr up to the nonvanishing factor
    # ((r^2 + a^2) sigma - a k) / Delta_r^2:
    #   4 r sigma Delta_r - ((r^2 + a^2) sigma - a k) Delta_r'
    a = params.a
    delta = _delta_poly(params.M0, params.Lambda, a)
    p = Polynomial([a * a * sigma - a * k, 0.0, sigma])
    return Polynomial([0.0, 4.0 * sigma]) * delta - p * delta.deriv()


def find_r0(params, sigma, k):
    """Radial trapped point: the maximum of the real part of the potential.

    Parameters
    ----------
    params : SpectralParams
    sigma : float
        Real part of the frequency, positive.
    k : float
        Azimuthal number (real values allowed for finite differences).

    Returns
    -------
    float
        The critical point ``r0`` in ``(r_-, r_+)``.
    """
    if not sigma > 0.0:
        raise TrappedPointError(f"sigma must be positive, got {sigma}")
    h = _r0_equation(params, sigma, k)
    dh = h.deriv()
    x0 = 3.0 * params.M0
    try:
        r0 = optimize.newton(h, x0, fprime=dh, tol=1e-14 * x0, maxiter=100)
    except (RuntimeError, ZeroDivisionError) as exc:
        raise TrappedPointError(f"Newton iteration for r0 failed: {exc}") from exc
    r0 = float(r0)
    hz = params._horizons
    if not hz.r_minus < r0 < hz.r_plus:
        raise TrappedPointError(f"r0={r0} outside ({hz.r_minus}, {hz.r_plus})")
    a = params.a
    delta = _delta_poly(params.M0, params.Lambda, a)
    p = Polynomial([a * a * sigma - a * k, 0.0, sigma])
    if abs(p(r0)) < 1e-12 * sigma * r0 * r0:
        raise TrappedPointError("(r^2 + a^2) sigma - a k vanishes at r0")
    # B0 = -(1+alpha)^2 p^2 / Delta; its second derivative at r0 must be negative
    y = Polynomial([r0, 1.0])
    pp = p(y)
    dd = delta(y)
    b0 = -(pp * pp).coef
    # second Taylor coefficient of b0/dd at y=0
    d0, d1, d2 = (list(dd.coef) + [0.0, 0.0, 0.0])[:3]
    n0, n1, n2 = (list(b0) + [0.0, 0.0, 0.0])[:3]
    q0 = n0 / d0
    q1 = (n1 - q0 * d1) / d0
    q2 = (n2 - q0 * d2 - q1 * d1) / d0
    if not q2 < 0.0:
        raise TrappedPointError(f"r0={r0} is not a maximum of the potential")
    return r0


def _taylor(poly, center, N):
    shifted = poly(Polynomial([center, 1.0]))
    return TruncatedSeries.from_polynomial(shifted.coef, N)


def radial_series(params, split, k, r0, N):
    """Taylor data ``(A, B0, B1, B2)`` in ``y = r - r0`` for the radial problem.

    ``A`` is ``Delta_r``; ``B0 + B1 + B2`` is the radial potential
    ``-Delta_r^{-1} (1 + alpha)^2 ((r^2 + a^2) omega - a k)^2`` split by powers
    of ``nu = Im(omega)``.
    """
    hz = params._horizons
    if not hz.r_minus < r0 < hz.r_plus:
        raise TrappedPointError(f"r0={r0} outside ({hz.r_minus}, {hz.r_plus})")
    a = params.a
    gamma = (1.0 + params.alpha) ** 2
    sigma, nu = split.sigma, split.nu
    A = _taylor(_delta_poly(params.M0, params.Lambda, a), r0, N)
    q = _taylor(Polynomial([a * a, 0.0, 1.0]), r0, N)
    p = q * sigma - a * k
    inv = reciprocal(A)
    B0 = -gamma * (p * p * inv)
    B1 = (-2j * gamma * nu) * (p * q * inv)
    B2 = (gamma * nu * nu) * (q * q * inv)
    return A, B0, B1, B2


ANGULAR_PHASE = cmath.exp(-0.25j * math.pi)


def angular_series(params, split, k, N):
    """Taylor data ``(A, B0, B1, B2)`` for the rotated angular problem.

    The angular operator in ``y = cos(theta)`` is rewritten in ``y'`` with
    ``y = exp(-i pi/4) y'`` and multiplied by ``-i``, which turns the bottom of
    the well at ``y = 0`` into a barrier top. Eigenvalues of the rotated
    operator are ``-i`` times those of the original one.
    """
    a = params.a
    alpha = params.alpha
    gamma = (1.0 + alpha) ** 2
    sigma, nu = split.sigma, split.nu
    one_minus = TruncatedSeries.from_polynomial([1.0, 0.0, -1.0], N)
    A = TruncatedSeries.from_polynomial(
        (Polynomial([1.0, 0.0, -1.0]) * Polynomial([1.0, 0.0, alpha])).coef, N
    )
    inv = reciprocal(A)
    p = one_minus * (a * sigma) - k
    q = one_minus * a
    w0 = gamma * (p * p * inv)
    w1 = (2j * gamma * nu) * (p * q * inv)
    w2 = (-gamma * nu * nu) * (q * q * inv)
    rot = lambda s: rotate_variable(s, ANGULAR_PHASE)  # noqa: E731
    return (
        rot(A),
        -1j * rot(w0),
        -1j * rot(w1),
        -1j * rot(w2),
    )
