"""Truncated complex Taylor series.

A :class:`TruncatedSeries` stores the coefficients ``c_0 .. c_N`` of a power
series in one variable. Every operation closes at order ``N``: coefficients
above ``N`` are dropped, never invented.
"""

from __future__ import annotations

import cmath

import numpy as np


class SeriesError(ValueError):
    """Raised for mismatched orders or non-invertible series."""


class TruncatedSeries:
    """Dense complex coefficient vector of fixed truncation order.

    Parameters
    ----------
    coeffs : array_like
        Coefficients ``c_0 .. c_N``. The truncation order is ``len(coeffs) - 1``.

    Notes
    -----
    Instances are immutable; the backing array is made read-only.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=complex).ravel()
        if c.size == 0:
            raise SeriesError("a series needs at least one coefficient")
        c.setflags(write=False)
        self._c = c

    @classmethod
    def constant(cls, value, order):
        c = np.zeros(order + 1, dtype=complex)
        c[0] = value
        return cls(c)

    @classmethod
    def zero(cls, order):
        return cls(np.zeros(order + 1, dtype=complex))

    @classmethod
    def one(cls, order):
        return cls.constant(1.0, order)

    @classmethod
    def variable(cls, order, shift=0.0):
        """The series of ``shift + y``."""
        c = np.zeros(order + 1, dtype=complex)
        c[0] = shift
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def from_polynomial(cls, coeffs, order):
        """Truncate or zero-pad polynomial coefficients (lowest first) to ``order``."""
        c = np.zeros(order + 1, dtype=complex)
        p = np.asarray(coeffs, dtype=complex)[: order + 1]
        c[: p.size] = p
        return cls(c)

    @property
    def coeffs(self):
        return self._c

    @property
    def order(self):
        return self._c.size - 1

    def __len__(self):
        return self._c.size

    def __getitem__(self, n):
        return self._c[n]

    def __repr__(self):
        return f"TruncatedSeries({self._c.tolist()!r})"

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.order == other.order and bool(np.all(self._c == other._c))

    __hash__ = None

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            _check_order(self, other)
            return other
        if np.isscalar(other):
            return TruncatedSeries.constant(other, self.order)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self._c)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return TruncatedSeries(self._c - other._c)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return TruncatedSeries(self._c * other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            return TruncatedSeries(self._c / other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return mul(self, reciprocal(other))

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise SeriesError("only non-negative integer powers are supported")
        out = TruncatedSeries.one(self.order)
        for _ in range(n):
            out = mul(out, self)
        return out

    def __call__(self, y):
        return evaluate(self, y)


def _check_order(s, t):
    if s.order != t.order:
        raise SeriesError(f"truncation orders differ: {s.order} != {t.order}")


def add(s, t):
    _check_order(s, t)
    return TruncatedSeries(s.coeffs + t.coeffs)


def mul(s, t):
    """Cauchy product truncated at the common order."""
    _check_order(s, t)
    n = s.order + 1
    return TruncatedSeries(np.convolve(s.coeffs, t.coeffs)[:n])


def reciprocal(s):
    """Series ``r`` with ``s * r = 1`` through order ``N``."""
    c = s.coeffs
    if c[0] == 0:
        raise SeriesError("series with zero constant term is not invertible")
    r = np.zeros_like(c)
    r[0] = 1.0 / c[0]
    for n in range(1, c.size):
        r[n] = -np.dot(c[1 : n + 1], r[n - 1 :: -1]) / c[0]
    return TruncatedSeries(r)


def sqrt(s):
    """Principal square root, the constant term having positive real part.

    Raises
    ------
    SeriesError
        If the constant term lies on the closed negative real axis.
    """
    c = s.coeffs
    c0 = complex(c[0])
    if c0.real <= 0.0 and abs(c0.imag) <= 1e-14 * abs(c0):
        raise SeriesError(f"constant term {c0!r} lies on the branch cut of sqrt")
    t = np.zeros_like(c)
    t[0] = cmath.sqrt(c0)
    for n in range(1, c.size):
        acc = np.dot(t[1:n], t[n - 1 : 0 : -1]) if n > 1 else 0.0
        t[n] = (c[n] - acc) / (2.0 * t[0])
    return TruncatedSeries(t)


def derivative(s):
    """Term-by-term derivative.

    The result keeps length ``N + 1`` with a zero top coefficient, so its
    trustworthy order is ``N - 1``.
    """
    c = s.coeffs
    d = np.zeros_like(c)
    d[:-1] = c[1:] * np.arange(1, c.size)
    return TruncatedSeries(d)


def shift_down(s, k):
    """Coefficients of ``s(y) / y**k`` after dropping the first ``k`` terms.

    The top ``k`` slots are zero-padded, so ``k`` orders of accuracy are lost.
    """
    c = s.coeffs
    d = np.zeros_like(c)
    if k < c.size:
        d[: c.size - k] = c[k:]
    return TruncatedSeries(d)


def shift_up(s, k=1):
    """Coefficients of ``y**k * s(y)`` truncated at order ``N``."""
    c = s.coeffs
    d = np.zeros_like(c)
    if k < c.size:
        d[k:] = c[: c.size - k]
    return TruncatedSeries(d)


def rotate_variable(s, phase):
    """Substitute ``y = phase * y'``: ``c_n -> c_n * phase**n``."""
    if abs(abs(phase) - 1.0) > 1e-12:
        raise SeriesError(f"phase must have unit modulus, got |phase|={abs(phase)}")
    c = s.coeffs
    return TruncatedSeries(c * np.power(complex(phase), np.arange(c.size)))


def evaluate(s, y):
    """Horner evaluation of the truncated polynomial."""
    acc = 0j
    for cn in s.coeffs[::-1]:
        acc = acc * y + cn
    return complex(acc)
