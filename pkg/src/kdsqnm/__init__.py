"""Quasi-normal modes of slowly rotating Kerr-de Sitter black holes.

Modes are labelled by ``(m, l, k)`` and obtained by matching a radial and an
angular quantization symbol, each computed to arbitrary order by a barrier-top
resonance expansion in Taylor-coefficient space.

>>> from kdsqnm import SpectralParams, QnmQuery, solve
>>> res = solve(QnmQuery(SpectralParams(1.0, 0.03, 0.0), m=0, l=2, k=2))
>>> round(res.omega.real, 4), round(res.omega.imag, 4)
(0.4084, -0.0839)
"""

from .barrier_top import BarrierTopProblem, ResonanceExpansion, solve_expansion
from .model import FrequencySplit, HorizonData, SpectralParams, find_r0, horizons
from .quantization import QuantizationValue, angular_spectral, g_angular, g_radial
from .series import TruncatedSeries
from .solver import (
    NewtonSettings,
    QnmQuery,
    QnmResult,
    continuation_sweep,
    order_convergence,
    schwarzschild_seed,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "BarrierTopProblem",
    "FrequencySplit",
    "HorizonData",
    "NewtonSettings",
    "QnmQuery",
    "QnmResult",
    "QuantizationValue",
    "ResonanceExpansion",
    "SpectralParams",
    "TruncatedSeries",
    "angular_spectral",
    "continuation_sweep",
    "find_r0",
    "g_angular",
    "g_radial",
    "horizons",
    "order_convergence",
    "schwarzschild_seed",
    "solve",
    "solve_expansion",
]
