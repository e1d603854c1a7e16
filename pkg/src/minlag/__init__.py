"""Explicit minimal Lagrangian extensions of earthquakes and power maps.

Submodules: :mod:`geometry`, :mod:`special_functions`,
:mod:`earthquake_family`, :mod:`power_family`, :mod:`qc_analysis`,
:mod:`crossratio_norm`, :mod:`experiments`, :mod:`verification`, :mod:`cli`.
"""

from .errors import (
    BisectionFailure,
    DegenerateQuadruple,
    DomainError,
    MinlagError,
    NonPositiveMetric,
    NoConvergence,
)
from .geometry import BoundaryPoint, Mobius, Quadruple, cross_ratio, complete_symmetric
from .earthquake_family import EarthquakeParams, lambda_k
from .power_family import PowerParams
from .crossratio_norm import NormConfig, NormEstimate, estimate_norm

__version__ = "0.1.0"
