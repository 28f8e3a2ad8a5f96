"""Numerical laboratory for the radial Euclidean Onofri inequality and the
sharp Carleson-Chang inequality on the unit ball."""

from .geometry import Dimension, GeometryConstants, constants
from .quadrature import IntegralResult, QuadratureConfig
from .functionals import FunctionalReport, NormBreakdown, cc_J, onofri_I, w_mu_norm

__all__ = [
    "Dimension",
    "GeometryConstants",
    "constants",
    "IntegralResult",
    "QuadratureConfig",
    "FunctionalReport",
    "NormBreakdown",
    "cc_J",
    "onofri_I",
    "w_mu_norm",
]
__version__ = "0.1.0"
