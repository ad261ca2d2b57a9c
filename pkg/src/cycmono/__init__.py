"""
cycmono: discrete limiting spectra of polynomials in compact-limit and
Haar-rotated random matrices.

The package couples an exact finite-dimension Weingarten engine with a
symbolic cyclic-monotone moment evaluator, closed-form spectral
predictors, random matrix samplers and a reproducible experiment
harness; see README.md for the tour.
"""
from .errors import CapacityError, ConfigError
from .spectra import Spectrum, properly_arrange, disjoint_union, scale, metric_d, moment

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ConfigError",
    "Spectrum",
    "properly_arrange",
    "disjoint_union",
    "scale",
    "metric_d",
    "moment",
    "__version__",
]
