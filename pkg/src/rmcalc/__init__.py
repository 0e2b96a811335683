"""Symbolic-numeric calculator for limiting eigenvalue distributions of
algebraic random matrices.

The core object is an exact bivariate polynomial whose roots (in the first
variable) contain the Stieltjes transform of a limiting spectral measure.
Operational laws combine such polynomials under deterministic and stochastic
matrix operations; the numeric layer extracts densities, moment series, and
Monte Carlo verification from them.
"""

from .bipoly import BiPoly, BiPolyError
from .density import DensityError, DensityProfile, density_grid
from .dsl import DslError, parse, to_distribution, to_text
from .encodings import EncodedDistribution, EncodingError, KIND_LABELS, \
    convert
from .moments import MomentError, MomentSeries, Recurrence, cumulant_series, \
    fit_recurrence, moment_series
from .oplaws import AtomicSpec, MobiusParams, OperationalLawError

__all__ = [
    "AtomicSpec",
    "BiPoly",
    "BiPolyError",
    "DensityError",
    "DensityProfile",
    "DslError",
    "EncodedDistribution",
    "EncodingError",
    "KIND_LABELS",
    "MobiusParams",
    "MomentError",
    "MomentSeries",
    "OperationalLawError",
    "Recurrence",
    "convert",
    "cumulant_series",
    "density_grid",
    "fit_recurrence",
    "moment_series",
    "parse",
    "to_distribution",
    "to_text",
]

__version__ = "0.1.0"
