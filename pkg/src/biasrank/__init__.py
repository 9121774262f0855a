"""Exact bias, Schmidt rank and quadratic-family computations over F_p."""

__version__ = "0.1.0"

from .charsum import bias, level_counts, squared_modulus
from .gfcore import AffineSubspace, BudgetError, LinearForm, Subspace, UsageError
from .poly import Polynomial, discrete_derivative, iterated_derivative, restrict
from .quadfamily import QuadFamily, admissible_density, regularity, regularize, zero_set
from .quadform import QuadraticPoly, schmidt_rank, schmidt_rank_value
from .sumset import GroupSubset, bogolyubov_search, rep_counts

__all__ = [
    "AffineSubspace",
    "BudgetError",
    "GroupSubset",
    "LinearForm",
    "Polynomial",
    "QuadFamily",
    "QuadraticPoly",
    "Subspace",
    "UsageError",
    "admissible_density",
    "bias",
    "bogolyubov_search",
    "discrete_derivative",
    "iterated_derivative",
    "level_counts",
    "regularity",
    "regularize",
    "rep_counts",
    "restrict",
    "schmidt_rank",
    "schmidt_rank_value",
    "squared_modulus",
    "zero_set",
]
