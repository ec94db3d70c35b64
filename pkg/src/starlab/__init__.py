"""Formal star products on polynomial observables, with exact verification tools."""

from .formal import NuSeries, Polynomial, format_series, parse_polynomial
from .cochain import MultiDiffOp, StarProduct, apply, assoc_defect, hochschild_d, skew_part, solve_coboundary, star_apply
from .poisson import LieAlgebra, PoissonTensor, bracket, builtin_algebra, jacobi_defect, linear_poisson
from .moyal import moyal_star
from .liestar import bernoulli_star_left, cbh_star
from .kontsevich import WeightTable, kontsevich_star
from .equiv import Equivalence, exp_ad, gauge, solve_equivalence, star_bch
from .verify import bulk_associativity

__all__ = [
    "NuSeries", "Polynomial", "format_series", "parse_polynomial", "MultiDiffOp", "StarProduct", "apply",
    "assoc_defect", "hochschild_d", "skew_part", "solve_coboundary", "star_apply", "LieAlgebra", "PoissonTensor",
    "bracket", "builtin_algebra", "jacobi_defect", "linear_poisson", "moyal_star", "bernoulli_star_left", "cbh_star",
    "WeightTable", "kontsevich_star", "Equivalence", "exp_ad", "gauge", "solve_equivalence", "star_bch",
    "bulk_associativity",
]
