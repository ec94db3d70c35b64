"""The Moyal star product for constant Poisson tensors."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Tuple

from .cochain import MultiDiffOp, StarProduct, star_apply
from .formal import Exponent, NuSeries, Polynomial, monomials_up_to
from .poisson import PoissonError, PoissonTensor


def _bidiff_power(P: PoissonTensor, r: int) -> Dict[Tuple[Exponent, Exponent], Fraction]:
    """Coefficients of ``(sum_ij P^ij d_i (x) d_j)^r`` keyed by the two multi-indices."""
    m = P.dim
    base = []
    for i, j, e in P.nonzero():
        a = [0] * m
        b = [0] * m
        a[i] += 1
        b[j] += 1
        base.append((tuple(a), tuple(b), e.constant_term()))
    zero = (0,) * m
    acc: Dict[Tuple[Exponent, Exponent], Fraction] = {(zero, zero): Fraction(1)}
    for _ in range(r):
        nxt: Dict[Tuple[Exponent, Exponent], Fraction] = {}
        for (a, b), c in acc.items():
            for da, db, p in base:
                key = (tuple(x + y for x, y in zip(a, da)), tuple(x + y for x, y in zip(b, db)))
                nxt[key] = nxt.get(key, 0) + c * p
        acc = {k: v for k, v in nxt.items() if v != 0}
    return acc


def moyal_cochain(P: PoissonTensor, r: int) -> MultiDiffOp:
    """``C_r = (1 / (2^r r!)) (sum_ij P^ij d_i (x) d_j)^r``."""
    norm = Fraction(1, 2 ** r * math.factorial(r))
    zero = (0,) * P.dim
    flat = {((a, b), zero): c * norm for (a, b), c in _bidiff_power(P, r).items()}
    return MultiDiffOp._raw(2, P.dim, flat)


def moyal_star(P: PoissonTensor, order: int) -> StarProduct:
    """Moyal product ``exp((nu/2) P^rs d_{x^r} d_{y^s}) (u(x) v(y))|_{x=y}`` truncated at ``nu^order``."""
    if not P.is_constant():
        raise PoissonError("the Moyal product needs a constant Poisson tensor")
    if order < 0:
        raise ValueError("order must be non-negative")
    cochains = [moyal_cochain(P, r) for r in range(1, order + 1)]
    return StarProduct(P, cochains, name="moyal", meta={"construction": "moyal"})


def moyal_bracket(P: PoissonTensor, u, v, order: int) -> NuSeries:
    """``(u*v - v*u) / nu``, truncated at ``nu^(order-1)``."""
    s = moyal_star(P, order)
    return (star_apply(s, u, v) - star_apply(s, v, u)).divide_nu()


def central_witness(s: StarProduct, u: Polynomial, degree: int):
    """A monomial of degree <= ``degree`` not star-commuting with ``u``, or ``None``."""
    for e in monomials_up_to(s.dim, degree):
        v = Polynomial._raw(s.dim, {e: Fraction(1)})
        c = star_apply(s, u, v) - star_apply(s, v, u)
        if not c.is_zero():
            return v
    return None
