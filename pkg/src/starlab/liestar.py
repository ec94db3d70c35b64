"""The standard (CBH) star product on the dual of a Lie algebra.

Two independent constructions are provided:

* transfer of the product of ``U(g)`` through the symmetrization map
  ``sigma: S(g) -> U(g)``, computed in ``U(g_nu)`` where the bracket is
  ``nu [., .]`` so that each straightening step carries one power of nu;
* the Bernoulli-number formula for left multiplication by a generator.

Elements of ``U(g_nu)`` are stored in the ordered (PBW) word basis as
``{(word, nu_power): coefficient}`` with ``word`` a nondecreasing tuple of
basis indices.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from math import comb
from typing import Dict, List, Tuple

from .cochain import MultiDiffOp, StarProduct
from .formal import Exponent, NuSeries, Polynomial, monomials_up_to
from .poisson import LieAlgebra, linear_poisson

Word = Tuple[int, ...]
UElem = Dict[Tuple[Word, int], Fraction]
SElem = Dict[Tuple[Exponent, int], Fraction]


class ExtractionError(ValueError):
    """The CBH cochain does not fit the bounded bidifferential ansatz."""

    category = "extraction"


class AlgebraMismatchError(ValueError):
    category = "validation"


def _add_into(acc: dict, key, v):
    nv = acc.get(key, 0) + v
    if nv:
        acc[key] = nv
    else:
        acc.pop(key, None)


class EnvelopingAlgebra:
    """Straightening and symmetrization in ``U(g_nu)`` with memo tables."""

    def __init__(self, g: LieAlgebra, nu_max: int):
        self.g = g
        self.n = g.dim
        # powers of nu above nu_max are dropped everywhere
        self.nu_max = nu_max
        self._rmul: Dict[Tuple[Word, int], UElem] = {}
        self._sigma: Dict[Exponent, UElem] = {}
        self._sigma_inv: Dict[Word, SElem] = {}

    # -- PBW word arithmetic ---------------------------------------------
    def rmul_gen(self, word: Word, i: int) -> UElem:
        """``word . X_i`` in the PBW basis."""
        key = (word, i)
        hit = self._rmul.get(key)
        if hit is not None:
            return hit
        if not word or word[-1] <= i:
            out = {(word + (i,), 0): Fraction(1)}
        else:
            # w' X_j X_i = (w' X_i) X_j + nu w' [X_j, X_i]
            head, j = word[:-1], word[-1]
            out: UElem = {}
            top = self.nu_max
            for (w, p), c in self.rmul_gen(head, i).items():
                for (w2, p2), c2 in self.rmul_gen(w, j).items():
                    if p + p2 <= top:
                        _add_into(out, (w2, p + p2), c * c2)
            if top >= 1:
                for k, ck in self.g.structure(j, i).items():
                    for (w, p), c in self.rmul_gen(head, k).items():
                        if p < top:
                            _add_into(out, (w, p + 1), ck * c)
        self._rmul[key] = out
        return out

    def mul(self, a: UElem, b: UElem) -> UElem:
        out: UElem = {}
        top = self.nu_max
        for (wb, pb), cb in b.items():
            cur = {w: c for w, c in a.items() if w[1] + pb <= top}
            for i in wb:
                nxt: UElem = {}
                for (w, p), c in cur.items():
                    for (w2, p2), c2 in self.rmul_gen(w, i).items():
                        if p + p2 + pb <= top:
                            _add_into(nxt, (w2, p + p2), c * c2)
                cur = nxt
            for (w, p), c in cur.items():
                _add_into(out, (w, p + pb), c * cb)
        return out

    # -- symmetrization ----------------------------------------------------
    def sigma(self, alpha: Exponent) -> UElem:
        """``sigma(X^alpha)``: the symmetrized product, in the PBW basis."""
        alpha = tuple(alpha)
        hit = self._sigma.get(alpha)
        if hit is not None:
            return hit
        k = sum(alpha)
        if k == 0:
            out = {((), 0): Fraction(1)}
        else:
            # sigma(X^alpha) = (1/k) sum_i alpha_i X_i sigma(X^(alpha - e_i))
            out: UElem = {}
            for i, a in enumerate(alpha):
                if not a:
                    continue
                rest = list(alpha)
                rest[i] -= 1
                prod = self.mul({((i,), 0): Fraction(1)}, self.sigma(tuple(rest)))
                w = Fraction(a, k)
                for key, c in prod.items():
                    _add_into(out, key, w * c)
        self._sigma[alpha] = out
        return out

    def _word_exponent(self, word: Word) -> Exponent:
        e = [0] * self.n
        for i in word:
            e[i] += 1
        return tuple(e)

    def sigma_inv_word(self, word: Word) -> SElem:
        """Symmetric coordinates of a single PBW word."""
        hit = self._sigma_inv.get(word)
        if hit is not None:
            return hit
        alpha = self._word_exponent(word)
        out: SElem = {(alpha, 0): Fraction(1)}
        # word = sigma(X^alpha) - (sigma(X^alpha) - word), and the bracket is strictly shorter
        for (w, p), c in self.sigma(alpha).items():
            if w == word and p == 0:
                continue
            for (e, q), c2 in self.sigma_inv_word(w).items():
                if p + q <= self.nu_max:
                    _add_into(out, (e, p + q), -c * c2)
        self._sigma_inv[word] = out
        return out

    def sigma_inv(self, a: UElem) -> SElem:
        out: SElem = {}
        for (w, p), c in a.items():
            for (e, q), c2 in self.sigma_inv_word(w).items():
                if p + q <= self.nu_max:
                    _add_into(out, (e, p + q), c * c2)
        return out

    def sigma_of(self, s: SElem) -> UElem:
        out: UElem = {}
        for (e, p), c in s.items():
            for (w, q), c2 in self.sigma(e).items():
                if p + q <= self.nu_max:
                    _add_into(out, (w, p + q), c * c2)
        return out

    def star_monomials(self, alpha: Exponent, beta: Exponent) -> SElem:
        """``x^alpha * x^beta`` in symmetric coordinates, through ``nu^nu_max``."""
        return self.sigma_inv(self.mul(self.sigma(alpha), self.sigma(beta)))


_ENVS: Dict[Tuple[LieAlgebra, int], EnvelopingAlgebra] = {}


def enveloping(g: LieAlgebra, nu_max: int) -> EnvelopingAlgebra:
    """Shared memo tables per algebra and truncation order."""
    key = (g, nu_max)
    env = _ENVS.get(key)
    if env is None:
        env = _ENVS[key] = EnvelopingAlgebra(g, nu_max)
    return env


def _selem_to_series(s: SElem, dim: int, order: int) -> NuSeries:
    coeffs: List[Dict[Exponent, Fraction]] = [dict() for _ in range(order + 1)]
    for (e, p), c in s.items():
        if p <= order:
            coeffs[p][e] = c
    return NuSeries([Polynomial._raw(dim, d) for d in coeffs], order, dim)


def _series_to_selem(u: NuSeries) -> SElem:
    out: SElem = {}
    for p, poly in enumerate(u.coeffs):
        for e, c in poly.items():
            out[(e, p)] = c
    return out


class PBWElement:
    """An element of ``U(g_nu)`` held through its symmetric coordinates.

    ``series`` is the nu-series in ``S(g)`` whose symmetrization is the
    element; multiplication with :func:`ug_mul` stays in these coordinates.
    """

    __slots__ = ("lie", "series")

    def __init__(self, lie: LieAlgebra, series: NuSeries | Polynomial, order: int | None = None):
        if isinstance(series, Polynomial):
            series = NuSeries.from_poly(series, 0 if order is None else order)
        if series.dim != lie.dim:
            raise AlgebraMismatchError("symmetric coordinates live in the wrong number of variables")
        self.lie = lie
        self.series = series

    @property
    def order(self) -> int:
        return self.series.order

    def to_words(self) -> UElem:
        """The element in the ordered word basis."""
        return enveloping(self.lie, self.order).sigma_of(_series_to_selem(self.series))

    @classmethod
    def from_words(cls, lie: LieAlgebra, words: UElem, order: int) -> "PBWElement":
        s = enveloping(lie, order).sigma_inv(words)
        return cls(lie, _selem_to_series(s, lie.dim, order))

    def __eq__(self, other):
        return isinstance(other, PBWElement) and self.lie == other.lie and self.series == other.series

    def __hash__(self):
        return hash((self.lie, self.series))

    def __mul__(self, other: "PBWElement") -> "PBWElement":
        return ug_mul(self, other)

    def __repr__(self):
        return f"PBWElement({self.series})"


def ug_mul(a: PBWElement, b: PBWElement) -> PBWElement:
    """Product in ``U(g_nu)`` re-expressed in symmetric coordinates."""
    if a.lie != b.lie:
        raise AlgebraMismatchError("elements belong to different Lie algebras")
    if a.order != b.order:
        raise AlgebraMismatchError("elements are truncated at different orders")
    env = enveloping(a.lie, a.order)
    prod = env.mul(a.to_words(), b.to_words())
    return PBWElement.from_words(a.lie, prod, a.order)


# ---------------------------------------------------------------------------
# star product and cochain extraction


def _falling_multi(alpha: Exponent, a: Exponent) -> int:
    out = 1
    for x, k in zip(alpha, a):
        for t in range(k):
            out *= x - t
    return out


def _factorial_multi(alpha: Exponent) -> int:
    out = 1
    for x in alpha:
        out *= math.factorial(x)
    return out


def _leq(a: Exponent, b: Exponent) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _sub(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x - y for x, y in zip(a, b))


def _sub_indices(alpha: Exponent):
    return itertools.product(*(range(a + 1) for a in alpha))


def _evaluate_fit(coeffs, alpha: Exponent, beta: Exponent, skip_top: bool = False) -> Dict[Exponent, Fraction]:
    """``sum_{a<=alpha, b<=beta} c_ab(x) d^a x^alpha d^b x^beta`` from a coefficient table."""
    out: Dict[Exponent, Fraction] = {}
    subs_b = list(_sub_indices(beta))
    for a in _sub_indices(alpha):
        fa = _falling_multi(alpha, a)
        for b in subs_b:
            cf = coeffs.get((a, b))
            if cf is None or (skip_top and a == alpha and b == beta):
                continue
            w = fa * _falling_multi(beta, b)
            shift = tuple(x - y + z - t for x, y, z, t in zip(alpha, a, beta, b))
            for e, c in cf.items():
                _add_into(out, tuple(x + y for x, y in zip(e, shift)), w * c)
    return out


def extract_bidifferential(dim: int, r: int, values, max_order: int, check_degree: int | None = None) -> MultiDiffOp:
    """Recover a bidifferential operator from its values on monomial pairs.

    ``values(alpha, beta)`` returns ``C(x^alpha, x^beta)`` as an exponent
    dictionary.  The ansatz is order <= ``max_order`` in each slot and
    vanishing on constants; the coefficients are solved triangularly and
    then checked on every pair with both degrees <= ``check_degree``
    (default ``max_order + 1``), which detects operators outside the ansatz.
    """
    monos = [e for e in monomials_up_to(dim, max_order) if any(e)]
    pairs = sorted(((a, b) for a in monos for b in monos), key=lambda t: (sum(t[0]) + sum(t[1]), t))
    coeffs: Dict[Tuple[Exponent, Exponent], Dict[Exponent, Fraction]] = {}
    for a, b in pairs:
        target = dict(values(a, b))
        for e, c in _evaluate_fit(coeffs, a, b, skip_top=True).items():
            _add_into(target, e, -c)
        if not target:
            continue
        # the (a, b) term contributes a! b! c_ab(x) to C(x^a, x^b)
        norm = _factorial_multi(a) * _factorial_multi(b)
        coeffs[(a, b)] = {e: Fraction(c) / norm for e, c in target.items()}
    top = max_order + 1 if check_degree is None else check_degree
    for a in monomials_up_to(dim, top):
        for b in monomials_up_to(dim, top):
            want = {k: v for k, v in dict(values(a, b)).items() if v}
            if _evaluate_fit(coeffs, a, b) != want:
                raise ExtractionError(f"order-{r} cochain disagrees with the product on ({a}, {b})")
    flat = {((a, b), e): c for (a, b), cf in coeffs.items() for e, c in cf.items()}
    return MultiDiffOp._raw(2, dim, flat)


def cbh_star(g: LieAlgebra, order: int) -> StarProduct:
    """CBH star product on ``g*`` with cochains extracted as bidifferential operators.

    ``C_r`` is fitted with order <= r in each slot and coefficient degree
    <= r, and the fit is checked on all monomial pairs of degree <= r + 1.
    """
    g.validate()
    env = enveloping(g, order)
    n = g.dim
    products: Dict[Tuple[Exponent, Exponent], SElem] = {}

    def prod(a, b):
        key = (a, b)
        if key not in products:
            products[key] = env.star_monomials(a, b)
        return products[key]

    cochains = []
    for r in range(1, order + 1):
        def values(a, b, r=r):
            return {e: c for (e, p), c in prod(a, b).items() if p == r}

        op = extract_bidifferential(n, r, values, max_order=r)
        if op.coeff_degree() > r:
            raise ExtractionError(f"C_{r} has coefficient degree {op.coeff_degree()} > {r}")
        cochains.append(op)
    return StarProduct(linear_poisson(g), cochains, name="cbh", meta={"construction": "cbh", "algebra": g.name})


def cbh_product(g: LieAlgebra, u: Polynomial, v: Polynomial, order: int) -> NuSeries:
    """``u * v`` by direct transfer through ``U(g)``, without extracting cochains."""
    env = enveloping(g, order)
    out: SElem = {}
    for a, ca in u.items():
        for b, cb in v.items():
            for key, c in env.star_monomials(a, b).items():
                _add_into(out, key, ca * cb * c)
    return _selem_to_series(out, g.dim, order)


# ---------------------------------------------------------------------------
# Bernoulli route


def bernoulli_numbers(j_max: int) -> List[Fraction]:
    """``B_0 .. B_{j_max}`` from ``sum_{i<=j} binom(j+1, i) B_i = 0`` (so ``B_1 = -1/2``)."""
    if j_max < 0:
        raise ValueError("j_max must be non-negative")
    B = [Fraction(1)]
    for j in range(1, j_max + 1):
        B.append(-sum(comb(j + 1, i) * B[i] for i in range(j)) / (j + 1))
    return B


def _linear_coords(X: Polynomial) -> List[Fraction]:
    if X.dim == 0 or any(sum(e) != 1 for e in X):
        raise ValueError("X must be a homogeneous linear polynomial")
    v = [Fraction(0)] * X.dim
    for e, c in X.items():
        v[e.index(1)] = c
    return v


def _factors(M: Polynomial) -> List[int]:
    if len(M) != 1:
        raise ValueError("M must be a monomial")
    (e, _), = M.items()
    out = []
    for i, k in enumerate(e):
        out.extend([i] * k)
    return out


def bernoulli_star_left(g: LieAlgebra, X: Polynomial, M: Polynomial, order: int) -> NuSeries:
    """``X * M`` for linear ``X`` and a monomial ``M = X_1 ... X_k`` via Bernoulli numbers.

    X * X_1..X_k = X X_1..X_k
        + sum_j ((-1)^j / j!) nu^j B_j sum_{r_1..r_j} [[X, X_{r_1}], ..., X_{r_j}] prod_{i not in r} X_i

    where ``r_1..r_j`` runs over ordered tuples of distinct positions.
    """
    n = g.dim
    xv = _linear_coords(X)
    factors = _factors(M)
    (_, mc), = M.items()
    k = len(factors)
    B = bernoulli_numbers(k)
    coeffs = [dict() for _ in range(order + 1)]

    def unit(i):
        v = [Fraction(0)] * n
        v[i] = Fraction(1)
        return v

    for j in range(0, min(k, order) + 1):
        if j and B[j] == 0:
            continue
        w = Fraction((-1) ** j, math.factorial(j)) * B[j] * mc
        acc = coeffs[j]
        for rs in itertools.permutations(range(k), j):
            vec = xv
            for r in rs:
                vec = g.bracket_vec(vec, unit(factors[r]))
            if not any(vec):
                continue
            rest = [0] * n
            for pos, f in enumerate(factors):
                if pos not in rs:
                    rest[f] += 1
            for i, c in enumerate(vec):
                if c:
                    e = list(rest)
                    e[i] += 1
                    _add_into(acc, tuple(e), w * c)
    return NuSeries([Polynomial._raw(n, d) for d in coeffs], order, n)
