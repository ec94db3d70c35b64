"""Multidifferential operators as Hochschild cochains on polynomial functions.

A :class:`MultiDiffOp` of arity ``p`` on ``R^m`` is a finite sum

    c(x) * d^{a_1} u_1 * ... * d^{a_p} u_p

with polynomial coefficients ``c``.  Internally every term is flattened to
``(derivs, monomial) -> scalar`` so that composition and the Leibniz rule
work at the level of monomials.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .formal import (
    DimensionError,
    Exponent,
    NuSeries,
    Number,
    Polynomial,
    derive_monomial,
    grlex_key,
    monomials_up_to,
    multinomial_splits,
    poly_mul,
)
from .linalg import solve_sparse
from .poisson import PoissonTensor

Derivs = Tuple[Exponent, ...]
FlatKey = Tuple[Derivs, Exponent]


class CochainError(ValueError):
    """Base class for failures reported by the cochain solvers."""

    category = "cochain"


class NotACocycleError(CochainError):
    category = "not a cocycle"


class SkewPartError(CochainError):
    category = "nonvanishing skew part"


class AnsatzInsufficientError(CochainError):
    category = "ansatz insufficient"


@lru_cache(maxsize=None)
def leibniz_splits(beta: Exponent, parts: int) -> Tuple[Tuple[int, Tuple[Exponent, ...]], ...]:
    """Distribute ``d^beta`` over ``parts`` factors.

    Returns ``(weight, (beta_0, ..., beta_{parts-1}))`` pairs with the
    multinomial weight of the multivariate Leibniz rule.
    """
    per_coord = [multinomial_splits(b, parts) for b in beta]
    out = []
    for combo in itertools.product(*per_coord):
        w = 1
        for c, _ in combo:
            w *= c
        pieces = tuple(tuple(comp[k] for _, comp in combo) for k in range(parts))
        out.append((w, pieces))
    return tuple(out)


def _zero_exp(dim: int) -> Exponent:
    return (0,) * dim


class MultiDiffOp:
    """Immutable multidifferential operator with polynomial coefficients."""

    __slots__ = ("arity", "dim", "_flat", "_hash", "_mono_cache")

    def __init__(self, arity: int, dim: int, terms: Mapping[Derivs, Polynomial] | Iterable = ()):
        """``terms`` maps a tuple of ``arity`` multi-indices to a coefficient polynomial,
        or is an iterable of ``(coeff, derivs)`` pairs."""
        self.arity = arity
        self.dim = dim
        flat: Dict[FlatKey, Number] = {}
        items = ((d, c) for d, c in terms.items()) if isinstance(terms, Mapping) else ((d, c) for c, d in terms)
        for derivs, coeff in items:
            derivs = tuple(tuple(int(a) for a in alpha) for alpha in derivs)
            if len(derivs) != arity:
                raise ValueError(f"expected {arity} multi-indices, got {len(derivs)}")
            for alpha in derivs:
                if len(alpha) != dim:
                    raise DimensionError(f"multi-index {alpha} has wrong length for dim {dim}")
                if any(a < 0 for a in alpha):
                    raise ValueError(f"negative multi-index {alpha}")
            if not isinstance(coeff, Polynomial):
                coeff = Polynomial.constant(dim, coeff)
            if coeff.dim != dim:
                raise DimensionError("coefficient dimension mismatch")
            for mono, c in coeff.items():
                key = (derivs, mono)
                flat[key] = flat.get(key, 0) + c
        self._flat = {k: v for k, v in flat.items() if v != 0}
        self._hash = None
        self._mono_cache = {}

    @classmethod
    def _raw(cls, arity: int, dim: int, flat: Dict[FlatKey, Number]) -> "MultiDiffOp":
        op = object.__new__(cls)
        op.arity = arity
        op.dim = dim
        op._flat = {k: v for k, v in flat.items() if v != 0}
        op._hash = None
        op._mono_cache = {}
        return op

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, arity: int, dim: int) -> "MultiDiffOp":
        return cls._raw(arity, dim, {})

    @classmethod
    def identity(cls, dim: int) -> "MultiDiffOp":
        z = _zero_exp(dim)
        return cls._raw(1, dim, {((z,), z): Fraction(1)})

    @classmethod
    def multiplication(cls, dim: int, arity: int = 2) -> "MultiDiffOp":
        """The pointwise product ``u_1 ... u_p``."""
        z = _zero_exp(dim)
        return cls._raw(arity, dim, {((z,) * arity, z): Fraction(1)})

    @classmethod
    def from_terms(cls, arity: int, dim: int, terms: Iterable[Tuple[Polynomial | Number, Sequence[Sequence[int]]]]):
        return cls(arity, dim, list(terms))

    # -- views ------------------------------------------------------------
    @property
    def terms(self) -> Dict[Derivs, Polynomial]:
        """Grouped view ``derivs -> coefficient polynomial``."""
        groups: Dict[Derivs, Dict[Exponent, Number]] = defaultdict(dict)
        for (derivs, mono), c in self._flat.items():
            groups[derivs][mono] = c
        return {d: Polynomial._raw(self.dim, t) for d, t in groups.items()}

    def sorted_terms(self) -> List[Tuple[Derivs, Polynomial]]:
        return sorted(self.terms.items(), key=lambda t: tuple(grlex_key(a) for a in t[0]))

    def flat_items(self):
        return self._flat.items()

    def __len__(self):
        return len(self._flat)

    def is_zero(self) -> bool:
        return not self._flat

    def is_exact(self) -> bool:
        return not any(isinstance(c, float) for c in self._flat.values())

    def max_abs_coeff(self) -> float:
        return max((abs(float(c)) for c in self._flat.values()), default=0.0)

    def orders(self) -> Tuple[int, ...]:
        """Maximal derivative order in each slot."""
        out = [0] * self.arity
        for derivs, _ in self._flat:
            for i, a in enumerate(derivs):
                out[i] = max(out[i], sum(a))
        return tuple(out)

    def coeff_degree(self) -> int:
        return max((sum(m) for _, m in self._flat), default=-1)

    def __eq__(self, other):
        if not isinstance(other, MultiDiffOp):
            return NotImplemented
        return self.arity == other.arity and self.dim == other.dim and self._flat == other._flat

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.arity, self.dim, frozenset(self._flat.items())))
        return self._hash

    def is_close(self, other: "MultiDiffOp", tol: float) -> bool:
        return (self - other).max_abs_coeff() <= tol

    def __repr__(self):
        return f"MultiDiffOp(arity={self.arity}, dim={self.dim}, terms={len(self._flat)})"

    def __str__(self):
        return format_op(self)

    # -- linear structure -------------------------------------------------
    def _check(self, other: "MultiDiffOp"):
        if self.arity != other.arity or self.dim != other.dim:
            raise DimensionError("operators differ in arity or dimension")

    def __add__(self, other: "MultiDiffOp") -> "MultiDiffOp":
        self._check(other)
        out = dict(self._flat)
        for k, v in other._flat.items():
            out[k] = out.get(k, 0) + v
        return MultiDiffOp._raw(self.arity, self.dim, out)

    def __neg__(self):
        return MultiDiffOp._raw(self.arity, self.dim, {k: -v for k, v in self._flat.items()})

    def __sub__(self, other: "MultiDiffOp") -> "MultiDiffOp":
        return self + (-other)

    def scale(self, s: Number) -> "MultiDiffOp":
        if s == 0:
            return MultiDiffOp.zero(self.arity, self.dim)
        return MultiDiffOp._raw(self.arity, self.dim, {k: v * s for k, v in self._flat.items()})

    def __mul__(self, s):
        if isinstance(s, (int, Fraction, float)):
            return self.scale(s)
        if isinstance(s, Polynomial):
            return self.times_poly(s)
        return NotImplemented

    __rmul__ = __mul__

    def times_poly(self, p: Polynomial) -> "MultiDiffOp":
        """Multiply every coefficient by ``p``."""
        out: Dict[FlatKey, Number] = {}
        for (derivs, mono), c in self._flat.items():
            for e, pc in p.items():
                key = (derivs, tuple(a + b for a, b in zip(mono, e)))
                out[key] = out.get(key, 0) + c * pc
        return MultiDiffOp._raw(self.arity, self.dim, out)

    def permute(self, perm: Sequence[int]) -> "MultiDiffOp":
        """Reorder arguments: the result evaluated at ``(u_0..u_{p-1})`` equals
        ``self(u_{perm[0]}, ..., u_{perm[p-1]})``."""
        inv = [0] * self.arity
        for new_pos, old in enumerate(perm):
            inv[old] = new_pos
        out = {}
        for (derivs, mono), c in self._flat.items():
            nd = [None] * self.arity
            for slot, alpha in enumerate(derivs):
                nd[perm[slot]] = alpha
            out[(tuple(nd), mono)] = c
        return MultiDiffOp._raw(self.arity, self.dim, out)

    def transpose(self) -> "MultiDiffOp":
        """Swap the arguments of a bidifferential operator."""
        if self.arity != 2:
            raise ValueError("transpose needs arity 2")
        return self.permute([1, 0])

    def map_coeffs(self, f) -> "MultiDiffOp":
        return MultiDiffOp._raw(self.arity, self.dim, {k: f(v) for k, v in self._flat.items()})

    def filter(self, pred) -> "MultiDiffOp":
        """Keep the terms whose multi-index tuple satisfies ``pred``."""
        return MultiDiffOp._raw(self.arity, self.dim, {k: v for k, v in self._flat.items() if pred(k[0])})

    # -- evaluation -------------------------------------------------------
    def _apply_monomials(self, exps: Tuple[Exponent, ...]) -> Dict[Exponent, Number]:
        hit = self._mono_cache.get(exps)
        if hit is not None:
            return hit
        out: Dict[Exponent, Number] = {}
        for (derivs, mono), c in self._flat.items():
            factor = c
            total = list(mono)
            for alpha, e in zip(derivs, exps):
                r = derive_monomial(e, alpha)
                if r is None:
                    factor = 0
                    break
                factor = factor * r[0]
                for i, x in enumerate(r[1]):
                    total[i] += x
            if factor == 0:
                continue
            key = tuple(total)
            out[key] = out.get(key, 0) + factor
        out = {k: v for k, v in out.items() if v != 0}
        self._mono_cache[exps] = out
        return out

    def __call__(self, *args: Polynomial) -> Polynomial:
        return apply(self, *args)


def apply(op: MultiDiffOp, *args: Polynomial) -> Polynomial:
    """Evaluate ``op`` on polynomial arguments, exactly."""
    if len(args) != op.arity:
        raise ValueError(f"operator has arity {op.arity}, got {len(args)} arguments")
    for a in args:
        if a.dim != op.dim:
            raise DimensionError(f"argument dim {a.dim} does not match operator dim {op.dim}")
    out: Dict[Exponent, Number] = {}
    for combo in itertools.product(*(a.items() for a in args)):
        exps = tuple(e for e, _ in combo)
        scal = 1
        for _, c in combo:
            scal = scal * c
        for e, v in op._apply_monomials(exps).items():
            out[e] = out.get(e, 0) + scal * v
    return Polynomial._raw(op.dim, {k: v for k, v in out.items() if v != 0})


# ---------------------------------------------------------------------------
# operator algebra


def derive_op(op: MultiDiffOp, beta: Exponent) -> Dict[FlatKey, Number]:
    """Apply ``d^beta`` to the output of ``op`` (Leibniz over coefficient and slots).

    Returns a flat term dictionary of the same arity.
    """
    if not any(beta):
        return dict(op._flat)
    out: Dict[FlatKey, Number] = {}
    splits = leibniz_splits(tuple(beta), op.arity + 1)
    for (derivs, mono), c in op._flat.items():
        for w, pieces in splits:
            r = derive_monomial(mono, pieces[0])
            if r is None:
                continue
            nd = tuple(tuple(a + b for a, b in zip(alpha, piece)) for alpha, piece in zip(derivs, pieces[1:]))
            key = (nd, r[1])
            out[key] = out.get(key, 0) + c * (w * r[0])
    return out


def compose(outer: MultiDiffOp, inner: Sequence[MultiDiffOp]) -> MultiDiffOp:
    """``outer(inner_1(...), ..., inner_p(...))`` with argument slots concatenated.

    The result has arity ``sum(arity(inner_i))``; slot order follows the
    order of ``inner``.
    """
    if len(inner) != outer.arity:
        raise ValueError(f"outer arity {outer.arity} needs {outer.arity} inner operators")
    dim = outer.dim
    for op in inner:
        if op.dim != dim:
            raise DimensionError("inner operator dimension mismatch")
    arity = sum(op.arity for op in inner)
    caches: List[Dict[Exponent, list]] = [dict() for _ in inner]

    def derived(i: int, alpha: Exponent) -> list:
        hit = caches[i].get(alpha)
        if hit is None:
            hit = list(derive_op(inner[i], alpha).items())
            caches[i][alpha] = hit
        return hit

    out: Dict[FlatKey, Number] = {}
    for (derivs, mono), c in outer._flat.items():
        factor_lists = [derived(i, alpha) for i, alpha in enumerate(derivs)]
        if any(not f for f in factor_lists):
            continue
        for combo in itertools.product(*factor_lists):
            coef = c
            total = list(mono)
            nd: List[Exponent] = []
            for (fd, fm), fc in combo:
                coef = coef * fc
                for k, x in enumerate(fm):
                    total[k] += x
                nd.extend(fd)
            key = (tuple(nd), tuple(total))
            out[key] = out.get(key, 0) + coef
    return MultiDiffOp._raw(arity, dim, out)


def hochschild_d(C: MultiDiffOp) -> MultiDiffOp:
    """Hochschild coboundary of a ``p``-cochain, a ``(p+1)``-cochain.

    (dC)(u_0..u_p) = u_0 C(u_1..u_p) + sum_r (-1)^r C(.., u_{r-1} u_r, ..)
                     + (-1)^{p+1} C(u_0..u_{p-1}) u_p
    """
    p = C.arity
    dim = C.dim
    ident = MultiDiffOp.identity(dim)
    mult = MultiDiffOp.multiplication(dim)
    result = compose(mult, [ident, C])
    for r in range(1, p + 1):
        inner = [ident] * (r - 1) + [mult] + [ident] * (p - r)
        term = compose(C, inner)
        result = result + (term if r % 2 == 0 else -term)
    last = compose(mult, [C, ident])
    result = result + (last if (p + 1) % 2 == 0 else -last)
    return result


def skew_part(C: MultiDiffOp) -> MultiDiffOp:
    """``(u, v) -> (C(u, v) - C(v, u)) / 2``."""
    return (C - C.transpose()).scale(Fraction(1, 2))


def symmetric_part(C: MultiDiffOp) -> MultiDiffOp:
    return (C + C.transpose()).scale(Fraction(1, 2))


def spanning_monomials(dim: int, op_order: int) -> List[Exponent]:
    """Monomials of degree <= order + 2: enough to pin down an operator of that order."""
    return monomials_up_to(dim, op_order + 2)


def vanishes_on(op: MultiDiffOp, monomials: Sequence[Exponent]) -> bool:
    """Evaluate on every tuple drawn from ``monomials``; the independent route to ``is_zero``."""
    for exps in itertools.product(monomials, repeat=op.arity):
        if op._apply_monomials(tuple(exps)):
            return False
    return True


def vector_field_op(dim: int, components: Sequence[Polynomial]) -> MultiDiffOp:
    """The derivation ``u -> sum_i V^i d_i u``."""
    terms = []
    for i, comp in enumerate(components):
        alpha = [0] * dim
        alpha[i] = 1
        terms.append((comp, (tuple(alpha),)))
    return MultiDiffOp(1, dim, terms)


def bracket_op(P: PoissonTensor) -> MultiDiffOp:
    """The Poisson bracket ``{u, v} = sum_ij P^ij d_i u d_j v`` as a bidifferential operator."""
    m = P.dim
    terms = []
    for i in range(m):
        for j in range(m):
            if P[i, j]:
                a = [0] * m
                b = [0] * m
                a[i] = 1
                b[j] = 1
                terms.append((P[i, j], (tuple(a), tuple(b))))
    return MultiDiffOp(2, m, terms)


# ---------------------------------------------------------------------------
# JSON


def op_to_json(op: MultiDiffOp) -> list:
    from .formal import polynomial_to_json

    return [{"coeff": polynomial_to_json(c), "derivs": [list(a) for a in d]} for d, c in op.sorted_terms()]


def op_from_json(data, arity: int | None = None, dim: int | None = None) -> MultiDiffOp:
    from .formal import polynomial_from_json

    if isinstance(data, dict):
        arity = data.get("arity", arity)
        dim = data.get("dim", dim)
        data = data["terms"]
    if data and (arity is None or dim is None):
        arity = len(data[0]["derivs"])
        dim = len(data[0]["derivs"][0])
    if arity is None or dim is None:
        raise ValueError("arity and dim required for an empty operator")
    terms = [(polynomial_from_json(t["coeff"], dim), tuple(tuple(a) for a in t["derivs"])) for t in data]
    return MultiDiffOp(arity, dim, terms)


def format_op(op: MultiDiffOp) -> str:
    """Text form: ``coeff * d^a ⊗ d^b``."""
    from .formal import format_polynomial

    if op.is_zero():
        return "0"
    parts = []
    for derivs, coeff in op.sorted_terms():
        slots = []
        for alpha in derivs:
            ds = [f"d{i + 1}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(alpha) if a]
            slots.append("".join(ds) if ds else "1")
        parts.append(f"({format_polynomial(coeff)}) " + " ⊗ ".join(slots))
    return " + ".join(parts)


# ---------------------------------------------------------------------------
# star products


class StarProductError(ValueError):
    category = "star product"


class StarProduct:
    """A formal deformation ``u * v = uv + sum_{r=1..N} nu^r C_r(u, v)``.

    ``cochains[r-1]`` holds ``C_r``; ``C_0`` (pointwise product) is
    implicit.  Construction checks the unit condition and that twice the
    skew part of ``C_1`` equals the Poisson bracket; ``tol`` relaxes both
    checks for float-coefficient cochains.
    """

    def __init__(self, poisson: PoissonTensor, cochains: Sequence[MultiDiffOp], name: str = "star",
                 tol: float = 0.0, check: bool = True, meta: dict | None = None):
        self.dim = poisson.dim
        self.poisson = poisson
        self.cochains = tuple(cochains)
        self.order = len(self.cochains)
        self.name = name
        self.tol = tol
        self.meta = dict(meta or {})
        for C in self.cochains:
            if C.arity != 2 or C.dim != self.dim:
                raise StarProductError("cochains must be bidifferential operators on the same space")
        if check:
            self.validate()

    def validate(self):
        z = _zero_exp(self.dim)
        for r, C in enumerate(self.cochains, start=1):
            for (derivs, _), c in C.flat_items():
                if (derivs[0] == z or derivs[1] == z) and abs(float(c)) > self.tol:
                    raise StarProductError(f"C_{r} does not vanish on constants")
        if self.cochains:
            defect = self.cochains[0] - self.cochains[0].transpose() - bracket_op(self.poisson)
            if defect.max_abs_coeff() > self.tol:
                raise StarProductError("C_1(u,v) - C_1(v,u) differs from the Poisson bracket")

    def cochain(self, r: int) -> MultiDiffOp:
        if r == 0:
            return MultiDiffOp.multiplication(self.dim)
        if not 1 <= r <= self.order:
            raise IndexError(f"cochain order {r} outside 0..{self.order}")
        return self.cochains[r - 1]

    def is_exact(self) -> bool:
        return all(C.is_exact() for C in self.cochains)

    def __eq__(self, other):
        if not isinstance(other, StarProduct):
            return NotImplemented
        return self.dim == other.dim and self.cochains == other.cochains

    def __hash__(self):
        return hash(self.cochains)

    def is_close(self, other: "StarProduct", tol: float) -> bool:
        return self.order == other.order and all(a.is_close(b, tol) for a, b in zip(self.cochains, other.cochains))

    def truncate(self, order: int) -> "StarProduct":
        return StarProduct(self.poisson, self.cochains[:order], self.name, self.tol, check=False, meta=self.meta)

    def series(self, u) -> NuSeries:
        if isinstance(u, NuSeries):
            if u.order != self.order:
                raise StarProductError(f"series truncated at {u.order}, star product at {self.order}")
            return u
        return NuSeries.from_poly(u, self.order)

    def __call__(self, u, v) -> NuSeries:
        return star_apply(self, u, v)

    def __repr__(self):
        return f"StarProduct({self.name!r}, dim={self.dim}, order={self.order})"


def star_apply(s: StarProduct, u, v) -> NuSeries:
    """``u * v`` extended nu-bilinearly and truncated at the star product's order."""
    u = s.series(u)
    v = s.series(v)
    if u.dim != s.dim or v.dim != s.dim:
        raise DimensionError("argument dimension does not match the star product")
    N = s.order
    out = [Polynomial.zero(s.dim) for _ in range(N + 1)]
    for a in range(N + 1):
        if not u.coeffs[a]:
            continue
        for b in range(N + 1 - a):
            if not v.coeffs[b]:
                continue
            out[a + b] = out[a + b] + poly_mul(u.coeffs[a], v.coeffs[b])
            for r in range(1, N + 1 - a - b):
                out[a + b + r] = out[a + b + r] + apply(s.cochains[r - 1], u.coeffs[a], v.coeffs[b])
    return NuSeries(out, N, s.dim)


def assoc_defect(s: StarProduct, k: int, u: Polynomial, v: Polynomial, w: Polynomial) -> Polynomial:
    """``(dC_k)(u,v,w) - sum_{r+s=k; r,s>0} [C_r(C_s(u,v),w) - C_r(u,C_s(v,w))]``.

    Vanishes for all arguments iff the product is associative at order ``k``
    (given lower orders).
    """
    if not 1 <= k <= s.order:
        raise IndexError(f"order {k} outside 1..{s.order}")
    C = s.cochain
    Ck = C(k)
    out = poly_mul(u, apply(Ck, v, w)) - apply(Ck, poly_mul(u, v), w) + apply(Ck, u, poly_mul(v, w)) \
        - poly_mul(apply(Ck, u, v), w)
    for r in range(1, k):
        t = k - r
        out = out - apply(C(r), apply(C(t), u, v), w) + apply(C(r), u, apply(C(t), v, w))
    return out


def associator(s: StarProduct, u, v, w) -> NuSeries:
    """``(u*v)*w - u*(v*w)`` by direct multiplication."""
    return star_apply(s, star_apply(s, u, v), w) - star_apply(s, u, star_apply(s, v, w))


def associator_operator(s: StarProduct, k: int) -> MultiDiffOp:
    """The order-``k`` coefficient of ``(u*v)*w - u*(v*w)`` as a tridifferential operator.

    Equals ``-assoc_defect`` as a map; it is zero as a normalized operator
    iff the product is associative at order ``k`` on all arguments.
    """
    if not 1 <= k <= s.order:
        raise IndexError(f"order {k} outside 1..{s.order}")
    ident = MultiDiffOp.identity(s.dim)
    out = MultiDiffOp.zero(3, s.dim)
    for r in range(k + 1):
        Cr, Cs = s.cochain(r), s.cochain(k - r)
        out = out + compose(Cr, [Cs, ident]) - compose(Cr, [ident, Cs])
    return out


# ---------------------------------------------------------------------------
# coboundary solver


def coboundary_of_monomial_op(dim: int, alpha: Exponent, gamma: Exponent) -> Dict[FlatKey, Fraction]:
    """Flat terms of ``d(x^gamma d^alpha)``; closed form of the Leibniz expansion."""
    out: Dict[FlatKey, Fraction] = {}
    for w, (a, b) in leibniz_splits(alpha, 2):
        if any(a) and any(b):
            key = ((a, b), gamma)
            out[key] = out.get(key, 0) - w
    return out


def unary_ansatz(dim: int, max_order: int, max_degree: int) -> List[Tuple[Exponent, Exponent]]:
    """(alpha, gamma) pairs for ``x^gamma d^alpha``, ``1 <= |alpha| <= max_order``, graded-lex."""
    alphas = [a for a in monomials_up_to(dim, max_order) if any(a)]
    gammas = monomials_up_to(dim, max_degree)
    return [(a, g) for a in alphas for g in gammas]


def solve_coboundary(C: MultiDiffOp, max_order: int, max_degree: int) -> MultiDiffOp:
    """Find a differential operator ``B`` vanishing on constants with ``dB = C``.

    The search space is ``x^gamma d^alpha`` with ``1 <= |alpha| <= max_order``
    and ``|gamma| <= max_degree``; the system is solved exactly, pivoting in
    graded-lex column order with free variables set to zero (derivations,
    the kernel of d, therefore never enter the answer).
    """
    if C.arity != 2:
        raise ValueError("solve_coboundary expects a 2-cochain")
    if not C.is_exact():
        raise ValueError("solve_coboundary needs exact coefficients")
    if not hochschild_d(C).is_zero():
        raise NotACocycleError("input is not a Hochschild 2-cocycle")
    if not skew_part(C).is_zero():
        raise SkewPartError("cocycle has a nonvanishing skew-symmetric part; it is not a coboundary")
    if C.is_zero():
        return MultiDiffOp.zero(1, C.dim)
    ansatz = unary_ansatz(C.dim, max_order, max_degree)
    columns = [coboundary_of_monomial_op(C.dim, a, g) for a, g in ansatz]
    x = solve_sparse(columns, dict(C.flat_items()))
    if x is None:
        raise AnsatzInsufficientError(
            f"no coboundary primitive with order <= {max_order} and coefficient degree <= {max_degree}")
    flat = {((a,), g): v for (a, g), v in zip(ansatz, x) if v != 0}
    return MultiDiffOp._raw(1, C.dim, flat)
