"""Equivalences of star products, the equivalence solver and star-BCH calculus.

An equivalence ``T = Id + sum nu^r T_r`` together with a parameter change
``nu -> f(nu) = sum f_r nu^r`` sends ``*`` to ``u *' v = T(T^-1 u *_f T^-1 v)``
where ``*_f`` is ``*`` with ``nu`` replaced by ``f(nu)``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .cochain import (
    CochainError,
    MultiDiffOp,
    StarProduct,
    compose,
    hochschild_d,
    skew_part,
    solve_coboundary,
    star_apply,
)
from .formal import NuSeries, Number, Polynomial, scalar_series_power
from .poisson import scale as scale_poisson


class EquivalenceError(ValueError):
    category = "equivalence"


class NotInvertibleEquivalence(EquivalenceError):
    category = "not invertible"


class DefectNotCocycleError(EquivalenceError):
    category = "defect not a cocycle"


class SkewObstructionError(EquivalenceError):
    category = "skew obstruction not proportional to P"


class NonTruncatingError(ValueError):
    category = "non-truncating input"


class Equivalence:
    """``T = Id + sum_{r=1..N} nu^r T_r`` with optional parameter series ``f``.

    ``param[r-1]`` is ``f_r``; ``None`` means ``f(nu) = nu``.
    """

    def __init__(self, dim: int, ops: Sequence[MultiDiffOp], param: Optional[Sequence[Number]] = None):
        self.dim = dim
        self.ops = tuple(ops)
        self.order = len(self.ops)
        z = (0,) * dim
        for r, T in enumerate(self.ops, start=1):
            if T.arity != 1 or T.dim != dim:
                raise EquivalenceError(f"T_{r} must be a differential operator on R^{dim}")
            if any(derivs[0] == z for (derivs, _), _ in T.flat_items()):
                raise NotInvertibleEquivalence(f"T_{r} does not vanish on constants")
        if param is not None:
            param = tuple(Fraction(c) if not isinstance(c, float) else c for c in param)
            if not param or param[0] == 0:
                raise NotInvertibleEquivalence("parameter change needs f_1 != 0")
        self.param = param

    @classmethod
    def identity(cls, dim: int, order: int = 0) -> "Equivalence":
        return cls(dim, [MultiDiffOp.zero(1, dim) for _ in range(order)])

    def op(self, r: int) -> MultiDiffOp:
        if r == 0:
            return MultiDiffOp.identity(self.dim)
        if r <= self.order:
            return self.ops[r - 1]
        return MultiDiffOp.zero(1, self.dim)

    def param_coeffs(self, order: int) -> List[Number]:
        """``[f_0, f_1, ..., f_order]`` with ``f_0 = 0``."""
        f = [Fraction(0)] * (order + 1)
        if self.param is None:
            if order >= 1:
                f[1] = Fraction(1)
        else:
            for r, c in enumerate(self.param, start=1):
                if r <= order:
                    f[r] = c
        return f

    def inverse_ops(self, order: int) -> List[MultiDiffOp]:
        """``[Tinv_0 = Id, Tinv_1, ..., Tinv_order]`` with ``T Tinv = Id`` mod ``nu^(order+1)``."""
        inv = [MultiDiffOp.identity(self.dim)]
        for n in range(1, order + 1):
            acc = MultiDiffOp.zero(1, self.dim)
            for r in range(1, n + 1):
                if self.op(r).is_zero():
                    continue
                acc = acc - compose(self.op(r), [inv[n - r]])
            inv.append(acc)
        return inv

    def apply(self, u) -> NuSeries:
        """``T u`` for a polynomial or nu-series ``u``."""
        return _apply_series([self.op(r) for r in range(self.order + 1)], u, self.order)

    def is_identity(self) -> bool:
        return all(T.is_zero() for T in self.ops) and (self.param is None or
                                                       list(self.param[:1]) == [1] and not any(self.param[1:]))

    def __eq__(self, other):
        return isinstance(other, Equivalence) and self.ops == other.ops and self.param == other.param

    def __hash__(self):
        return hash((self.ops, self.param))

    def __repr__(self):
        return f"Equivalence(dim={self.dim}, order={self.order}, param={self.param})"


def _apply_series(ops: Sequence[MultiDiffOp], u, order: int) -> NuSeries:
    if isinstance(u, Polynomial):
        u = NuSeries.from_poly(u, order)
    out = [Polynomial.zero(u.dim) for _ in range(order + 1)]
    for r, T in enumerate(ops):
        if T.is_zero():
            continue
        for a in range(order + 1 - r):
            if u.coeffs[a]:
                out[a + r] = out[a + r] + T(u.coeffs[a])
    return NuSeries(out, order, u.dim)


def reparametrize(s: StarProduct, f: Sequence[Number]) -> List[MultiDiffOp]:
    """Cochains of ``*`` with ``nu -> f(nu)``; ``f`` lists ``f_0 = 0, f_1, ...``."""
    N = s.order
    out = [MultiDiffOp.zero(2, s.dim) for _ in range(N + 1)]
    out[0] = MultiDiffOp.multiplication(s.dim)
    for r in range(1, N + 1):
        power = scalar_series_power(f, r, N)
        for n in range(r, N + 1):
            if power[n]:
                out[n] = out[n] + s.cochain(r).scale(power[n])
    return out


def _gauged_cochains(s: StarProduct, E: Equivalence, orders: Sequence[int]) -> List[MultiDiffOp]:
    """The requested cochains of ``gauge(s, E)``, truncated at the order of ``s``."""
    N = s.order
    f = E.param_coeffs(N)
    S = reparametrize(s, f)
    inv = E.inverse_ops(N)
    T = [E.op(r) for r in range(N + 1)]
    inner_cache: Dict[Tuple[int, int, int], MultiDiffOp] = {}
    cochains = []
    for n in orders:
        acc = MultiDiffOp.zero(2, s.dim)
        for j in range(n + 1):
            if S[j].is_zero():
                continue
            for b in range(n - j + 1):
                for c in range(n - j - b + 1):
                    a = n - j - b - c
                    if T[a].is_zero() or inv[b].is_zero() or inv[c].is_zero():
                        continue
                    key = (j, b, c)
                    if key not in inner_cache:
                        inner_cache[key] = compose(S[j], [inv[b], inv[c]])
                    inner = inner_cache[key]
                    acc = acc + (inner if a == 0 else compose(T[a], [inner]))
        cochains.append(acc)
    return cochains


def gauge(s: StarProduct, E: Equivalence) -> StarProduct:
    """``u *' v = T(T^-1 u *_f T^-1 v)``, truncated at the order of ``s``."""
    if E.dim != s.dim:
        raise EquivalenceError("equivalence and star product live on different spaces")
    N = s.order
    f = E.param_coeffs(N)
    cochains = _gauged_cochains(s, E, range(1, N + 1))
    P = s.poisson if f[1] == 1 or N == 0 else scale_poisson(s.poisson, f[1])
    return StarProduct(P, cochains, name=f"gauge({s.name})", tol=s.tol, check=True, meta={"construction": "gauge"})


def _proportionality(A: MultiDiffOp, B: MultiDiffOp) -> Optional[Fraction]:
    """``lam`` with ``A = lam B``, or ``None``."""
    if A.is_zero():
        return Fraction(0)
    if B.is_zero():
        return None
    key, val = next(iter(B.flat_items()))
    a = dict(A.flat_items()).get(key, 0)
    lam = Fraction(a) / Fraction(val)
    return lam if A == B.scale(lam) else None


def solve_equivalence(s1: StarProduct, s2: StarProduct, max_order: int = 4, max_degree: int = 4) -> Equivalence:
    """Find ``E`` with ``gauge(s1, E) == s2`` order by order.

    At each order the difference ``D`` of the cochains is a Hochschild
    cocycle.  Its skew part must be a multiple of ``skew(C_1)``; that
    multiple is absorbed into the parameter series.  The symmetric
    remainder is then a coboundary ``-dT_k`` found on the bounded ansatz.
    """
    if s1.dim != s2.dim:
        raise EquivalenceError("star products live on different spaces")
    if s1.order != s2.order:
        raise EquivalenceError("star products are truncated at different orders")
    if not (s1.is_exact() and s2.is_exact()):
        raise EquivalenceError("the solver needs exact cochains")
    N = s1.order
    dim = s1.dim
    ops: List[MultiDiffOp] = []
    param: List[Fraction] = []
    unit_skew = skew_part(s1.cochain(1)) if N else None
    for k in range(1, N + 1):
        ops.append(MultiDiffOp.zero(1, dim))
        param.append(Fraction(1) if k == 1 else Fraction(0))
        for attempt in range(2):
            E = Equivalence(dim, ops, param)
            (cur,) = _gauged_cochains(s1.truncate(k), E, [k])
            D = s2.cochain(k) - cur
            if not hochschild_d(D).is_zero():
                raise DefectNotCocycleError(f"order-{k} defect is not a Hochschild cocycle")
            A = skew_part(D)
            if A.is_zero():
                break
            lam = _proportionality(A, unit_skew)
            if lam is None or attempt:
                raise SkewObstructionError(f"order-{k} skew part is not a multiple of the Poisson bracket")
            # raising f_k by lam adds lam * C_1 at order k
            param[k - 1] += lam
            if param[0] == 0:
                raise SkewObstructionError("parameter change would make f_1 vanish")
        try:
            ops[k - 1] = solve_coboundary(-D, max_order, max_degree)
        except CochainError as exc:
            raise type(exc)(f"order {k}: {exc}") from exc
    param_out = None if all(p == (1 if r == 0 else 0) for r, p in enumerate(param)) else param
    return Equivalence(dim, ops, param_out)


# ---------------------------------------------------------------------------
# star-commutator calculus


def star_commutator(s: StarProduct, a, b) -> NuSeries:
    """``[a, b]_* = a * b - b * a``."""
    return star_apply(s, a, b) - star_apply(s, b, a)


def exp_ad(s: StarProduct, a, u) -> NuSeries:
    """``sum_j (1/j!) (ad_* a)^j u`` truncated at the order of ``s``."""
    a = s.series(a)
    u = s.series(u)
    out = u
    term = u
    for j in range(1, s.order + 2):
        nxt = star_commutator(s, a, term)
        if nxt.is_zero():
            break
        if nxt.valuation() <= term.valuation():
            raise NonTruncatingError("ad_* a does not raise the nu-order")
        term = nxt.scale(Fraction(1, j))
        out = out + term
    return out


def _free_log_exp(depth: int) -> Dict[Tuple[int, ...], Fraction]:
    """``log(exp(X) exp(Y))`` in the free algebra on letters 0, 1, up to word length ``depth``."""
    def mul(A, B):
        out: Dict[Tuple[int, ...], Fraction] = {}
        for wa, ca in A.items():
            for wb, cb in B.items():
                if len(wa) + len(wb) <= depth:
                    w = wa + wb
                    out[w] = out.get(w, 0) + ca * cb
        return {w: c for w, c in out.items() if c}

    Z: Dict[Tuple[int, ...], Fraction] = {}
    for i in range(depth + 1):
        for j in range(depth + 1 - i):
            if i + j:
                Z[(0,) * i + (1,) * j] = Fraction(1, math.factorial(i) * math.factorial(j))
    out: Dict[Tuple[int, ...], Fraction] = {}
    power = dict(Z)
    for k in range(1, depth + 1):
        for w, c in power.items():
            out[w] = out.get(w, 0) + Fraction((-1) ** (k + 1), k) * c
        power = mul(power, Z)
    return {w: c for w, c in out.items() if c}


_BCH_CACHE: Dict[int, Dict[Tuple[int, ...], Fraction]] = {}


def bch_lie_coefficients(depth: int) -> Dict[Tuple[int, ...], Fraction]:
    """Coefficients of left-normed brackets ``[..[w_1, w_2], .., w_n]`` in the BCH series.

    Obtained from the free-algebra logarithm by the Dynkin-Specht-Wever
    projection ``z -> (1/n) sum_w c_w [w]``.
    """
    hit = _BCH_CACHE.get(depth)
    if hit is None:
        hit = {w: c / len(w) for w, c in _free_log_exp(depth).items()}
        _BCH_CACHE[depth] = hit
    return hit


def star_bch(s: StarProduct, a, b) -> NuSeries:
    """``a o_* b = a + b + 1/2 [a, b]_* + 1/12 ([a,[a,b]_*]_* + [b,[b,a]_*]_*) + ...``.

    Brackets of ``n`` letters are ``O(nu^(n-1))``, so words up to length
    ``N + 1`` suffice at truncation ``N``.
    """
    a = s.series(a)
    b = s.series(b)
    gens = (a, b)
    N = s.order
    coeffs = bch_lie_coefficients(N + 1)
    values: Dict[Tuple[int, ...], NuSeries] = {(0,): a, (1,): b}

    def left_normed(w):
        hit = values.get(w)
        if hit is None:
            head = left_normed(w[:-1])
            if head.is_zero():
                hit = head
            else:
                hit = star_commutator(s, head, gens[w[-1]])
                if not hit.is_zero() and hit.valuation() <= head.valuation():
                    raise NonTruncatingError("star commutators do not raise the nu-order")
            values[w] = hit
        return hit

    out = NuSeries.from_poly(Polynomial.zero(s.dim), N)
    for w in sorted(coeffs, key=lambda t: (len(t), t)):
        v = left_normed(w)
        if not v.is_zero():
            out = out + v.scale(coeffs[w])
    return out
