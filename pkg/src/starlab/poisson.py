"""Poisson tensors with polynomial entries and linear Poisson structures on Lie algebra duals."""

from __future__ import annotations

import itertools
import re
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .formal import Exponent, Number, Polynomial, monomials_up_to, poly_mul, to_rational


class PoissonError(ValueError):
    category = "validation"


class LieAlgebraError(ValueError):
    category = "validation"


class PoissonTensor:
    """Antisymmetric matrix ``P^{ij}`` of polynomials on ``R^m`` (0-based indices)."""

    __slots__ = ("dim", "_entries")

    def __init__(self, dim: int, entries: Sequence[Sequence[Polynomial | Number]] | Mapping[Tuple[int, int], Polynomial]):
        self.dim = dim
        grid = [[Polynomial.zero(dim) for _ in range(dim)] for _ in range(dim)]
        if isinstance(entries, Mapping):
            for (i, j), v in entries.items():
                v = v if isinstance(v, Polynomial) else Polynomial.constant(dim, v)
                grid[i][j] = v
                if grid[j][i].is_zero():
                    grid[j][i] = -v
        else:
            if len(entries) != dim or any(len(row) != dim for row in entries):
                raise PoissonError(f"entries must form a {dim}x{dim} matrix")
            for i in range(dim):
                for j in range(dim):
                    v = entries[i][j]
                    grid[i][j] = v if isinstance(v, Polynomial) else Polynomial.constant(dim, v)
        for i in range(dim):
            for j in range(dim):
                if grid[i][j].dim != dim:
                    raise PoissonError("entry dimension mismatch")
                if grid[i][j] != -grid[j][i]:
                    raise PoissonError(f"P[{i + 1},{j + 1}] != -P[{j + 1},{i + 1}]")
        self._entries = tuple(tuple(row) for row in grid)

    def __getitem__(self, ij: Tuple[int, int]) -> Polynomial:
        i, j = ij
        return self._entries[i][j]

    @property
    def entries(self):
        return self._entries

    def __eq__(self, other):
        return isinstance(other, PoissonTensor) and self._entries == other._entries

    def __hash__(self):
        return hash(self._entries)

    def is_constant(self) -> bool:
        return all(e.is_constant() for row in self._entries for e in row)

    def max_degree(self) -> int:
        return max((e.degree() for row in self._entries for e in row), default=-1)

    def nonzero(self) -> Iterator[Tuple[int, int, Polynomial]]:
        for i in range(self.dim):
            for j in range(self.dim):
                if self._entries[i][j]:
                    yield i, j, self._entries[i][j]

    def __repr__(self):
        parts = [f"P{i + 1}{j + 1}={e}" for i, j, e in self.nonzero() if i < j]
        return f"PoissonTensor({self.dim}, {', '.join(parts) or '0'})"

    @classmethod
    def zero(cls, dim: int) -> "PoissonTensor":
        return cls(dim, {})

    @classmethod
    def symplectic(cls, dim: int) -> "PoissonTensor":
        """Standard constant structure on R^{2n}: ``P^{2k-1,2k} = 1``."""
        if dim % 2:
            raise PoissonError("symplectic structure needs an even dimension")
        return cls(dim, {(2 * k, 2 * k + 1): Fraction(1) for k in range(dim // 2)})


def bracket(P: PoissonTensor, u: Polynomial, v: Polynomial) -> Polynomial:
    """``{u, v} = sum_{i<j} P^ij (d_i u d_j v - d_j u d_i v)``."""
    if u.dim != P.dim or v.dim != P.dim:
        raise PoissonError("dimension mismatch")
    m = P.dim
    du = [u.derive(_unit(m, i)) for i in range(m)]
    dv = [v.derive(_unit(m, i)) for i in range(m)]
    out = Polynomial.zero(m)
    for i in range(m):
        for j in range(i + 1, m):
            pij = P[i, j]
            if pij.is_zero():
                continue
            t = poly_mul(du[i], dv[j]) - poly_mul(du[j], dv[i])
            if t:
                out = out + poly_mul(pij, t)
    return out


def _unit(m: int, i: int) -> Exponent:
    e = [0] * m
    e[i] = 1
    return tuple(e)


def jacobi_defect(P: PoissonTensor, u: Polynomial, v: Polynomial, w: Polynomial) -> Polynomial:
    """``{{u,v},w} + {{v,w},u} + {{w,u},v}``."""
    return (bracket(P, bracket(P, u, v), w) + bracket(P, bracket(P, v, w), u)
            + bracket(P, bracket(P, w, u), v))


def jacobi_degree_bound(P: PoissonTensor) -> int:
    """Total degree of monomial triples that suffices to certify the Jacobi identity.

    The Jacobiator is a trivector field, first order in each slot, so
    coordinate triples already decide it; we test triples of total degree
    up to ``3 + deg P`` to also exercise the Leibniz expansion.
    """
    return 3 + max(P.max_degree(), 0)


def jacobi_witness(P: PoissonTensor, total_degree: Optional[int] = None, each_degree: Optional[int] = None):
    """Return the first monomial triple with nonzero Jacobi defect, or ``None``.

    Triples are drawn from monomials with ``each_degree`` per factor when
    given, otherwise with total degree at most ``total_degree`` (default
    :func:`jacobi_degree_bound`).
    """
    m = P.dim
    if each_degree is not None:
        monos = monomials_up_to(m, each_degree)
        triples = itertools.product(monos, repeat=3)
    else:
        d = jacobi_degree_bound(P) if total_degree is None else total_degree
        monos = monomials_up_to(m, d)
        triples = ((a, b, c) for a in monos for b in monos if sum(a) + sum(b) <= d
                   for c in monos if sum(a) + sum(b) + sum(c) <= d)
    cache: Dict[Tuple[Exponent, Exponent], Polynomial] = {}

    def br(x: Polynomial, y: Polynomial) -> Polynomial:
        # bilinear: expand over monomials and memoize monomial pairs
        out = Polynomial.zero(m)
        for ex, cx in x.items():
            for ey, cy in y.items():
                key = (ex, ey)
                val = cache.get(key)
                if val is None:
                    val = bracket(P, Polynomial._raw(m, {ex: Fraction(1)}), Polynomial._raw(m, {ey: Fraction(1)}))
                    cache[key] = val
                if val:
                    out = out + val.scale(cx * cy)
        return out

    for a, b, c in triples:
        if not (any(a) and any(b) and any(c)):
            continue
        u = Polynomial._raw(m, {a: Fraction(1)})
        v = Polynomial._raw(m, {b: Fraction(1)})
        w = Polynomial._raw(m, {c: Fraction(1)})
        defect = br(br(u, v), w) + br(br(v, w), u) + br(br(w, u), v)
        if defect:
            return (u, v, w, defect)
    return None


def is_poisson(P: PoissonTensor) -> bool:
    return jacobi_witness(P) is None


def scale(P: PoissonTensor, s: Number) -> PoissonTensor:
    s = to_rational(s)
    return PoissonTensor(P.dim, [[e.scale(s) for e in row] for row in P.entries])


# ---------------------------------------------------------------------------
# Lie algebras


class LieAlgebra:
    """Structure constants ``[e_i, e_j] = sum_k c^k_ij e_k`` (0-based indices)."""

    def __init__(self, dim: int, constants: Mapping[Tuple[int, int], Mapping[int, Number]], name: str | None = None,
                 check: bool = True):
        self.dim = dim
        self.name = name
        c: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
        for (i, j), coeffs in constants.items():
            if not (0 <= i < dim and 0 <= j < dim):
                raise LieAlgebraError(f"bracket indices ({i + 1},{j + 1}) out of range")
            row = {int(k): to_rational(v) for k, v in coeffs.items() if to_rational(v) != 0}
            for k in row:
                if not 0 <= k < dim:
                    raise LieAlgebraError(f"basis index {k + 1} out of range")
            if row:
                c[(i, j)] = row
        # complete by antisymmetry where only one order was given
        for (i, j), row in list(c.items()):
            if (j, i) not in c:
                c[(j, i)] = {k: -v for k, v in row.items()}
        self._c = c
        if check:
            self.validate()

    def structure(self, i: int, j: int) -> Dict[int, Fraction]:
        return self._c.get((i, j), {})

    def c(self, k: int, i: int, j: int) -> Fraction:
        return self._c.get((i, j), {}).get(k, Fraction(0))

    def bracket_vec(self, x: Sequence[Number], y: Sequence[Number]) -> List[Fraction]:
        """Bracket of two elements given by coordinate vectors."""
        out = [Fraction(0)] * self.dim
        for (i, j), row in self._c.items():
            a = x[i] * y[j]
            if a:
                for k, v in row.items():
                    out[k] += a * v
        return out

    def validate(self):
        n = self.dim
        for i in range(n):
            if self.structure(i, i):
                raise LieAlgebraError(f"[e{i + 1}, e{i + 1}] must vanish")
            for j in range(n):
                for k in range(n):
                    if self.c(k, i, j) != -self.c(k, j, i):
                        raise LieAlgebraError(f"structure constants not antisymmetric at ({i + 1},{j + 1})")
        for i, j, k in itertools.combinations(range(n), 3):
            for m in range(n):
                s = sum(self.c(l, i, j) * self.c(m, l, k) + self.c(l, j, k) * self.c(m, l, i)
                        + self.c(l, k, i) * self.c(m, l, j) for l in range(n))
                if s != 0:
                    raise LieAlgebraError(f"Jacobi identity fails for (e{i + 1}, e{j + 1}, e{k + 1})")

    def is_abelian(self) -> bool:
        return not self._c

    def __eq__(self, other):
        return isinstance(other, LieAlgebra) and self.dim == other.dim and self._c == other._c

    def __hash__(self):
        return hash((self.dim, frozenset((k, frozenset(v.items())) for k, v in self._c.items())))

    def __repr__(self):
        return f"LieAlgebra({self.name or self.dim})"

    def to_json(self) -> dict:
        brackets = []
        for (i, j), row in sorted(self._c.items()):
            if i < j:
                brackets.append({"i": i + 1, "j": j + 1, "coeffs": {str(k + 1): f"{v.numerator}/{v.denominator}"
                                                                   for k, v in sorted(row.items())}})
        out = {"dim": self.dim, "brackets": brackets}
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, data: dict) -> "LieAlgebra":
        consts = {}
        for b in data.get("brackets", []):
            i, j = int(b["i"]) - 1, int(b["j"]) - 1
            consts[(i, j)] = {int(k) - 1: to_rational(v) for k, v in b["coeffs"].items()}
        return cls(int(data["dim"]), consts, name=data.get("name"))


def heisenberg3() -> LieAlgebra:
    """``[X, Y] = Z``."""
    return LieAlgebra(3, {(0, 1): {2: 1}}, name="heisenberg3")


def so3() -> LieAlgebra:
    """``[e1, e2] = e3`` and cyclic."""
    return LieAlgebra(3, {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}}, name="so3")


def sl2() -> LieAlgebra:
    """Basis ``(H, E, F)``: ``[H,E] = 2E``, ``[H,F] = -2F``, ``[E,F] = H``."""
    return LieAlgebra(3, {(0, 1): {1: 2}, (0, 2): {2: -2}, (1, 2): {0: 1}}, name="sl2")


def abelian(n: int) -> LieAlgebra:
    return LieAlgebra(n, {}, name=f"abelian({n})")


BUILTIN_ALGEBRAS = ("heisenberg3", "so3", "sl2", "abelian(n)")


def builtin_algebra(name: str) -> Optional[LieAlgebra]:
    """Resolve a built-in algebra name, or ``None`` when it is not one."""
    table = {"heisenberg3": heisenberg3, "so3": so3, "sl2": sl2}
    if name in table:
        return table[name]()
    m = re.fullmatch(r"abelian\((\d+)\)", name.strip())
    if m:
        return abelian(int(m.group(1)))
    return None


def linear_poisson(g: LieAlgebra) -> PoissonTensor:
    """``P^{ij}(x) = sum_k c^k_ij x_k`` on the dual of ``g``."""
    g.validate()
    n = g.dim
    entries = [[Polynomial.zero(n) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            row = g.structure(i, j)
            if row:
                entries[i][j] = Polynomial(n, {_unit(n, k): v for k, v in row.items()})
    return PoissonTensor(n, entries)


# ---------------------------------------------------------------------------
# JSON


def poisson_to_json(P: PoissonTensor) -> dict:
    from .formal import polynomial_to_json

    entries = [{"i": i + 1, "j": j + 1, "value": polynomial_to_json(e)} for i, j, e in P.nonzero() if i < j]
    return {"dim": P.dim, "entries": entries}


def poisson_from_json(data: dict) -> PoissonTensor:
    """Read ``{"dim": m, "entries": [{"i":1,"j":2,"value": <poly>}, ...]}``.

    ``value`` is a term list or a polynomial literal string; the lower
    triangle is filled in by antisymmetry.  A full ``"matrix"`` of values is
    also accepted and checked for antisymmetry.
    """
    from .formal import polynomial_from_json

    dim = int(data["dim"])
    if "matrix" in data:
        rows = [[polynomial_from_json(v, dim) for v in row] for row in data["matrix"]]
        return PoissonTensor(dim, rows)
    grid: Dict[Tuple[int, int], Polynomial] = {}
    for e in data.get("entries", []):
        i, j = int(e["i"]) - 1, int(e["j"]) - 1
        if i == j:
            raise PoissonError("diagonal entries must vanish")
        v = polynomial_from_json(e["value"], dim)
        if (i, j) in grid or (j, i) in grid:
            raise PoissonError(f"entry ({i + 1},{j + 1}) given twice")
        grid[(i, j)] = v
        grid[(j, i)] = -v
    return PoissonTensor(dim, grid)
