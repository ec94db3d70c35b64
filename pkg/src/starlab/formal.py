"""Sparse multivariate polynomials over the rationals and truncated nu-series.

Coefficients are :class:`fractions.Fraction` in every exact computation.
Floats are tolerated as coefficients (numeric Kontsevich weights feed them
in); arithmetic then degrades to floating point but the code path is the
same.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple, Union

Exponent = Tuple[int, ...]
Number = Union[int, Fraction, float]


class DimensionError(ValueError):
    """Operands live in polynomial rings with different numbers of variables."""


class TruncationError(ValueError):
    """Two nu-series were truncated at different orders."""


class NotInvertibleError(ArithmeticError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


def to_rational(value) -> Number:
    """Coerce ints, strings like ``"3/4"`` and Fractions to Fraction.

    Floats pass through unchanged.
    """
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        value = value.strip()
        if re.fullmatch(r"[-+]?\d+(/\d+)?", value) is None:
            # decimal or exponent notation, e.g. "0.25" or "1e-3"
            return float(value)
    return Fraction(value)


def grlex_key(exp: Exponent):
    """Sort key for graded-lex order; sort with ``reverse=True`` for leading term first."""
    return (sum(exp), exp)


def falling(n: int, k: int) -> int:
    """n (n-1) ... (n-k+1); zero when k > n."""
    if k > n:
        return 0
    r = 1
    for i in range(n - k + 1, n + 1):
        r *= i
    return r


def derive_monomial(exp: Exponent, alpha: Exponent):
    """Return ``(factor, new_exponent)`` for ``d^alpha x^exp``, or ``None`` when it vanishes."""
    factor = 1
    out = []
    for e, a in zip(exp, alpha):
        if a > e:
            return None
        if a:
            factor *= falling(e, a)
        out.append(e - a)
    return factor, tuple(out)


def add_exp(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


class Polynomial:
    """Immutable sparse polynomial in ``dim`` variables ``x1..xm``.

    ``terms`` maps exponent tuples to nonzero coefficients.
    """

    __slots__ = ("dim", "_terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[Exponent, Number] | Iterable = ()):
        if dim < 0:
            raise ValueError("dim must be nonnegative")
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: Dict[Exponent, Number] = {}
        for exp, c in items:
            exp = tuple(int(e) for e in exp)
            if len(exp) != dim:
                raise DimensionError(f"exponent {exp} has length {len(exp)}, expected {dim}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            c = to_rational(c)
            if exp in clean:
                c = clean[exp] + c
            clean[exp] = c
        self.dim = dim
        self._terms = {e: c for e, c in clean.items() if c != 0}
        self._hash = None

    @classmethod
    def _raw(cls, dim: int, terms: Dict[Exponent, Number]) -> "Polynomial":
        # trusted constructor: caller guarantees valid keys and no zero values
        p = object.__new__(cls)
        p.dim = dim
        p._terms = terms
        p._hash = None
        return p

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, dim: int) -> "Polynomial":
        return cls._raw(dim, {})

    @classmethod
    def constant(cls, dim: int, c: Number = 1) -> "Polynomial":
        c = to_rational(c)
        return cls._raw(dim, {(0,) * dim: c} if c != 0 else {})

    @classmethod
    def monomial(cls, exp: Sequence[int], c: Number = 1) -> "Polynomial":
        return cls(len(exp), {tuple(exp): c})

    @classmethod
    def variable(cls, dim: int, i: int) -> "Polynomial":
        """The coordinate function ``x_i`` (0-based ``i``)."""
        if not 0 <= i < dim:
            raise IndexError(f"variable index {i} out of range for dim {dim}")
        exp = [0] * dim
        exp[i] = 1
        return cls._raw(dim, {tuple(exp): Fraction(1)})

    # -- basic protocol ---------------------------------------------------
    @property
    def terms(self) -> Dict[Exponent, Number]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def sorted_items(self) -> List[Tuple[Exponent, Number]]:
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def __len__(self):
        return len(self._terms)

    def __iter__(self) -> Iterator[Exponent]:
        return iter(self._terms)

    def coeff(self, exp: Sequence[int]) -> Number:
        return self._terms.get(tuple(exp), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_term(self) -> Number:
        return self._terms.get((0,) * self.dim, 0)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def is_exact(self) -> bool:
        return not any(isinstance(c, float) for c in self._terms.values())

    def max_abs_coeff(self) -> float:
        return max((abs(float(c)) for c in self._terms.values()), default=0.0)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.dim == other.dim and self._terms == other._terms
        if isinstance(other, (int, Fraction, float)):
            return self._terms == ({(0,) * self.dim: other} if other != 0 else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def _check(self, other: "Polynomial"):
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, float, str)):
            return Polynomial.constant(self.dim, other)
        raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v == 0:
                out.pop(e, None)
            else:
                out[e] = v
        return Polynomial._raw(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.dim, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, s: Number) -> "Polynomial":
        s = to_rational(s)
        if s == 0:
            return Polynomial.zero(self.dim)
        return Polynomial._raw(self.dim, {e: c * s for e, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, float)):
            return self.scale(other)
        return poly_mul(self, self._coerce(other))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        if isinstance(other, float):
            return self.scale(1.0 / other)
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(self.dim, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def derive(self, alpha: Sequence[int]) -> "Polynomial":
        return poly_derive(self, alpha)

    def truncate_degree(self, d: int) -> "Polynomial":
        return Polynomial._raw(self.dim, {e: c for e, c in self._terms.items() if sum(e) <= d})

    def map_coeffs(self, f) -> "Polynomial":
        return Polynomial(self.dim, {e: f(c) for e, c in self._terms.items()})

    def evaluate(self, point: Sequence[Number]) -> Number:
        total = 0
        for e, c in self._terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t = t * x**k
            total += t
        return total

    def is_close(self, other: "Polynomial", tol: float) -> bool:
        return (self - other).max_abs_coeff() <= tol

    # -- text -------------------------------------------------------------
    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({self.dim}, {str(self)!r})"


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    """Exact product of two polynomials in the same ring."""
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if not a._terms or not b._terms:
        return Polynomial.zero(a.dim)
    out: Dict[Exponent, Number] = {}
    get = out.get
    for ea, ca in a._terms.items():
        for eb, cb in b._terms.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = get(e, 0) + ca * cb
    return Polynomial._raw(a.dim, {e: c for e, c in out.items() if c != 0})


def poly_derive(a: Polynomial, alpha: Sequence[int]) -> Polynomial:
    """Iterated partial derivative ``d^alpha a``."""
    alpha = tuple(alpha)
    if len(alpha) != a.dim:
        raise DimensionError(f"multi-index {alpha} does not match dim {a.dim}")
    if any(x < 0 for x in alpha):
        raise ValueError(f"negative multi-index {alpha}")
    if not any(alpha):
        return a
    out = {}
    for e, c in a._terms.items():
        r = derive_monomial(e, alpha)
        if r is not None:
            out[r[1]] = c * r[0]
    return Polynomial._raw(a.dim, out)


def monomials_up_to(dim: int, degree: int) -> List[Exponent]:
    """All exponent vectors of total degree <= ``degree``, graded-lex ascending."""
    out: List[Exponent] = []
    for d in range(degree + 1):
        out.extend(sorted(_compositions(d, dim)))
    return out


def _compositions(total: int, parts: int) -> Iterator[Exponent]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# nu-series


class NuSeries:
    """Truncated formal series ``sum_{r<=order} nu^r coeffs[r]`` of polynomials."""

    __slots__ = ("dim", "order", "coeffs")

    def __init__(self, coeffs: Sequence[Polynomial], order: int | None = None, dim: int | None = None):
        coeffs = list(coeffs)
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise ValueError("truncation order must be nonnegative")
        if dim is None:
            if not coeffs:
                raise ValueError("dim required for an empty coefficient list")
            dim = coeffs[0].dim
        for c in coeffs:
            if c.dim != dim:
                raise DimensionError("all coefficients must share one dimension")
        if len(coeffs) > order + 1:
            coeffs = coeffs[: order + 1]
        coeffs += [Polynomial.zero(dim)] * (order + 1 - len(coeffs))
        self.dim = dim
        self.order = order
        self.coeffs = tuple(coeffs)

    @classmethod
    def from_poly(cls, p: Polynomial, order: int) -> "NuSeries":
        return cls([p], order=order, dim=p.dim)

    @classmethod
    def constant(cls, dim: int, order: int, c: Number = 1) -> "NuSeries":
        return cls([Polynomial.constant(dim, c)], order=order, dim=dim)

    @classmethod
    def nu(cls, dim: int, order: int) -> "NuSeries":
        return cls([Polynomial.zero(dim), Polynomial.constant(dim, 1)], order=order, dim=dim)

    def __getitem__(self, r: int) -> Polynomial:
        return self.coeffs[r]

    def __eq__(self, other):
        if not isinstance(other, NuSeries):
            return NotImplemented
        return self.dim == other.dim and self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.dim, self.order, self.coeffs))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def valuation(self) -> int:
        """Lowest nu-power with a nonzero coefficient; ``order + 1`` for zero."""
        for r, c in enumerate(self.coeffs):
            if not c.is_zero():
                return r
        return self.order + 1

    def _check(self, other: "NuSeries"):
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")
        if self.order != other.order:
            raise TruncationError(f"truncation mismatch: {self.order} vs {other.order}")

    def _coerce(self, other) -> "NuSeries":
        if isinstance(other, NuSeries):
            self._check(other)
            return other
        if isinstance(other, Polynomial):
            return NuSeries.from_poly(other, self.order)
        if isinstance(other, (int, Fraction, float)):
            return NuSeries.constant(self.dim, self.order, other)
        raise TypeError(f"cannot combine NuSeries with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        return NuSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], self.order, self.dim)

    __radd__ = __add__

    def __neg__(self):
        return NuSeries([-a for a in self.coeffs], self.order, self.dim)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, s: Number) -> "NuSeries":
        return NuSeries([a.scale(s) for a in self.coeffs], self.order, self.dim)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, float)):
            return self.scale(other)
        return series_mul(self, self._coerce(other))

    def __rmul__(self, other):
        return self.__mul__(other)

    def shift(self, k: int) -> "NuSeries":
        """Multiply by ``nu^k`` (k >= 0), dropping overflow."""
        if k < 0:
            raise ValueError("shift must be nonnegative")
        zero = Polynomial.zero(self.dim)
        return NuSeries([zero] * k + list(self.coeffs[: self.order + 1 - k]), self.order, self.dim)

    def divide_nu(self) -> "NuSeries":
        """Divide by nu; requires a vanishing constant term, result has order - 1."""
        if not self.coeffs[0].is_zero():
            raise NotInvertibleError("series has a nonzero nu^0 term, cannot divide by nu")
        if self.order == 0:
            raise TruncationError("cannot divide an order-0 series by nu")
        return NuSeries(list(self.coeffs[1:]), self.order - 1, self.dim)

    def truncate(self, order: int) -> "NuSeries":
        if order > self.order:
            raise TruncationError(f"cannot extend truncation {self.order} to {order}")
        return NuSeries(list(self.coeffs[: order + 1]), order, self.dim)

    def derive(self, alpha) -> "NuSeries":
        return NuSeries([c.derive(alpha) for c in self.coeffs], self.order, self.dim)

    def max_abs_coeff(self) -> float:
        return max(c.max_abs_coeff() for c in self.coeffs)

    def __str__(self):
        return format_series(self)

    def __repr__(self):
        return f"NuSeries(order={self.order}, {str(self)!r})"


def series_mul(a: NuSeries, b: NuSeries) -> NuSeries:
    """Cauchy product truncated at the common order."""
    a._check(b)
    out = []
    for r in range(a.order + 1):
        acc = Polynomial.zero(a.dim)
        for s in range(r + 1):
            if a.coeffs[s] and b.coeffs[r - s]:
                acc = acc + poly_mul(a.coeffs[s], b.coeffs[r - s])
        out.append(acc)
    return NuSeries(out, a.order, a.dim)


def series_invert(a: NuSeries) -> NuSeries:
    """Inverse modulo ``nu^(order+1)``; the nu^0 coefficient must be a nonzero constant."""
    a0 = a.coeffs[0]
    if a0.is_zero() or not a0.is_constant():
        raise NotInvertibleError("nu^0 coefficient must be a nonzero constant")
    inv0 = a0.constant_term()
    inv0 = 1.0 / inv0 if isinstance(inv0, float) else Fraction(1) / inv0
    out = [Polynomial.constant(a.dim, inv0)]
    for n in range(1, a.order + 1):
        acc = Polynomial.zero(a.dim)
        for r in range(1, n + 1):
            if a.coeffs[r]:
                acc = acc + poly_mul(a.coeffs[r], out[n - r])
        out.append(acc.scale(-inv0))
    return NuSeries(out, a.order, a.dim)


# ---------------------------------------------------------------------------
# scalar series (polynomials in nu alone), used for parameter changes


def scalar_series_mul(a: Sequence[Number], b: Sequence[Number], order: int) -> List[Number]:
    out = [Fraction(0)] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        if x == 0:
            continue
        for j, y in enumerate(b[: order + 1 - i]):
            out[i + j] += x * y
    return out


def scalar_series_power(a: Sequence[Number], k: int, order: int) -> List[Number]:
    out: List[Number] = [Fraction(1)] + [Fraction(0)] * order
    for _ in range(k):
        out = scalar_series_mul(out, a, order)
    return out


# ---------------------------------------------------------------------------
# text form


def _format_coeff(c: Number) -> str:
    if isinstance(c, float):
        return repr(c)
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_monomial(exp: Exponent, names: Sequence[str] | None = None) -> str:
    parts = []
    for i, e in enumerate(exp):
        if e == 0:
            continue
        name = names[i] if names else f"x{i + 1}"
        parts.append(name if e == 1 else f"{name}^{e}")
    return " ".join(parts)


def _format_terms(terms: Iterable[Tuple[Number, str]]) -> str:
    out = ""
    for c, mono in terms:
        neg = c < 0
        mag = -c if neg else c
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{_format_coeff(mag)} {mono}"
        else:
            body = _format_coeff(mag)
        if not out:
            out = f"-{body}" if neg else body
        else:
            out += f" - {body}" if neg else f" + {body}"
    return out or "0"


def format_polynomial(p: Polynomial, names: Sequence[str] | None = None) -> str:
    return _format_terms((c, _format_monomial(e, names)) for e, c in p.sorted_items())


def format_series(s: NuSeries, names: Sequence[str] | None = None, nu: str = "ν") -> str:
    """Human-readable form: nu-powers ascending, monomials graded-lex within each power."""
    terms = []
    for r, p in enumerate(s.coeffs):
        nu_part = "" if r == 0 else (nu if r == 1 else f"{nu}^{r}")
        for e, c in p.sorted_items():
            mono = " ".join(x for x in (_format_monomial(e, names), nu_part) if x)
            terms.append((c, mono))
    return _format_terms(terms)


# ---------------------------------------------------------------------------
# literal syntax: "3/2*x1^2*x2 - x3 + 1/4"

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?(?:\.\d*)?(?:[eE][-+]?\d+)?)|(?P<var>x(?P<idx>\d+))"
    r"|(?P<op>[-+*^()]))"
)


def parse_polynomial(text: str, dim: int | None = None) -> Polynomial:
    """Parse the CLI literal syntax.

    A polynomial is a signed sum of terms; a term is a ``*``-separated
    product of rationals ``p/q`` and powers ``xi^k`` (1-based ``i``).  When
    ``dim`` is omitted it is inferred from the largest variable index.
    """
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError("unexpected character", text, pos)
        start = m.start() + (len(m.group(0)) - len(m.group(0).lstrip()))
        if m.group("num"):
            tokens.append(("num", to_rational(m.group("num")), start))
        elif m.group("var"):
            tokens.append(("var", int(m.group("idx")), start))
        else:
            tokens.append(("op", m.group("op"), start))
        pos = m.end()
    max_idx = max((t[1] for t in tokens if t[0] == "var"), default=0)
    if dim is None:
        dim = max(max_idx, 1)
    if max_idx > dim:
        where = next(t[2] for t in tokens if t[0] == "var" and t[1] > dim)
        raise ParseError(f"variable x{max_idx} exceeds dimension {dim}", text, where)
    for t in tokens:
        if t[0] == "var" and t[1] < 1:
            raise ParseError("variables are numbered from x1", text, t[2])

    i = 0

    def peek():
        return tokens[i] if i < len(tokens) else None

    def expect_int():
        nonlocal i
        t = peek()
        if t is None or t[0] != "num" or not isinstance(t[1], Fraction) or t[1].denominator != 1:
            raise ParseError("expected integer exponent", text, t[2] if t else len(text))
        i += 1
        return int(t[1])

    def factor() -> Polynomial:
        nonlocal i
        t = peek()
        if t is None:
            raise ParseError("unexpected end of input", text, len(text))
        if t[0] == "num":
            i += 1
            base = Polynomial.constant(dim, t[1])
        elif t[0] == "var":
            i += 1
            base = Polynomial.variable(dim, t[1] - 1)
        elif t == ("op", "(", t[2]):
            i += 1
            base = expr()
            close = peek()
            if close is None or close[:2] != ("op", ")"):
                raise ParseError("expected ')'", text, close[2] if close else len(text))
            i += 1
        else:
            raise ParseError(f"unexpected {t[1]!r}", text, t[2])
        t = peek()
        if t is not None and t[:2] == ("op", "^"):
            i += 1
            base = base ** expect_int()
        return base

    def term() -> Polynomial:
        nonlocal i
        out = factor()
        while True:
            t = peek()
            if t is not None and t[:2] == ("op", "*"):
                i += 1
                out = out * factor()
            elif t is not None and t[0] in ("num", "var"):
                out = out * factor()  # juxtaposition, e.g. "2 x1"
            else:
                return out

    def expr() -> Polynomial:
        nonlocal i
        sign = 1
        t = peek()
        if t is not None and t[0] == "op" and t[1] in "+-":
            sign = -1 if t[1] == "-" else 1
            i += 1
        out = term().scale(sign)
        while True:
            t = peek()
            if t is not None and t[0] == "op" and t[1] in "+-":
                i += 1
                nxt = term()
                out = out + nxt if t[1] == "+" else out - nxt
            else:
                return out

    if not tokens:
        raise ParseError("empty polynomial", text, 0)
    result = expr()
    if i != len(tokens):
        raise ParseError(f"unexpected {tokens[i][1]!r}", text, tokens[i][2])
    return result


# ---------------------------------------------------------------------------
# JSON form


def coeff_to_json(c: Number):
    if isinstance(c, float):
        return c
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


def coeff_from_json(v) -> Number:
    if isinstance(v, float):
        return v
    return to_rational(v if isinstance(v, str) else int(v))


def polynomial_to_json(p: Polynomial) -> list:
    return [{"exponents": list(e), "coeff": coeff_to_json(c)} for e, c in p.sorted_items()]


def polynomial_from_json(data, dim: int | None = None) -> Polynomial:
    if isinstance(data, str):
        return parse_polynomial(data, dim)
    if isinstance(data, (int, float)):
        return Polynomial.constant(dim or 0, coeff_from_json(data))
    terms = [(tuple(t["exponents"]), coeff_from_json(t["coeff"])) for t in data]
    if dim is None:
        if not terms:
            raise ValueError("cannot infer dimension of an empty term list")
        dim = len(terms[0][0])
    return Polynomial(dim, terms)


def series_to_json(s: NuSeries) -> dict:
    return {"dim": s.dim, "order": s.order, "coeffs": [polynomial_to_json(c) for c in s.coeffs]}


def series_from_json(data) -> NuSeries:
    dim = data["dim"]
    return NuSeries([polynomial_from_json(c, dim) for c in data["coeffs"]], data["order"], dim)


def multinomial_splits(n: int, parts: int) -> List[Tuple[int, Tuple[int, ...]]]:
    """All ways to write ``n`` as an ordered sum of ``parts`` nonnegative ints, with multinomial weight."""
    return [(math.factorial(n) // math.prod(math.factorial(k) for k in comp), comp) for comp in _compositions(n, parts)]
