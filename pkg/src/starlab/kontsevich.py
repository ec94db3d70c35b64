"""Kontsevich graphs, their bidifferential operators and weights, to order two.

Graphs in ``G_k`` have aerial vertices ``1..k`` and ground vertices ``L``
and ``R``; vertex ``j`` emits two labelled edges whose targets are an
ordered pair of distinct elements of ``{1..k} - {j}`` together with
``{L, R}``.

Weights are integrals over configurations of ``k`` points in the upper
half-plane of the wedge of ``d phi`` for the harmonic angle
``phi(p, q) = arg((q - p)(conj(q) - p))``.  They are estimated with
scrambled Sobol points through a disk chart.

Assembly uses ``C_k = 2^-k sum_{G_k} w_G C_G(P)``, i.e. the graph series
evaluated at ``nu / 2``, which makes ``C_1(u, v) - C_1(v, u) = {u, v}``
with the weight ``1/2`` of the graph ``(L, R)``.
"""

from __future__ import annotations

import itertools
import json
import math
import os
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import qmc

from .cochain import MultiDiffOp, StarProduct, compose
from .formal import Polynomial, poly_mul, to_rational
from .poisson import PoissonTensor

Target = Union[int, str]

SCHEMA = "starlab/v1"
MAX_ORDER = 2
COLLISION_FLOOR = 1e-8
DEFAULT_TABLE = Path(__file__).with_name("data") / "kontsevich_weights.json"


class KontsevichError(ValueError):
    category = "kontsevich"


class UnsupportedOrderError(KontsevichError):
    category = "unsupported order"


class MissingWeightError(KontsevichError):
    category = "missing weight"


class ConvergenceError(KontsevichError):
    category = "non-convergence"


# ---------------------------------------------------------------------------
# graphs


@dataclass(frozen=True)
class KGraph:
    """Admissible graph: ``targets[j-1]`` is the ordered target pair of vertex ``j``.

    Targets are aerial vertex numbers ``1..k`` or the strings ``"L"``/``"R"``.
    """

    targets: Tuple[Tuple[Target, Target], ...]

    def __post_init__(self):
        k = self.k
        for j, pair in enumerate(self.targets, start=1):
            if len(pair) != 2:
                raise KontsevichError(f"vertex {j} must have exactly two outgoing edges")
            for t in pair:
                if t == j:
                    raise KontsevichError(f"vertex {j} has a loop")
                if not (t in ("L", "R") or (isinstance(t, int) and 1 <= t <= k)):
                    raise KontsevichError(f"invalid target {t!r} at vertex {j}")
            if pair[0] == pair[1]:
                raise KontsevichError(f"vertex {j} has a double edge")

    @property
    def k(self) -> int:
        return len(self.targets)

    @property
    def key(self) -> str:
        body = ";".join(f"{a},{b}" for a, b in self.targets)
        return f"k{self.k}:{body}"

    @classmethod
    def from_key(cls, key: str) -> "KGraph":
        head, _, body = key.partition(":")
        if not head.startswith("k"):
            raise KontsevichError(f"bad graph key {key!r}")
        k = int(head[1:])
        pairs = []
        if k:
            for chunk in body.split(";"):
                a, b = chunk.split(",")
                pairs.append(tuple(t if t in ("L", "R") else int(t) for t in (a, b)))
        if len(pairs) != k:
            raise KontsevichError(f"graph key {key!r} lists {len(pairs)} vertices, expected {k}")
        return cls(tuple(pairs))

    def swap_labels(self, j: int) -> "KGraph":
        """Exchange the two edge labels at vertex ``j`` (1-based)."""
        t = list(self.targets)
        a, b = t[j - 1]
        t[j - 1] = (b, a)
        return KGraph(tuple(t))

    def __str__(self):
        return self.key


def allowed_targets(k: int, j: int) -> List[Target]:
    return [i for i in range(1, k + 1) if i != j] + ["L", "R"]


def enumerate_graphs(k: int) -> List[KGraph]:
    """All of ``G_k`` in canonical order (lexicographic in the per-vertex choices)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    choices = [list(itertools.permutations(allowed_targets(k, j), 2)) for j in range(1, k + 1)]
    return [KGraph(tuple(c)) for c in itertools.product(*choices)]


def graph_count(k: int) -> int:
    """``((k+1) k)^k``, the size of ``G_k``."""
    return ((k + 1) * k) ** k if k else 1


# ---------------------------------------------------------------------------
# operators


def _derived_entry(P: PoissonTensor, i: int, j: int, ds: Sequence[int], cache) -> Polynomial:
    key = (i, j, tuple(sorted(ds)))
    hit = cache.get(key)
    if hit is None:
        alpha = [0] * P.dim
        for d in ds:
            alpha[d] += 1
        hit = P[i, j].derive(tuple(alpha))
        cache[key] = hit
    return hit


def graph_operator(G: KGraph, P: PoissonTensor) -> MultiDiffOp:
    """``C_G(P)``: sum over index maps ``I: E -> {1..m}`` of the graph's contraction."""
    m = P.dim
    k = G.k
    edges = [(j, t) for j in range(1, k + 1) for t in G.targets[j - 1]]
    incoming: Dict[Target, List[int]] = {t: [] for t in list(range(1, k + 1)) + ["L", "R"]}
    for e, (_, t) in enumerate(edges):
        incoming[t].append(e)
    cache: dict = {}
    flat: Dict = {}
    for I in itertools.product(range(m), repeat=len(edges)):
        coeff = Polynomial.constant(m, 1)
        for j in range(1, k + 1):
            entry = _derived_entry(P, I[2 * j - 2], I[2 * j - 1], [I[e] for e in incoming[j]], cache)
            if entry.is_zero():
                coeff = None
                break
            coeff = poly_mul(coeff, entry)
            if coeff.is_zero():
                coeff = None
                break
        if coeff is None:
            continue
        a = [0] * m
        b = [0] * m
        for e in incoming["L"]:
            a[I[e]] += 1
        for e in incoming["R"]:
            b[I[e]] += 1
        derivs = (tuple(a), tuple(b))
        for mono, c in coeff.items():
            key = (derivs, mono)
            flat[key] = flat.get(key, 0) + c
    return MultiDiffOp._raw(2, m, flat)


# ---------------------------------------------------------------------------
# angle and weights


def angle(p: complex, q: complex) -> float:
    """Harmonic angle ``phi(p, q)`` in ``[0, 2 pi)``; ``p`` in the open upper half-plane."""
    p = complex(p)
    q = complex(q)
    if p.imag <= 0:
        raise ValueError("p must lie in the upper half-plane")
    if q.imag < 0:
        raise ValueError("q must lie in the closed upper half-plane")
    if abs(q - p) < COLLISION_FLOOR:
        raise ValueError("coincident points")
    z = (q - p) * (q.conjugate() - p)
    return math.atan2(z.imag, z.real) % (2 * math.pi)


def angle_log_form(p: complex, q: complex) -> complex:
    """The angle through the complex logarithm, ``(1/2i) Log(z / conj(z))``.

    Returned as a complex number so callers can confirm the imaginary part
    vanishes.  The logarithm sees ``z / conj(z) = exp(2 i arg z)``, so the
    real part agrees with :func:`angle` only modulo ``pi``; the
    differentials coincide.
    """
    p = complex(p)
    q = complex(q)
    num = (q - p) * (q.conjugate() - p)
    den = (q - p.conjugate()) * (q.conjugate() - p.conjugate())
    return complex(np.log(num / den) / 2j)


def _angle_gradients(P: np.ndarray, src: int, dst: Target):
    """Gradient of ``phi(p_src, q)`` with respect to every aerial coordinate.

    ``P`` has shape ``(n, k)``; the result has shape ``(n, 2k)`` ordered
    ``(x_1, y_1, ..., x_k, y_k)``.
    """
    n, k = P.shape
    p = P[:, src]
    if dst == "L":
        q = np.zeros(n, dtype=complex)
    elif dst == "R":
        q = np.ones(n, dtype=complex)
    else:
        q = P[:, dst]
    # phi = Im log((q - p)(conj q - p)); d phi = Im(dq/(q-p) + d conj q/(conj q - p) - dp (1/(q-p) + 1/(conj q - p)))
    a = 1.0 / (q - p)
    b = 1.0 / (np.conj(q) - p)
    grad = np.zeros((n, 2 * k))
    s = a + b
    # d/dx_p: dp = 1 ; d/dy_p: dp = i
    grad[:, 2 * src] = np.imag(-s)
    grad[:, 2 * src + 1] = np.imag(-1j * s)
    if isinstance(dst, int):
        # d/dx_q: dq = 1, d conj q = 1 ; d/dy_q: dq = i, d conj q = -i
        grad[:, 2 * dst] += np.imag(a + b)
        grad[:, 2 * dst + 1] += np.imag(1j * a - 1j * b)
    return grad


def weight_density(G: KGraph, points: np.ndarray) -> np.ndarray:
    """``det`` of the angle Jacobian: the top form in ``dx_1 dy_1 ... dx_k dy_k``."""
    k = G.k
    rows = []
    for j in range(1, k + 1):
        for t in G.targets[j - 1]:
            dst = t if t in ("L", "R") else t - 1
            rows.append(_angle_gradients(points, j - 1, dst))
    J = np.stack(rows, axis=1)
    return np.linalg.det(J)


def _chart(u: np.ndarray, k: int):
    """Unit cube ``[0,1]^{2k}`` -> ``H^k`` with Jacobian, through the unit disk."""
    r = np.sqrt(u[:, 0::2])
    theta = 2 * np.pi * u[:, 1::2]
    w = r * np.exp(1j * theta)
    p = 1j * (1 + w) / (1 - w)
    jac = np.prod(np.pi * 4.0 / np.abs(1 - w) ** 4, axis=1)
    return p, jac


_GROUND_RADIUS = 0.5


def _disk_density(p: np.ndarray) -> np.ndarray:
    # uniform point of the unit disk pushed to H by w -> i(1+w)/(1-w)
    return 4.0 / (np.pi * np.abs(p + 1j) ** 4)


def _local_density(p: np.ndarray, c: np.ndarray, radius: np.ndarray, half: bool) -> np.ndarray:
    # radius uniform on (0, R): area density 1/(angle R rho) inside the (half) disk
    rho = np.abs(p - c)
    span = np.pi if half else 2 * np.pi
    inside = (rho < radius) & (rho > 0)
    out = np.zeros(p.shape, dtype=float)
    out[inside] = 1.0 / (span * radius[inside] * rho[inside]) if np.ndim(radius) else \
        1.0 / (span * radius * rho[inside])
    return out


def _mixture_chart(u: np.ndarray, k: int):
    """Unit cube ``[0,1]^{3k}`` -> ``H^k`` with inverse sampling density.

    Point ``i`` is drawn from an equal mixture of the disk chart and of
    disks around ``0``, ``1`` and the earlier points with radial density
    ``1/rho``; that density cancels the ``1/rho`` singularities of the
    angle forms at collisions, keeping the estimator's variance finite.
    """
    n = u.shape[0]
    pts = np.zeros((n, k), dtype=complex)
    dens = np.ones(n)
    for i in range(k):
        sel, a, b = u[:, 3 * i], u[:, 3 * i + 1], u[:, 3 * i + 2]
        ncomp = 3 + i
        comp = np.minimum((sel * ncomp).astype(int), ncomp - 1)
        p = np.empty(n, dtype=complex)
        m = comp == 0
        w = np.sqrt(a[m]) * np.exp(2j * np.pi * b[m])
        p[m] = 1j * (1 + w) / (1 - w)
        for c_idx, centre in ((1, 0.0), (2, 1.0)):
            m = comp == c_idx
            p[m] = centre + _GROUND_RADIUS * a[m] * np.exp(1j * np.pi * b[m])
        radii = []
        for j in range(i):
            m = comp == 3 + j
            R = pts[:, j].imag / 2
            radii.append(R)
            p[m] = pts[m, j] + R[m] * a[m] * np.exp(2j * np.pi * b[m])
        q = _disk_density(p)
        for centre in (0.0, 1.0):
            q = q + _local_density(p, centre, _GROUND_RADIUS, half=True)
        for j in range(i):
            q = q + _local_density(p, pts[:, j], radii[j], half=False)
        dens = dens * (q / ncomp)
        pts[:, i] = p
    with np.errstate(divide="ignore"):
        return pts, 1.0 / dens


def _too_close(p: np.ndarray) -> np.ndarray:
    n, k = p.shape
    bad = np.zeros(n, dtype=bool)
    for i in range(k):
        bad |= np.abs(p[:, i]) < COLLISION_FLOOR
        bad |= np.abs(p[:, i] - 1) < COLLISION_FLOOR
        bad |= p[:, i].imag < COLLISION_FLOOR
        bad |= ~np.isfinite(p[:, i])
        for j in range(i + 1, k):
            bad |= np.abs(p[:, i] - p[:, j]) < COLLISION_FLOOR
    return bad


@dataclass(frozen=True)
class Weight:
    """Numeric weight with a three-sigma error bound and optional exact value."""

    graph: KGraph
    value: float
    error_bound: float
    exact: Optional[Fraction] = None

    def __post_init__(self):
        if self.exact is not None and abs(float(self.exact) - self.value) > self.error_bound:
            raise KontsevichError(f"exact weight {self.exact} outside the error bound of {self.graph.key}")

    def best(self, exact: bool = True):
        if exact:
            if self.exact is None:
                raise MissingWeightError(f"no exact weight for graph {self.graph.key}")
            return self.exact
        return self.value

    def to_json(self) -> dict:
        out = {"value": self.value, "error": self.error_bound}
        if self.exact is not None:
            out["exact"] = f"{self.exact.numerator}/{self.exact.denominator}"
        return out


def weight(G: KGraph, samples: int = 1_000_000, seed: int = 0, batches: int = 16,
           max_error: float | None = None) -> Weight:
    """Quasi-Monte-Carlo estimate of ``w_G = (k! (2 pi)^2k)^-1 int_{H_k} wedge_j d phi_{e_j^1} d phi_{e_j^2}``.

    The sample budget is split into ``batches`` independently scrambled
    Sobol sequences seeded from ``(seed, batch)`` and mapped through
    :func:`_mixture_chart`; the error bound is three standard errors of
    the batch means plus the rejected mass.
    """
    k = G.k
    if k > MAX_ORDER:
        raise UnsupportedOrderError(f"weights are supported for k <= {MAX_ORDER}")
    if samples <= 0 or batches <= 0:
        raise ValueError("samples and batches must be positive")
    if k == 0:
        return Weight(G, 1.0, 1e-300, Fraction(1))
    norm = math.factorial(k) * (2 * math.pi) ** (2 * k)
    per = max(samples // batches, 2)
    means = []
    rejected = 0.0
    children = np.random.SeedSequence(seed).spawn(batches)
    for child in children:
        engine = qmc.Sobol(d=3 * k, scramble=True, seed=np.random.default_rng(child))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            u = engine.random(per)
        p, jac = _mixture_chart(u, k)
        bad = _too_close(p)
        f = np.zeros(per)
        good = ~bad
        if good.any():
            f[good] = weight_density(G, p[good]) * jac[good]
        means.append(f.mean() / norm)
        if bad.any():
            rejected += bad.mean() * (np.abs(f[good]).mean() if good.any() else 0.0) / norm / batches
    means = np.array(means)
    value = float(means.mean())
    err = float(3 * means.std(ddof=1) / math.sqrt(batches)) + rejected if batches > 1 else float("inf")
    err = max(err, 1e-15)
    if max_error is not None and err > max_error:
        raise ConvergenceError(f"weight of {G.key} has error bound {err:.3g} > {max_error:.3g}")
    return Weight(G, value, err)


def reconstruct(w: Weight, denominator: int = 48) -> Weight:
    """Snap to the grid ``Z / denominator`` when that is unambiguous.

    The nearest grid point is attached as the exact value only if it lies
    within the error bound and the bound is below half the grid spacing.
    """
    cand = Fraction(round(w.value * denominator), denominator)
    if w.error_bound < 0.5 / denominator and abs(float(cand) - w.value) <= w.error_bound:
        return Weight(w.graph, w.value, w.error_bound, cand)
    return w


# ---------------------------------------------------------------------------
# tables


class WeightTable:
    """Mapping from graph keys to :class:`Weight`."""

    def __init__(self, weights: Mapping[str, Weight] | Sequence[Weight] = ()):
        if isinstance(weights, Mapping):
            self._w = dict(weights)
        else:
            self._w = {w.graph.key: w for w in weights}

    def __getitem__(self, key) -> Weight:
        key = key.key if isinstance(key, KGraph) else key
        try:
            return self._w[key]
        except KeyError:
            raise MissingWeightError(f"no weight for graph {key}") from None

    def __contains__(self, key):
        key = key.key if isinstance(key, KGraph) else key
        return key in self._w

    def __len__(self):
        return len(self._w)

    def __iter__(self):
        return iter(self._w)

    def values(self):
        return self._w.values()

    def is_exact(self) -> bool:
        return all(w.exact is not None for w in self._w.values())

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "weights": {k: w.to_json() for k, w in sorted(self._w.items())}}

    @classmethod
    def from_json(cls, data: dict) -> "WeightTable":
        body = data.get("weights", data) if isinstance(data, dict) else None
        if not isinstance(body, dict):
            raise KontsevichError("weight table must be a JSON object")
        out = {}
        for key, entry in body.items():
            if key == "schema":
                continue
            G = KGraph.from_key(key)
            if isinstance(entry, (int, float, str)):
                entry = {"exact": str(entry)} if isinstance(entry, str) else {"value": entry}
            exact = to_rational(entry["exact"]) if entry.get("exact") is not None else None
            value = float(entry["value"]) if "value" in entry else float(exact)
            err = float(entry.get("error", 0.0 if exact is not None else float("inf")))
            if exact is not None:
                err = max(err, abs(float(exact) - value))
            out[key] = Weight(G, value, err, Fraction(exact) if exact is not None else None)
        return cls(out)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")

    @classmethod
    def load(cls, path=None) -> "WeightTable":
        """Read a table; the default is ``$STARLAB_WEIGHT_TABLE`` or the shipped one."""
        if path is None:
            path = os.environ.get("STARLAB_WEIGHT_TABLE") or DEFAULT_TABLE
        return cls.from_json(json.loads(Path(path).read_text()))


def compute_table(k_values: Sequence[int] = (1, 2), samples: int = 1 << 20, seed: int = 0, batches: int = 16,
                  denominator: int | None = 48, progress=None) -> WeightTable:
    """Estimate every weight for the given ``k`` and reconstruct rationals where possible."""
    out = []
    for k in k_values:
        for G in enumerate_graphs(k):
            w = weight(G, samples, seed, batches)
            if denominator:
                w = reconstruct(w, denominator)
            if progress:
                progress(w)
            out.append(w)
    return WeightTable(out)


# ---------------------------------------------------------------------------
# assembly


def kontsevich_cochain(P: PoissonTensor, k: int, table: WeightTable, exact: bool = True) -> Tuple[MultiDiffOp, MultiDiffOp]:
    """``C_k = 2^-k sum_G w_G C_G(P)`` and the coefficientwise error bound operator."""
    m = P.dim
    op = MultiDiffOp.zero(2, m)
    err = MultiDiffOp.zero(2, m)
    scale = Fraction(1, 2 ** k)
    for G in enumerate_graphs(k):
        CG = graph_operator(G, P)
        if CG.is_zero():
            continue
        w = table[G]
        value = w.best(exact)
        if value:
            op = op + CG.scale(value * scale if exact else float(value) * float(scale))
        if not exact:
            err = err + CG.map_coeffs(lambda c: abs(float(c))).scale(w.error_bound * float(scale))
    return op, err


def kontsevich_star(P: PoissonTensor, order: int, weights: WeightTable | None = None, exact: bool = True) -> StarProduct:
    """Kontsevich's star product to ``order <= 2``.

    With ``exact=True`` every weight must have an exact value and the
    cochains are rational; otherwise the numeric values are used and
    ``meta["error_ops"]`` records coefficientwise error bounds.
    """
    if order > MAX_ORDER:
        raise UnsupportedOrderError(f"Kontsevich assembly is supported for order <= {MAX_ORDER}")
    table = WeightTable.load() if weights is None else weights
    cochains, errors = [], []
    for k in range(1, order + 1):
        op, err = kontsevich_cochain(P, k, table, exact)
        cochains.append(op)
        errors.append(err)
    tol = 0.0 if exact else max((e.max_abs_coeff() for e in errors), default=0.0) * 2 + 1e-12
    return StarProduct(P, cochains, name="kontsevich", tol=tol,
                       meta={"construction": "kontsevich", "exact": exact, "error_ops": errors})


def _abs_op(op: MultiDiffOp) -> MultiDiffOp:
    return op.map_coeffs(lambda c: abs(float(c)))


def associator_bound(s: StarProduct, k: int) -> MultiDiffOp:
    """Coefficientwise bound on the error of the order-``k`` associator.

    Propagates the per-cochain error operators through the bilinear
    compositions: ``|A + dA| |B + dB| - |A| |B|`` for each composition term.
    """
    from .cochain import MultiDiffOp as _Op

    errors = s.meta.get("error_ops")
    m = s.dim
    ident = _Op.identity(m)
    if not errors:
        return _Op.zero(3, m)

    def ab(r):
        return _abs_op(s.cochain(r))

    def er(r):
        return _Op.zero(2, m) if r == 0 else _abs_op(errors[r - 1])

    out = _Op.zero(3, m)
    for r in range(k + 1):
        t = k - r
        for outer_first in (True, False):
            inner_args = (lambda X: [X, ident]) if outer_first else (lambda X: [ident, X])
            full = compose(ab(r) + er(r), inner_args(ab(t) + er(t)))
            base = compose(ab(r), inner_args(ab(t)))
            out = out + (full - base)
    return out
