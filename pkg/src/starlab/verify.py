"""Bulk exact evaluation of associativity defects on monomial families.

Per-triple evaluation in pure Python is too slow for a few hundred
thousand triples, so the star product is tabulated on the monomial basis
as integer sparse matrices (every cochain is scaled by the lcm of its
denominators) and the two bracketings are contracted with scipy.  All
arithmetic is int64; when a magnitude bound says an order could overflow,
that order is evaluated triple by triple with rationals instead, so a zero
result is always an exact statement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence

import numpy as np
import scipy.sparse as sp

from .cochain import MultiDiffOp, StarProduct, assoc_defect
from .formal import Polynomial, monomials_up_to

_LIMIT = 2 ** 62


def _denominator_lcm(op: MultiDiffOp) -> int:
    q = 1
    for _, c in op.flat_items():
        if isinstance(c, float):
            raise TypeError("bulk verification needs exact coefficients")
        q = math.lcm(q, Fraction(c).denominator)
    return q


def _falling(a: np.ndarray, k: int) -> np.ndarray:
    out = np.ones_like(a)
    for t in range(k):
        out = out * (a - t)
    return out


class _Codec:
    """Integer codes for exponent vectors, ``sum e_i base^i``."""

    def __init__(self, dim: int, base: int):
        self.dim = dim
        self.base = base
        self.weights = base ** np.arange(dim, dtype=np.int64)

    def encode(self, exps: np.ndarray) -> np.ndarray:
        return exps @ self.weights

    def decode(self, codes: np.ndarray) -> np.ndarray:
        return (codes[:, None] // self.weights) % self.base


def _tabulate(op: MultiDiffOp, scale: int, left: np.ndarray, right: np.ndarray, codec: _Codec):
    """``scale * op(x^a, x^b)`` for all ``a`` in ``left``, ``b`` in ``right``.

    Returns COO arrays ``(a_index, b_index, out_code, value)``.
    """
    ia, ib, oc, vals = [], [], [], []
    for (derivs, mono), c in op.flat_items():
        alpha, beta = derivs
        w = Fraction(c) * scale
        if w.denominator != 1:
            raise ValueError("scale does not clear denominators")
        w = int(w)
        fa = np.ones(len(left), dtype=np.int64)
        for i, k in enumerate(alpha):
            if k:
                fa = fa * _falling(left[:, i], k)
        fb = np.ones(len(right), dtype=np.int64)
        for i, k in enumerate(beta):
            if k:
                fb = fb * _falling(right[:, i], k)
        a_idx = np.nonzero(fa)[0]
        b_idx = np.nonzero(fb)[0]
        if not len(a_idx) or not len(b_idx):
            continue
        A, B = np.meshgrid(a_idx, b_idx, indexing="ij")
        A = A.ravel()
        B = B.ravel()
        exps = left[A] - np.array(alpha) + right[B] - np.array(beta) + np.array(mono)
        if exps.max(initial=0) >= codec.base:
            raise ValueError("codec base too small")
        v = fa[A] * fb[B]
        if np.abs(v).max(initial=0) * abs(w) >= _LIMIT:
            raise OverflowError("coefficients too large for exact int64 evaluation")
        ia.append(A)
        ib.append(B)
        oc.append(codec.encode(exps))
        vals.append(v * w)
    if not ia:
        e = np.zeros(0, dtype=np.int64)
        return e, e, e, e
    return np.concatenate(ia), np.concatenate(ib), np.concatenate(oc), np.concatenate(vals)


@dataclass
class BulkReport:
    """Outcome of :func:`bulk_associativity`."""

    triples: int
    orders: List[int]
    nonzero: Dict[int, int] = field(default_factory=dict)
    witness: Dict[int, tuple] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not any(self.nonzero.values())


def _check_mag(*mats):
    prod = 1
    for m in mats:
        prod *= max(int(np.abs(m.data).max(initial=0)), 1)
    return prod


def bulk_associativity(s: StarProduct, degree: int, orders: Sequence[int] | None = None) -> BulkReport:
    """Evaluate the order-``k`` associator on every triple of monomials of degree <= ``degree``.

    The order-``k`` coefficient of ``(u*v)*w - u*(v*w)`` is computed for all
    triples at once; ``nonzero[k]`` counts triples where it does not vanish.
    """
    m = s.dim
    orders = list(range(1, s.order + 1)) if orders is None else list(orders)
    base_monos = np.array(monomials_up_to(m, degree), dtype=np.int64).reshape(-1, m)
    n = len(base_monos)
    ops = [s.cochain(r) for r in range(s.order + 1)]
    q = [_denominator_lcm(op) for op in ops]
    # generous exponent bound: every cochain raises degree by its coefficient degree at most
    shift = max((op.coeff_degree() for op in ops), default=0)
    codec = _Codec(m, 3 * degree + 2 * max(shift, 0) + 1)
    report = BulkReport(triples=n ** 3, orders=orders)

    def pair_matrix(op, scale, left, right):
        # rows: a * len(right) + b ; columns: output code
        a, b, c, v = _tabulate(op, scale, left, right, codec)
        rows = a * len(right) + b
        return sp.csr_matrix((v, (rows, c)), shape=(len(left) * len(right), codec.base ** m), dtype=np.int64)

    inner_cache = {}

    def inner(r):
        # op_r on base x base, with the set of intermediate monomials compacted
        if r not in inner_cache:
            M = pair_matrix(ops[r], q[r], base_monos, base_monos)
            M.sum_duplicates()
            cols = np.unique(M.indices)
            remap = np.searchsorted(cols, M.indices)
            C = sp.csr_matrix((M.data, remap, M.indptr), shape=(M.shape[0], len(cols)), dtype=np.int64)
            inner_cache[r] = (C, codec.decode(cols))
        return inner_cache[r]

    def exact_order(k):
        monos = [Polynomial.monomial(tuple(int(x) for x in e)) for e in base_monos]
        for i, u in enumerate(monos):
            for j, v in enumerate(monos):
                for l, w in enumerate(monos):
                    if not assoc_defect(s, k, u, v, w).is_zero():
                        report.nonzero[k] = report.nonzero.get(k, 0) + 1
                        report.witness.setdefault(k, tuple(tuple(int(x) for x in base_monos[t]) for t in (i, j, l)))
        report.nonzero.setdefault(k, 0)

    for k in orders:
        Q = 1
        for r in range(k + 1):
            Q = math.lcm(Q, q[r] * q[k - r])
        ncode = codec.base ** m
        tables = []
        bound = 0
        try:
            for r in range(k + 1):
                t = k - r
                factor = Q // (q[r] * q[t])
                S, mids = inner(t)
                # (u*v)*w: rows (u,v), then op_r(mid, w) tabulated as rows mid, cols (w, out)
                a, b, c, v = _tabulate(ops[r], q[r], mids, base_monos, codec)
                R = sp.csr_matrix((v, (a, b * ncode + c)), shape=(len(mids), n * ncode), dtype=np.int64)
                # u*(v*w): rows (v,w), then op_r(u, mid) tabulated as rows mid, cols (u, out)
                a, b, c, v = _tabulate(ops[r], q[r], base_monos, mids, codec)
                R2 = sp.csr_matrix((v, (b, a * ncode + c)), shape=(len(mids), n * ncode), dtype=np.int64)
                width = max(int(S.getnnz(axis=1).max(initial=1)), 1)
                bound += 2 * _check_mag(S, R) * factor * width
                tables.append((factor, S, R, R2))
        except OverflowError:
            bound = _LIMIT
        if bound >= _LIMIT:
            exact_order(k)
            continue
        acc_rows, acc_cols, acc_vals = [], [], []
        for factor, S, R, R2 in tables:
            L = (S @ R).tocoo()
            uv = L.row
            w = L.col // ncode
            acc_rows.append(uv * n + w)
            acc_cols.append(L.col % ncode)
            acc_vals.append(L.data * factor)
            L2 = (S @ R2).tocoo()
            vw = L2.row
            u = L2.col // ncode
            acc_rows.append(u * n * n + vw)
            acc_cols.append(L2.col % ncode)
            acc_vals.append(-L2.data * factor)
        rows = np.concatenate(acc_rows)
        cols = np.concatenate(acc_cols)
        vals = np.concatenate(acc_vals)
        # combine duplicates with a single sort on (row, col)
        key = rows * (codec.base ** m) + cols
        order = np.argsort(key, kind="stable")
        key = key[order]
        vals = vals[order]
        uniq, start = np.unique(key, return_index=True)
        sums = np.add.reduceat(vals, start) if len(vals) else vals
        bad = uniq[sums != 0]
        report.nonzero[k] = int(len(np.unique(bad // (codec.base ** m))))
        if len(bad):
            t = int(bad[0] // (codec.base ** m))
            triple = (t // (n * n), (t // n) % n, t % n)
            report.witness[k] = tuple(tuple(int(x) for x in base_monos[i]) for i in triple)
    return report
