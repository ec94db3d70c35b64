"""Exact sparse Gauss-Jordan elimination over the rationals."""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Hashable, List, Mapping, Optional, Sequence


def solve_sparse(columns: Sequence[Mapping[Hashable, Fraction]], target: Mapping[Hashable, Fraction]) -> Optional[List[Fraction]]:
    """Solve ``sum_j x_j columns[j] = target`` exactly.

    Columns are sparse vectors keyed by row labels.  Pivots are taken
    left to right, so the returned basic solution is supported on the
    earliest linearly independent columns; free variables are zero.
    Returns ``None`` when the system is inconsistent.
    """
    # rows[key] = {col: value}, plus rhs[key]
    rows: Dict[Hashable, Dict[int, Fraction]] = {}
    for j, col in enumerate(columns):
        for key, v in col.items():
            if v != 0:
                rows.setdefault(key, {})[j] = Fraction(v)
    rhs: Dict[Hashable, Fraction] = {k: Fraction(v) for k, v in target.items() if v != 0}
    for key in rhs:
        rows.setdefault(key, {})

    # column -> set of row keys touching it
    col_rows: Dict[int, set] = {}
    for key, row in rows.items():
        for j in row:
            col_rows.setdefault(j, set()).add(key)

    pivots: Dict[int, Hashable] = {}
    used: set = set()
    for j in range(len(columns)):
        cands = [k for k in col_rows.get(j, ()) if k not in used]
        if not cands:
            continue
        pkey = min(cands, key=lambda k: (len(rows[k]), repr(k)))
        prow = rows[pkey]
        inv = 1 / prow[j]
        for c in prow:
            prow[c] *= inv
        if pkey in rhs:
            rhs[pkey] *= inv
        for key in list(col_rows[j]):
            if key == pkey:
                continue
            row = rows[key]
            f = row.get(j)
            if not f:
                continue
            for c, v in prow.items():
                nv = row.get(c, 0) - f * v
                if nv == 0:
                    if c in row:
                        del row[c]
                        col_rows[c].discard(key)
                else:
                    if c not in row:
                        col_rows.setdefault(c, set()).add(key)
                    row[c] = nv
            pr = rhs.get(pkey, 0)
            if pr:
                nr = rhs.get(key, 0) - f * pr
                if nr == 0:
                    rhs.pop(key, None)
                else:
                    rhs[key] = nr
        pivots[j] = pkey
        used.add(pkey)

    pivot_rows = used
    for key, v in rhs.items():
        if v != 0 and key not in pivot_rows:
            return None
    x = [Fraction(0)] * len(columns)
    for j, key in pivots.items():
        x[j] = rhs.get(key, Fraction(0))
    return x
