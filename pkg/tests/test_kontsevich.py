import cmath
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from starlab.cochain import associator_operator, bracket_op
from starlab.kontsevich import (
    KGraph,
    KontsevichError,
    MissingWeightError,
    UnsupportedOrderError,
    Weight,
    WeightTable,
    angle,
    angle_log_form,
    enumerate_graphs,
    graph_count,
    graph_operator,
    kontsevich_star,
    reconstruct,
    weight,
    weight_density,
)
from starlab.moyal import moyal_star
from starlab.poisson import PoissonTensor, heisenberg3, linear_poisson, scale, so3


@pytest.fixture(scope="module")
def table():
    return WeightTable.load()


def test_graph_counts():
    assert [len(enumerate_graphs(k)) for k in range(3)] == [1, 2, 36]
    assert [graph_count(k) for k in range(4)] == [1, 2, 36, 1728]
    assert [g.key for g in enumerate_graphs(1)] == ["k1:L,R", "k1:R,L"]


def test_admissibility_rules():
    with pytest.raises(KontsevichError):
        KGraph((("L", "L"),))
    with pytest.raises(KontsevichError):
        KGraph(((1, "L"),))
    for G in enumerate_graphs(2):
        assert KGraph.from_key(G.key) == G


def test_order_one_operators():
    Pt = linear_poisson(so3())
    LR, RL = enumerate_graphs(1)
    assert graph_operator(LR, Pt) == bracket_op(Pt)
    assert graph_operator(RL, Pt) == -bracket_op(Pt)


def test_constant_tensor_kills_graphs_with_aerial_edges():
    Pt = PoissonTensor.symplectic(2)
    for G in enumerate_graphs(2):
        aerial = any(isinstance(t, int) for pair in G.targets for t in pair)
        if aerial:
            assert graph_operator(G, Pt).is_zero()


def test_label_swap_negates_operator():
    Pt = linear_poisson(so3())
    for G in enumerate_graphs(2)[::5]:
        for j in (1, 2):
            assert graph_operator(G.swap_labels(j), Pt) == -graph_operator(G, Pt)


def test_graph_operator_linear_in_tensor():
    Pt = linear_poisson(heisenberg3())
    for G in enumerate_graphs(2)[::7]:
        assert graph_operator(G, scale(Pt, 3)) == graph_operator(G, Pt).scale(9)


def test_angle_is_real_and_translation_invariant():
    p, q = 0.3 + 0.7j, -0.4 + 0.2j
    assert abs(angle_log_form(p, q).imag) < 1e-12
    for t in (-2.0, 0.5, 3.25):
        assert angle(p + t, q + t) == pytest.approx(angle(p, q), abs=1e-12)


def test_angle_against_direct_formula():
    for p, q in ((1j, 0j), (1j, 2 + 0j), (0.2 + 0.5j, 1 + 0j), (0.5 + 1j, 0.1 + 0.3j)):
        direct = cmath.phase((q - p) * (q.conjugate() - p)) % (2 * math.pi)
        assert angle(p, q) == pytest.approx(direct, abs=1e-12)
        # the Log form only agrees modulo pi
        diff = (angle(p, q) - angle_log_form(p, q).real) % math.pi
        assert min(diff, math.pi - diff) < 1e-12


def test_angle_rejects_bad_points():
    with pytest.raises(ValueError):
        angle(-1j, 0)
    with pytest.raises(ValueError):
        angle(1j, 1j)


def test_density_matches_finite_differences():
    G = KGraph(((2, "L"), ("L", "R")))
    pts = np.array([[0.3 + 0.8j, -0.5 + 0.4j]])
    h = 1e-6
    jac = np.zeros((4, 4))
    edges = [(0, 1), (0, "L"), (1, "L"), (1, "R")]
    for c in range(4):
        dp = np.zeros(2, dtype=complex)
        dp[c // 2] = h if c % 2 == 0 else 1j * h
        for r, (src, dst) in enumerate(edges):
            def phi(P):
                q = {"L": 0j, "R": 1 + 0j}.get(dst, P[dst] if isinstance(dst, int) else None)
                return angle(P[src], q)
            a = phi(pts[0] + dp)
            b = phi(pts[0] - dp)
            jac[r, c] = ((a - b + math.pi) % (2 * math.pi) - math.pi) / (2 * h)
    assert weight_density(G, pts)[0] == pytest.approx(np.linalg.det(jac), rel=1e-5)


def test_weight_determinism_and_sign():
    LR, RL = enumerate_graphs(1)
    a = weight(LR, 20_000, seed=3)
    b = weight(LR, 20_000, seed=3)
    assert a == b
    assert weight(RL, 20_000, seed=3).value == pytest.approx(-a.value)
    assert abs(a.value - 0.5) <= a.error_bound
    with pytest.raises(UnsupportedOrderError):
        weight(KGraph(((2, 3), (1, 3), (1, 2))), 100)


def test_reconstruct():
    G = enumerate_graphs(1)[0]
    assert reconstruct(Weight(G, 0.5003, 0.001)).exact == Fraction(1, 2)
    assert reconstruct(Weight(G, 0.5003, 0.02)).exact is None
    assert reconstruct(Weight(G, -0.0210, 0.0005)).exact == Fraction(-1, 48)
    with pytest.raises(KontsevichError):
        Weight(G, 0.4, 0.01, Fraction(1, 2))


def test_shipped_table(table):
    assert len(table) == 38 and table.is_exact()
    values = {w.exact for w in table.values()}
    assert values <= {Fraction(s, d) for s in (-1, 0, 1) for d in (1, 2, 8, 24, 48)}
    assert table["k1:L,R"].exact == Fraction(1, 2)
    for key in ("k2:L,R;L,R", "k2:2,R;1,L", "k2:L,2;L,R"):
        assert table[key].exact == -table[KGraph.from_key(key).swap_labels(1)].exact


def test_table_entries_reproducible(table):
    for key in ("k2:L,R;L,R", "k2:2,R;1,L", "k2:R,L;1,R"):
        w = weight(KGraph.from_key(key), 1 << 17, seed=99, batches=16)
        assert abs(w.value - float(table[key].exact)) <= w.error_bound + table[key].error_bound


def test_table_json_and_env(tmp_path, monkeypatch, table):
    path = tmp_path / "t.json"
    table.save(path)
    again = WeightTable.load(path)
    assert {k: again[k].exact for k in again} == {k: table[k].exact for k in table}
    monkeypatch.setenv("STARLAB_WEIGHT_TABLE", str(path))
    assert len(WeightTable.load()) == 38
    partial = {"weights": {"k1:L,R": {"value": 0.5, "error": 0.001, "exact": "1/2"}}}
    path.write_text(json.dumps(partial))
    with pytest.raises(MissingWeightError):
        kontsevich_star(linear_poisson(so3()), 1, WeightTable.load(path))


def test_assembly_examples(table):
    Pt = linear_poisson(so3())
    s = kontsevich_star(Pt, 2, table)
    assert s.is_exact()
    C1 = s.cochain(1)
    assert C1 - C1.transpose() == bracket_op(Pt)
    zero = kontsevich_star(PoissonTensor.zero(3), 2, table)
    assert all(C.is_zero() for C in zero.cochains)
    with pytest.raises(UnsupportedOrderError):
        kontsevich_star(Pt, 3, table)


def test_constant_tensor_gives_moyal(table):
    Pt = PoissonTensor(4, [[0, 1, 0, Fraction(1, 2)], [-1, 0, 2, 0], [0, -2, 0, 1], [Fraction(-1, 2), 0, -1, 0]])
    assert kontsevich_star(Pt, 2, table).cochains == moyal_star(Pt, 2).cochains


def test_universality_same_weights_for_different_tensors(table):
    used = []

    class Recording(WeightTable):
        def __getitem__(self, key):
            used.append(key.key if isinstance(key, KGraph) else key)
            return super().__getitem__(key)

    rec = Recording(list(table.values()))
    kontsevich_star(linear_poisson(so3()), 2, rec)
    first = list(used)
    used.clear()
    kontsevich_star(linear_poisson(heisenberg3()), 2, rec)
    assert set(used) <= set(first)


def test_numeric_mode_tolerances(table):
    s = kontsevich_star(linear_poisson(heisenberg3()), 2, table, exact=False)
    assert not s.is_exact() and s.tol > 0
    assert associator_operator(s, 2).max_abs_coeff() <= s.tol
