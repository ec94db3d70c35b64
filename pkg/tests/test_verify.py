import pytest

from starlab import verify
from starlab.cochain import MultiDiffOp, StarProduct, assoc_defect
from starlab.formal import Polynomial
from starlab.moyal import moyal_star
from starlab.poisson import PoissonTensor


def broken():
    s = moyal_star(PoissonTensor.symplectic(2), 2)
    return StarProduct(s.poisson, [s.cochain(1), MultiDiffOp(2, 2, [(1, ((1, 0), (1, 0)))])])


def test_moyal_passes():
    report = verify.bulk_associativity(moyal_star(PoissonTensor.symplectic(2), 4), 3)
    assert report.ok and report.triples == 10 ** 3
    assert report.nonzero == {1: 0, 2: 0, 3: 0, 4: 0}


def test_broken_product_detected_with_witness():
    s = broken()
    report = verify.bulk_associativity(s, 2)
    assert not report.ok and report.nonzero[1] == 0 and report.nonzero[2] > 0
    u, v, w = (Polynomial.monomial(e) for e in report.witness[2])
    assert not assoc_defect(s, 2, u, v, w).is_zero()


def test_counts_match_per_triple_route(monkeypatch):
    s = broken()
    fast = verify.bulk_associativity(s, 2)
    monkeypatch.setattr(verify, "_LIMIT", 1)
    slow = verify.bulk_associativity(s, 2)
    assert fast.nonzero == slow.nonzero
    assert fast.witness.keys() == slow.witness.keys()


def test_float_cochains_rejected():
    s = moyal_star(PoissonTensor.symplectic(2), 1)
    f = StarProduct(s.poisson, [s.cochain(1).map_coeffs(float)], tol=1e-9)
    with pytest.raises(TypeError):
        verify.bulk_associativity(f, 2)
