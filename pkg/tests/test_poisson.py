import random
from fractions import Fraction

import pytest

from starlab.formal import Polynomial, parse_polynomial
from starlab.poisson import (
    LieAlgebra,
    LieAlgebraError,
    PoissonError,
    PoissonTensor,
    abelian,
    bracket,
    builtin_algebra,
    heisenberg3,
    is_poisson,
    jacobi_defect,
    jacobi_degree_bound,
    jacobi_witness,
    linear_poisson,
    poisson_from_json,
    poisson_to_json,
    scale,
    sl2,
    so3,
)

from conftest import random_poly


def P3(text):
    return parse_polynomial(text, 3)


X, Y, Z = P3("x1"), P3("x2"), P3("x3")


def perturbed():
    # z dx^dy + x^2 dx^dz
    return PoissonTensor(3, {(0, 1): Z, (0, 2): P3("x1^2")})


def test_bracket_examples():
    sym = PoissonTensor.symplectic(2)
    assert bracket(sym, parse_polynomial("x1", 2), parse_polynomial("x2", 2)) == Polynomial.constant(2)
    u = P3("x1^2 x3 + x2")
    H = linear_poisson(heisenberg3())
    assert bracket(H, u, u).is_zero()
    assert bracket(H, X, Y) == Z


def test_linear_poisson_entries():
    H = linear_poisson(heisenberg3())
    assert H[0, 1] == Z and H[1, 0] == -Z and H[0, 2].is_zero()
    S = linear_poisson(so3())
    assert (S[0, 1], S[1, 2], S[2, 0]) == (Z, X, Y)
    assert all(e.is_zero() for row in linear_poisson(abelian(3)).entries for e in row)


def test_antisymmetry_enforced():
    with pytest.raises(PoissonError):
        PoissonTensor(2, [[0, 1], [1, 0]])
    with pytest.raises(PoissonError):
        PoissonTensor(2, [[1, 0], [0, -1]])


def test_lie_algebra_validation():
    with pytest.raises(LieAlgebraError):
        LieAlgebra(3, {(0, 1): {0: 1}, (1, 2): {1: 1}})
    for g in (heisenberg3(), so3(), sl2(), abelian(4)):
        g.validate()


def test_builtin_names():
    assert builtin_algebra("so3").dim == 3
    assert builtin_algebra("abelian(5)").dim == 5
    assert builtin_algebra("so(3)") is None


def test_jacobi_constant_and_linear():
    rng = random.Random(0)
    sym = PoissonTensor.symplectic(4)
    for _ in range(5):
        u, v, w = (random_poly(rng, 4, 3) for _ in range(3))
        assert jacobi_defect(sym, u, v, w).is_zero()
    for g in (heisenberg3(), so3(), sl2()):
        assert jacobi_witness(linear_poisson(g), each_degree=2) is None


def test_perturbed_tensor_fails_jacobi():
    Pt = perturbed()
    assert jacobi_defect(Pt, X, Y, Z) == P3("-2 x1 x3")
    found = jacobi_witness(Pt)
    assert found is not None and not found[3].is_zero()
    assert not is_poisson(Pt)


def test_degree_bound():
    assert jacobi_degree_bound(PoissonTensor.symplectic(2)) == 3
    assert jacobi_degree_bound(linear_poisson(so3())) == 4
    assert jacobi_degree_bound(perturbed()) == 5


def test_scale():
    H = linear_poisson(heisenberg3())
    assert scale(H, 1) == H
    assert all(e.is_zero() for row in scale(H, 0).entries for e in row)
    u, v = P3("x1^2 + x3"), P3("x2 x3")
    assert bracket(scale(H, 2), u, v) == bracket(H, u, v).scale(2)


def test_leibniz_random():
    rng = random.Random(1)
    S = linear_poisson(so3())
    for _ in range(20):
        u, v, w = (random_poly(rng, 3, 3) for _ in range(3))
        assert bracket(S, u, v * w) == bracket(S, u, v) * w + bracket(S, u, w) * v


def test_json_round_trips():
    for g in (heisenberg3(), so3(), sl2()):
        assert LieAlgebra.from_json(g.to_json()) == g
    Pt = perturbed()
    assert poisson_from_json(poisson_to_json(Pt)) == Pt
    doc = {"dim": 3, "entries": [{"i": 1, "j": 2, "value": "x3"}, {"i": 1, "j": 3, "value": "x1^2"}]}
    assert poisson_from_json(doc) == Pt
    doc = {"dim": 2, "matrix": [["0", "1/2"], ["-1/2", "0"]]}
    assert poisson_from_json(doc)[0, 1] == Polynomial.constant(2, Fraction(1, 2))
