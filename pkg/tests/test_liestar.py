import random
from fractions import Fraction

import pytest

from starlab.cochain import assoc_defect, star_apply
from starlab.formal import NuSeries, Polynomial, monomials_up_to, parse_polynomial
from starlab.liestar import (
    AlgebraMismatchError,
    ExtractionError,
    PBWElement,
    bernoulli_numbers,
    bernoulli_star_left,
    cbh_product,
    extract_bidifferential,
    ug_mul,
)
from starlab.poisson import abelian, builtin_algebra, heisenberg3, so3

from conftest import random_poly


def P3(text):
    return parse_polynomial(text, 3)


def S3(*texts):
    return NuSeries([P3(t) for t in texts], len(texts) - 1, 3)


def test_ug_mul_examples():
    g = heisenberg3()
    X = PBWElement(g, P3("x1"), 2)
    Y = PBWElement(g, P3("x2"), 2)
    assert ug_mul(X, Y).series == S3("x1 x2", "1/2 x3", "0")
    assert ug_mul(X, X).series == S3("x1^2", "0", "0")
    A = PBWElement(abelian(3), P3("x1^2 + x3"), 2)
    B = PBWElement(abelian(3), P3("x2 x3"), 2)
    assert ug_mul(A, B).series == S3("x1^2 x2 x3 + x2 x3^2", "0", "0")


def test_ug_mul_mismatch():
    with pytest.raises(AlgebraMismatchError):
        ug_mul(PBWElement(heisenberg3(), P3("x1"), 1), PBWElement(so3(), P3("x1"), 1))


def test_symmetrization_round_trip():
    for g in (so3(), builtin_algebra("sl2")):
        for e in monomials_up_to(3, 6)[::7]:
            el = PBWElement(g, Polynomial.monomial(e), 6)
            assert PBWElement.from_words(g, el.to_words(), 6) == el


def test_heisenberg_products(cbh_cache):
    s = cbh_cache("heisenberg3", 3)
    assert star_apply(s, P3("x1"), P3("x2")) == S3("x1 x2", "1/2 x3", "0", "0")
    assert star_apply(s, P3("x2"), P3("x1")) == S3("x1 x2", "-1/2 x3", "0", "0")


def test_abelian_is_commutative_product():
    from starlab.liestar import cbh_star

    s = cbh_star(abelian(3), 3)
    assert all(C.is_zero() for C in s.cochains)


def test_covariance(cbh_cache):
    for name in ("heisenberg3", "so3", "sl2"):
        s = cbh_cache(name, 3)
        g = builtin_algebra(name)
        for i in range(3):
            for j in range(3):
                xi = Polynomial.variable(3, i)
                xj = Polynomial.variable(3, j)
                lhs = star_apply(s, xi, xj) - star_apply(s, xj, xi)
                br = sum((Polynomial.variable(3, k).scale(c) for k, c in g.structure(i, j).items()), Polynomial.zero(3))
                assert lhs == NuSeries([Polynomial.zero(3), br, Polynomial.zero(3), Polynomial.zero(3)], 3, 3)


def test_cochains_are_differential_with_bounded_coefficients(cbh_cache):
    s = cbh_cache("so3", 3)
    for r, C in enumerate(s.cochains, start=1):
        assert C.coeff_degree() <= r
        assert max(C.orders()) <= r


def test_extracted_cochains_match_direct_transfer(cbh_cache):
    rng = random.Random(4)
    g = so3()
    s = cbh_cache("so3", 3)
    for _ in range(6):
        u, v = random_poly(rng, 3, 3), random_poly(rng, 3, 3)
        assert star_apply(s, u, v) == cbh_product(g, u, v, 3)


def test_associativity_order_three(cbh_cache):
    s = cbh_cache("sl2", 3)
    monos = [Polynomial.monomial(e) for e in monomials_up_to(3, 2) if any(e)]
    rng = random.Random(9)
    for _ in range(30):
        u, v, w = rng.choice(monos), rng.choice(monos), rng.choice(monos)
        for k in range(1, 4):
            assert assoc_defect(s, k, u, v, w).is_zero()


def test_bernoulli_numbers():
    B = bernoulli_numbers(8)
    assert B[0] == 1 and B[1] == Fraction(-1, 2) and B[2] == Fraction(1, 6)
    assert B[3] == B[5] == B[7] == 0
    assert B[8] == Fraction(-1, 30)


def test_bernoulli_route_examples():
    g = heisenberg3()
    assert bernoulli_star_left(g, P3("x1"), P3("x2"), 3) == S3("x1 x2", "1/2 x3", "0", "0")
    assert bernoulli_star_left(abelian(3), P3("x1"), P3("x2^2 x3"), 2) == S3("x1 x2^2 x3", "0", "0")


def test_bernoulli_route_agrees_on_small_monomials(cbh_cache):
    s = cbh_cache("so3", 3)
    g = so3()
    for e in monomials_up_to(3, 3):
        M = Polynomial.monomial(e)
        for i in range(3):
            X = Polynomial.variable(3, i)
            assert bernoulli_star_left(g, X, M, 3) == star_apply(s, X, M)


def test_extraction_rejects_out_of_ansatz_data():
    # x^a, x^b -> d^2 u d^2 v is order two, so an order-one fit must fail
    def values(a, b):
        if a[0] >= 2 and b[0] >= 2:
            return {(a[0] + b[0] - 4,): Fraction(a[0] * (a[0] - 1) * b[0] * (b[0] - 1))}
        return {}

    with pytest.raises(ExtractionError):
        extract_bidifferential(1, 1, values, max_order=1)
    op = extract_bidifferential(1, 2, values, max_order=2)
    assert op.orders() == (2, 2)
