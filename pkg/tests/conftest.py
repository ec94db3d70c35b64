import random
from fractions import Fraction

import pytest

from starlab.formal import Polynomial, parse_polynomial
from starlab.liestar import cbh_star
from starlab.moyal import moyal_star
from starlab.poisson import PoissonTensor, builtin_algebra


def poly(text, dim):
    return parse_polynomial(text, dim)


def random_poly(rng: random.Random, dim: int, degree: int, terms: int = 3, constant: bool = True) -> Polynomial:
    out = Polynomial.zero(dim)
    for _ in range(terms):
        exp = [0] * dim
        for _ in range(rng.randint(0 if constant else 1, degree)):
            exp[rng.randrange(dim)] += 1
        out = out + Polynomial.monomial(tuple(exp), Fraction(rng.choice([1, -1, 2, -3, 1, 5]), rng.choice([1, 1, 1, 2])))
    return out


@pytest.fixture(scope="session")
def moyal2():
    return moyal_star(PoissonTensor.symplectic(2), 4)


@pytest.fixture(scope="session")
def cbh_cache():
    cache = {}

    def get(name, order):
        key = (name, order)
        if key not in cache:
            cache[key] = cbh_star(builtin_algebra(name), order)
        return cache[key]

    return get


def random_gauge_op(rng: random.Random, dim: int, max_order: int = 3, max_degree: int = 2, terms: int = 3):
    """A differential operator of order 2..max_order with no derivation part, so the Poisson tensor is kept."""
    from starlab.cochain import MultiDiffOp

    out = []
    for _ in range(terms):
        a = [0] * dim
        for _ in range(rng.randint(2, max_order)):
            a[rng.randrange(dim)] += 1
        g = [0] * dim
        for _ in range(rng.randint(0, max_degree)):
            g[rng.randrange(dim)] += 1
        c = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
        out.append((Polynomial.monomial(tuple(g), c), (tuple(a),)))
    return MultiDiffOp(1, dim, out)


def random_equivalence(rng: random.Random, dim: int, order: int, with_param: bool = True):
    from starlab.equiv import Equivalence

    ops = [random_gauge_op(rng, dim) for _ in range(order)]
    param = None
    if with_param:
        param = [Fraction(rng.choice([1, 1, 2, -1]), rng.choice([1, 2]))] + \
            [Fraction(rng.randint(-2, 2), rng.randint(1, 3)) for _ in range(order - 1)]
    return Equivalence(dim, ops, param)


ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
