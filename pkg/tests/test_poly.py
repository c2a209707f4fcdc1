"""Sparse polynomial arithmetic and set-multilinearity."""

from fractions import Fraction

from monoforge.poly import (
    SparsePoly,
    VarPartition,
    is_set_multilinear,
    poly_equal,
)
from monoforge.seeding import stream_rng


def x(i):
    return SparsePoly.variable(i)


def test_square_of_sum():
    p = (x(0) + x(1)) * (x(0) + x(1))
    expect = (
        SparsePoly.monomial([(0, 2)])
        + 2 * SparsePoly.monomial([(0, 1), (1, 1)])
        + SparsePoly.monomial([(1, 2)])
    )
    assert poly_equal(p, expect)


def test_commutativity_and_scaling():
    assert poly_equal(x(0) + x(1), x(1) + x(0))
    assert not poly_equal(x(0), 2 * x(0))


def test_zero_terms_are_dropped():
    p = x(0) - x(0)
    assert p.num_terms() == 0 and not p
    q = x(0) * SparsePoly.const(0)
    assert q.num_terms() == 0


def test_fraction_coefficients():
    p = Fraction(1, 2) * x(0) + Fraction(1, 2) * x(0)
    assert poly_equal(p, x(0))
    assert p.evaluate({0: Fraction(2, 3)}) == Fraction(2, 3)


def test_monotone_predicate():
    assert (x(0) + 2 * x(1)).monotone()
    assert not (x(0) - x(1)).monotone()


def test_power_and_degree():
    p = (x(0) + 1) ** 3
    assert p.total_degree() == 3
    assert p.evaluate({0: 1}) == 8
    assert (SparsePoly.const(5) ** 0).evaluate({}) == 1


def test_evaluate_exact():
    p = x(0) * x(1) + x(2)
    assert p.evaluate({0: 1, 1: 1, 2: 0}) == 1
    assert p.evaluate({0: Fraction(1, 3), 1: 3, 2: Fraction(1, 7)}) == Fraction(8, 7)


def test_json_roundtrip():
    p = Fraction(-2, 3) * SparsePoly.monomial([(0, 2), (3, 1)]) + x(1)
    obj = p.to_json()
    assert obj["vars"] == 4
    q = SparsePoly.from_json(obj)
    assert poly_equal(p, q)


def test_set_multilinear():
    part = VarPartition([{0, 1}, {2, 3}])
    good = SparsePoly.monomial([(0, 1), (2, 1)]) + SparsePoly.monomial([(1, 1), (3, 1)])
    assert is_set_multilinear(good, part)
    # two picks from one block
    assert not is_set_multilinear(SparsePoly.monomial([(0, 1), (1, 1)]), part)
    # zero picks (a constant) from a nonempty block
    assert not is_set_multilinear(SparsePoly.const(1), part)
    # exponent 2 is not a pick of one variable
    assert not is_set_multilinear(SparsePoly.monomial([(0, 2), (2, 1)]), part)


def test_partition_validation():
    try:
        VarPartition([{0, 1}, {1, 2}])
        assert False, "overlap must be rejected"
    except ValueError:
        pass


def test_randomized_ring_axioms():
    rng = stream_rng(2024, "poly-axioms")
    for _ in range(60):
        polys = []
        for _ in range(3):
            terms = {}
            for _ in range(rng.randint(1, 5)):
                mono = tuple(
                    sorted(
                        {rng.randrange(4): rng.randint(1, 2) for _ in range(rng.randint(0, 3))}.items()
                    )
                )
                terms[mono] = terms.get(mono, 0) + rng.randint(-3, 3)
            polys.append(SparsePoly(terms))
        a, b, c = polys
        assert poly_equal(a * (b + c), a * b + a * c)
        assert poly_equal((a * b) * c, a * (b * c))
        point = {v: rng.randint(-4, 4) for v in range(4)}
        assert (a * b + c).evaluate(point) == a.evaluate(point) * b.evaluate(point) + c.evaluate(point)
