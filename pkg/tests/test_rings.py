"""
Tests for the exact coefficient rings:
1. Normalized rationals and their text form
2. Polynomials across variable sets
3. Univariate rational functions (canonical form, field axioms)
4. Laurent polynomials (units, normalization, selection)
"""

import random

import pytest
from sympy.polys.domains import QQ

from kreweras.errors import NonUnitError, ZeroDenominatorError
from kreweras.rings import (
    FractionCoeffRing, LaurentRing, PolyCoeffRing, RatFunc, ScalarRing, make_ring, poly_arith, rat, rat_from_text,
    rat_to_text, ratfunc_normalize, ratfunc_ring, ring_names,
)

RX = ratfunc_ring("x")
X = RX.gens[0]


def random_poly(rng, max_deg=3, bound=4):
    return sum((rng.randint(-bound, bound) * X ** i for i in range(rng.randint(0, max_deg) + 1)), RX.zero)


def random_ratfunc(rng):
    den = random_poly(rng)
    while not den:
        den = random_poly(rng)
    return ratfunc_normalize(random_poly(rng), den)


# ===== RATIONALS =====

def test_rat_is_normalized():
    assert rat(2, 4) == rat(1, 2)
    assert rat(-3, -6) == rat(1, 2)


def test_rat_zero_denominator():
    with pytest.raises(ZeroDenominatorError):
        rat(1, 0)


def test_rat_text():
    assert rat_to_text(rat(-3, 6)) == "-1/2"
    assert rat_to_text(5) == "5/1"
    assert rat_from_text("7") == rat(7)
    assert rat_from_text("-10/4") == rat(-5, 2)


# ===== POLYNOMIALS =====

def test_make_ring_rejects_unknown_variable():
    with pytest.raises(ValueError):
        make_ring(("x", "w"))
    with pytest.raises(ValueError):
        make_ring(("x", "x"))


def test_poly_arith_embeds_into_common_ring():
    Rx = make_ring(("x",))
    Ry = make_ring(("y",))
    p = Rx.gens[0] + 1
    q = Ry.gens[0] - 2
    s = poly_arith(p, q, "mul")
    assert ring_names(s.ring) == ("x", "y")
    x, y = s.ring.gens
    assert s == x * y - 2 * x + y - 2


def test_poly_arith_unknown_operation():
    Rx = make_ring(("x",))
    with pytest.raises(ValueError):
        poly_arith(Rx.one, Rx.one, "div")


# ===== RATIONAL FUNCTIONS =====

def test_ratfunc_lowest_terms():
    f = ratfunc_normalize(X ** 2 - 1, X - 1)
    assert f == RatFunc(X + 1, RX.one)


def test_ratfunc_monic_denominator():
    f = ratfunc_normalize(RX.one, 2 * X)
    assert f.den == X
    assert f.num == RX(QQ(1, 2))


def test_ratfunc_zero_denominator():
    with pytest.raises(ZeroDenominatorError):
        ratfunc_normalize(X, RX.zero)


def test_ratfunc_evaluate_pole():
    f = ratfunc_normalize(RX.one, X - 3)
    assert f.evaluate(QQ(4)) == QQ(1)
    with pytest.raises(ZeroDenominatorError):
        f.evaluate(QQ(3))


def test_ratfunc_field_axioms_random():
    rng = random.Random(1001)
    cases = 0
    for _ in range(150):
        a, b, c = random_ratfunc(rng), random_ratfunc(rng), random_ratfunc(rng)
        assert (a + b) * c == a * c + b * c
        assert (a * b) * c == a * (b * c)
        assert a - a == RatFunc(RX.zero, RX.one)
        if a:
            assert a / a == RatFunc(RX.one, RX.one)
        assert (a * b).derivative() == a.derivative() * b + a * b.derivative()
        cases += 1
    assert cases == 150


# ===== LAURENT POLYNOMIALS =====

def test_laurent_units():
    R = LaurentRing(("x", "y"))
    x, y = R.gen("x"), R.gen("y")
    assert x * R.inverse(x) == R.one
    assert R.inverse(3 * x * y ** 2) * (x * y ** 2) == R.convert(QQ(1, 3))
    with pytest.raises(NonUnitError):
        R.inverse(x + 1)


def test_laurent_negative_exponent_on_polynomial_variable():
    R = LaurentRing(("x", "y"), laurent=("x",))
    with pytest.raises(ValueError):
        R.monomial((0, -1))
    assert R.monomial((-2, 1)).degree_range("x") == (-2, -2)


def test_laurent_select_and_to_poly():
    R = LaurentRing(("x",))
    x = R.gen("x")
    f = x ** -2 + 3 + 5 * x ** 4
    positive = f.select(lambda e: e[0] > 0)
    assert positive == 5 * x ** 4
    assert positive.to_poly() == 5 * R.poly_ring.gens[0] ** 4
    with pytest.raises(ValueError):
        f.to_poly()


def test_laurent_ring_axioms_random():
    rng = random.Random(1002)
    R = LaurentRing(("x", "y"))

    def rand():
        return R.from_terms(((rng.randint(-2, 2), rng.randint(-2, 2)), rng.randint(-3, 3)) for _ in range(4))

    for _ in range(150):
        a, b, c = rand(), rand(), rand()
        assert (a + b) * c == a * c + b * c
        assert (a * b) * c == a * (b * c)
        assert a + b == b + a
        assert (a - a).is_zero


# ===== COEFFICIENT RINGS =====

def test_scalar_ring_prime_field():
    F = ScalarRing.prime_field(7)
    assert F.characteristic == 7
    assert F.convert(QQ(1, 2)) * F.convert(2) == F.one
    assert F.to_int(F.convert(-1)) == 6
    with pytest.raises(NonUnitError):
        F.inverse(F.zero)


def test_poly_coeff_ring_units_and_squares():
    R = PolyCoeffRing.over("x")
    x = R.gen("x")
    assert R.inverse(R.convert(4)) == R.convert(QQ(1, 4))
    with pytest.raises(NonUnitError):
        R.inverse(x)
    assert R.sqrt(4 * (x + 1) ** 2) in (2 * (x + 1), -2 * (x + 1))
    with pytest.raises(NonUnitError):
        R.sqrt(x)


def test_fraction_coeff_ring_terms_needs_polynomial():
    F = FractionCoeffRing("x")
    with pytest.raises(NonUnitError):
        list(F.terms(ratfunc_normalize(RX.one, X)))
    assert dict(F.terms(F.convert(X + 2))) == {(1,): QQ(1), (0,): QQ(2)}
