"""
Tests for truncated series: the precision contract and exact identities.
"""

import random

import pytest
from sympy.polys.domains import QQ

from kreweras.errors import IntegrationError, NonUnitError, PrecisionError, SubstitutionError
from kreweras.rings import PolyCoeffRing, ScalarRing
from kreweras.series import (
    TruncSeries, series_derive, series_integrate, series_inverse, series_mul, series_sqrt, series_substitute_poly,
    substitute_coefficient_variable,
)

Q = ScalarRing.rationals()
CATALAN = [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796]


def S(coeffs, prec=None):
    return TruncSeries.from_list(Q, [QQ(c) for c in coeffs], prec)


def random_unit_series(rng, N):
    coeffs = [rng.randint(-5, 5) for _ in range(N)]
    coeffs[0] = rng.choice([-3, -1, 1, 2, 7])
    return S(coeffs)


def common(f, g):
    p = min(f.prec, g.prec)
    return f.truncate(p), g.truncate(p)


# ===== CANONICAL FORM =====

def test_canonical_form_strips_leading_zeros():
    f = S([0, 0, 3, 0], 6)
    assert f.valuation == 2
    assert f[2] == QQ(3)
    assert f[5] == QQ(0)


def test_zero_series():
    z = S([0, 0, 0])
    assert z.is_zero
    assert z.valuation == z.prec == 3


def test_coefficient_beyond_precision():
    with pytest.raises(PrecisionError):
        S([1, 2, 3])[3]


# ===== PRECISION CONTRACT =====

def test_mul_precision():
    f = S([0, 1, 0, 0, 0])       # t + O(t^5)
    g = S([1, 1, 0])              # 1 + t + O(t^3)
    h = series_mul(f, g)
    assert h.prec == 4
    assert h.coefficients() == [0, 1, 1, 0]


def test_inverse_of_one_minus_t():
    inv = series_inverse(S([1, -1], 10))
    assert inv.coefficients() == [1] * 10


def test_inverse_with_valuation():
    f = S([0, 1, -1], 8)          # t (1 - t) + O(t^8)
    inv = series_inverse(f)
    assert inv.valuation == -1
    assert inv.prec == 6
    assert [inv[n] for n in range(-1, 6)] == [1] * 7


def test_inverse_of_non_unit():
    R = PolyCoeffRing.over("x")
    f = TruncSeries.from_list(R, [R.gen("x"), 1], 4)
    with pytest.raises(NonUnitError):
        series_inverse(f)


def test_sqrt_gives_catalan():
    s = series_sqrt(S([1, -4], 12))
    assert s.prec == 12
    assert [s[n] for n in range(1, 12)] == [-2 * CATALAN[n - 1] for n in range(1, 12)]


def test_sqrt_odd_valuation():
    with pytest.raises(NonUnitError):
        series_sqrt(S([0, 1, 1], 6))


def test_derive_and_integrate_precision():
    f = S([1, 2, 3, 4], 4)
    assert series_derive(f).prec == 3
    assert series_integrate(f).prec == 5
    assert series_integrate(f)[0] == 0
    assert series_integrate(f)[4] == 1


def test_integrate_rejects_t_inverse():
    f = TruncSeries.from_dict(Q, {-1: 1, 0: 1}, 4)
    with pytest.raises(IntegrationError):
        series_integrate(f)


def test_substitute_power_of_t():
    f = series_inverse(S([1, -1], 5))
    g = series_substitute_poly(f, {3: 27})
    assert g.prec == 15
    assert g[6] == QQ(27 ** 2)
    assert g[7] == 0


def test_substitute_rejects_constant_term():
    with pytest.raises(SubstitutionError):
        series_substitute_poly(S([1, 1], 4), {0: 1, 1: 1})
    with pytest.raises(SubstitutionError):
        series_substitute_poly(S([1, 1], 4), {})


def test_substitute_coefficient_variable():
    R = PolyCoeffRing.over("x")
    x = R.gen("x")
    f = TruncSeries.from_list(R, [x, x ** 2], 4)       # x + x^2 t + O(t^4)
    g = substitute_coefficient_variable(f, "x", {1: 3}, Q)
    # 3t + 9t^3
    assert g.coefficients() == [0, 3, 0, 9]


# ===== RANDOMIZED IDENTITIES =====

def test_ring_axioms_random():
    rng = random.Random(2001)
    for _ in range(120):
        N = rng.randint(3, 9)
        f, g, h = (random_unit_series(rng, N) for _ in range(3))
        assert f * g == g * f
        assert (f * g) * h == f * (g * h)
        assert f * (g + h) == f * g + f * h


def test_inverse_random():
    rng = random.Random(2002)
    for _ in range(120):
        N = rng.randint(2, 10)
        f = random_unit_series(rng, N)
        assert f * series_inverse(f) == TruncSeries.one(Q, N)


def test_sqrt_random():
    rng = random.Random(2003)
    for _ in range(80):
        N = rng.randint(2, 9)
        coeffs = [rng.randint(-4, 4) for _ in range(N)]
        coeffs[0] = rng.choice([1, 4, 9])
        f = S(coeffs)
        s = series_sqrt(f)
        assert s * s == f


def test_calculus_random():
    rng = random.Random(2004)
    for _ in range(100):
        N = rng.randint(3, 9)
        f, g = random_unit_series(rng, N), random_unit_series(rng, N)
        assert series_derive(series_integrate(f)) == f
        lhs, rhs = common(series_derive(f * g), series_derive(f) * g + f * series_derive(g))
        assert lhs == rhs


def test_prime_field_inverse_random():
    rng = random.Random(2005)
    F = ScalarRing.prime_field(101)
    for _ in range(60):
        N = rng.randint(2, 10)
        coeffs = [rng.randint(0, 100) for _ in range(N)]
        coeffs[0] = rng.randint(1, 100)
        f = TruncSeries.from_list(F, coeffs)
        assert f * series_inverse(f) == TruncSeries.one(F, N)
