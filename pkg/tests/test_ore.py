"""
Tests for the Ore algebra of differential operators:
1. Multiplication and right division (L = rquo*M + rrem)
2. lclm right-divisibility
3. Closure constructions checked by applying them to exact series
4. The coefficient recurrence
"""

import random
from math import factorial

import pytest
from sympy.polys.domains import QQ

from kreweras.errors import OperatorError, PrecisionError, SubstitutionError, ZeroDenominatorError
from kreweras.ore import (
    N, T, X, OreOp, annihilator_of_algebraic, apply, hyperexponential_annihilator, integral_annihilator, lclm, mul,
    product_annihilator, rdivmod, rquo, rrem, substitute_argument, sum_annihilator, to_field, to_recurrence,
)
from kreweras.rings import ScalarRing
from kreweras.series import (
    TruncSeries, series_integrate, series_inverse, series_sqrt, series_substitute_poly,
)

Q = ScalarRing.rationals()
PREC = 14


def exp_series(k, prec=PREC):
    """exp(k t)"""
    return TruncSeries.from_list(Q, [QQ(k) ** n / factorial(n) for n in range(prec)])


def random_t_poly(rng, max_deg=2, constant=None):
    coeffs = [rng.randint(-3, 3) for _ in range(max_deg + 1)]
    if constant is not None:
        coeffs[0] = constant
    return coeffs


def poly_of(coeffs):
    return sum((c * T ** i for i, c in enumerate(coeffs)), 0 * T)


def series_of(coeffs, prec=PREC):
    return TruncSeries.from_list(Q, [QQ(c) for c in coeffs], prec)


def random_rational(rng):
    """(operator-side rational function, its series) with a denominator b(0) = 1."""
    a = random_t_poly(rng)
    while not any(a):
        a = random_t_poly(rng)
    b = random_t_poly(rng, constant=1)
    value = to_field(poly_of(a)) / to_field(poly_of(b))
    return value, series_of(a) * series_inverse(series_of(b))


def random_operator(rng, order, with_x=False):
    coeffs = []
    for i in range(order + 1):
        c = poly_of(random_t_poly(rng))
        if with_x and rng.random() < 0.5:
            c = c + rng.randint(1, 2) * X
        coeffs.append(c)
    while not coeffs[-1]:
        coeffs[-1] = poly_of(random_t_poly(rng))
    return OreOp.from_coeffs(coeffs)


# ===== BASIC ALGEBRA =====

def test_commutation_rule():
    # D t = t D + 1
    assert mul(OreOp.d(), OreOp.scalar(T)) == OreOp.from_coeffs([1, T])


def test_apply_kills_geometric_series():
    L = OreOp.from_coeffs([-1, 1 - T])
    f = series_inverse(series_of([1, -1]))
    r = apply(L, f)
    assert r.is_zero
    assert r.prec == PREC - 1


def test_apply_needs_precision():
    L = OreOp.from_coeffs([0, 0, 1])
    with pytest.raises(PrecisionError):
        apply(L, series_of([1, 2], 2))


def test_normalized_removes_left_unit():
    L = OreOp.from_coeffs([-1, 1 - T])
    assert L.left_scale(T + 2).same_up_to_unit(L)
    assert L.left_scale(QQ(-7, 3)).normalized() == L.normalized()
    assert L.normalized().poly_coeffs()[-1].LC > 0


def test_normalized_clears_denominators():
    L = OreOp.from_coeffs([to_field(1) / (X - T), to_field(T) / (2 * X)])
    assert not L.is_polynomial()
    M = L.normalized()
    assert M.is_polynomial()
    assert M.poly_coeffs() == (2 * X, T * X - T ** 2)
    assert M.same_up_to_unit(L)


def test_specialize_x_leading_coefficient():
    L = OreOp.from_coeffs([-1, X])
    assert L.specialize_x(2) == OreOp.from_coeffs([-1, 2])
    with pytest.raises(ZeroDenominatorError):
        L.specialize_x(0)


def test_division_by_zero_operator():
    with pytest.raises(ZeroDenominatorError):
        rdivmod(OreOp.d(), OreOp(()))


def test_lclm_with_zero_operator():
    with pytest.raises(OperatorError):
        lclm(OreOp.d(), OreOp(()))


def test_right_division_random():
    rng = random.Random(4001)
    for case in range(80):
        L = random_operator(rng, rng.randint(0, 4), with_x=case % 4 == 0)
        M = random_operator(rng, rng.randint(1, 2), with_x=case % 5 == 0)
        q, r = rdivmod(L, M)
        assert q * M + r == L
        assert r.order < M.order
        assert rquo(L, M) == q and rrem(L, M) == r


def test_product_then_divide_random():
    rng = random.Random(4002)
    for _ in range(60):
        A = random_operator(rng, rng.randint(0, 2))
        M = random_operator(rng, rng.randint(1, 2))
        assert rrem(A * M, M).is_zero
        assert rquo(A * M, M) == A


# ===== LCLM =====

def test_lclm_of_exponentials():
    L = OreOp.from_coeffs([-1, 0, 1])       # e^t, e^-t
    M = OreOp.from_coeffs([-4, 0, 1])       # e^2t, e^-2t
    G = lclm(L, M)
    assert G.order == 4
    assert rrem(G, L).is_zero
    assert rrem(G, M).is_zero
    assert apply(G, exp_series(1) + exp_series(-2)).is_zero


def test_lclm_right_divisible_random():
    rng = random.Random(4003)
    for _ in range(60):
        L = random_operator(rng, 1)
        M = random_operator(rng, rng.randint(1, 2))
        G = lclm(L, M)
        assert G.order <= L.order + M.order
        assert rrem(G, L).is_zero
        assert rrem(G, M).is_zero


# ===== CLOSURE PROPERTIES =====

def test_sum_and_product_of_exponentials():
    L = hyperexponential_annihilator(1)                  # e^t
    M = hyperexponential_annihilator(2 * T)              # e^(t^2)
    g = TruncSeries.from_list(Q, [QQ(1, factorial(k // 2)) if k % 2 == 0 else QQ(0) for k in range(PREC)])
    f = exp_series(1)
    assert apply(M, g).is_zero
    assert apply(sum_annihilator(L, M), f + g).is_zero
    assert apply(product_annihilator(L, M), f * g).is_zero


def test_substitute_argument():
    L = OreOp.from_coeffs([-1, 1 - T])
    f = series_inverse(series_of([1, -1], 6))
    g = series_substitute_poly(f, {3: 27})
    assert apply(substitute_argument(L, 27 * T ** 3), g).is_zero


def test_substitute_argument_errors():
    L = OreOp.d()
    with pytest.raises(SubstitutionError):
        substitute_argument(L, 1 + T)
    with pytest.raises(SubstitutionError):
        substitute_argument(L, to_field(T) / (1 + to_field(T)))


def test_annihilator_of_unknown_kind():
    with pytest.raises(OperatorError):
        annihilator_of_algebraic("cubic", T)
    with pytest.raises(OperatorError):
        annihilator_of_algebraic("rational", 0)


def test_closure_random():
    rng = random.Random(4004)
    for _ in range(60):
        fv, f = random_rational(rng)
        gv, g = random_rational(rng)
        Lf = annihilator_of_algebraic("rational", fv)
        Lg = annihilator_of_algebraic("rational", gv)
        assert apply(Lf, f).is_zero
        assert apply(sum_annihilator(Lf, Lg), f + g).is_zero
        assert apply(product_annihilator(Lf, Lg), f * g).is_zero
        assert apply(integral_annihilator(Lf), series_integrate(f)).is_zero


def test_sqrt_annihilator_random():
    rng = random.Random(4005)
    for _ in range(40):
        b = random_t_poly(rng, constant=1)
        L = annihilator_of_algebraic("sqrt", poly_of(b))
        assert apply(L, series_sqrt(series_of(b))).is_zero


@pytest.mark.slow
def test_closure_order_two_random():
    rng = random.Random(4006)
    for _ in range(10):
        (fv, f), (gv, g), (hv, h) = (random_rational(rng) for _ in range(3))
        L = lclm(annihilator_of_algebraic("rational", fv), annihilator_of_algebraic("rational", gv))
        M = product_annihilator(L, annihilator_of_algebraic("rational", hv))
        assert apply(L, f + g).is_zero
        assert apply(M, (f + g) * h).is_zero
        assert apply(lclm(L, M), f + (f + g) * h).is_zero


# ===== RECURRENCE =====

def test_recurrence_of_geometric_operator():
    rec = to_recurrence(OreOp.from_coeffs([-1, 1 - T]))
    assert rec.shifts == (0, 1)
    assert rec.coefficient(1) == -rec.coefficient(0)
    assert rec.coefficient(0) == N + 1
    ones = [QQ(1)] * 10
    assert all(rec.apply(ones, n) == 0 for n in range(9))


def test_recurrence_apply_rejects_x():
    rec = to_recurrence(OreOp.from_coeffs([-X, 1 - X * T]))
    with pytest.raises(OperatorError):
        rec.apply([QQ(1)] * 5, 0)


def test_recurrence_matches_apply_random():
    rng = random.Random(4007)
    for _ in range(60):
        L = random_operator(rng, rng.randint(0, 3))
        f = series_of([rng.randint(-5, 5) for _ in range(PREC)])
        rec = to_recurrence(L)
        image = apply(L.normalized(), f)
        seq = f.coefficients()
        top = image.prec - max(rec.leading_shift, 0)
        for n in range(top):
            assert rec.apply(seq, n) == image[n]
