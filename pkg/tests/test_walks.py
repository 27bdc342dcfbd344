"""
Tests for walk enumeration, the kernel equation and the Q(0,0) relations.
"""

import pytest
from sympy.polys.domains import QQ

from kreweras.errors import ConfigError, KernelResidualError
from kreweras.walks import (
    StepSet, WalkGF, WeightSpec, brute_force_count, coeff_at, degenerate_cases, enumerate_walks, kernel_residual,
    kernel_sides, origin_factor_coeffs, series_Q, weight_identities,
)

KREWERAS = StepSet.kreweras()


@pytest.fixture(scope="module")
def symbolic_gf():
    return enumerate_walks(KREWERAS, WeightSpec.symbolic(), 9)


def test_first_terms_of_Q(symbolic_gf):
    Q = series_Q(symbolic_gf)
    R = Q.ring
    a, b, x, y = (R.gen(n) for n in ("a", "b", "x", "y"))
    assert R.names == ("a", "b", "c", "x", "y")
    assert Q.prec == 10
    assert Q[0] == R.one
    assert Q[1] == x * y
    assert Q[2] == x ** 2 * y ** 2 + a * x + b * y


def test_q00_third_coefficient(symbolic_gf):
    q00 = coeff_at(symbolic_gf, 0, 0)
    R = symbolic_gf.ring
    a, b, c = R.gen("a"), R.gen("b"), R.gen("c")
    assert q00[1] == 0 and q00[2] == 0
    assert q00[3] == (a + b) * c


def test_unweighted_counts():
    gf = enumerate_walks(KREWERAS, WeightSpec(1, 1, 1), 3)
    f = series_Q(gf, 1, 1)
    assert f.coefficients() == [1, 1, 3, 7]


def test_specialized_weights_mod_p():
    gf = enumerate_walks(KREWERAS, WeightSpec(1, 1, 1, prime=45007), 6)
    exact = enumerate_walks(KREWERAS, WeightSpec(1, 1, 1), 6)
    mod_p = coeff_at(gf, 0, 0)
    over_qq = coeff_at(exact, 0, 0)
    assert [int(mod_p.ring.to_int(c)) for c in mod_p.coefficients()] == [int(c) % 45007 for c in
                                                                       over_qq.coefficients()]


def test_matches_brute_force(symbolic_gf):
    for n in range(9):
        assert symbolic_gf.table[n] == brute_force_count(KREWERAS, WeightSpec.symbolic(), n)


@pytest.mark.slow
def test_matches_brute_force_to_length_12():
    gf = enumerate_walks(KREWERAS, WeightSpec.symbolic(), 12)
    for n in range(9, 13):
        assert gf.table[n] == brute_force_count(KREWERAS, WeightSpec.symbolic(), n)


def test_reverse_kreweras_matches_brute_force():
    steps = StepSet.reverse_kreweras()
    gf = enumerate_walks(steps, WeightSpec(QQ(1, 2), 3, 5), 7)
    for n in range(8):
        assert gf.table[n] == brute_force_count(steps, WeightSpec(QQ(1, 2), 3, 5), n)


def test_brute_force_limit():
    with pytest.raises(ConfigError):
        brute_force_count(KREWERAS, WeightSpec.symbolic(), 15)


def test_step_set_validation():
    with pytest.raises(ConfigError):
        StepSet(((0, 0),))
    with pytest.raises(ConfigError):
        StepSet(((2, 0),))
    with pytest.raises(ConfigError):
        StepSet.from_name("gessel")
    assert StepSet.from_name("reverse_kreweras") == StepSet.reverse_kreweras()


# ===== KERNEL EQUATION =====

def test_kernel_equation_holds(symbolic_gf):
    residual = kernel_residual(symbolic_gf, 10)
    assert residual.is_zero
    assert residual.prec == 10


def test_kernel_equation_reverse_kreweras():
    gf = enumerate_walks(StepSet.reverse_kreweras(), WeightSpec.symbolic(), 8)
    assert kernel_residual(gf, 9).is_zero


@pytest.mark.slow
@pytest.mark.parametrize("steps", [StepSet.kreweras(), StepSet.reverse_kreweras()])
def test_kernel_equation_mod_t15(steps):
    gf = enumerate_walks(steps, WeightSpec.symbolic(), 14)
    assert kernel_residual(gf, 15).is_zero


def test_kernel_residual_reports_first_order(symbolic_gf):
    table = list(symbolic_gf.table)
    layer = dict(table[2])
    layer[(0, 1)] = layer[(0, 1)] + symbolic_gf.ring.one
    table[2] = layer
    broken = WalkGF(symbolic_gf.steps, symbolic_gf.weights, symbolic_gf.length, tuple(table))
    with pytest.raises(KernelResidualError) as excinfo:
        kernel_residual(broken, 6)
    assert excinfo.value.order == 2
    assert not kernel_residual(broken, 6, strict=False).is_zero


def test_kernel_check_needs_enough_walks(symbolic_gf):
    with pytest.raises(ConfigError):
        kernel_sides(symbolic_gf, 12)


# ===== Q(0,0) RELATIONS =====

def test_relations_give_a_equals_b_equals_zero(symbolic_gf):
    rel0, rel3 = origin_factor_coeffs(symbolic_gf)
    checks = weight_identities(rel0, rel3)
    assert [c.name for c in checks][:2] == ["t0-relation", "t3-relation"]
    assert all(c.holds for c in checks)


def test_relations_need_length_three():
    gf = enumerate_walks(KREWERAS, WeightSpec.symbolic(), 2)
    with pytest.raises(ConfigError):
        origin_factor_coeffs(gf)


def test_degenerate_cases():
    checks = degenerate_cases(6)
    assert {c.name for c in checks} == {"c0-origin", "c0-kernel", "a-equals-b"}
    assert all(c.holds for c in checks)
