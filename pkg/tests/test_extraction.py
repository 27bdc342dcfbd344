"""
Tests for the positive-part extraction of Theta and its residue cross-check.
"""

import pytest

from kreweras.extraction import (
    THETA_RING, XY, coeff_y0, expand_theta0, positive_part_x, residue_oracle, step_generator, theta_series,
    theta_support,
)
from kreweras.series import TruncSeries

x = THETA_RING.gen("x")


def test_first_coefficients():
    theta = theta_series(4)
    assert theta.prec == 4
    assert theta[0] == -x ** 2
    assert theta[1] == 0
    assert theta[2] == -x ** 3


def test_support_stays_in_window():
    theta = theta_series(10)
    support = theta_support(theta)
    assert support[0] == (2, 2)
    assert support[1] == (0, -1)
    for n, (lo, hi) in enumerate(support):
        if hi >= 0:
            assert 1 <= lo and hi <= 3 + 2 * n


def test_theta0_is_a_laurent_expansion():
    f = expand_theta0(3)
    S = step_generator(XY)
    assert f[1] == f[0] * S
    assert f[2] == f[0] * S * S


def test_extractors():
    X, Y = XY.gen("x"), XY.gen("y")
    f = X * X * Y + X - XY.inverse(X) + 3 + Y
    assert coeff_y0(f) == X - XY.inverse(X) + 3
    assert positive_part_x(coeff_y0(f)) == X


def test_residue_oracle_agrees():
    assert residue_oracle(6) == theta_series(6)


@pytest.mark.slow
def test_residue_oracle_agrees_mod_t20():
    assert residue_oracle(20) == theta_series(20)


def test_clipping_matches_full_expansion():
    N = 7
    full = expand_theta0(N)
    direct = {n: positive_part_x(coeff_y0(full[n])) for n in range(N)}
    theta = theta_series(N)
    for n in range(N):
        ix = XY.names.index("x")
        expected = THETA_RING.from_terms(((e[ix],), c) for e, c in direct[n].terms())
        assert theta[n] == expected
    assert isinstance(theta, TruncSeries)


def test_bad_orders():
    with pytest.raises(ValueError):
        theta_series(0)
    with pytest.raises(ValueError):
        residue_oracle(0)
    with pytest.raises(ValueError):
        expand_theta0(0)
