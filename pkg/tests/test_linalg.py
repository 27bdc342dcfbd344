"""
Tests for exact nullspaces over QQ, over the integers and modulo a prime.
"""

import random

from sympy.polys.domains import QQ

from kreweras.linalg import (
    integer_nullspace, nullspace, nullspace_mod_p, primitive_integer_vector, rank_mod_p, row_echelon,
)


def times(rows, vec):
    return [sum(QQ(a) * QQ(b) for a, b in zip(row, vec)) for row in rows]


def test_row_echelon_pivots():
    m = [[QQ(1), QQ(2), QQ(3)], [QQ(2), QQ(4), QQ(7)]]
    _, pivots, free = row_echelon(m)
    assert pivots == [0, 2]
    assert free == [1]


def test_nullspace_basis_shape():
    rows = [[QQ(1), QQ(1), QQ(0)], [QQ(0), QQ(0), QQ(1)]]
    basis = nullspace(rows, 3)
    assert basis == [[QQ(-1), QQ(1), QQ(0)]]


def test_nullspace_without_rows():
    assert nullspace([], 2) == [[QQ(1), QQ(0)], [QQ(0), QQ(1)]]


def test_integer_nullspace_is_primitive():
    rows = [[QQ(1, 2), QQ(1, 3), QQ(0)], [QQ(0), QQ(0), QQ(5)]]
    assert integer_nullspace(rows, 3) == [[-2, 3, 0]]


def test_primitive_integer_vector_sign():
    assert primitive_integer_vector([QQ(2), QQ(-4), QQ(-6)]) == [-1, 2, 3]
    assert primitive_integer_vector([0, 0]) == [0, 0]


def test_nullspace_mod_p_small():
    # x + 2y = 0 mod 5 -> (3, 1)
    assert nullspace_mod_p([[1, 2]], 2, 5) == [[3, 1]]
    assert rank_mod_p([[1, 2], [2, 4]], 2, 5) == 1


def test_nullspace_random():
    rng = random.Random(3001)
    for _ in range(100):
        n_rows, n_cols = rng.randint(1, 5), rng.randint(1, 6)
        rows = [[QQ(rng.randint(-3, 3)) for _ in range(n_cols)] for _ in range(n_rows)]
        basis = nullspace(rows, n_cols)
        for v in basis:
            assert all(e == 0 for e in times(rows, v))
        ints = integer_nullspace(rows, n_cols)
        assert len(ints) == len(basis)
        for v in ints:
            assert all(e == 0 for e in times(rows, v))


def test_nullspace_mod_p_random():
    rng = random.Random(3002)
    p = 45007
    for _ in range(100):
        n_rows, n_cols = rng.randint(1, 4), rng.randint(1, 6)
        rows = [[rng.randint(-3, 3) for _ in range(n_cols)] for _ in range(n_rows)]
        basis = nullspace_mod_p(rows, n_cols, p)
        for v in basis:
            assert all(sum(a * b for a, b in zip(row, v)) % p == 0 for row in rows)
        # minors are bounded by 4! * 3^4 < p, so the rank is the same over QQ
        assert len(basis) == len(nullspace([[QQ(a) for a in r] for r in rows], n_cols))
