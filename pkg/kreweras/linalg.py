"""
Exact linear algebra: nullspaces over fields, over the integers
(fraction-free) and modulo a prime.

All eliminations pivot deterministically: columns left to right, and within a
column the first row (in the current order) holding a nonzero entry. Given the
same matrix, the same basis comes out.
"""

import logging
from math import gcd, lcm
from typing import List, Sequence, Tuple

from sympy.polys.domains import QQ

logger = logging.getLogger(__name__)


def row_echelon(m: List[list]) -> Tuple[List[list], List[int], List[int]]:
    """
    In-place Gaussian elimination over a field.

    Args:
        m: matrix as a list of rows; entries support +, -, *, / and truth testing

    Returns:
        (m, pivot_columns, free_columns)
    """
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    pivots, free_vars = [], []
    piv_r = 0
    for piv_c in range(n_cols):
        for i_row in range(piv_r, n_rows):
            if m[i_row][piv_c]:
                break
        else:
            free_vars.append(piv_c)
            continue
        if i_row != piv_r:
            m[piv_r], m[i_row] = m[i_row], m[piv_r]
        fp = m[piv_r][piv_c]
        for r in range(piv_r + 1, n_rows):
            fr = m[r][piv_c]
            if not fr:
                continue
            frp = fr / fp
            row, prow = m[r], m[piv_r]
            for c in range(piv_c, n_cols):
                if prow[c]:
                    row[c] = row[c] - prow[c] * frp
        pivots.append(piv_c)
        piv_r += 1
    return m, pivots, free_vars


def _back_substitute(m, pivots, free_vars, n_cols, free_col, zero, one):
    sol = [zero] * n_cols
    sol[free_col] = one
    for r in range(len(pivots) - 1, -1, -1):
        piv_c = pivots[r]
        s = zero
        for c in range(piv_c + 1, n_cols):
            if m[r][c] and sol[c]:
                s = s + m[r][c] * sol[c]
        sol[piv_c] = -s / m[r][piv_c]
    return sol


def nullspace(rows: Sequence[Sequence], n_cols: int, zero=None, one=None) -> List[list]:
    """
    Basis of {v : M v = 0} over a field, one vector per free column
    (that column set to 1, the other free columns to 0).

    Args:
        rows: matrix rows
        n_cols: number of unknowns (needed when rows is empty)
        zero, one: field constants (default QQ)
    """
    zero = QQ.zero if zero is None else zero
    one = QQ.one if one is None else one
    if not rows:
        return [[one if i == j else zero for i in range(n_cols)] for j in range(n_cols)]
    m = [list(r) for r in rows]
    m, pivots, free_vars = row_echelon(m)
    return [_back_substitute(m, pivots, free_vars, n_cols, f, zero, one) for f in free_vars]


def integer_row_echelon(m: List[List[int]]) -> Tuple[List[List[int]], List[int], List[int]]:
    """
    Fraction-free (Bareiss) elimination of an integer matrix, in place.

    Each update divides exactly by the previous pivot, so entries stay minors
    of the input and never leave the integers.
    """
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    pivots, free_vars = [], []
    prev = 1
    piv_r = 0
    for piv_c in range(n_cols):
        for i_row in range(piv_r, n_rows):
            if m[i_row][piv_c]:
                break
        else:
            free_vars.append(piv_c)
            continue
        if i_row != piv_r:
            m[piv_r], m[i_row] = m[i_row], m[piv_r]
        prow = m[piv_r]
        fp = prow[piv_c]
        for r in range(piv_r + 1, n_rows):
            row = m[r]
            fr = row[piv_c]
            for c in range(piv_c + 1, n_cols):
                row[c] = (fp * row[c] - fr * prow[c]) // prev
            row[piv_c] = 0
        prev = fp
        pivots.append(piv_c)
        piv_r += 1
    return m, pivots, free_vars


def integer_nullspace(rows: Sequence[Sequence], n_cols: int) -> List[List[int]]:
    """
    Nullspace of a rational matrix, returned as primitive integer vectors.

    Rows are scaled to integers first; elimination is fraction-free and only
    the back substitution uses rationals.
    """
    m = []
    for row in rows:
        row = [QQ.convert(v) for v in row]
        den = lcm(1, *(int(QQ.denom(v)) for v in row))
        m.append([int(QQ.numer(v)) * (den // int(QQ.denom(v))) for v in row])
    if not m:
        m = [[0] * n_cols]
    m, pivots, free_vars = integer_row_echelon(m)
    rational = [[QQ(v) for v in row] for row in m[: len(pivots)]]
    basis = []
    for f in free_vars:
        sol = _back_substitute(rational, pivots, free_vars, n_cols, f, QQ.zero, QQ.one)
        basis.append(primitive_integer_vector(sol))
    return basis


def primitive_integer_vector(vec: Sequence) -> List[int]:
    """Scale a rational vector to coprime integers with a positive last nonzero entry."""
    vec = [QQ.convert(v) for v in vec]
    den = lcm(1, *(int(QQ.denom(v)) for v in vec))
    ints = [int(QQ.numer(v)) * (den // int(QQ.denom(v))) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g == 0:
        return ints
    ints = [v // g for v in ints]
    last = next(v for v in reversed(ints) if v)
    return [-v for v in ints] if last < 0 else ints


def nullspace_mod_p(rows: Sequence[Sequence[int]], n_cols: int, p: int) -> List[List[int]]:
    """
    Nullspace over GF(p) of an integer matrix (entries reduced mod p).

    Returns one vector per free column with that column set to 1.
    """
    m = [[v % p for v in row] for row in rows]
    pivots = []
    free_vars = []
    piv_r = 0
    n_rows = len(m)
    for piv_c in range(n_cols):
        for i_row in range(piv_r, n_rows):
            if m[i_row][piv_c]:
                break
        else:
            free_vars.append(piv_c)
            continue
        if i_row != piv_r:
            m[piv_r], m[i_row] = m[i_row], m[piv_r]
        prow = m[piv_r]
        inv = pow(prow[piv_c], -1, p)
        for c in range(piv_c, n_cols):
            prow[c] = prow[c] * inv % p
        # full reduction so the basis reads off directly
        for r in range(n_rows):
            if r == piv_r:
                continue
            row = m[r]
            fr = row[piv_c]
            if fr:
                for c in range(piv_c, n_cols):
                    if prow[c]:
                        row[c] = (row[c] - fr * prow[c]) % p
        pivots.append(piv_c)
        piv_r += 1
    basis = []
    for f in free_vars:
        sol = [0] * n_cols
        sol[f] = 1
        for r, piv_c in enumerate(pivots):
            sol[piv_c] = (-m[r][f]) % p
        basis.append(sol)
    return basis


def rank_mod_p(rows: Sequence[Sequence[int]], n_cols: int, p: int) -> int:
    return n_cols - len(nullspace_mod_p(rows, n_cols, p))
