"""
Local analysis of differential operators at t = 0.

Power-series solutions come from forward-solving the coefficient recurrence
(to_recurrence) with one free parameter per index where the leading
recurrence coefficient vanishes; the equation at such an index turns into a
linear constraint on the parameters introduced before it. Constraints are
solved over QQ(x) at the end.

Logarithm detection runs the same solver from the smallest exponent of every
group of indicial roots that differ by integers: the group is log-free exactly
when its Frobenius solution space reaches the group's total multiplicity.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, ring as sympy_ring

from kreweras.closedform import pochhammer
from kreweras.linalg import nullspace
from kreweras.ore import N, REC_RING, OreOp, RecOp, to_recurrence
from kreweras.rings import FractionCoeffRing, RatFunc, rat_from_text
from kreweras.series import TruncSeries

logger = logging.getLogger(__name__)

# indicial polynomials in the exponent variable
EXP_RING, RHO = sympy_ring("n", QQ, grlex)

SCALARS = FractionCoeffRing("x")

# exponents at t = 0 are elements of QQ
Exponent = type(QQ.zero)


@dataclass(frozen=True)
class SolBasis:
    """
    Echelon basis of the power-series solutions of an operator, mod t^prec.

    r: any power-series solution vanishing mod t^r is zero.
    """
    basis: Tuple[TruncSeries, ...]
    r: int
    prec: int
    parameter_indices: Tuple[int, ...] = ()

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def leading_exponents(self) -> Tuple[int, ...]:
        return tuple(s.valuation for s in self.basis)


@dataclass(frozen=True)
class LocalData:
    """Indicial data at t = 0."""
    indicial: PolyElement
    roots: Tuple[Tuple[Exponent, int], ...]
    groups: Tuple[Tuple[Exponent, ...], ...]
    has_nonrational_roots: bool
    log: Optional[bool]
    group_dimensions: Tuple[int, ...] = field(default=())


# ===== INDICIAL POLYNOMIAL =====

def indicial_polynomial(rec: RecOp) -> PolyElement:
    """lead(m) = R_sigma(m - sigma) in QQ[x,n]; n stands for the exponent."""
    sigma = rec.leading_shift
    return rec.coefficient(sigma).compose(N, N - sigma)


def _exponent_slices(p: PolyElement) -> List[PolyElement]:
    slices: Dict[int, dict] = {}
    for (ex, en), c in p.terms():
        slices.setdefault(ex, {})[(en,)] = c
    return [EXP_RING.from_dict(d) for d in slices.values()]


def rational_exponents(indicial: PolyElement) -> Tuple[List[Tuple[Exponent, int]], bool]:
    """
    Rational roots with multiplicity of an indicial polynomial over QQ(x).

    Returns:
        (sorted [(root, multiplicity)], whether roots outside QQ exist)
    """
    slices = _exponent_slices(indicial)
    g = slices[0]
    for s in slices[1:]:
        g = g.gcd(s)
    nonrational = indicial.degree(N) > g.degree()
    roots = []
    if g.degree() > 0:
        _, factors = g.factor_list()
        for f, k in factors:
            if f.degree() == 1:
                root = -f.coeff(1) / f.LC
                roots.append((QQ.convert(root), k))
            else:
                nonrational = True
    roots.sort()
    return roots, nonrational


def _nonnegative_integer_roots(indicial: PolyElement) -> List[int]:
    roots, _ = rational_exponents(indicial)
    return [int(r) for r, _ in roots if QQ.denom(r) == 1 and r >= 0]


# ===== FORWARD SOLVER =====

def _to_scalar(p: PolyElement) -> RatFunc:
    return SCALARS.convert(p)


def _forward_solve(rec: RecOp, rho0: Exponent, n_terms: int):
    """
    Solve sum_k R_k(rho0 + M - sigma) a_(M - sigma + k) = 0 for M = 0 .. n_terms-1.

    Coefficients are dicts {parameter: RatFunc}.

    Returns:
        (coefficients, parameter indices, constraint rows)
    """
    sigma = rec.leading_shift
    rho = QQ.convert(rho0)
    coeffs: List[Dict[int, RatFunc]] = []
    params: List[int] = []
    constraints: List[Dict[int, RatFunc]] = []
    for M in range(n_terms):
        n = rho + M - sigma
        acc: Dict[int, RatFunc] = {}
        for k, c in rec.terms:
            if k == sigma:
                continue
            idx = M - sigma + k
            if idx < 0 or not coeffs[idx]:
                continue
            value = c.evaluate(N, n)
            if not value:
                continue
            scale = _to_scalar(value)
            for p, a in coeffs[idx].items():
                acc[p] = acc.get(p, SCALARS.zero) + scale * a
        acc = {p: a for p, a in acc.items() if a}
        lead = rec.coefficient(sigma).evaluate(N, n)
        if lead:
            inv = -(SCALARS.one / _to_scalar(lead))
            coeffs.append({p: inv * a for p, a in acc.items()})
        else:
            if acc:
                constraints.append(acc)
            param = len(params)
            params.append(M)
            coeffs.append({param: SCALARS.one})
    return coeffs, params, constraints


def _solution_space(coeffs, params, constraints) -> List[List[RatFunc]]:
    """Solutions as coefficient lists, one per nullspace vector of the constraints."""
    if not params:
        return []
    rows = [[row.get(p, SCALARS.zero) for p in range(len(params))] for row in constraints]
    vectors = nullspace(rows, len(params), SCALARS.zero, SCALARS.one)
    solutions = []
    for v in vectors:
        sol = []
        for a in coeffs:
            total = SCALARS.zero
            for p, c in a.items():
                if v[p]:
                    total = total + v[p] * c
            sol.append(total)
        solutions.append(sol)
    return solutions


def _reduced_echelon(rows: List[List[RatFunc]]) -> List[List[RatFunc]]:
    """Reduced row echelon form over QQ(x); pivots are the leading exponents."""
    rows = [list(r) for r in rows]
    out = []
    n_cols = len(rows[0]) if rows else 0
    col = 0
    while rows and col < n_cols:
        pivot = next((r for r in rows if r[col]), None)
        if pivot is None:
            col += 1
            continue
        rows.remove(pivot)
        inv = SCALARS.one / pivot[col]
        pivot = [inv * a for a in pivot]
        rows = [[a - r[col] * b for a, b in zip(r, pivot)] if r[col] else r for r in rows]
        out = [[a - r[col] * b for a, b in zip(r, pivot)] if r[col] else r for r in out]
        out.append(pivot)
        col += 1
    return out


def power_series_solutions(L: OreOp, n_terms: int) -> SolBasis:
    """
    Echelon basis of the power-series solutions of L in QQ(x)[[t]], mod t^n_terms.

    The solve range is extended past the largest nonnegative integer root of the
    indicial polynomial so that every constraint is seen; the basis is then
    truncated back to n_terms.

    Args:
        L: nonzero operator
        n_terms: number of coefficients per basis element
    """
    rec = to_recurrence(L)
    singular = _nonnegative_integer_roots(indicial_polynomial(rec))
    horizon = max([n_terms] + [m + 2 for m in singular])
    coeffs, params, constraints = _forward_solve(rec, QQ.zero, horizon)
    solutions = _reduced_echelon(_solution_space(coeffs, params, constraints))
    basis = tuple(TruncSeries.from_list(SCALARS, sol[:n_terms], n_terms) for sol in solutions)
    r = 1 + max(params) if params else 0
    logger.debug(f"power series solutions: dimension {len(basis)}, r = {r}, parameters at {params}")
    return SolBasis(basis=basis, r=r, prec=n_terms, parameter_indices=tuple(params))


# ===== LOGARITHMS =====

def _group_roots(roots: List[Tuple[Exponent, int]]) -> List[List[Tuple[Exponent, int]]]:
    groups: List[List[Tuple[Exponent, int]]] = []
    for root, k in roots:
        for g in groups:
            if QQ.denom(root - g[0][0]) == 1:
                g.append((root, k))
                break
        else:
            groups.append([(root, k)])
    return groups


def detect_log_at_0(L: OreOp) -> LocalData:
    """
    Decide whether the local solutions of L at t = 0 involve log t.

    log is True if some integer-spaced group of rational exponents carries
    fewer Frobenius solutions than its total multiplicity, None when no group
    shows a log but non-rational exponents exist, False otherwise.
    """
    rec = to_recurrence(L)
    indicial = indicial_polynomial(rec)
    roots, nonrational = rational_exponents(indicial)
    groups = _group_roots(roots)
    dims = []
    log = False
    for g in groups:
        rho0 = g[0][0]
        span = int(max(r for r, _ in g) - rho0)
        coeffs, params, constraints = _forward_solve(rec, rho0, span + 1)
        dim = len(_solution_space(coeffs, params, constraints))
        multiplicity = sum(k for _, k in g)
        dims.append(dim)
        if dim < multiplicity:
            log = True
        logger.debug(f"exponent group from {rho0}: {dim} Frobenius solutions, multiplicity {multiplicity}")
    if not log and nonrational:
        log = None
    return LocalData(
        indicial=indicial,
        roots=tuple(roots),
        groups=tuple(tuple(r for r, _ in g) for g in groups),
        has_nonrational_roots=nonrational,
        log=log,
        group_dimensions=tuple(dims),
    )


def _exponent(v) -> Exponent:
    if isinstance(v, str):
        return rat_from_text(v)
    return QQ.convert(v)


def f21_has_log(a, b, c) -> bool:
    """
    Log flag at 0 of the Gauss hypergeometric equation with parameters a, b, c.

    Exponents are 0 and 1 - c. For integer c the Frobenius series from the
    smaller exponent is obstructed at the larger one unless a Pochhammer
    product in its numerator vanishes there; c = 1 is a double exponent.
    """
    a, b, c = _exponent(a), _exponent(b), _exponent(c)
    if QQ.denom(c) != 1:
        return False
    c = int(c)
    if c == 1:
        return True
    if c >= 2:
        return pochhammer(a - c + 1, c - 1) * pochhammer(b - c + 1, c - 1) != 0
    return pochhammer(a, 1 - c) * pochhammer(b, 1 - c) != 0
