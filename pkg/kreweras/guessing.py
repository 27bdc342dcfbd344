"""
Guessing linear ODEs and algebraic equations from truncated series.

This module provides:
1. guess_min_ode: staircase search for a minimal operator sum p_i(t) D^i
   annihilating a series over QQ, GF(p) or QQ[x]
2. guess_algebraic_mod_p: nullspace of {t^i f^j} over GF(p)
3. verify_reserve: how many withheld coefficients a candidate annihilates
4. The two modular experiments on walk series (Q(0,0) at a=b=c=1, and the
   c = 0 sample that is expected to yield nothing)

Design decisions:
- Cells (order r, t-degree d) are visited by increasing r + d, then r. The
  first cell whose fitting system has a nonzero solution that also
  annihilates the reserve wins; every earlier cell was shown empty.
- Over QQ a cell is first tested modulo a prime: full rank mod p implies full
  rank over QQ, so most cells never reach the exact (fraction-free) solver.
- For a series in QQ[x] the cell is searched at one rational x, then the
  operator is recovered from its values at several x: each specialized
  nullspace vector is scaled by a fixed pivot entry, the pivot polynomial is
  found from the condition that every rescaled entry is a polynomial of
  degree <= max_x_degree, and the entries are interpolated. The result is
  re-applied exactly to the symbolic series.
"""

import logging
from dataclasses import dataclass, field
from math import lcm
from typing import List, Optional, Sequence, Tuple

from sympy import Symbol, interpolate
from sympy.polys.domains import GF, QQ
from sympy.polys.rings import PolyElement

from kreweras import config
from kreweras.errors import GuessingError
from kreweras.linalg import integer_nullspace, nullspace, nullspace_mod_p, rank_mod_p
from kreweras.models import ExperimentReport, GuessConfig, ReserveReport
from kreweras.ore import OP_RING, X_RING, OreOp, apply, falling
from kreweras.rings import PolyCoeffRing, ScalarRing, make_ring
from kreweras.series import TruncSeries, series_mul
from kreweras.walks import StepSet, WeightSpec, coeff_at, enumerate_walks, series_Q

logger = logging.getLogger(__name__)

QQ_SCALARS = ScalarRing.rationals()
_X = Symbol("x")


@dataclass(frozen=True)
class OdeGuess:
    """Result of a staircase search; operator is None when the staircase is exhausted."""
    operator: Optional[OreOp]
    cell: Optional[Tuple[int, int]]
    visited: Tuple[Tuple[int, int], ...]
    report: Optional[ReserveReport] = None
    skipped: Tuple[Tuple[int, int], ...] = ()


@dataclass(frozen=True)
class AlgGuess:
    """P(t, u) over GF(prime) with P(t, f) = 0 mod t^depth."""
    prime: int
    poly: PolyElement
    deg_t: int
    deg_u: int
    depth: int
    report: Optional[ReserveReport] = field(default=None, compare=False)


# ===== RESERVE =====

def _report_from_residual(residual: TruncSeries, reserve: int) -> ReserveReport:
    fit = residual.prec - reserve
    first = residual.valuation if not residual.is_zero else None
    if first is None:
        return ReserveReport(fit_count=fit, reserve=reserve, passed=reserve)
    return ReserveReport(fit_count=fit, reserve=reserve, passed=max(0, first - fit), first_failure=first)


def algebraic_residual(P: PolyElement, f: TruncSeries) -> TruncSeries:
    """P(t, f(t)) mod t^prec for P in GF(p)[t, u] and f over GF(p)."""
    R = f.ring
    by_u = {}
    for (et, eu), c in P.terms():
        by_u.setdefault(eu, {})[et] = c
    total = TruncSeries.zero(R, f.prec)
    power = TruncSeries.one(R, f.prec)
    for j in range(max(by_u) + 1 if by_u else 0):
        if j:
            power = series_mul(power, f)
        if j in by_u:
            coeff = TruncSeries.from_dict(R, {k: R.convert(int(P.ring.domain.to_int(c))) for k, c in by_u[j].items()},
                                          f.prec)
            total = total + series_mul(coeff, power)
    return total


def verify_reserve(candidate, f: TruncSeries, reserve: int) -> ReserveReport:
    """
    Count how many of the last `reserve` residual coefficients vanish.

    candidate is an OreOp (residual L(f), known mod t^(N - order)) or an
    AlgGuess (residual P(t, f), known mod t^N).
    """
    if isinstance(candidate, AlgGuess):
        residual = algebraic_residual(candidate.poly, f)
    else:
        residual = apply(candidate, f)
    report = _report_from_residual(residual, reserve)
    if not report.ok:
        logger.debug(f"reserve check: {report.passed}/{reserve} passed, first failure at {report.first_failure}")
    return report


# ===== LINEAR SYSTEMS =====

def _cell_rows(coeffs: Sequence, r: int, d: int, n_rows: int) -> List[list]:
    """
    Row n: [t^n] sum_{i,j} p_ij t^j D^i f as a linear form in the p_ij,
    unknown (i, j) at column i*(d+1) + j.
    """
    rows = []
    for n in range(n_rows):
        row = []
        for i in range(r + 1):
            for j in range(d + 1):
                m = n - j
                row.append(falling(m + i, i) * coeffs[m + i] if m >= 0 else 0)
        rows.append(row)
    return rows


def _integer_rows(rows: Sequence[Sequence]) -> List[List[int]]:
    out = []
    for row in rows:
        row = [QQ.convert(v) for v in row]
        den = lcm(1, *(int(QQ.denom(v)) for v in row))
        out.append([int(QQ.numer(v)) * (den // int(QQ.denom(v))) for v in row])
    return out


def _vector_to_operator(vec: Sequence, r: int, d: int) -> OreOp:
    """Operator with coefficient p_i = sum_j vec[i*(d+1)+j] t^j; entries rational or polynomials in x."""
    coeffs = []
    for i in range(r + 1):
        p = OP_RING.zero
        for j in range(d + 1):
            v = vec[i * (d + 1) + j]
            if isinstance(v, PolyElement):
                for (k,), c in v.terms():
                    p += OP_RING({(k, j): c})
            elif v:
                p += OP_RING({(0, j): QQ.convert(v)})
        coeffs.append(p)
    return OreOp.from_coeffs(coeffs)


def _numeric_solution(f: TruncSeries, r: int, d: int, reserve: int, prime: int) -> Optional[list]:
    """First nullspace vector of cell (r, d) for f over QQ or GF(p), confirmed on the reserve."""
    n_eq = f.prec - r
    n_fit = n_eq - reserve
    unknowns = (r + 1) * (d + 1)
    if n_fit < unknowns:
        raise GuessingError(f"cell ({r},{d}) needs {unknowns + reserve + r} coefficients, series has {f.prec}")
    R = f.ring
    if R.domain.is_FiniteField:
        p = R.characteristic
        coeffs = [R.to_int(c) for c in f.coefficients(0, f.prec)]
        rows = _cell_rows(coeffs, r, d, n_eq)
        basis = nullspace_mod_p(rows[:n_fit], unknowns, p)
        if not basis:
            return None
        vec = basis[0]
        for row in rows[n_fit:]:
            if sum(a * b for a, b in zip(row, vec)) % p:
                return None
        return vec
    coeffs = f.coefficients(0, f.prec)
    rows = _cell_rows(coeffs, r, d, n_eq)
    ints = _integer_rows(rows[:n_fit])
    if rank_mod_p(ints, unknowns, prime) == unknowns:
        return None
    basis = integer_nullspace(ints, unknowns)
    if not basis:
        return None
    vec = basis[0]
    for row in rows[n_fit:]:
        if sum((QQ.convert(a) * b for a, b in zip(row, vec)), QQ.zero):
            return None
    return vec


def _mod_p_operator(vec: Sequence[int], r: int, d: int) -> OreOp:
    return _vector_to_operator([QQ(v) for v in vec], r, d)


# ===== SYMBOLIC x =====

def specialize_x(f: TruncSeries, x0) -> TruncSeries:
    gen = f.ring.poly_ring.gens[0]
    return f.map(lambda c: c.evaluate(gen, x0) if c else QQ.zero, QQ_SCALARS)


def reduce_mod_p(f: TruncSeries, prime: int) -> TruncSeries:
    """Image of a series over QQ in GF(prime)[[t]]."""
    R = f.ring
    if not isinstance(R, ScalarRing):
        raise GuessingError(f"cannot reduce a series over {R} modulo {prime}; specialize x first")
    if R.domain.is_FiniteField:
        if R.characteristic != prime:
            raise GuessingError(f"series is over GF({R.characteristic}), not GF({prime})")
        return f
    target = ScalarRing.prime_field(prime)
    for c in f.coeffs:
        if QQ.denom(c) % prime == 0:
            raise GuessingError(f"coefficient {c} has a denominator divisible by {prime}")
    return f.map(target.convert, target)


def _x_points(cfg: GuessConfig, count: int) -> List[int]:
    points = list(cfg.x_points)
    k = 2
    while len(points) < count:
        if k not in points:
            points.append(k)
        k += 1
    return points


def _divided_difference_weights(xs: Sequence) -> List:
    out = []
    for m, xm in enumerate(xs):
        w = QQ.one
        for l, xl in enumerate(xs):
            if l != m:
                w *= QQ.convert(xm - xl)
        out.append(QQ.one / w)
    return out


def _pivot_polynomial(samples, pivot: int, max_deg: int) -> Optional[List]:
    """
    Coefficients of the smallest-degree u(x) such that u(x_m) w_k(x_m) lies on
    a polynomial of degree <= max_deg for every entry k.
    """
    xs = [QQ(x0) for x0, _ in samples]
    window = max_deg + 2
    size = len(samples[0][1])
    for e in range(max_deg + 1):
        rows = []
        for start in range(len(xs) - window + 1):
            idx = list(range(start, start + window))
            lam = _divided_difference_weights([xs[m] for m in idx])
            for k in range(size):
                if k == pivot:
                    continue
                rows.append([sum((lam[a] * samples[m][1][k] * xs[m] ** l for a, m in enumerate(idx)), QQ.zero)
                             for l in range(e + 1)])
        rows = [row for row in rows if any(row)]
        basis = nullspace(rows, e + 1)
        if basis:
            return basis[0]
    return None


def _interpolate_entries(samples, u: List, max_deg: int) -> Optional[List[PolyElement]]:
    xs = [QQ(x0) for x0, _ in samples]
    scale = [sum((c * x ** l for l, c in enumerate(u)), QQ.zero) for x in xs]
    size = len(samples[0][1])
    out = []
    for k in range(size):
        values = [scale[m] * samples[m][1][k] for m in range(len(xs))]
        data = [(int(QQ.numer(x)), v) for x, v in zip(xs[: max_deg + 1], values[: max_deg + 1])]
        expr = interpolate([(a, QQ.to_sympy(v)) for a, v in data], _X)
        poly = X_RING.from_expr(expr) if expr != 0 else X_RING.zero
        for x, v in zip(xs[max_deg + 1:], values[max_deg + 1:]):
            if poly.evaluate(X_RING.gens[0], x) != v:
                return None
        out.append(poly)
    return out


def _symbolic_solution(f: TruncSeries, r: int, d: int, cfg: GuessConfig) -> Optional[OreOp]:
    """Recover the operator of cell (r, d) from specializations of x."""
    count = 2 * cfg.max_x_degree + 3
    samples = []
    pivot = None
    points = _x_points(cfg, count)
    k = 0
    while len(samples) < count:
        if k > 4 * count + len(cfg.x_points):
            logger.warning(f"too many degenerate specializations in cell ({r},{d})")
            return None
        if k >= len(points):
            points = _x_points(cfg, len(points) + count)
        x0 = points[k]
        k += 1
        fs = specialize_x(f, x0)
        n_fit = fs.prec - r - cfg.reserve
        rows = _integer_rows(_cell_rows(fs.coefficients(0, fs.prec), r, d, n_fit))
        basis = integer_nullspace(rows, (r + 1) * (d + 1))
        if len(basis) != 1:
            logger.warning(f"x = {x0}: nullspace of dimension {len(basis)} in cell ({r},{d}), point skipped")
            continue
        vec = [QQ(v) for v in basis[0]]
        if pivot is None:
            pivot = max(i for i, v in enumerate(vec) if v)
        if not vec[pivot]:
            logger.warning(f"x = {x0}: pivot entry vanishes, point skipped")
            continue
        samples.append((x0, [v / vec[pivot] for v in vec]))
    u = _pivot_polynomial(samples, pivot, cfg.max_x_degree)
    if u is None:
        logger.debug(f"cell ({r},{d}): no pivot polynomial of x-degree <= {cfg.max_x_degree}")
        return None
    entries = _interpolate_entries(samples, u, cfg.max_x_degree)
    if entries is None:
        logger.debug(f"cell ({r},{d}): interpolated entries disagree with extra points")
        return None
    L = _vector_to_operator(entries, r, d)
    return None if L.is_zero else L.normalized()


# ===== STAIRCASE =====

def staircase_search(f: TruncSeries, cfg: GuessConfig) -> OdeGuess:
    """
    Walk the staircase of cfg and return the first confirmed operator.

    Cells needing more than f.prec coefficients are skipped and listed in
    OdeGuess.skipped; the order-4 operator of Theta sits in cell (4, 12),
    which needs 65 + reserve + 4 coefficients.

    Raises:
        GuessingError: if f is too short for even the smallest cell
    """
    need = cfg.cell_coefficients(1, 0)
    if f.prec < need:
        raise GuessingError(
            f"smallest staircase cell with reserve {cfg.reserve} needs {need} coefficients, series has {f.prec}")
    if f.valuation < 0:
        raise GuessingError("ODE guessing needs a power series")
    symbolic = isinstance(f.ring, PolyCoeffRing)
    if symbolic and f.ring.names != ("x",):
        raise GuessingError(f"symbolic guessing supports coefficients in x only, got {f.ring.names}")
    sample = specialize_x(f, _x_points(cfg, 1)[0]) if symbolic else f
    visited = []
    skipped = []
    for r, d in cfg.cells():
        if f.prec < cfg.cell_coefficients(r, d):
            skipped.append((r, d))
            continue
        visited.append((r, d))
        logger.debug(f"trying cell order={r} degree={d}")
        vec = _numeric_solution(sample, r, d, cfg.reserve, cfg.prime)
        if vec is None:
            continue
        if symbolic:
            L = _symbolic_solution(f, r, d, cfg)
            if L is None:
                continue
        elif sample.ring.domain.is_FiniteField:
            L = _mod_p_operator(vec, r, d)
        else:
            L = _vector_to_operator(vec, r, d).normalized()
        report = verify_reserve(L, f, cfg.reserve)
        if not report.ok:
            logger.warning(f"cell ({r},{d}): candidate fails the reserve at {report.first_failure}")
            continue
        logger.info(f"guessed operator of order {L.order} in cell ({r},{d}); reserve {report.passed}/{cfg.reserve}")
        return OdeGuess(L, (r, d), tuple(visited), report, tuple(skipped))
    if skipped:
        logger.warning(f"staircase exhausted after {len(visited)} cells; {len(skipped)} cells too large "
                       f"for {f.prec} coefficients")
    else:
        logger.warning(f"staircase exhausted after {len(visited)} cells")
    return OdeGuess(None, None, tuple(visited), skipped=tuple(skipped))


def guess_min_ode(f: TruncSeries, cfg: Optional[GuessConfig] = None) -> Optional[OreOp]:
    """
    Minimal operator (in staircase order) annihilating f including the reserve.

    Over GF(p) the coefficients are representatives in [0, p).
    """
    return staircase_search(f, cfg or GuessConfig()).operator


# ===== ALGEBRAIC GUESSING =====

def _power_rows(f: TruncSeries, deg_t: int, deg_u: int, p: int) -> List[List[int]]:
    """Row n: [t^n] sum c_ij t^i f^j; unknown (i, j) at column j*(deg_t+1) + i."""
    R = f.ring
    powers = [TruncSeries.one(R, f.prec)]
    for _ in range(deg_u):
        powers.append(series_mul(powers[-1], f))
    values = [[R.to_int(c) for c in pw.coefficients(0, f.prec)] for pw in powers]
    rows = []
    for n in range(f.prec):
        rows.append([values[j][n - i] if n >= i else 0 for j in range(deg_u + 1) for i in range(deg_t + 1)])
    return rows


def _primitive_monic(P: PolyElement) -> PolyElement:
    """Divide P by its content in t (as a polynomial in u) and make it monic."""
    R = P.ring
    t = R.gens[0]
    by_u = {}
    for (et, eu), c in P.terms():
        by_u[eu] = by_u.get(eu, R.zero) + c * t ** et
    content = R.zero
    for c in by_u.values():
        content = c if not content else content.gcd(c)
    if content and not content.is_ground:
        P = P.exquo(content)
    return P.monic()


def guess_algebraic_mod_p(f: TruncSeries, deg_t: int, deg_u: int, M: Optional[int] = None,
                          reserve: int = config.RESERVE) -> Optional[AlgGuess]:
    """
    Nonzero P(t, u) with deg_t(P) <= deg_t, deg_u(P) <= deg_u and
    P(t, f) = 0 mod t^M, fitted on M - reserve coefficients.

    Raises:
        GuessingError: f is not over a prime field, or M < (deg_t+1)(deg_u+1) + reserve
    """
    R = f.ring
    if not isinstance(R, ScalarRing) or not R.domain.is_FiniteField:
        raise GuessingError("algebraic guessing works over GF(p)")
    M = f.prec if M is None else M
    if M > f.prec:
        raise GuessingError(f"depth {M} exceeds the known order {f.prec}")
    unknowns = (deg_t + 1) * (deg_u + 1)
    if M < unknowns + reserve:
        raise GuessingError(f"degrees ({deg_t},{deg_u}) need {unknowns + reserve} coefficients, got {M}")
    p = R.characteristic
    if p <= max(M, deg_u):
        logger.warning(f"prime {p} is small for depth {M}; the matrix may be degenerate")
    f = f.truncate(M)
    rows = _power_rows(f, deg_t, deg_u, p)
    basis = nullspace_mod_p(rows[: M - reserve], unknowns, p)
    if not basis:
        return None
    vec = basis[0]
    domain = GF(p)
    Rtu = make_ring(("t", "u"), domain)
    P = Rtu.from_dict({(i, j): domain(vec[j * (deg_t + 1) + i])
                       for j in range(deg_u + 1) for i in range(deg_t + 1) if vec[j * (deg_t + 1) + i]})
    P = _primitive_monic(P)
    report = _report_from_residual(algebraic_residual(P, f), reserve)
    if not report.ok:
        logger.debug(f"degrees ({deg_t},{deg_u}): candidate fails the reserve")
        return None
    return AlgGuess(prime=p, poly=P, deg_t=deg_t, deg_u=deg_u, depth=M, report=report)


def algebraic_staircase(f: TruncSeries, max_deg_t: int, max_deg_u: int,
                        reserve: int = config.RESERVE) -> Tuple[Optional[AlgGuess], Tuple[Tuple[int, int], ...]]:
    """Try (deg_t, deg_u) by increasing deg_t + deg_u, then deg_u; deg_u >= 1."""
    visited = []
    for s in range(1, max_deg_t + max_deg_u + 1):
        for du in range(1, max_deg_u + 1):
            dt = s - du
            if not 0 <= dt <= max_deg_t:
                continue
            visited.append((dt, du))
            guess = guess_algebraic_mod_p(f, dt, du, reserve=reserve)
            if guess is not None:
                logger.info(f"algebraic relation found at degrees (t={dt}, u={du}) mod {guess.prime}")
                return guess, tuple(visited)
    return None, tuple(visited)


# ===== WALK EXPERIMENTS =====

def q00_series_mod_p(prime: int, depth: int, a=1, b=1, c=1) -> TruncSeries:
    """Q(0,0) mod t^depth over GF(prime) at numeric weights."""
    gf = enumerate_walks(StepSet.kreweras(), WeightSpec(a, b, c, prime=prime), depth - 1)
    return coeff_at(gf, 0, 0)


def guess_q00(prime: int = config.PRIME, depth: int = config.MODULAR_DEPTH, max_deg_t: int = 16,
              max_deg_u: int = 4) -> Tuple[Optional[AlgGuess], Tuple[Tuple[int, int], ...]]:
    """Algebraic equation of Q(0,0) at a = b = c = 1 modulo prime."""
    logger.info(f"=== Q(0,0) modular guess mod {prime}, depth {depth} ===")
    return algebraic_staircase(q00_series_mod_p(prime, depth), max_deg_t, max_deg_u)


def c_zero_experiment(prime: int = config.PRIME, depth: int = config.MODULAR_DEPTH, a: int = 2, b: int = 3,
                      alg_bounds: Tuple[int, int] = (6, 3), ode_bounds: Tuple[int, int] = (2, 4)) -> ExperimentReport:
    """
    Search Q(1,1) at a != b, c = 0 for small algebraic and differential
    relations modulo prime. Finding nothing is reported as inconclusive.
    """
    logger.info(f"=== c = 0 experiment: a={a}, b={b}, mod {prime}, depth {depth} ===")
    gf = enumerate_walks(StepSet.kreweras(), WeightSpec(a, b, 0, prime=prime), depth - 1)
    f = series_Q(gf, 1, 1)
    alg, _ = algebraic_staircase(f, alg_bounds[0], alg_bounds[1])
    ode_cfg = GuessConfig(max_order=ode_bounds[0], max_degree=ode_bounds[1], reserve=config.RESERVE, prime=prime)
    ode = staircase_search(f, ode_cfg)
    report = ExperimentReport(
        weights={"a": str(a), "b": str(b), "c": "0"}, prime=prime, depth=depth,
        algebraic_bounds=alg_bounds, ode_bounds=ode_bounds,
        algebraic_found=alg is not None, ode_found=ode.operator is not None)
    if report.outcome == "inconclusive":
        logger.warning("c = 0 sample: no relation at these bounds (inconclusive)")
    return report
