"""
Quarter-plane walks with interacting boundaries.

A walk starts at (0,0) and uses unit steps from a step set. Each arrival at
a point {i>0, j=0} multiplies its weight by a, each arrival at {i=0, j>0} by
b, each return to (0,0) by c; the starting point carries no weight.

This module provides:
1. StepSet / WeightSpec / WalkGF value types
2. enumerate_walks: dynamic program over lengths
3. brute_force_count: exhaustive oracle over all step sequences
4. Specializations of Q(a,b,c;x,y;t) and single coefficient series Q_{i,j}
5. The kernel equation residual, cleared of denominators by abc
6. The t^0 / t^3 relations of ab - (ab-ac-bc+abc) Q(0,0) and the identities
   that turn them into a = b = 0
7. Degenerate weights (c = 0, a = b)
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from sympy.polys.domains import GF, QQ

from kreweras.errors import ConfigError, KernelResidualError
from kreweras.rings import LaurentPoly, LaurentRing, PolyCoeffRing, ScalarRing, make_ring, rat
from kreweras.series import TruncSeries, series_mul

logger = logging.getLogger(__name__)

Position = Tuple[int, int]

WEIGHT_NAMES = ("a", "b", "c")
BRUTE_FORCE_LIMIT = 14


# ===== STEP SETS AND WEIGHTS =====

@dataclass(frozen=True)
class StepSet:
    """Small steps in {-1,0,1}^2 minus (0,0)."""
    steps: Tuple[Position, ...]
    name: str = "custom"

    def __post_init__(self):
        for s in self.steps:
            if s == (0, 0) or any(abs(v) > 1 for v in s):
                raise ConfigError(f"step {s} is not a small nonzero step")

    @classmethod
    def kreweras(cls) -> "StepSet":
        return cls(((1, 1), (-1, 0), (0, -1)), "kreweras")

    @classmethod
    def reverse_kreweras(cls) -> "StepSet":
        return cls(((-1, -1), (1, 0), (0, 1)), "reverse-kreweras")

    @classmethod
    def from_name(cls, name: str) -> "StepSet":
        if name == "kreweras":
            return cls.kreweras()
        if name in ("reverse-kreweras", "reverse_kreweras"):
            return cls.reverse_kreweras()
        raise ConfigError(f"unknown step set '{name}'")

    def _sum(self, R: LaurentRing, keep) -> LaurentPoly:
        ix, iy = R.names.index("x"), R.names.index("y")
        total = R.zero
        for i, j in self.steps:
            if keep(i, j):
                exps = [0] * R.ngens
                exps[ix], exps[iy] = i, j
                total = total + R.monomial(tuple(exps))
        return total

    def generator(self, R: LaurentRing) -> LaurentPoly:
        """S(x,y) = sum over steps of x^i y^j."""
        return self._sum(R, lambda i, j: True)

    def south(self, R: LaurentRing) -> LaurentPoly:
        """A(x,y): steps with j = -1."""
        return self._sum(R, lambda i, j: j == -1)

    def west(self, R: LaurentRing) -> LaurentPoly:
        """B(x,y): steps with i = -1."""
        return self._sum(R, lambda i, j: i == -1)

    def south_west(self, R: LaurentRing) -> LaurentPoly:
        """G(x,y) = 1/(xy) when (-1,-1) is a step, else 0."""
        return self._sum(R, lambda i, j: i == -1 and j == -1)


@dataclass(frozen=True)
class WeightSpec:
    """
    Boundary weights; None keeps a weight symbolic.

    prime selects arithmetic in GF(prime) instead of QQ.
    """
    a: Optional[object] = None
    b: Optional[object] = None
    c: Optional[object] = None
    prime: Optional[int] = None

    @classmethod
    def symbolic(cls) -> "WeightSpec":
        return cls()

    @property
    def domain(self):
        return QQ if self.prime is None else GF(self.prime)

    @property
    def symbolic_names(self) -> Tuple[str, ...]:
        return tuple(n for n in WEIGHT_NAMES if getattr(self, n) is None)

    def ring(self):
        """Coefficient ring of the walk table: polynomials in the symbolic weights."""
        names = self.symbolic_names
        if not names:
            return ScalarRing(self.domain)
        return PolyCoeffRing(make_ring(names, self.domain))

    def value_in(self, name: str, R):
        """The weight `name` as an element of R (a generator when symbolic)."""
        v = getattr(self, name)
        if v is None:
            return R.gen(name)
        q = rat(*_split_rational(v))
        scalar = ScalarRing(self.domain).convert(q)
        return R.convert(scalar) if not isinstance(R, ScalarRing) else scalar

    def nonzero_origin_weight(self) -> bool:
        return self.c is None or rat(*_split_rational(self.c)) != 0


def _split_rational(v) -> Tuple[int, int]:
    if isinstance(v, str):
        num, _, den = v.partition("/")
        try:
            return int(num), int(den) if den else 1
        except ValueError:
            raise ConfigError(f"'{v}' is not a rational number") from None
    q = QQ.convert(v) if not isinstance(v, int) else QQ(v)
    return int(QQ.numer(q)), int(QQ.denom(q))


# ===== ENUMERATION =====

@dataclass(frozen=True)
class WalkGF:
    """
    Table of weighted walk counts: table[n][(i,j)] is the weight polynomial of
    walks of length n ending at (i,j). Lengths 0..length are present.
    """
    steps: StepSet
    weights: WeightSpec
    length: int
    table: Tuple[Dict[Position, object], ...] = field(repr=False)

    @property
    def ring(self):
        return self.weights.ring()

    def entry(self, n: int, i: int, j: int):
        return self.table[n].get((i, j), self.ring.zero)


def _arrival_weight(i: int, j: int, wa, wb, wc):
    if i > 0 and j == 0:
        return wa
    if i == 0 and j > 0:
        return wb
    if i == 0 and j == 0:
        return wc
    return None


def enumerate_walks(steps: StepSet, weights: WeightSpec, N: int) -> WalkGF:
    """
    Weighted counts of quarter-plane walks of lengths 0..N.

    Args:
        steps: step set
        weights: boundary weights
        N: maximal length (N >= 0)
    """
    if N < 0:
        raise ConfigError("walk length must be nonnegative")
    R = weights.ring()
    wa, wb, wc = (weights.value_in(n, R) for n in WEIGHT_NAMES)
    layer: Dict[Position, object] = {(0, 0): R.one}
    table = [layer]
    for n in range(1, N + 1):
        nxt: Dict[Position, object] = {}
        for (i, j), w in layer.items():
            for di, dj in steps.steps:
                p, q = i + di, j + dj
                if p < 0 or q < 0:
                    continue
                factor = _arrival_weight(p, q, wa, wb, wc)
                contribution = w if factor is None else w * factor
                nxt[(p, q)] = nxt.get((p, q), R.zero) + contribution
        layer = {pos: w for pos, w in nxt.items() if not R.is_zero(w)}
        table.append(layer)
        logger.debug(f"length {n}: {len(layer)} endpoints")
    return WalkGF(steps=steps, weights=weights, length=N, table=tuple(table))


def brute_force_count(steps: StepSet, weights: WeightSpec, n: int) -> Dict[Position, object]:
    """
    Weighted counts of walks of length exactly n by trying all |S|^n sequences.

    Raises:
        ConfigError: if n exceeds BRUTE_FORCE_LIMIT
    """
    if n > BRUTE_FORCE_LIMIT:
        raise ConfigError(f"brute force limited to n <= {BRUTE_FORCE_LIMIT}")
    R = weights.ring()
    wa, wb, wc = (weights.value_in(name, R) for name in WEIGHT_NAMES)
    counts: Dict[Position, object] = {}
    for seq in itertools.product(steps.steps, repeat=n):
        i = j = 0
        w = R.one
        for di, dj in seq:
            i, j = i + di, j + dj
            if i < 0 or j < 0:
                break
            factor = _arrival_weight(i, j, wa, wb, wc)
            if factor is not None:
                w = w * factor
        else:
            counts[(i, j)] = counts.get((i, j), R.zero) + w
    return {pos: w for pos, w in counts.items() if not R.is_zero(w)}


# ===== SPECIALIZATIONS =====

def _target_ring(gf: WalkGF, keep_x: bool, keep_y: bool):
    names = gf.weights.symbolic_names + (("x",) if keep_x else ()) + (("y",) if keep_y else ())
    if not names:
        return ScalarRing(gf.weights.domain)
    return PolyCoeffRing(make_ring(names, gf.weights.domain))


def series_Q(gf: WalkGF, x_spec=None, y_spec=None) -> TruncSeries:
    """
    Q(a,b,c;x,y;t) mod t^(length+1) with x and y symbolic (None) or set to a rational.
    """
    keep_x, keep_y = x_spec is None, y_spec is None
    target = _target_ring(gf, keep_x, keep_y)
    wring = gf.ring
    scalars = ScalarRing(gf.weights.domain)
    xv = None if keep_x else scalars.convert(rat(*_split_rational(x_spec)))
    yv = None if keep_y else scalars.convert(rat(*_split_rational(y_spec)))
    names = target.names if not isinstance(target, ScalarRing) else ()
    wnames = gf.weights.symbolic_names
    coeffs = {}
    for n, layer in enumerate(gf.table):
        acc: Dict[Tuple[int, ...], object] = {}
        for (i, j), w in layer.items():
            scale = scalars.one
            if xv is not None:
                scale = scale * xv ** i
            if yv is not None:
                scale = scale * yv ** j
            if not scale:
                continue
            for wexps, c in wring.terms(w):
                exps = [0] * len(names)
                for name, e in zip(wnames, wexps):
                    exps[names.index(name)] = e
                if keep_x:
                    exps[names.index("x")] = i
                if keep_y:
                    exps[names.index("y")] = j
                key = tuple(exps)
                acc[key] = acc.get(key, scalars.zero) + c * scale
        coeffs[n] = target.from_terms(acc.items())
    return TruncSeries.from_dict(target, coeffs, gf.length + 1)


def coeff_at(gf: WalkGF, i: int, j: int) -> TruncSeries:
    """Q_{i,j}(a,b,c;t), the series of walks ending at (i,j)."""
    if i < 0 or j < 0:
        raise ConfigError("coeff_at needs i, j >= 0")
    terms = {n: layer[(i, j)] for n, layer in enumerate(gf.table) if (i, j) in layer}
    return TruncSeries.from_dict(gf.ring, terms, gf.length + 1)


# ===== KERNEL EQUATION =====

def _laurent_series(gf: WalkGF, R: LaurentRing, keep) -> TruncSeries:
    """sum over table entries with keep(i, j) of w x^i y^j t^n, in R."""
    wnames = gf.weights.symbolic_names
    ix, iy = R.names.index("x"), R.names.index("y")
    coeffs = {}
    for n, layer in enumerate(gf.table):
        items = []
        for (i, j), w in layer.items():
            if not keep(i, j):
                continue
            for wexps, c in gf.ring.terms(w):
                exps = [0] * R.ngens
                for name, e in zip(wnames, wexps):
                    exps[R.names.index(name)] = e
                exps[ix], exps[iy] = i, j
                items.append((tuple(exps), c))
        merged: Dict[Tuple[int, ...], object] = {}
        for e, c in items:
            merged[e] = merged.get(e, R.domain.zero) + c
        coeffs[n] = R.from_terms(merged.items())
    return TruncSeries.from_dict(R, coeffs, gf.length + 1)


def kernel_sides(gf: WalkGF, N: int) -> Tuple[TruncSeries, TruncSeries]:
    """
    Both sides of the kernel equation multiplied by abc, mod t^N:

        abc K Q(x,y)
        ab + bc(a - 1 - t a A) Q(x,0) + ac(b - 1 - t b B) Q(0,y)
           + ((ac + bc - ab - abc) + abc t G) Q(0,0)
    """
    if N > gf.length + 1:
        raise ConfigError(f"kernel check mod t^{N} needs walks up to length {N - 1}")
    R = LaurentRing(gf.weights.symbolic_names + ("x", "y"), laurent=("x", "y"), domain=gf.weights.domain)
    a, b, c = (gf.weights.value_in(n, R) for n in WEIGHT_NAMES)
    S, A, B, G = (gf.steps.generator(R), gf.steps.south(R), gf.steps.west(R), gf.steps.south_west(R))

    def poly_t(c0, c1) -> TruncSeries:
        return TruncSeries.from_dict(R, {0: c0, 1: c1}, N)

    Q = _laurent_series(gf, R, lambda i, j: True).truncate(N)
    Qx0 = _laurent_series(gf, R, lambda i, j: j == 0).truncate(N)
    Q0y = _laurent_series(gf, R, lambda i, j: i == 0).truncate(N)
    Q00 = _laurent_series(gf, R, lambda i, j: i == 0 and j == 0).truncate(N)
    abc = a * b * c
    lhs = series_mul(poly_t(abc, -(abc * S)), Q)
    rhs = TruncSeries.from_dict(R, {0: a * b}, N)
    rhs = rhs + series_mul(poly_t(b * c * (a - 1), -(b * c * a * A)), Qx0)
    rhs = rhs + series_mul(poly_t(a * c * (b - 1), -(a * c * b * B)), Q0y)
    rhs = rhs + series_mul(poly_t(a * c + b * c - a * b - abc, abc * G), Q00)
    return lhs.truncate(N), rhs.truncate(N)


def kernel_residual(gf: WalkGF, N: int, strict: bool = True) -> TruncSeries:
    """
    abc K Q - (abc times the right-hand side), mod t^N.

    Raises:
        KernelResidualError: with the first nonzero t-order, when strict
    """
    lhs, rhs = kernel_sides(gf, N)
    residual = lhs - rhs
    if strict and not residual.is_zero:
        raise KernelResidualError(
            f"kernel equation fails for {gf.steps.name} at t^{residual.valuation}", order=residual.valuation)
    logger.debug(f"kernel residual for {gf.steps.name} mod t^{N}: {'zero' if residual.is_zero else 'nonzero'}")
    return residual


# ===== THE FACTOR ab - (ab - ac - bc + abc) Q(0,0) =====

def origin_factor_coeffs(gf: WalkGF):
    """
    Coefficients of t^0 and t^3 in ab - (ab - ac - bc + abc) Q(0,0).

    Returns:
        (t^0 relation, t^3 relation) as elements of the weight ring
    """
    if gf.length < 3:
        raise ConfigError("the t^3 relation needs walks up to length 3")
    R = gf.ring
    a, b, c = (gf.weights.value_in(n, R) for n in WEIGHT_NAMES)
    E = a * b - a * c - b * c + a * b * c
    q00 = coeff_at(gf, 0, 0)
    rel0 = a * b - E * q00[0]
    rel3 = -(E * q00[3])
    return rel0, rel3


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    statement: str
    holds: bool


def weight_identities(rel0, rel3) -> List[IdentityCheck]:
    """
    Polynomial identities turning rel0 = rel3 = 0 (with c != 0) into a = b = 0.

    With e0 = ab - a - b and e3 = ab(a+b):
      rel0 = -c e0
      rel3 + ab(a+b)c = (a+b) c rel0
      (a+b)^2 = e3 - (a+b) e0
      ab = e0 + (a+b)
      a^2 = a(a+b) - ab,  b^2 = b(a+b) - ab
    so a+b, then ab, then a and b lie in the radical of (e0, e3).
    """
    R = PolyCoeffRing.over(*WEIGHT_NAMES)
    a, b, c = (R.gen(n) for n in WEIGHT_NAMES)
    rel0, rel3 = R.convert(rel0), R.convert(rel3)
    e0 = a * b - a - b
    e3 = a * b * (a + b)
    s = a + b
    return [
        IdentityCheck("t0-relation", "[t^0] = -c (ab - a - b)", rel0 == -c * e0),
        IdentityCheck("t3-relation", "[t^3] + ab(a+b)c = (a+b) c [t^0]", rel3 + e3 * c == s * c * rel0),
        IdentityCheck("sum-nilpotent", "(a+b)^2 = ab(a+b) - (a+b)(ab - a - b)", s ** 2 == e3 - s * e0),
        IdentityCheck("product", "ab = (ab - a - b) + (a+b)", a * b == e0 + s),
        IdentityCheck("a-nilpotent", "a^2 = a(a+b) - ab", a ** 2 == a * s - a * b),
        IdentityCheck("b-nilpotent", "b^2 = b(a+b) - ab", b ** 2 == b * s - a * b),
    ]


def degenerate_cases(N: int = 12) -> List[IdentityCheck]:
    """
    Weights where the transcendence argument does not apply.

    c = 0: Q(0,0) = 1 and both abc-cleared sides of the kernel equation vanish.
    a = b: the prefactor (a - b) vanishes; Q(x,y) = Q(y,x) for Kreweras.
    """
    steps = StepSet.kreweras()
    zero_c = enumerate_walks(steps, WeightSpec(c=0), N)
    q00 = coeff_at(zero_c, 0, 0)
    lhs, rhs = kernel_sides(zero_c, N + 1)
    equal_ab = enumerate_walks(steps, WeightSpec(a=2, b=2), N)
    symmetric = all(
        layer.get((i, j)) == layer.get((j, i)) for layer in equal_ab.table for (i, j) in layer)
    checks = [
        IdentityCheck("c0-origin", f"c = 0: Q(0,0) = 1 mod t^{N + 1}", q00 == TruncSeries.one(zero_c.ring, N + 1)),
        IdentityCheck("c0-kernel", f"c = 0: both cleared kernel sides vanish mod t^{N + 1}",
                      lhs.is_zero and rhs.is_zero),
        IdentityCheck("a-equals-b", f"a = b: Q(x,y) = Q(y,x) mod t^{N + 1}", symmetric),
    ]
    for check in checks:
        if not check.holds:
            logger.warning(f"degenerate case check failed: {check.statement}")
    return checks
