"""
The series Theta = [x^> y^0] Theta0 with

    Theta0(t;x,y) = (x-y)(x^2 y-1)(x y^2-1) / (x y K(x,y)),  K = 1 - t(xy + 1/x + 1/y).

theta_series expands 1/K as sum t^n S^n and extracts coefficients directly,
clipping the powers of S to the exponent window that can still reach y^0 and
a positive x-exponent. residue_oracle recomputes Theta independently: 1/K by
series inversion, [y^0] as a residue in y, and the positive part as the
z-residue against the kernel (x/z)/(1 - x/z).
"""

import logging
from typing import Tuple

from kreweras.rings import LaurentPoly, LaurentRing, PolyCoeffRing
from kreweras.series import TruncSeries, series_inverse, series_mul

logger = logging.getLogger(__name__)

XY = LaurentRing(("x", "y"))
ZY = LaurentRing(("y", "z"))
XZ = LaurentRing(("x", "z"))
THETA_RING = PolyCoeffRing.over("x")


def _numerator(R: LaurentRing, u: str, v: str) -> LaurentPoly:
    """(u - v)(u^2 v - 1)(u v^2 - 1) / (u v) in R."""
    U, V = R.gen(u), R.gen(v)
    return (U - V) * (U * U * V - 1) * (U * V * V - 1) * R.inverse(U * V)


def step_generator(R: LaurentRing, u: str = "x", v: str = "y") -> LaurentPoly:
    U, V = R.gen(u), R.gen(v)
    return U * V + R.inverse(U) + R.inverse(V)


def expand_theta0(N: int) -> TruncSeries:
    """Theta0 mod t^N over Laurent polynomials in x, y."""
    if N < 1:
        raise ValueError("expand_theta0 needs N >= 1")
    num = _numerator(XY, "x", "y")
    S = step_generator(XY)
    coeffs = {}
    power = XY.one
    for n in range(N):
        coeffs[n] = num * power
        power = power * S
    return TruncSeries.from_dict(XY, coeffs, N)


def positive_part_x(f: LaurentPoly) -> LaurentPoly:
    """Terms of f with positive x-exponent."""
    i = f.ring.names.index("x")
    return f.select(lambda e: e[i] > 0)


def coeff_y0(f: LaurentPoly) -> LaurentPoly:
    """Terms of f with y-exponent 0."""
    i = f.ring.names.index("y")
    return f.select(lambda e: e[i] == 0)


def _to_theta_coeff(f: LaurentPoly):
    """A LaurentPoly in x (y-exponent 0, x-exponents >= 0) as a QQ[x] polynomial."""
    ix = f.ring.names.index("x")
    return THETA_RING.from_terms(((e[ix],), c) for e, c in f.terms())


def _clip(f: LaurentPoly, x_low: int, y_low: int, y_high: int) -> LaurentPoly:
    ix, iy = f.ring.names.index("x"), f.ring.names.index("y")
    return f.select(lambda e: e[ix] >= x_low and y_low <= e[iy] <= y_high)


def theta_series(N: int) -> TruncSeries:
    """
    Theta mod t^N with coefficients in x QQ[x].

    The numerator over xy has x-exponents in [-1, 3] and y-exponents in
    [-1, 3]; each further factor S moves both by at most one. Terms of S^n that
    cannot reach y^0 and a positive x-exponent by order N-1 are dropped.
    """
    if N < 1:
        raise ValueError("theta_series needs N >= 1")
    num = _numerator(XY, "x", "y")
    S = step_generator(XY)
    coeffs = {}
    power = XY.one
    for n in range(N):
        coeff = positive_part_x(coeff_y0(num * power))
        lo, hi = coeff.degree_range("x")
        if coeff and hi > 3 + 2 * n:
            raise AssertionError(f"x-degree {hi} of [t^{n}]Theta exceeds {3 + 2 * n}")
        coeffs[n] = _to_theta_coeff(coeff)
        slack = N - 1 - (n + 1)
        power = _clip(power * S, -3 - slack, -3 - slack, 1 + slack)
    logger.debug(f"theta series computed mod t^{N}")
    return TruncSeries.from_dict(THETA_RING, coeffs, N)


def _residue_y0(f: LaurentPoly) -> LaurentPoly:
    """[y^0] f as the residue at y = 0 of f / y, returned with y dropped to exponent 0."""
    R = f.ring
    iy = R.names.index("y")
    g = f * R.inverse(R.gen("y"))
    return g.select(lambda e: e[iy] == -1) * R.gen("y")


def _positive_part_by_residue(f: LaurentPoly) -> LaurentPoly:
    """
    [z^>] f(z) mapped to x: Res_z of f(z) (x/z)/(1 - x/z) / z, i.e. the
    z^0 coefficient of f(z) * sum_{k>=1} (x/z)^k.
    """
    iz = ZY.names.index("z")
    low, high = f.degree_range("z")
    if high < 1:
        return XZ.zero
    lifted = XZ.from_terms(((0, e[iz]), c) for e, c in f.terms())
    ratio = XZ.gen("x") * XZ.inverse(XZ.gen("z"))
    kernel = XZ.zero
    term = XZ.one
    for _ in range(high):
        term = term * ratio
        kernel = kernel + term
    product = lifted * kernel
    jz = XZ.names.index("z")
    return product.select(lambda e: e[jz] == 0)


def residue_oracle(N: int) -> TruncSeries:
    """Theta mod t^N computed through residues (slow, for cross-checking)."""
    if N < 1:
        raise ValueError("residue_oracle needs N >= 1")
    kernel = TruncSeries.from_dict(ZY, {0: ZY.one, 1: -step_generator(ZY, "z", "y")}, N)
    inverse = series_inverse(kernel)
    theta0 = series_mul(TruncSeries.from_dict(ZY, {0: _numerator(ZY, "z", "y")}, N), inverse)
    coeffs = {}
    for n in range(N):
        part = _positive_part_by_residue(_residue_y0(theta0[n]))
        ix = XZ.names.index("x")
        coeffs[n] = THETA_RING.from_terms(((e[ix],), c) for e, c in part.terms())
    return TruncSeries.from_dict(THETA_RING, coeffs, N)


def theta_support(theta: TruncSeries) -> Tuple[Tuple[int, int], ...]:
    """(min, max) x-exponent of each t-coefficient; (0, -1) for zero coefficients."""
    out = []
    for n in range(theta.prec):
        c = theta[n]
        if not c:
            out.append((0, -1))
            continue
        exps = [e[0] for e, _ in c.terms()]
        out.append((min(exps), max(exps)))
    return tuple(out)
