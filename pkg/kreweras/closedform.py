"""
Closed form of Theta and its annihilator.

    Theta = A1 + A2 * int_0^t A3(s) T(s) ds

    A0 = sqrt(g),  g = 1 - 2t/x - (4x^3 - 1) t^2 / x^2      (constant term +1)
    A1 = R1 + R2 A0,   R1 = 1/(6x t^3) - (x^3+1)/(2x^2 t^2) + (2-3x^3)/(6x^3 t)
                       R2 = (t x^3 + 2t - x)/(6 t^3 x^2)
    A2 = R3 A0,        R3 = x^2 (x - t x^3 - 2t)/(3 t^3)
    A3 = 1/(W^2 V A0), W = t x^3 + 2t - x,  V = 4 t^2 x^3 - (x - t)^2
    T  = (3t - x) x F1(27 t^3) + 4t(2t x^3 + t - x) F2(27 t^3)
    F1 = 2F1(-1/3, -2/3; 1; .),  F2 = 2F1(-1/3, 1/3; 2; .)

All formulas of the closed form live in this module and nowhere else.

Series are computed over QQ[x, 1/x]. A1 and A2 have a pole of order 3 at
t = 0, so C is assembled at precision N + 3 and the t^-3..t^-1 coefficients
are asserted to cancel.

The annihilator L_C is assembled by closure properties only:
substituted 2F1 equations, polynomial gauges, one general lclm (giving the
order-4 operator of T), hyperexponential gauges for the algebraic factors, an
integral, and two order-1 lclm steps for A1.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

from sympy.polys.domains import QQ

from kreweras.errors import CertificateError
from kreweras.ore import (
    TF, XF, OreOp, annihilator_of_algebraic, hyperexponential_annihilator,
    integral_annihilator, lclm, product_annihilator, substitute_argument,
)
from kreweras.rings import LaurentRing, PolyCoeffRing, ScalarRing
from kreweras.series import (
    TruncSeries, series_integrate, series_inverse, series_mul, series_sqrt,
    series_substitute_poly, substitute_coefficient_variable,
)

logger = logging.getLogger(__name__)

LX = LaurentRing(("x",))
PX = PolyCoeffRing.over("x")
QQ_SCALARS = ScalarRing.rationals()


# ===== HYPERGEOMETRIC SERIES =====

def pochhammer(u, n: int):
    """(u)_n = u (u+1) ... (u+n-1), exact."""
    u = QQ.convert(u)
    out = QQ.one
    for k in range(n):
        out *= u + k
    return out


@dataclass(frozen=True)
class Hypergeom2F1:
    """Parameters of 2F1(alpha, beta; gamma; t); gamma must not be a non-positive integer."""
    alpha: object
    beta: object
    gamma: object

    def __post_init__(self):
        g = QQ.convert(self.gamma)
        if QQ.denom(g) == 1 and g <= 0:
            raise ValueError(f"gamma = {self.gamma} is a non-positive integer")

    @property
    def params(self):
        return QQ.convert(self.alpha), QQ.convert(self.beta), QQ.convert(self.gamma)


F1 = Hypergeom2F1(QQ(-1, 3), QQ(-2, 3), QQ(1))
F2 = Hypergeom2F1(QQ(-1, 3), QQ(1, 3), QQ(2))


def f21_series(h: Hypergeom2F1, N: int) -> TruncSeries:
    """2F1 mod t^N via c_(n+1) = c_n (a+n)(b+n) / ((c+n)(n+1))."""
    a, b, c = h.params
    coeffs = [QQ.one]
    for n in range(N - 1):
        coeffs.append(coeffs[-1] * (a + n) * (b + n) / ((c + n) * (n + 1)))
    return TruncSeries.from_list(QQ_SCALARS, coeffs[:N], N)


def f21_ode(h: Hypergeom2F1) -> OreOp:
    """(t^2 - t) D^2 + ((a+b+1) t - c) D + a b, normalized."""
    a, b, c = h.params
    return OreOp.from_coeffs([a * b, TF * (a + b + 1) - c, TF ** 2 - TF]).normalized()


# ===== THE CLOSED FORM =====

def _lx(terms: dict, prec: int) -> TruncSeries:
    """Series over QQ[x,1/x] from {t-exponent: {x-exponent: rational}}."""
    return TruncSeries.from_dict(
        LX, {n: LX.from_terms(((e,), QQ.convert(c)) for e, c in row.items()) for n, row in terms.items()}, prec)


def radicand(prec: int) -> TruncSeries:
    """g = 1 - 2t/x - (4x^3 - 1) t^2 / x^2."""
    return _lx({0: {0: 1}, 1: {-1: -2}, 2: {1: -4, -2: 1}}, prec)


def r1(prec: int) -> TruncSeries:
    return _lx({-3: {-1: QQ(1, 6)}, -2: {1: QQ(-1, 2), -2: QQ(-1, 2)}, -1: {-3: QQ(1, 3), 0: QQ(-1, 2)}}, prec)


def r2(prec: int) -> TruncSeries:
    return _lx({-3: {-1: QQ(-1, 6)}, -2: {1: QQ(1, 6), -2: QQ(1, 3)}}, prec)


def r3(prec: int) -> TruncSeries:
    return _lx({-3: {3: QQ(1, 3)}, -2: {5: QQ(-1, 3), 2: QQ(-2, 3)}}, prec)


def kernel_w(prec: int) -> TruncSeries:
    """W = t x^3 + 2t - x."""
    return _lx({0: {1: -1}, 1: {3: 1, 0: 2}}, prec)


def kernel_v(prec: int) -> TruncSeries:
    """V = 4 t^2 x^3 - (x - t)^2."""
    return _lx({0: {2: -1}, 1: {1: 2}, 2: {3: 4, 0: -1}}, prec)


def _prefactor_series(which: int) -> dict:
    # (3t - x) x  and  4t (2t x^3 + t - x)
    if which == 1:
        return {0: {2: -1}, 1: {1: 3}}
    return {1: {1: -4}, 2: {3: 8, 0: 4}}


def hypergeometric_part(prec: int) -> TruncSeries:
    """T mod t^prec with coefficients in QQ[x]."""
    m = prec // 3 + 1
    total = TruncSeries.zero(PX, prec)
    for which, h in ((1, F1), (2, F2)):
        f = series_substitute_poly(f21_series(h, m), {3: 27}).truncate(prec)
        f = f.map(PX.convert, PX)
        pre = TruncSeries.from_dict(
            PX, {n: PX.from_terms(((e,), QQ.convert(c)) for e, c in row.items())
                 for n, row in _prefactor_series(which).items()}, prec)
        total = total + series_mul(pre, f).truncate(prec)
    return total


@dataclass(frozen=True)
class ClosedFormC:
    """Truncations of the closed-form pieces; C is known mod t^prec."""
    A0: TruncSeries
    A1: TruncSeries
    A2: TruncSeries
    A3: TruncSeries
    T: TruncSeries
    J: TruncSeries
    C: TruncSeries
    prec: int
    L_C: Optional[OreOp] = None


def build_closed_form(N: int, with_operator: bool = True) -> ClosedFormC:
    """
    Assemble C mod t^N.

    Raises:
        CertificateError: if the t^-3..t^-1 coefficients of C do not cancel
    """
    if N < 8:
        raise ValueError("build_closed_form needs N >= 8")
    M = N + 3
    A0 = series_sqrt(radicand(M))
    A1 = r1(M) + series_mul(r2(M), A0)
    A2 = series_mul(r3(M), A0)
    W = kernel_w(M)
    denom = series_mul(series_mul(series_mul(W, W), kernel_v(M)), A0)
    A3 = series_inverse(denom)
    T = hypergeometric_part(M).map(LX.convert, LX)
    J = series_integrate(series_mul(A3, T))
    C = A1 + series_mul(A2, J)
    for n in (-3, -2, -1):
        if n >= C.valuation and n < C.prec and not LX.is_zero(C[n]):
            raise CertificateError("pole-cancellation", f"coefficient of t^{n} in C is {C[n]}", n)
    if C.prec < N:
        raise CertificateError("pole-cancellation", f"C known only mod t^{C.prec}")
    C = C.truncate(N)
    logger.info(f"closed form C assembled mod t^{N}")
    L_C = closed_form_annihilator() if with_operator else None
    return ClosedFormC(A0=A0, A1=A1, A2=A2, A3=A3, T=T, J=J, C=C, prec=N, L_C=L_C)


def theta_in_closed_form_ring(theta: TruncSeries) -> TruncSeries:
    """Map a series over QQ[x] into QQ[x,1/x] for comparison with C."""
    return theta.map(LX.convert, LX)


# ===== ANNIHILATORS =====

def _field_pieces():
    x, t = XF, TF
    g = 1 - 2 * t / x - (4 * x ** 3 - 1) * t ** 2 / x ** 2
    W = t * x ** 3 + 2 * t - x
    V = 4 * t ** 2 * x ** 3 - (x - t) ** 2
    R1 = 1 / (6 * x * t ** 3) - (x ** 3 + 1) / (2 * x ** 2 * t ** 2) + (2 - 3 * x ** 3) / (6 * x ** 3 * t)
    R2 = W / (6 * t ** 3 * x ** 2)
    R3 = x ** 2 * (x - t * x ** 3 - 2 * t) / (3 * t ** 3)
    return g, W, V, R1, R2, R3


def _logder(f):
    return f.diff(TF) / f


@lru_cache(maxsize=None)
def hypergeometric_annihilator() -> OreOp:
    """Order-4 annihilator of T: lclm of the two gauged, substituted 2F1 equations."""
    x, t = XF, TF
    parts = []
    for h, prefactor in ((F1, (3 * t - x) * x), (F2, 4 * t * (2 * t * x ** 3 + t - x))):
        moved = substitute_argument(f21_ode(h), 27 * t ** 3)
        parts.append(product_annihilator(moved, annihilator_of_algebraic("rational", prefactor)))
    L_T = lclm(parts[0], parts[1])
    logger.info(f"annihilator of T has order {L_T.order}")
    return L_T


@lru_cache(maxsize=None)
def closed_form_annihilator() -> OreOp:
    """L_C, the closure-built annihilator of C."""
    g, W, V, R1, R2, R3 = _field_pieces()
    half_g = _logder(g) / 2
    L = hypergeometric_annihilator()
    L = product_annihilator(L, hyperexponential_annihilator(-2 * _logder(W) - _logder(V) - half_g))
    L = integral_annihilator(L)
    L = product_annihilator(L, hyperexponential_annihilator(_logder(R3) + half_g))
    L = lclm(L, hyperexponential_annihilator(_logder(R2) + half_g))
    L = lclm(L, annihilator_of_algebraic("rational", R1))
    logger.info(f"closure-built annihilator of C has order {L.order}")
    return L


# ===== SIDE IDENTITIES =====

L1_SOLUTION = (
    3 * XF ** 3 / TF + 3 * XF ** 4 / TF ** 2 - 2 / TF + 3 * XF / TF ** 2 - XF ** 2 / TF ** 3
)


def l1_operator() -> OreOp:
    """Order-1 operator with the rational solution 3x^3/t + 3x^4/t^2 - 2/t + 3x/t^2 - x^2/t^3."""
    return annihilator_of_algebraic("rational", L1_SOLUTION)


def kernel_factor_identity() -> bool:
    """4 t^2 x^3 - (x - t)^2 = -x^2 g, i.e. V = -x^2 A0^2."""
    g, W, V, *_ = _field_pieces()
    return V == -XF ** 2 * g


def a2a3_identity(cf: ClosedFormC) -> bool:
    """A2 A3 W^2 V = R3 on truncations."""
    M = cf.A3.prec
    W = kernel_w(M)
    lhs = series_mul(series_mul(series_mul(cf.A2, cf.A3), series_mul(W, W)), kernel_v(M))
    rhs = r3(M)
    prec = min(lhs.prec, rhs.prec)
    return lhs.truncate(prec) == rhs.truncate(prec)


def t_at_3t(prec: int) -> Tuple[TruncSeries, TruncSeries]:
    """
    T(t; 3t) and -8 t^2 (1 - 27 t^3) F2(27 t^3), both mod t^prec.

    Substituting x = 3t kills the (3t - x) x term.
    """
    T = hypergeometric_part(prec)
    lhs = substitute_coefficient_variable(T, "x", {1: 3}, QQ_SCALARS)
    f2 = series_substitute_poly(f21_series(F2, prec // 3 + 1), {3: 27}).truncate(prec)
    pre = TruncSeries.from_dict(QQ_SCALARS, {2: -8, 5: 216}, prec)
    return lhs, series_mul(pre, f2).truncate(prec)


def first_term_vanishes_at_3t(prec: int) -> bool:
    """(3t - x) x F1(27 t^3) is identically zero after x -> 3t."""
    pre = TruncSeries.from_dict(
        PX, {n: PX.from_terms(((e,), QQ.convert(c)) for e, c in row.items())
             for n, row in _prefactor_series(1).items()}, prec)
    return substitute_coefficient_variable(pre, "x", {1: 3}, QQ_SCALARS).is_zero
