"""
Linear differential operators in t over QQ(x)(t).

An OreOp is L = sum_i p_i(x,t) D^i with D = d/dt, acting by L(f) = sum p_i f^(i).
Multiplication follows the commutation rule D p = p D + p'.

This module provides:
1. OreOp with exact field coefficients (sympy fraction field QQ(x,t))
2. Operator algebra: mul, right division (rquo / rrem), lclm
3. Closure constructions: sums, products, integrals, argument substitution,
   order-1 annihilators of rational, square-root and hyperexponential functions
4. apply() on truncated series and the coefficient recurrence (RecOp)

Design decisions:
- Coefficients are kept exact in QQ(x,t) so that L = rquo(L,M) M + rrem(L,M)
  holds as an identity. normalized() gives the canonical representative up to
  a left unit: polynomial coefficients, primitive over ZZ[x,t], leading
  coefficient with positive leading term.
- Closure constructions return normalized operators.
- Whenever one lclm/product operand has order 1 (a hyperexponential
  solution u with u'/u = lam), closed formulas replace linear algebra:
  product is the gauge substitution D -> D - lam, lclm is
  (D - (lam + s'/s)) L with s = L(u)/u.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.polys.fields import FracElement, field as sympy_field
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, ring as sympy_ring

from kreweras.errors import OperatorError, PrecisionError, SubstitutionError, ZeroDenominatorError
from kreweras.linalg import nullspace
from kreweras.rings import FractionCoeffRing, LaurentRing, PolyCoeffRing, RatFunc, ScalarRing, make_ring
from kreweras.series import TruncSeries, series_derive

logger = logging.getLogger(__name__)

# QQ(x,t) and its polynomial ring QQ[x,t]
OP_FIELD, XF, TF = sympy_field("x,t", QQ, grlex)
OP_RING = OP_FIELD.ring
X, T = OP_RING.gens
X_RING = make_ring(("x",))

# recurrence coefficients live in QQ[x,n]
REC_RING, XN, N = sympy_ring("x,n", QQ, grlex)


def to_field(c) -> FracElement:
    """Coerce a number, polynomial (in any subset of x,t), RatFunc or fraction into QQ(x,t)."""
    if isinstance(c, FracElement):
        if c.field == OP_FIELD:
            return c
        return OP_FIELD.new(c.numer.set_ring(OP_RING), c.denom.set_ring(OP_RING))
    if isinstance(c, PolyElement):
        if c.ring != OP_RING:
            c = c.set_ring(OP_RING)
        return OP_FIELD.field_new(c)
    if isinstance(c, RatFunc):
        return OP_FIELD.new(c.num.set_ring(OP_RING), c.den.set_ring(OP_RING))
    return OP_FIELD.field_new(QQ.convert(c))


def _is_poly(c: FracElement) -> bool:
    return c.denom.is_ground


def _as_poly(c: FracElement) -> PolyElement:
    return c.numer.quo_ground(c.denom.LC)


def _dt(c: FracElement) -> FracElement:
    return c.diff(TF)


def _times_d(coeffs: List[FracElement]) -> List[FracElement]:
    """Coefficients of D * (sum c_j D^j) = sum (c_j' D^j + c_j D^(j+1))."""
    out = [_dt(c) for c in coeffs] + [OP_FIELD.zero]
    for j, c in enumerate(coeffs):
        out[j + 1] = out[j + 1] + c
    return out


def _poly_times_d(coeffs: List[PolyElement]) -> List[PolyElement]:
    out = [c.diff(T) for c in coeffs] + [OP_RING.zero]
    for j, c in enumerate(coeffs):
        out[j + 1] += c
    return out


# ===== OPERATORS =====

@dataclass(frozen=True, eq=False)
class OreOp:
    """
    Differential operator sum_i coeffs[i] D^i, coefficients in QQ(x,t).

    The zero operator has no coefficients and order -1.
    """
    coeffs: Tuple[FracElement, ...]

    @classmethod
    def from_coeffs(cls, coeffs: Iterable) -> "OreOp":
        cs = [to_field(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        return cls(tuple(cs))

    @classmethod
    def d(cls) -> "OreOp":
        return cls.from_coeffs([0, 1])

    @classmethod
    def scalar(cls, c) -> "OreOp":
        return cls.from_coeffs([c])

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> FracElement:
        return self.coeffs[-1]

    def __getitem__(self, i: int) -> FracElement:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else OP_FIELD.zero

    def __eq__(self, other) -> bool:
        if not isinstance(other, OreOp) or len(self.coeffs) != len(other.coeffs):
            return False
        return all(a.numer * b.denom == b.numer * a.denom for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self) -> int:
        return hash(self.poly_coeffs())

    def __add__(self, other: "OreOp") -> "OreOp":
        n = max(len(self.coeffs), len(other.coeffs))
        return OreOp.from_coeffs([self[i] + other[i] for i in range(n)])

    def __neg__(self) -> "OreOp":
        return OreOp(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "OreOp") -> "OreOp":
        return self + (-other)

    def __mul__(self, other: "OreOp") -> "OreOp":
        return mul(self, other)

    def left_scale(self, c) -> "OreOp":
        c = to_field(c)
        return OreOp.from_coeffs([c * a for a in self.coeffs])

    def is_polynomial(self) -> bool:
        return all(_is_poly(c) for c in self.coeffs)

    def cleared(self) -> Tuple[PolyElement, ...]:
        """Coefficients times the lcm of their denominators (no content removal)."""
        if self.is_polynomial():
            return tuple(_as_poly(c) for c in self.coeffs)
        den = OP_RING.one
        for c in self.coeffs:
            den = den.lcm(c.denom)
        return tuple(c.numer * den.exquo(c.denom) for c in self.coeffs)

    def normalized(self) -> "OreOp":
        """Canonical left-unit multiple with primitive polynomial coefficients."""
        if self.is_zero:
            return self
        polys = list(self.cleared())
        g = OP_RING.zero
        for p in polys:
            if p:
                g = p if not g else g.gcd(p)
                if g.is_ground:
                    break
        if not g.is_ground:
            polys = [p.exquo(g) for p in polys]
        content = QQ.zero
        for p in polys:
            for c in p.itercoeffs():
                content = QQ.gcd(content, c)
        polys = [p.quo_ground(content) for p in polys]
        if polys[-1].LC < 0:
            polys = [-p for p in polys]
        return OreOp(tuple(OP_FIELD.field_new(p) for p in polys))

    def poly_coeffs(self) -> Tuple[PolyElement, ...]:
        """Polynomial coefficients of the normalized operator."""
        return tuple(_as_poly(c) for c in self.normalized().coeffs)

    def same_up_to_unit(self, other: "OreOp") -> bool:
        return self.normalized() == other.normalized()

    def t_degree(self) -> int:
        return max((p.degree(T) for p in self.poly_coeffs() if p), default=-1)

    def x_degree(self) -> int:
        return max((p.degree(X) for p in self.poly_coeffs() if p), default=-1)

    def depends_on_x(self) -> bool:
        return self.x_degree() > 0

    def specialize_x(self, value) -> "OreOp":
        """
        Substitute a rational value for x in the normalized operator.

        Raises:
            ZeroDenominatorError: if the leading coefficient vanishes at x = value
        """
        polys = [p.subs(X, QQ.convert(value)) for p in self.poly_coeffs()]
        if not polys[-1]:
            raise ZeroDenominatorError(f"leading coefficient vanishes at x = {value}")
        return OreOp.from_coeffs(polys)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for i in range(self.order, -1, -1):
            c = self.coeffs[i]
            if c:
                parts.append(f"({c})*D^{i}" if i else f"({c})")
        return " + ".join(parts)

    __repr__ = __str__


def mul(L: OreOp, M: OreOp) -> OreOp:
    """
    Product L*M in the Ore algebra (D p = p D + p').

    Polynomial operands stay in polynomial arithmetic.
    """
    if L.is_zero or M.is_zero:
        return OreOp(())
    if L.is_polynomial() and M.is_polynomial():
        a = [_as_poly(c) for c in L.coeffs]
        dib = [_as_poly(c) for c in M.coeffs]
        res = [a[0] * c for c in dib]
        for i in range(1, len(a)):
            dib = _poly_times_d(dib)
            res += [OP_RING.zero] * (len(dib) - len(res))
            if a[i]:
                for j, c in enumerate(dib):
                    res[j] += a[i] * c
        return OreOp.from_coeffs(res)
    dib = list(M.coeffs)
    res = [L.coeffs[0] * c for c in dib]
    for i in range(1, len(L.coeffs)):
        dib = _times_d(dib)
        res += [OP_FIELD.zero] * (len(dib) - len(res))
        if L.coeffs[i]:
            for j, c in enumerate(dib):
                res[j] = res[j] + L.coeffs[i] * c
    return OreOp.from_coeffs(res)


def rdivmod(L: OreOp, M: OreOp) -> Tuple[OreOp, OreOp]:
    """
    Right Euclidean division over QQ(x,t): L = q*M + r, order(r) < order(M).

    Raises:
        ZeroDenominatorError: if M is the zero operator
    """
    if M.is_zero:
        raise ZeroDenominatorError("right division by the zero operator")
    m = M.order
    p = list(L.coeffs)
    if len(p) - 1 < m:
        return OreOp(()), L
    quo = [OP_FIELD.zero] * (len(p) - m)
    shifted = [list(M.coeffs)]
    lc = M.lc
    while len(p) - 1 >= m:
        k = len(p) - 1 - m
        while len(shifted) <= k:
            shifted.append(_times_d(shifted[-1]))
        c = p[-1] / lc
        quo[k] = quo[k] + c
        for j, mc in enumerate(shifted[k]):
            if mc:
                p[j] = p[j] - c * mc
        p.pop()
        while p and not p[-1]:
            p.pop()
    return OreOp.from_coeffs(quo), OreOp.from_coeffs(p)


def rquo(L: OreOp, M: OreOp) -> OreOp:
    return rdivmod(L, M)[0]


def rrem(L: OreOp, M: OreOp) -> OreOp:
    return rdivmod(L, M)[1]


# ===== LCLM =====

def _monic(L: OreOp) -> List[FracElement]:
    lc = L.lc
    return [c / lc for c in L.coeffs[:-1]]


def _reduce_d(vec: List[FracElement], q: List[FracElement]) -> List[FracElement]:
    """D * (sum vec_j D^j) reduced modulo the monic D^n + sum q_j D^j."""
    n = len(q)
    out = [_dt(c) for c in vec]
    top = vec[-1]
    for j in range(n - 1):
        out[j + 1] = out[j + 1] + vec[j]
    if top:
        for j in range(n):
            out[j] = out[j] - top * q[j]
    return out


def _unit_vector(n: int, i: int) -> List[FracElement]:
    return [OP_FIELD.one if j == i else OP_FIELD.zero for j in range(n)]


def _hyperexp_logder(M: OreOp) -> FracElement:
    """lam = u'/u for the order-1 operator M = p1 D + p0."""
    return -M.coeffs[0] / M.coeffs[1]


def _gauge(L: OreOp, lam: FracElement) -> OreOp:
    """sum_i p_i (D - lam)^i: annihilates u*f whenever L(f) = 0 and u' = lam u."""
    power = [OP_FIELD.one]
    res = [L.coeffs[0]]
    for i in range(1, len(L.coeffs)):
        nxt = _times_d(power)
        for j, c in enumerate(power):
            nxt[j] = nxt[j] - lam * c
        power = nxt
        res += [OP_FIELD.zero] * (len(power) - len(res))
        for j, c in enumerate(power):
            res[j] = res[j] + L.coeffs[i] * c
    return OreOp.from_coeffs(res).normalized()


def _lclm_order_one(L: OreOp, lam: FracElement) -> OreOp:
    """lclm of L with D - lam via s = L(u)/u."""
    w = OP_FIELD.one
    s = L.coeffs[0]
    for i in range(1, len(L.coeffs)):
        w = _dt(w) + lam * w
        s = s + L.coeffs[i] * w
    if not s:
        return L.normalized()
    shift = lam + _dt(s) / s
    return mul(OreOp.from_coeffs([-shift, 1]), L).normalized()


def lclm(L: OreOp, M: OreOp) -> OreOp:
    """
    Least common left multiple, normalized.

    Found as the first linear dependency among the pairs
    (D^i rem L, D^i rem M), i = 0, 1, ..., over QQ(x,t).

    Raises:
        OperatorError: if either operand is zero
    """
    if L.is_zero or M.is_zero:
        raise OperatorError("lclm with the zero operator")
    if L.order == 0:
        return M.normalized()
    if M.order == 0:
        return L.normalized()
    if M.order == 1:
        return _lclm_order_one(L, _hyperexp_logder(M))
    if L.order == 1:
        return _lclm_order_one(M, _hyperexp_logder(L))
    n, m = L.order, M.order
    qL, qM = _monic(L), _monic(M)
    remL, remM = [_unit_vector(n, 0)], [_unit_vector(m, 0)]
    for i in range(1, n + m + 1):
        remL.append(_unit_vector(n, i) if i < n else _reduce_d(remL[-1], qL))
        remM.append(_unit_vector(m, i) if i < m else _reduce_d(remM[-1], qM))
        if i < max(n, m):
            continue
        rows = [[remL[k][j] for k in range(i + 1)] for j in range(n)] + \
               [[remM[k][j] for k in range(i + 1)] for j in range(m)]
        basis = nullspace(rows, i + 1, OP_FIELD.zero, OP_FIELD.one)
        if basis:
            logger.debug(f"lclm of orders {n} and {m} has order {i}")
            return OreOp.from_coeffs(basis[0]).normalized()
    raise OperatorError("no lclm found up to the order bound")


# ===== CLOSURE PROPERTIES =====

def sum_annihilator(L: OreOp, M: OreOp) -> OreOp:
    """Annihilator of f + g for L(f) = 0, M(g) = 0."""
    return lclm(L, M)


def integral_annihilator(L: OreOp) -> OreOp:
    """L*D annihilates any antiderivative of a solution of L."""
    return mul(L, OreOp.d()).normalized()


def product_annihilator(L: OreOp, M: OreOp) -> OreOp:
    """
    Annihilator of f*g for L(f) = 0, M(g) = 0 (symmetric product).

    Order at most order(L)*order(M). Derivatives of f*g are expanded on the
    basis f^(i) g^(j), i < order(L), j < order(M), until they become
    linearly dependent.
    """
    if L.is_zero or M.is_zero:
        raise OperatorError("product with the zero operator")
    if L.order == 0 or M.order == 0:
        return OreOp.scalar(1)
    if M.order == 1:
        return _gauge(L, _hyperexp_logder(M))
    if L.order == 1:
        return _gauge(M, _hyperexp_logder(L))
    n, m = L.order, M.order
    qL, qM = _monic(L), _monic(M)
    size = n * m

    def index(i, j):
        return i * m + j

    def derive(vec):
        out = [_dt(c) for c in vec]
        for i in range(n):
            for j in range(m):
                c = vec[index(i, j)]
                if not c:
                    continue
                if i + 1 < n:
                    out[index(i + 1, j)] += c
                else:
                    for a in range(n):
                        out[index(a, j)] -= c * qL[a]
                if j + 1 < m:
                    out[index(i, j + 1)] += c
                else:
                    for b in range(m):
                        out[index(i, b)] -= c * qM[b]
        return out

    vecs = [_unit_vector(size, 0)]
    for k in range(1, size + 1):
        vecs.append(derive(vecs[-1]))
        rows = [[vecs[c][r] for c in range(k + 1)] for r in range(size)]
        basis = nullspace(rows, k + 1, OP_FIELD.zero, OP_FIELD.one)
        if basis:
            return OreOp.from_coeffs(basis[0]).normalized()
    raise OperatorError("symmetric product did not close")


def hyperexponential_annihilator(logder) -> OreOp:
    """D - logder, normalized: annihilates every u with u'/u = logder."""
    return OreOp.from_coeffs([-to_field(logder), 1]).normalized()


def annihilator_of_algebraic(kind: str, value) -> OreOp:
    """
    Order-1 annihilator of a rational function f (kind 'rational': f D - f')
    or of sqrt(g) for rational g (kind 'sqrt': 2g D - g').

    Raises:
        OperatorError: zero input or unknown kind
    """
    v = to_field(value)
    if not v:
        raise OperatorError("annihilator of zero requested")
    if kind == "rational":
        return OreOp.from_coeffs([-_dt(v), v]).normalized()
    if kind == "sqrt":
        return OreOp.from_coeffs([-_dt(v), 2 * v]).normalized()
    raise OperatorError(f"unknown algebraic kind '{kind}'")


def substitute_argument(L: OreOp, q) -> OreOp:
    """
    Annihilator of f(q(t)) given L(f) = 0, via D_z -> (1/q') D_t.

    Args:
        L: operator whose variable t plays the role of z
        q: polynomial in t (coefficients may involve x) with q(0) = 0

    Raises:
        SubstitutionError: q not polynomial, q(0) != 0 or q' = 0
    """
    q = to_field(q)
    if not _is_poly(q):
        raise SubstitutionError("argument must be a polynomial")
    qp = _as_poly(q)
    if qp.subs(T, 0):
        raise SubstitutionError("argument must satisfy q(0) = 0")
    dq = qp.diff(T)
    if not dq:
        raise SubstitutionError("argument has zero derivative")
    inv = OP_FIELD.one / to_field(dq)
    coeffs = [to_field(p.compose(T, qp)) for p in L.poly_coeffs()]
    power = [OP_FIELD.one]
    res = [coeffs[0]]
    for i in range(1, len(coeffs)):
        power = [inv * c for c in _times_d(power)]
        res += [OP_FIELD.zero] * (len(power) - len(res))
        for j, c in enumerate(power):
            res[j] = res[j] + coeffs[i] * c
    return OreOp.from_coeffs(res).normalized()


# ===== ACTION ON SERIES =====

def _split_t(p: PolyElement) -> Dict[int, PolyElement]:
    """p(x,t) as {j: c_j(x)} with p = sum c_j(x) t^j."""
    parts: Dict[int, dict] = {}
    for (ex, et), c in p.terms():
        parts.setdefault(et, {})[(ex,)] = c
    return {j: X_RING.from_dict(d) for j, d in parts.items()}


def x_poly_into(ring, c: PolyElement):
    """Embed a polynomial in x into a series coefficient ring."""
    if isinstance(ring, ScalarRing):
        if not c.is_ground:
            raise TypeError("operator depends on x; specialize it before applying to this series")
        return ring.convert(c.LC if c else 0)
    if isinstance(ring, (FractionCoeffRing, PolyCoeffRing, LaurentRing)):
        return ring.convert(c)
    raise TypeError(f"unsupported coefficient ring {ring}")


def apply(L: OreOp, f: TruncSeries) -> TruncSeries:
    """
    L(f) for a truncated series f known mod t^N; valid mod t^(N - order).

    Operators with non-polynomial coefficients act through cleared(), the
    polynomial left multiple by the lcm of the denominators.

    Raises:
        PrecisionError: if N <= order(L)
    """
    if L.is_zero:
        return TruncSeries.zero(f.ring, f.prec)
    if f.prec <= L.order:
        raise PrecisionError(f"series known mod t^{f.prec} cannot feed an order-{L.order} operator")
    R = f.ring
    prec = f.prec - L.order
    result = TruncSeries.zero(R, prec)
    d = f
    for i, p in enumerate(L.cleared()):
        if i:
            d = series_derive(d)
        if not p:
            continue
        for j, c in _split_t(p).items():
            result = result + d.scale(x_poly_into(R, c)).shift(j)
    return result.truncate(prec)


def falling(n, i: int):
    """Falling factorial n (n-1) ... (n-i+1) for a number or polynomial n."""
    out = 1
    for k in range(i):
        out = out * (n - k)
    return out


@dataclass(frozen=True)
class RecOp:
    """
    Coefficient recurrence of an operator: [t^n] L(f) = sum_k R_k(n) f_(n+k).

    terms maps the shift k to R_k in QQ[x,n].
    """
    terms: Tuple[Tuple[int, PolyElement], ...]

    @property
    def shifts(self) -> Tuple[int, ...]:
        return tuple(k for k, _ in self.terms)

    @property
    def leading_shift(self) -> int:
        return max(self.shifts)

    @property
    def trailing_shift(self) -> int:
        return min(self.shifts)

    def coefficient(self, k: int) -> PolyElement:
        for s, c in self.terms:
            if s == k:
                return c
        return REC_RING.zero

    def evaluate(self, k: int, n) -> PolyElement:
        """R_k(n) as a polynomial in x."""
        return self.coefficient(k).evaluate(N, n)

    def apply(self, seq: Sequence, n: int):
        """
        [t^n] L(f) for an x-free operator from the coefficients seq[m] = [t^m] f.

        Indices below 0 read as 0.

        Raises:
            OperatorError: if a coefficient R_k(n) depends on x
        """
        total = QQ.zero
        for k, c in self.terms:
            if n + k >= 0:
                value = c.evaluate(N, n)
                if not value:
                    continue
                if not value.is_ground:
                    raise OperatorError(f"R_{k}({n}) = {value} depends on x; specialize x first")
                total += value.LC * seq[n + k]
        return total

    def __str__(self) -> str:
        return " + ".join(f"({c})*f(n{k:+d})" for k, c in self.terms)


def to_recurrence(L: OreOp) -> RecOp:
    """
    Coefficient recurrence of the normalized operator:
    [t^n] t^j D^i f = ff(n - j + i, i) f_(n-j+i).
    """
    acc: Dict[int, PolyElement] = {}
    for i, p in enumerate(L.poly_coeffs()):
        for (ex, et), c in p.terms():
            k = i - et
            term = REC_RING({(ex, 0): c}) * falling(N + k, i)
            acc[k] = acc.get(k, REC_RING.zero) + term
    return RecOp(tuple(sorted((k, c) for k, c in acc.items() if c)))
