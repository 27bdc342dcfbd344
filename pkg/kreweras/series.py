"""
Truncated formal (Laurent) series in t.

A TruncSeries knows the coefficients c_v, ..., c_{N-1} of
    f = sum_{n >= v} c_n t^n + O(t^N)
over an exact coefficient ring (ScalarRing, PolyCoeffRing or LaurentRing).

Precision contract (every operation computes its output order, nothing is
assumed):
- add/sub:        min(N_f, N_g)
- mul:            min(N_f + v_g, N_g + v_f)
- inverse:        N - 2v  (valuation -v)
- sqrt:           N - v/2 (valuation v/2, v even)
- derive:         N - 1
- integrate:      N + 1   (constant term 0, t^-1 rejected)
- substitute t -> q(t), q polynomial with valuation m >= 1:  (N - v) * m + v * m
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Mapping, Sequence, Tuple

from kreweras.errors import IntegrationError, NonUnitError, PrecisionError, SubstitutionError
from kreweras.rings import PolyCoeffRing

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TruncSeries:
    """
    Truncated series sum_{n=v}^{N-1} coeffs[n-v] t^n + O(t^N).

    Stored in canonical form: coeffs[0] is nonzero unless the series is
    O(t^N), in which case valuation == prec and coeffs is empty.
    """
    ring: object
    valuation: int
    coeffs: Tuple
    prec: int

    @classmethod
    def make(cls, ring, valuation: int, coeffs: Iterable, prec: int) -> "TruncSeries":
        coeffs = list(coeffs)[: max(prec - valuation, 0)]
        while coeffs and ring.is_zero(coeffs[0]):
            coeffs.pop(0)
            valuation += 1
        if not coeffs:
            return cls(ring, prec, (), prec)
        while ring.is_zero(coeffs[-1]):
            coeffs.pop()
        tail = prec - valuation - len(coeffs)
        return cls(ring, valuation, tuple(coeffs) + (ring.zero,) * tail, prec)

    @classmethod
    def from_dict(cls, ring, terms: Mapping[int, object], prec: int) -> "TruncSeries":
        """Series from {exponent: coefficient}; exponents >= prec are dropped."""
        terms = {k: ring.convert(c) for k, c in terms.items() if k < prec}
        if not terms:
            return cls(ring, prec, (), prec)
        v = min(terms)
        return cls.make(ring, v, [terms.get(n, ring.zero) for n in range(v, prec)], prec)

    @classmethod
    def from_list(cls, ring, coeffs: Sequence, prec: int = None) -> "TruncSeries":
        """Power series c_0 + c_1 t + ...; prec defaults to len(coeffs)."""
        prec = len(coeffs) if prec is None else prec
        return cls.make(ring, 0, [ring.convert(c) for c in coeffs], prec)

    @classmethod
    def zero(cls, ring, prec: int) -> "TruncSeries":
        return cls(ring, prec, (), prec)

    @classmethod
    def one(cls, ring, prec: int) -> "TruncSeries":
        return cls.from_dict(ring, {0: ring.one}, prec)

    # ===== ACCESS =====

    def __getitem__(self, n: int):
        if n >= self.prec:
            raise PrecisionError(f"coefficient of t^{n} requested, series known mod t^{self.prec}")
        if n < self.valuation:
            return self.ring.zero
        return self.coeffs[n - self.valuation]

    def coefficients(self, start: int = 0, stop: int = None) -> List:
        stop = self.prec if stop is None else stop
        return [self[n] for n in range(start, stop)]

    def items(self) -> Iterable[Tuple[int, object]]:
        for k, c in enumerate(self.coeffs):
            if not self.ring.is_zero(c):
                yield self.valuation + k, c

    @property
    def is_zero(self) -> bool:
        """True when every known coefficient is zero."""
        return not self.coeffs

    def truncate(self, prec: int) -> "TruncSeries":
        if prec >= self.prec:
            return self
        return TruncSeries.make(self.ring, self.valuation, self.coeffs, prec)

    def map(self, fn: Callable, ring) -> "TruncSeries":
        """Apply a ring morphism coefficientwise."""
        return TruncSeries.make(ring, self.valuation, [fn(c) for c in self.coeffs], self.prec)

    # ===== ARITHMETIC =====

    def _check(self, other: "TruncSeries"):
        if self.ring != other.ring:
            raise TypeError(f"series over {self.ring} and {other.ring}")

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        prec = min(self.prec, other.prec)
        v = min(self.valuation, other.valuation)
        return TruncSeries.make(self.ring, v, [self[n] + other[n] for n in range(v, prec)], prec)

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(self.ring, self.valuation, tuple(-c for c in self.coeffs), self.prec)

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return self + (-other)

    def __mul__(self, other) -> "TruncSeries":
        if not isinstance(other, TruncSeries):
            return self.scale(other)
        return series_mul(self, other)

    def __rmul__(self, other) -> "TruncSeries":
        return self.scale(other)

    def scale(self, c) -> "TruncSeries":
        c = self.ring.convert(c)
        return TruncSeries.make(self.ring, self.valuation, [c * a for a in self.coeffs], self.prec)

    def shift(self, k: int) -> "TruncSeries":
        """Multiply by t^k (precision moves with it)."""
        return TruncSeries(self.ring, self.valuation + k, self.coeffs, self.prec + k)

    def __pow__(self, n: int) -> "TruncSeries":
        if n < 0:
            return series_inverse(self) ** (-n)
        result = TruncSeries.one(self.ring, self.prec - self.valuation)
        for _ in range(n):
            result = series_mul(result, self)
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, TruncSeries) and (self.ring, self.valuation, self.prec) == \
            (other.ring, other.valuation, other.prec) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.valuation, self.prec, len(self.coeffs)))

    def __repr__(self) -> str:
        terms = [f"({c})*t^{n}" for n, c in self.items()][:6]
        return " + ".join(terms + [f"O(t^{self.prec})"])


# ===== OPERATIONS =====

def series_mul(f: TruncSeries, g: TruncSeries) -> TruncSeries:
    """
    Cauchy product.

    Output order is min(N_f + v_g, N_g + v_f); valuations add.
    """
    f._check(g)
    R = f.ring
    if f.is_zero or g.is_zero:
        prec = min(f.prec + g.valuation, g.prec + f.valuation)
        return TruncSeries.zero(R, prec)
    v = f.valuation + g.valuation
    prec = min(f.prec + g.valuation, g.prec + f.valuation)
    length = prec - v
    a, b = f.coeffs, g.coeffs
    out = []
    for n in range(length):
        total = R.zero
        for i in range(max(0, n - len(b) + 1), min(n, len(a) - 1) + 1):
            ai = a[i]
            if not R.is_zero(ai):
                bj = b[n - i]
                if not R.is_zero(bj):
                    total = total + ai * bj
        out.append(total)
    return TruncSeries.make(R, v, out, prec)


def series_inverse(f: TruncSeries) -> TruncSeries:
    """
    Multiplicative inverse, 1/f mod t^(N - 2v).

    Raises:
        NonUnitError: if the lowest coefficient is not a unit of the ring
    """
    if f.is_zero:
        raise NonUnitError(f"inverse of O(t^{f.prec})")
    R = f.ring
    inv0 = R.inverse(f.coeffs[0])
    a = f.coeffs
    length = f.prec - f.valuation
    out = [inv0]
    for n in range(1, length):
        total = R.zero
        for k in range(1, min(n, len(a) - 1) + 1):
            if not R.is_zero(a[k]):
                total = total + a[k] * out[n - k]
        out.append(-(total * inv0))
    return TruncSeries.make(R, -f.valuation, out, length - f.valuation)


def series_sqrt(f: TruncSeries) -> TruncSeries:
    """
    Square root with constant-term branch fixed by the ring's exact sqrt
    (+1 for constant term 1).

    Raises:
        NonUnitError: odd valuation, non-square lowest coefficient, or 2*s_0
            not invertible
    """
    if f.is_zero or f.valuation % 2:
        raise NonUnitError("series square root needs an even valuation and nonzero leading term")
    R = f.ring
    s0 = R.sqrt(f.coeffs[0])
    inv = R.inverse(s0 + s0)
    a = f.coeffs
    length = f.prec - f.valuation
    s = [s0]
    for n in range(1, length):
        total = a[n] if n < len(a) else R.zero
        for k in range(1, n):
            total = total - s[k] * s[n - k]
        s.append(total * inv)
    v = f.valuation // 2
    return TruncSeries.make(R, v, s, v + length)


def series_derive(f: TruncSeries) -> TruncSeries:
    """d/dt; the order drops by one."""
    R = f.ring
    terms = {n - 1: c * R.convert(n) for n, c in f.items() if n != 0}
    return TruncSeries.from_dict(R, terms, f.prec - 1)


def series_integrate(f: TruncSeries) -> TruncSeries:
    """
    Definite integral from 0; the constant term is 0.

    Raises:
        IntegrationError: if f has a nonzero t^-1 coefficient
    """
    R = f.ring
    terms = {}
    for n, c in f.items():
        if n == -1:
            raise IntegrationError("cannot integrate a t^-1 term")
        terms[n + 1] = c * R.inverse(R.convert(n + 1))
    return TruncSeries.from_dict(R, terms, f.prec + 1)


def series_substitute_poly(f: TruncSeries, q: Mapping[int, object]) -> TruncSeries:
    """
    Compose f(q(t)) for a polynomial q given as {exponent: coefficient}.

    f must be a power series (valuation >= 0). If q = c t^m + ..., c != 0,
    the result is known mod t^(N m).

    Raises:
        SubstitutionError: if q(0) != 0 or q is zero
    """
    R = f.ring
    q = {k: R.convert(c) for k, c in q.items() if not R.is_zero(R.convert(c))}
    if not q:
        raise SubstitutionError("substitution by the zero polynomial")
    if 0 in q or min(q) < 0:
        raise SubstitutionError("substituted polynomial must satisfy q(0) = 0")
    if f.valuation < 0:
        raise SubstitutionError("argument substitution needs a power series")
    m = min(q)
    prec = f.prec * m
    qs = TruncSeries.from_dict(R, q, prec)
    result = TruncSeries.zero(R, prec)
    power = TruncSeries.one(R, prec)
    for n in range(f.prec):
        if n * m >= prec:
            break
        c = f[n]
        if not R.is_zero(c):
            result = result + power.scale(c)
        power = series_mul(power, qs).truncate(prec)
    return result


def substitute_coefficient_variable(f: TruncSeries, var: str, q: Mapping[int, object], ring) -> TruncSeries:
    """
    Replace the coefficient variable `var` by a polynomial q(t).

    Each coefficient of f must be a polynomial in `var` (PolyCoeffRing).
    `ring` is the coefficient ring of the result (the variables left over).
    The result keeps f's order: c_n(q(t)) t^n only reaches degrees >= n.
    """
    if not isinstance(f.ring, PolyCoeffRing) or var not in f.ring.names:
        raise SubstitutionError(f"coefficients are not polynomials in {var}")
    if f.valuation < 0:
        raise SubstitutionError("coefficient substitution needs a power series")
    idx = f.ring.names.index(var)
    rest = [i for i in range(len(f.ring.names)) if i != idx]
    qs = TruncSeries.from_dict(ring, q, f.prec)
    powers: Dict[int, TruncSeries] = {0: TruncSeries.one(ring, f.prec)}
    acc: Dict[int, object] = {}
    for n, c in f.items():
        for monom, coeff in c.terms():
            k = monom[idx]
            while k not in powers:
                j = max(powers)
                powers[j + 1] = series_mul(powers[j], qs)
            rest_monom = tuple(monom[i] for i in rest)
            scalar = ring.from_terms([(rest_monom, coeff)])
            for e, pc in powers[k].items():
                if n + e < f.prec:
                    acc[n + e] = acc.get(n + e, ring.zero) + pc * scalar
    return TruncSeries.from_dict(ring, acc, f.prec)
