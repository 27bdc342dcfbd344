"""
Exact arithmetic substrate.

This module provides the exact rings every other module computes in:
1. Rat: arbitrary-precision rationals (sympy's QQ dtype, gmpy2-backed when available)
2. MPoly: sparse multivariate polynomials over QQ in graded lexicographic order
3. RatFunc: univariate rational functions with monic denominators, nestable
   (QQ(x), then QQ(x)(t))
4. LaurentPoly: multivariate polynomials in which designated variables may
   carry negative exponents
5. Coefficient-ring adapters giving TruncSeries one uniform view of QQ, GF(p),
   polynomial rings and Laurent rings

Design decisions:
- Polynomial arithmetic and gcds are delegated to sympy's sparse PolyRing;
  gcds over a fraction-field domain go through sympy's PRS code.
- A LaurentPoly is a pair (polynomial, shift). In normal form the smallest
  exponent of every Laurent variable in the polynomial is 0, so equality is
  plain structural equality.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Iterator, Optional, Sequence, Tuple

from sympy import Symbol
from sympy.polys.domains import GF, QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing, ring as sympy_ring

from kreweras.errors import NonUnitError, ZeroDenominatorError

logger = logging.getLogger(__name__)

# Variables a toolkit polynomial may use, in their canonical order
VARIABLES = ("a", "b", "c", "x", "y", "t", "u", "z")

Exponents = Tuple[int, ...]


# ===== RATIONALS =====

def rat(numerator, denominator=1):
    """
    Build a normalized rational number.

    Raises:
        ZeroDenominatorError: if denominator is 0
    """
    if denominator == 0:
        raise ZeroDenominatorError(f"rational {numerator}/0")
    return QQ.convert(numerator) / QQ.convert(denominator)


def rat_to_text(value) -> str:
    """Serialize a rational as 'numerator/denominator' (denominator always printed)."""
    value = QQ.convert(value)
    return f"{QQ.numer(value)}/{QQ.denom(value)}"


def rat_from_text(text: str):
    num, _, den = text.strip().partition("/")
    return rat(int(num), int(den) if den else 1)


# ===== MULTIVARIATE POLYNOMIALS =====

@lru_cache(maxsize=None)
def make_ring(names: Tuple[str, ...], domain=QQ) -> PolyRing:
    """
    Polynomial ring over `domain` in the given variables (graded lex order).

    Args:
        names: variable names, each one of VARIABLES
        domain: ground domain (QQ, GF(p) or a fraction field domain)

    Raises:
        ValueError: on an unknown or repeated variable
    """
    if len(set(names)) != len(names) or any(n not in VARIABLES for n in names):
        raise ValueError(f"bad variable set {names}")
    R, *_ = sympy_ring(",".join(names), domain, grlex)
    return R


def ring_names(R: PolyRing) -> Tuple[str, ...]:
    return tuple(str(s) for s in R.symbols)


def common_ring(p: PolyElement, q: PolyElement) -> PolyRing:
    """The ring of whichever operand's variables contain the other's."""
    if p.ring == q.ring:
        return p.ring
    ps, qs = set(p.ring.symbols), set(q.ring.symbols)
    if ps <= qs:
        return q.ring
    if qs <= ps:
        return p.ring
    names = tuple(n for n in VARIABLES if Symbol(n) in ps | qs)
    return make_ring(names, p.ring.domain)


def poly_arith(p: PolyElement, q: PolyElement, op: str) -> PolyElement:
    """
    Exact add/sub/mul of two polynomials, embedding into a common ring.

    Args:
        p, q: polynomials
        op: one of 'add', 'sub', 'mul'
    """
    R = common_ring(p, q)
    p, q = p.set_ring(R), q.set_ring(R)
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown polynomial operation '{op}'")


# ===== RATIONAL FUNCTIONS =====

def ratfunc_ring(var: str = "x", base: Optional[str] = None) -> PolyRing:
    """
    Univariate polynomial ring in `var` over QQ, or over QQ(base) when nested.

    ratfunc_ring("t", base="x") realizes the QQ(x)(t) level of the tower.
    """
    domain = QQ if base is None else QQ.frac_field(Symbol(base))
    R, _ = sympy_ring(var, domain, grlex)
    return R


@dataclass(frozen=True)
class RatFunc:
    """
    Univariate rational function num/den over a field F.

    Invariants: gcd(num, den) = 1 over F; den monic. Instances are built by
    ratfunc_normalize and are therefore canonical: equality is structural.
    """
    num: PolyElement
    den: PolyElement

    @property
    def ring(self) -> PolyRing:
        return self.num.ring

    @property
    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self) -> bool:
        return bool(self.num)

    @classmethod
    def from_poly(cls, p: PolyElement) -> "RatFunc":
        return cls(p, p.ring.one)

    def _lift(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, PolyElement):
            return RatFunc.from_poly(other.set_ring(self.ring))
        return RatFunc.from_poly(self.ring(other))

    def __add__(self, other) -> "RatFunc":
        o = self._lift(other)
        return ratfunc_normalize(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __sub__(self, other) -> "RatFunc":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "RatFunc":
        return self._lift(other) - self

    def __mul__(self, other) -> "RatFunc":
        o = self._lift(other)
        return ratfunc_normalize(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFunc":
        o = self._lift(other)
        return ratfunc_normalize(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other) -> "RatFunc":
        return self._lift(other) / self

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            return ratfunc_normalize(self.den ** (-n), self.num ** (-n))
        return RatFunc(self.num ** n, self.den ** n)

    def derivative(self) -> "RatFunc":
        x = self.ring.gens[0]
        return ratfunc_normalize(self.num.diff(x) * self.den - self.num * self.den.diff(x), self.den ** 2)

    def evaluate(self, value):
        """Value at a ground-domain point; raises ZeroDenominatorError at a pole."""
        x = self.ring.gens[0]
        d = self.den.evaluate(x, value)
        if not d:
            raise ZeroDenominatorError(f"pole of {self} at {value}")
        return self.num.evaluate(x, value) / d

    def __str__(self) -> str:
        if self.den == 1:
            return str(self.num)
        return f"({self.num})/({self.den})"


def ratfunc_normalize(n: PolyElement, d: PolyElement) -> RatFunc:
    """
    Reduce n/d to lowest terms with a monic denominator.

    Raises:
        ZeroDenominatorError: if d is zero
    """
    if not d:
        raise ZeroDenominatorError("rational function with zero denominator")
    R = d.ring
    n = n.set_ring(R) if isinstance(n, PolyElement) else R(n)
    if not n:
        return RatFunc(R.zero, R.one)
    _, n, d = n.cofactors(d)
    lc = d.LC
    return RatFunc(n.quo_ground(lc), d.monic())


# ===== LAURENT POLYNOMIALS =====

class LaurentRing:
    """
    Ring of polynomials in `names` where the `laurent` subset may carry
    negative exponents.

    Also serves as a TruncSeries coefficient ring (zero, one, convert,
    inverse, sqrt, terms, from_terms).
    """

    def __init__(self, names: Sequence[str], laurent: Optional[Sequence[str]] = None, domain=QQ):
        self.names = tuple(names)
        self.laurent = tuple(self.names if laurent is None else laurent)
        self.domain = domain
        self.poly_ring = make_ring(self.names, domain)
        self._mask = tuple(n in self.laurent for n in self.names)
        self.ngens = len(self.names)
        self.zero = LaurentPoly(self, self.poly_ring.zero, (0,) * self.ngens)
        self.one = LaurentPoly(self, self.poly_ring.one, (0,) * self.ngens)

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentRing) and (self.names, self.laurent, self.domain) == \
            (other.names, other.laurent, other.domain)

    def __hash__(self) -> int:
        return hash(("LaurentRing", self.names, self.laurent, self.domain))

    def __repr__(self) -> str:
        return f"LaurentRing({self.names}, laurent={self.laurent})"

    def gen(self, name: str) -> "LaurentPoly":
        return self.monomial(tuple(int(n == name) for n in self.names))

    def monomial(self, exps: Exponents, coeff=1) -> "LaurentPoly":
        return self.from_terms([(tuple(exps), coeff)])

    def convert(self, value) -> "LaurentPoly":
        if isinstance(value, LaurentPoly):
            return value
        if isinstance(value, PolyElement):
            return self.from_poly(value)
        return self.from_terms([((0,) * self.ngens, value)])

    def from_poly(self, p: PolyElement) -> "LaurentPoly":
        return self.from_terms(self._embed_terms(p))

    def _embed_terms(self, p: PolyElement) -> Iterator[Tuple[Exponents, object]]:
        names = ring_names(p.ring)
        index = [self.names.index(n) for n in names]
        for monom, coeff in p.terms():
            exps = [0] * self.ngens
            for i, e in zip(index, monom):
                exps[i] = e
            yield tuple(exps), coeff

    def from_terms(self, items: Iterable[Tuple[Exponents, object]]) -> "LaurentPoly":
        items = [(tuple(e), self.domain.convert(c)) for e, c in items]
        items = [(e, c) for e, c in items if c]
        if not items:
            return self.zero
        shift = tuple(min(e[i] for e, _ in items) if self._mask[i] else 0 for i in range(self.ngens))
        if any(e[i] < 0 for e, _ in items for i in range(self.ngens) if not self._mask[i]):
            raise ValueError("negative exponent on a polynomial variable")
        poly = self.poly_ring.zero
        for e, c in items:
            m = tuple(a - s for a, s in zip(e, shift))
            poly[m] = poly.get(m, self.domain.zero) + c
            if not poly[m]:
                del poly[m]
        return _laurent_normalize(self, poly, shift)

    # coefficient-ring protocol

    def is_zero(self, a: "LaurentPoly") -> bool:
        return not a.poly

    def inverse(self, a: "LaurentPoly") -> "LaurentPoly":
        """Inverse of a unit; the units are monomials with nonzero coefficient."""
        terms = list(a.terms())
        if len(terms) != 1 or any(e and not m for e, m in zip(terms[0][0], self._mask)):
            raise NonUnitError(f"{a} is not a unit")
        e, c = terms[0]
        return self.monomial(tuple(-k for k in e), self.domain.one / c)

    def sqrt(self, a: "LaurentPoly") -> "LaurentPoly":
        terms = list(a.terms())
        if len(terms) != 1 or any(k % 2 for k in terms[0][0]) or not self.domain.is_square(terms[0][1]):
            raise NonUnitError(f"{a} is not a square unit")
        e, c = terms[0]
        return self.monomial(tuple(k // 2 for k in e), self.domain.exsqrt(c))

    def terms(self, a: "LaurentPoly") -> Iterator[Tuple[Exponents, object]]:
        return a.terms()


def _laurent_normalize(R: LaurentRing, poly: PolyElement, shift: Exponents) -> "LaurentPoly":
    if not poly:
        return R.zero
    low = [0] * R.ngens
    for i, is_laurent in enumerate(R._mask):
        if is_laurent:
            low[i] = min(m[i] for m in poly.itermonoms())
    if any(low):
        poly = R.poly_ring.from_dict({tuple(a - b for a, b in zip(m, low)): c for m, c in poly.items()})
        shift = tuple(s + l for s, l in zip(shift, low))
    return LaurentPoly(R, poly, shift)


class LaurentPoly:
    """Element of a LaurentRing: poly * prod(var ** shift), normalized."""

    __slots__ = ("ring", "poly", "shift")

    def __init__(self, ring: LaurentRing, poly: PolyElement, shift: Exponents):
        self.ring = ring
        self.poly = poly
        self.shift = shift

    def terms(self) -> Iterator[Tuple[Exponents, object]]:
        for monom, coeff in self.poly.terms():
            yield tuple(m + s for m, s in zip(monom, self.shift)), coeff

    def as_dict(self) -> Dict[Exponents, object]:
        return dict(self.terms())

    @property
    def is_zero(self) -> bool:
        return not self.poly

    def __bool__(self) -> bool:
        return bool(self.poly)

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other.ring != self.ring:
                raise TypeError(f"mixing {self.ring} and {other.ring}")
            return other
        return self.ring.convert(other)

    def _aligned(self, other: "LaurentPoly"):
        base = tuple(min(a, b) for a, b in zip(self.shift, other.shift))
        p = self.poly.mul_monom(tuple(a - b for a, b in zip(self.shift, base)))
        q = other.poly.mul_monom(tuple(a - b for a, b in zip(other.shift, base)))
        return p, q, base

    def __add__(self, other) -> "LaurentPoly":
        other = self._coerce(other)
        if not other.poly:
            return self
        if not self.poly:
            return other
        p, q, base = self._aligned(other)
        return _laurent_normalize(self.ring, p + q, base)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.ring, -self.poly, self.shift)

    def __sub__(self, other) -> "LaurentPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "LaurentPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "LaurentPoly":
        if not isinstance(other, (LaurentPoly, PolyElement)):
            c = self.ring.domain.convert(other)
            if not c:
                return self.ring.zero
            return LaurentPoly(self.ring, self.poly.mul_ground(c), self.shift)
        other = self._coerce(other)
        if not self.poly or not other.poly:
            return self.ring.zero
        # lowest exponents multiply to a nonzero term, so the product stays normalized
        shift = tuple(a + b for a, b in zip(self.shift, other.shift))
        return LaurentPoly(self.ring, self.poly * other.poly, shift)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            return self.ring.inverse(self) ** (-n)
        result = self.ring.one
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            try:
                other = self.ring.convert(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.ring == other.ring and self.shift == other.shift and self.poly == other.poly

    def __hash__(self) -> int:
        return hash((self.ring, self.shift, frozenset(self.poly.items())))

    def select(self, keep) -> "LaurentPoly":
        """Sub-sum of the terms whose exponent vector satisfies `keep`."""
        return self.ring.from_terms((e, c) for e, c in self.terms() if keep(e))

    def degree_range(self, name: str) -> Tuple[int, int]:
        i = self.ring.names.index(name)
        exps = [e[i] for e, _ in self.terms()]
        return (min(exps), max(exps)) if exps else (0, -1)

    def to_poly(self, R: Optional[PolyRing] = None) -> PolyElement:
        """Convert to an ordinary polynomial; raises ValueError on a negative exponent."""
        if any(s < 0 for s in self.shift):
            raise ValueError(f"{self} has negative exponents")
        p = self.poly.mul_monom(self.shift) if any(self.shift) else self.poly
        return p if R is None else p.set_ring(R)

    def __repr__(self) -> str:
        if not self.poly:
            return "0"
        parts = []
        for e, c in sorted(self.terms(), reverse=True):
            mono = "*".join(f"{n}^{k}" if k != 1 else n for n, k in zip(self.ring.names, e) if k)
            parts.append(f"({c})*{mono}" if mono else f"({c})")
        return " + ".join(parts)


# ===== COEFFICIENT RINGS FOR SERIES =====

class ScalarRing:
    """QQ or GF(p) seen as a coefficient ring with no variables."""

    names: Tuple[str, ...] = ()
    laurent: Tuple[str, ...] = ()

    def __init__(self, domain=QQ):
        self.domain = domain
        self.zero = domain.zero
        self.one = domain.one

    @classmethod
    def rationals(cls) -> "ScalarRing":
        return cls(QQ)

    @classmethod
    def prime_field(cls, p: int) -> "ScalarRing":
        return cls(GF(p))

    @property
    def characteristic(self) -> int:
        return self.domain.characteristic()

    def __eq__(self, other) -> bool:
        return isinstance(other, ScalarRing) and self.domain == other.domain

    def __hash__(self) -> int:
        return hash(("ScalarRing", self.domain))

    def __repr__(self) -> str:
        return f"ScalarRing({self.domain})"

    def convert(self, value):
        if self.domain.is_FiniteField and not isinstance(value, (int, self.domain.dtype)):
            value = QQ.convert(value)
            return self.domain(int(QQ.numer(value))) / self.domain(int(QQ.denom(value)))
        return self.domain.convert(value)

    def is_zero(self, a) -> bool:
        return not a

    def inverse(self, a):
        if not a:
            raise NonUnitError("zero is not a unit")
        return self.one / a

    def sqrt(self, a):
        if not self.domain.is_square(a):
            raise NonUnitError(f"{a} is not a square in {self.domain}")
        return self.domain.exsqrt(a)

    def terms(self, a):
        if a:
            yield (), a

    def from_terms(self, items):
        total = self.zero
        for _, c in items:
            total += self.convert(c)
        return total

    def to_int(self, a) -> int:
        """Canonical representative in [0, p) of a prime-field element."""
        return int(self.domain.to_int(a)) % self.characteristic


class PolyCoeffRing:
    """A sympy PolyRing (polynomial coefficients, e.g. QQ[x] or QQ[a,b,c])."""

    laurent: Tuple[str, ...] = ()

    def __init__(self, R: PolyRing):
        self.poly_ring = R
        self.names = ring_names(R)
        self.domain = R.domain
        self.zero = R.zero
        self.one = R.one

    @classmethod
    def over(cls, *names: str) -> "PolyCoeffRing":
        return cls(make_ring(tuple(names)))

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyCoeffRing) and self.poly_ring == other.poly_ring

    def __hash__(self) -> int:
        return hash(("PolyCoeffRing", self.poly_ring))

    def __repr__(self) -> str:
        return f"PolyCoeffRing({','.join(self.names)})"

    def gen(self, name: str) -> PolyElement:
        return self.poly_ring.gens[self.names.index(name)]

    def convert(self, value) -> PolyElement:
        if isinstance(value, PolyElement):
            return value.set_ring(self.poly_ring)
        return self.poly_ring(value)

    def is_zero(self, a) -> bool:
        return not a

    def inverse(self, a):
        if not a.is_ground or not a:
            raise NonUnitError(f"{a} is not a unit")
        return self.poly_ring(self.domain.one / a.LC)

    def sqrt(self, a):
        if a.is_ground:
            return self.poly_ring(ScalarRing(self.domain).sqrt(a.LC))
        content, factors = a.sqf_list()
        if any(k % 2 for _, k in factors) or not self.domain.is_square(content):
            raise NonUnitError(f"{a} is not a perfect square")
        root = self.poly_ring(self.domain.exsqrt(content))
        for f, k in factors:
            root *= f ** (k // 2)
        return root

    def terms(self, a):
        return a.terms()

    def from_terms(self, items):
        return self.poly_ring.from_dict({tuple(e): self.domain.convert(c) for e, c in items if c})


class FractionCoeffRing:
    """QQ(x) as a coefficient ring, elements are RatFunc."""

    laurent: Tuple[str, ...] = ()

    def __init__(self, var: str = "x"):
        self.poly_ring = ratfunc_ring(var)
        self.names = (var,)
        self.domain = QQ
        self.zero = RatFunc(self.poly_ring.zero, self.poly_ring.one)
        self.one = RatFunc(self.poly_ring.one, self.poly_ring.one)

    def __eq__(self, other) -> bool:
        return isinstance(other, FractionCoeffRing) and self.poly_ring == other.poly_ring

    def __hash__(self) -> int:
        return hash(("FractionCoeffRing", self.poly_ring))

    def __repr__(self) -> str:
        return f"FractionCoeffRing({self.names[0]})"

    def convert(self, value) -> RatFunc:
        if isinstance(value, RatFunc):
            return value
        if isinstance(value, PolyElement):
            return RatFunc.from_poly(value.set_ring(self.poly_ring))
        return RatFunc.from_poly(self.poly_ring(QQ.convert(value)))

    def is_zero(self, a: RatFunc) -> bool:
        return a.is_zero

    def inverse(self, a: RatFunc) -> RatFunc:
        if a.is_zero:
            raise NonUnitError("zero is not a unit")
        return self.one / a

    def sqrt(self, a: RatFunc) -> RatFunc:
        inner = PolyCoeffRing(self.poly_ring)
        return ratfunc_normalize(inner.sqrt(a.num), inner.sqrt(a.den))

    def terms(self, a: RatFunc):
        if not a.den.is_ground:
            raise NonUnitError(f"{a} is not a polynomial")
        return (a.num.quo_ground(a.den.LC)).terms()

    def from_terms(self, items) -> RatFunc:
        return RatFunc.from_poly(self.poly_ring.from_dict({tuple(e): QQ.convert(c) for e, c in items if c}))
