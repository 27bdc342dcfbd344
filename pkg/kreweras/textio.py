"""
Plain-text artifacts: series, polynomials and operators.

Every artifact starts with a '# kreweras-<kind> 1' line and may carry further
'#' lines (the producing command). Those lines are ignored by the parsers and
by artifact_hash, so replaying a command reproduces the hash even when the
command line differs cosmetically.

Series:
    # kreweras-series 1
    ring: QQ | GF(p)
    vars: t <coefficient variables>
    laurent: <coefficient variables allowed negative exponents>
    valuation: v
    order: N
    <e_t> <e_1> ... : numerator/denominator

Operators:
    # kreweras-ore 1
    vars: t x
    order: k
    i : <polynomial in t and x>
"""

import hashlib
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from sympy import Symbol, sympify
from sympy.core.sympify import SympifyError
from sympy.polys.domains import GF, QQ
from sympy.polys.polyerrors import CoercionFailed
from sympy.polys.rings import PolyElement, PolyRing

from kreweras.errors import FormatError
from kreweras.ore import OP_RING, OreOp
from kreweras.rings import LaurentRing, PolyCoeffRing, ScalarRing, make_ring, rat_from_text, rat_to_text, ring_names
from kreweras.series import TruncSeries

logger = logging.getLogger(__name__)

SERIES_HEADER = "# kreweras-series 1"
POLY_HEADER = "# kreweras-poly 1"
ORE_HEADER = "# kreweras-ore 1"


# ===== HELPERS =====

def artifact_hash(text: str) -> str:
    """sha256 of the artifact with '#' lines removed."""
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return hashlib.sha256(body.encode("utf-8")).hexdigest()


def write_artifact(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.debug(f"wrote {path} ({artifact_hash(text)[:12]})")
    return path


def read_artifact(path) -> str:
    path = Path(path)
    if not path.exists():
        raise FormatError(f"artifact {path} not found")
    return path.read_text(encoding="utf-8")


def _domain_text(domain) -> str:
    return f"GF({domain.characteristic()})" if domain.is_FiniteField else "QQ"


def _domain_from_text(text: str):
    text = text.strip()
    if text == "QQ":
        return QQ
    if text.startswith("GF(") and text.endswith(")"):
        try:
            return GF(int(text[3:-1]))
        except ValueError as e:
            raise FormatError(f"bad ring '{text}'") from e
    raise FormatError(f"unknown ring '{text}'")


def _coeff_text(domain, c) -> str:
    if domain.is_FiniteField:
        return f"{int(domain.to_int(c)) % domain.characteristic()}/1"
    return rat_to_text(c)


def _coeff_from_text(domain, text: str):
    try:
        value = rat_from_text(text)
    except ValueError as e:
        raise FormatError(f"bad coefficient '{text}'") from e
    if domain.is_FiniteField:
        return domain(int(QQ.numer(value))) / domain(int(QQ.denom(value)))
    return value


def _body(text: str, header: str) -> Tuple[Dict[str, str], List[str]]:
    """Split an artifact into its 'key: value' fields and its term lines."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != header:
        raise FormatError(f"expected header '{header}'")
    fields: Dict[str, str] = {}
    terms: List[str] = []
    for line in lines[1:]:
        if not line.strip() or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if sep and key.isidentifier():
            fields[key] = value.strip()
        else:
            terms.append(line)
    return fields, terms


def _term_line(exps, coeff_text: str) -> str:
    return " ".join(str(e) for e in exps) + " : " + coeff_text


def _parse_term(line: str, width: int):
    left, sep, right = line.partition(":")
    if not sep:
        raise FormatError(f"malformed term line '{line}'")
    try:
        exps = tuple(int(e) for e in left.split())
    except ValueError as e:
        raise FormatError(f"malformed exponents in '{line}'") from e
    if len(exps) != width:
        raise FormatError(f"expected {width} exponents in '{line}'")
    return exps, right.strip()


# ===== SERIES =====

def series_to_text(f: TruncSeries, command: Optional[str] = None) -> str:
    """Serialize a series over a ScalarRing, PolyCoeffRing or LaurentRing."""
    ring = f.ring
    if not isinstance(ring, (ScalarRing, PolyCoeffRing, LaurentRing)):
        raise FormatError(f"series over {ring} has no text form")
    domain = ring.domain
    lines = [SERIES_HEADER]
    if command:
        lines.append(f"# command: {command}")
    lines += [
        f"ring: {_domain_text(domain)}",
        "vars: " + " ".join(("t",) + tuple(ring.names)),
        "laurent: " + " ".join(ring.laurent),
        f"valuation: {f.valuation}",
        f"order: {f.prec}",
    ]
    rows = []
    for n, c in f.items():
        for exps, coeff in ring.terms(c):
            rows.append(((n,) + tuple(exps), _coeff_text(domain, coeff)))
    rows.sort()
    lines += [_term_line(e, c) for e, c in rows]
    return "\n".join(lines) + "\n"


def _series_ring(domain, names: Tuple[str, ...], laurent: Tuple[str, ...]):
    if not names:
        return ScalarRing(domain)
    if laurent:
        return LaurentRing(names, laurent, domain)
    return PolyCoeffRing(make_ring(names, domain))


def series_from_text(text: str) -> TruncSeries:
    fields, terms = _body(text, SERIES_HEADER)
    try:
        domain = _domain_from_text(fields["ring"])
        names = tuple(fields["vars"].split())
        laurent = tuple(fields.get("laurent", "").split())
        valuation = int(fields.get("valuation", "0"))
        prec = int(fields["order"])
    except (KeyError, ValueError) as e:
        raise FormatError(f"series artifact missing or malformed field: {e}") from e
    if not names or names[0] != "t":
        raise FormatError("series variables must start with t")
    names = names[1:]
    ring = _series_ring(domain, names, laurent)
    grouped: Dict[int, list] = {}
    for line in terms:
        exps, ctext = _parse_term(line, 1 + len(names))
        grouped.setdefault(exps[0], []).append((exps[1:], _coeff_from_text(domain, ctext)))
    coeffs = {n: ring.from_terms(items) for n, items in grouped.items()}
    if any(n < valuation or n >= prec for n in coeffs):
        raise FormatError("series term outside [valuation, order)")
    return TruncSeries.from_dict(ring, coeffs, prec)


# ===== POLYNOMIALS =====

def poly_to_text(p: PolyElement, command: Optional[str] = None) -> str:
    lines = [POLY_HEADER]
    if command:
        lines.append(f"# command: {command}")
    lines += [f"ring: {_domain_text(p.ring.domain)}", "vars: " + " ".join(ring_names(p.ring))]
    rows = sorted((tuple(e), _coeff_text(p.ring.domain, c)) for e, c in p.terms())
    lines += [_term_line(e, c) for e, c in rows]
    return "\n".join(lines) + "\n"


def poly_from_text(text: str) -> PolyElement:
    fields, terms = _body(text, POLY_HEADER)
    try:
        domain = _domain_from_text(fields["ring"])
        names = tuple(fields["vars"].split())
    except KeyError as e:
        raise FormatError(f"polynomial artifact missing field {e}") from e
    R: PolyRing = make_ring(names, domain)
    items = {}
    for line in terms:
        exps, ctext = _parse_term(line, len(names))
        items[exps] = _coeff_from_text(domain, ctext)
    return R.from_dict({e: c for e, c in items.items() if c})


# ===== OPERATORS =====

_OPERATOR_SYMBOLS = {"x": Symbol("x"), "t": Symbol("t")}


def operator_to_text(L: OreOp, command: Optional[str] = None) -> str:
    """Serialize the normalized form of L."""
    lines = [ORE_HEADER]
    if command:
        lines.append(f"# command: {command}")
    lines += ["vars: t x", f"order: {L.order}"]
    for i, p in enumerate(L.poly_coeffs()):
        lines.append(f"{i} : {p.as_expr()}")
    return "\n".join(lines) + "\n"


def operator_from_text(text: str) -> OreOp:
    fields, terms = _body(text, ORE_HEADER)
    if fields.get("vars", "t x").split() != ["t", "x"]:
        raise FormatError("operator variables must be 't x'")
    coeffs: Dict[int, PolyElement] = {}
    for line in terms:
        left, sep, right = line.partition(":")
        try:
            i = int(left)
            coeffs[i] = OP_RING.from_expr(sympify(right.strip(), locals=_OPERATOR_SYMBOLS))
        except (ValueError, TypeError, SympifyError, CoercionFailed) as e:
            raise FormatError(f"malformed operator line '{line}'") from e
    if not coeffs:
        if fields.get("order") == "-1":
            return OreOp(())
        raise FormatError("operator artifact has no coefficients")
    order = max(coeffs)
    if "order" in fields and int(fields["order"]) != order:
        raise FormatError(f"declared order {fields['order']} but highest coefficient index {order}")
    return OreOp.from_coeffs([coeffs.get(i, OP_RING.zero) for i in range(order + 1)])
