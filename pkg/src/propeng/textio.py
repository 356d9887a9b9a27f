"""Line-oriented problem files and their canonical serialization.

The format mirrors the data model one line per declaration::

    # comment
    domain 1 set {a, b, c}
    domain 2 int [0..9]
    constraint c1 scheme (1,2) tuples {(a,0), (b,1)}
    constraint c2 scheme (1,2) lineq 3*x1 - 5*x2 = 4
    constraint c3 scheme (1,2) leq 1*x1 + 1*x2 <= 7

Variables in linear forms are written ``x<i>`` with ``i`` the domain index;
every scheme index must occur exactly once.  ``parse_csp`` of a serialized
problem is the identity on the canonical form.
"""

from __future__ import annotations

import re

from .csp import (
    CSP, Constraint, ExtensionalBody, IntDomain, LinearEqBody, LinearIneqBody,
    Scheme, SetDomain,
)
from .errors import ConfigError, DataError
from .lattice import atom_key

_INT = re.compile(r"-?\d+")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TERM = re.compile(r"\s*([+-])?\s*(?:(\d+)\s*\*\s*)?x(\d+)\s*")


def _parse_atom(tok: str, where: str):
    tok = tok.strip()
    if _INT.fullmatch(tok):
        return int(tok)
    if _NAME.fullmatch(tok):
        return tok
    raise DataError(f"{where}: bad atom {tok!r}")


def _atom_text(a) -> str:
    return str(a)


def _parse_atom_set(text: str, where: str) -> frozenset:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise DataError(f"{where}: expected a {{...}} set")
    inner = text[1:-1].strip()
    if not inner:
        return frozenset()
    return frozenset(_parse_atom(t, where) for t in inner.split(","))


def _parse_tuple_set(text: str, where: str) -> frozenset:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise DataError(f"{where}: expected a {{(..),(..)}} set")
    inner = text[1:-1].strip()
    if not inner:
        return frozenset()
    groups = re.findall(r"\(([^()]*)\)", inner)
    leftover = re.sub(r"\(([^()]*)\)", "", inner).replace(",", "").strip()
    if leftover:
        raise DataError(f"{where}: unexpected text {leftover!r} in tuple set")
    return frozenset(
        tuple(_parse_atom(t, where) for t in g.split(",")) if g.strip() else ()
        for g in groups)


def _parse_scheme(text: str, where: str) -> Scheme:
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise DataError(f"{where}: expected a (i,j,...) scheme")
    try:
        return Scheme(tuple(int(t) for t in text[1:-1].split(",") if t.strip()))
    except ValueError:
        raise DataError(f"{where}: bad scheme {text!r}")
    except ConfigError as exc:
        raise DataError(f"{where}: {exc}")


def _parse_linear(text: str, scheme: Scheme, where: str) -> tuple[int, ...]:
    pos = 0
    coeffs: dict[int, int] = {}
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m:
            raise DataError(f"{where}: cannot read linear term at {text[pos:]!r}")
        sign, coeff, var = m.groups()
        if sign is None and not first:
            raise DataError(f"{where}: missing sign before {text[pos:]!r}")
        c = int(coeff) if coeff else 1
        if sign == "-":
            c = -c
        i = int(var)
        if i in coeffs:
            raise DataError(f"{where}: variable x{i} appears twice")
        coeffs[i] = c
        pos = m.end()
        first = False
    if set(coeffs) != set(scheme.indices):
        raise DataError(f"{where}: linear form must mention exactly the scheme variables")
    return tuple(coeffs[i] for i in scheme)


def parse_csp(text: str) -> CSP:
    """Parse a problem file; raises ``DataError`` with the offending line."""
    domains: dict[int, object] = {}
    constraints: list[Constraint] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"line {lineno}"
        fields = line.split(None, 2)
        if fields[0] == "domain":
            if len(fields) < 3:
                raise DataError(f"{where}: malformed domain line")
            try:
                index = int(fields[1])
            except ValueError:
                raise DataError(f"{where}: bad domain index {fields[1]!r}")
            if index in domains:
                raise DataError(f"{where}: domain {index} declared twice")
            kind, _, rest = fields[2].partition(" ")
            if kind == "set":
                domains[index] = SetDomain(_parse_atom_set(rest, where))
            elif kind == "int":
                m = re.fullmatch(r"\s*\[\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*\]\s*", rest)
                if not m:
                    raise DataError(f"{where}: expected int [l..h]")
                domains[index] = IntDomain(int(m.group(1)), int(m.group(2)))
            else:
                raise DataError(f"{where}: unknown domain kind {kind!r}")
        elif fields[0] == "constraint":
            if len(fields) < 3:
                raise DataError(f"{where}: malformed constraint line")
            cid = fields[1]
            m = re.match(r"scheme\s*(\([^)]*\))\s*(\w+)\s*(.*)", fields[2])
            if not m:
                raise DataError(f"{where}: expected scheme (...) <kind> ...")
            scheme = _parse_scheme(m.group(1), where)
            kind, rest = m.group(2), m.group(3)
            if kind == "tuples":
                body = ExtensionalBody(_parse_tuple_set(rest, where))
            elif kind in ("lineq", "leq"):
                op = "=" if kind == "lineq" else "<="
                lhs, sep, rhs = rest.partition(op)
                if not sep:
                    raise DataError(f"{where}: expected '{op}' in {kind} form")
                try:
                    const = int(rhs.strip())
                except ValueError:
                    raise DataError(f"{where}: bad constant {rhs.strip()!r}")
                coeffs = _parse_linear(lhs.strip(), scheme, where)
                body = (LinearEqBody(coeffs, const) if kind == "lineq"
                        else LinearIneqBody(coeffs, const))
            else:
                raise DataError(f"{where}: unknown constraint kind {kind!r}")
            constraints.append(Constraint(cid, scheme, body))
        else:
            raise DataError(f"{where}: unknown declaration {fields[0]!r}")
    if not domains:
        raise DataError("no domains declared")
    n = max(domains)
    missing = [str(i) for i in range(1, n + 1) if i not in domains]
    if missing:
        raise DataError(f"missing domain declarations for index {', '.join(missing)}")
    return CSP(tuple(domains[i] for i in range(1, n + 1)), tuple(constraints))


def _linear_text(scheme: Scheme, coeffs: tuple[int, ...]) -> str:
    parts = []
    for k, (i, a) in enumerate(zip(scheme, coeffs)):
        mag = f"{abs(a)}*x{i}"
        if k == 0:
            parts.append(mag if a >= 0 else f"-{mag}")
        else:
            parts.append(("+ " if a >= 0 else "- ") + mag)
    return " ".join(parts)


def serialize_csp(csp: CSP) -> str:
    """Canonical text form: domains ascending, atoms and tuples sorted."""
    lines = []
    for i, d in enumerate(csp.domains, start=1):
        if isinstance(d, SetDomain):
            atoms = ",".join(_atom_text(a) for a in sorted(d.values, key=atom_key))
            lines.append(f"domain {i} set {{{atoms}}}")
        else:
            lines.append(f"domain {i} int [{d.lo}..{d.hi}]")
    for c in csp.constraints:
        scheme = "(" + ",".join(map(str, c.scheme)) + ")"
        if isinstance(c.body, ExtensionalBody):
            tuples = ",".join(
                "(" + ",".join(_atom_text(a) for a in t) + ")"
                for t in sorted(c.body.tuples, key=atom_key))
            lines.append(f"constraint {c.cid} scheme {scheme} tuples {{{tuples}}}")
        elif isinstance(c.body, LinearEqBody):
            lines.append(f"constraint {c.cid} scheme {scheme} lineq "
                         f"{_linear_text(c.scheme, c.body.coeffs)} = {c.body.constant}")
        else:
            lines.append(f"constraint {c.cid} scheme {scheme} leq "
                         f"{_linear_text(c.scheme, c.body.coeffs)} <= {c.body.constant}")
    return "\n".join(lines) + "\n"


def csp_to_obj(csp: CSP) -> dict:
    """The JSON-ready mirror of the text model."""
    domains = []
    for i, d in enumerate(csp.domains, start=1):
        if isinstance(d, SetDomain):
            domains.append({"index": i, "kind": "set",
                            "values": sorted(d.values, key=atom_key)})
        else:
            domains.append({"index": i, "kind": "int", "lo": d.lo, "hi": d.hi})
    constraints = []
    for c in csp.constraints:
        entry = {"id": c.cid, "scheme": list(c.scheme.indices)}
        if isinstance(c.body, ExtensionalBody):
            entry["kind"] = "tuples"
            entry["tuples"] = [list(t) for t in sorted(c.body.tuples, key=atom_key)]
        else:
            entry["kind"] = "lineq" if isinstance(c.body, LinearEqBody) else "leq"
            entry["coeffs"] = list(c.body.coeffs)
            entry["constant"] = c.body.constant
        constraints.append(entry)
    return {"domains": domains, "constraints": constraints}
