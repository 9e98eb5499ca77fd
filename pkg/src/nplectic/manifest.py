"""Text format describing an n-plectic coordinate space, named tensors and checks.

Example::

    manifold R6 plectic 3
    omega: dx1^dx3^dx5^dx6 + dx2^dx4^dx5^dx6
    form f1: (x4 - x1^2*x3) dx5^dx6
    field X1: x1^2 @1 - @2 - 2*x1*x3 @3
    check classify f1
    check bracket D2(f1 f2)

Coordinates are 1-based ``x1..xd``; ``dxi`` is a coordinate 1-form and ``@i``
the coordinate vector field.  ``#`` starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .calculus import DiffForm, MultiVec, render_tensor
from .poly import Polynomial

Tensor = Union[DiffForm, MultiVec]

MAX_EXPONENT = 64

DIRECTIVES = ("nplectic", "classify", "fundamental", "bracket", "jacobi", "kernel", "module")


class ManifestError(ValueError):
    """Malformed manifest text, with 1-based line and column."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Check:
    kind: str
    args: tuple = ()
    line: int = field(default=0, compare=False)

    def render(self) -> str:
        if self.kind == "nplectic":
            return "nplectic"
        if self.kind in ("classify",):
            return f"classify {self.args[0]}"
        if self.kind in ("fundamental", "module"):
            return f"{self.kind} {self.args[0]} {self.args[1]}"
        if self.kind == "bracket":
            return f"bracket D{self.args[0]}({' '.join(self.args[1])})"
        if self.kind == "jacobi":
            return f"jacobi {self.args[0]} ({' '.join(self.args[1])})"
        if self.kind == "kernel":
            return f"kernel {self.args[0]}"
        raise ValueError(self.kind)


@dataclass
class Manifest:
    dim: int
    plectic_degree: int
    omega: Optional[DiffForm] = None
    forms: dict[str, DiffForm] = field(default_factory=dict)
    fields: dict[str, MultiVec] = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)

    def render(self) -> str:
        lines = [f"manifold R{self.dim} plectic {self.plectic_degree}"]
        if self.omega is not None:
            lines.append(f"omega: {render_tensor(self.omega)}")
        for name, f in self.forms.items():
            lines.append(f"form {name}: {render_tensor(f)}")
        for name, x in self.fields.items():
            lines.append(f"field {name}: {render_tensor(x)}")
        for c in self.checks:
            lines.append(f"check {c.render()}")
        return "\n".join(lines) + "\n"


# -- tokens -----------------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>[ \t]+)"
    r"|(?P<dx>dx(?P<dxi>\d+))"
    r"|(?P<at>@(?P<ati>\d+))"
    r"|(?P<var>x(?P<vari>\d+))"
    r"|(?P<num>\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),:])"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    col: int
    value: int = 0


def tokenize(text: str, line: int = 1, offset: int = 0) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ManifestError(f"unexpected character {text[pos]!r}", line, offset + pos + 1)
        col = offset + pos + 1
        if m.group("ws"):
            pass
        elif m.group("dx"):
            out.append(Token("dx", m.group(), col, int(m.group("dxi"))))
        elif m.group("at"):
            out.append(Token("at", m.group(), col, int(m.group("ati"))))
        elif m.group("var"):
            out.append(Token("var", m.group(), col, int(m.group("vari"))))
        elif m.group("num"):
            out.append(Token("num", m.group(), col, int(m.group())))
        elif m.group("name"):
            out.append(Token("name", m.group(), col))
        else:
            out.append(Token(m.group(), m.group(), col))
        pos = m.end()
    out.append(Token("end", "", offset + len(text) + 1))
    return out


# -- expressions -----------------------------------------------------------------------


class _ExprParser:
    def __init__(self, tokens: list[Token], dim: int, line: int, kind: str):
        self.toks = tokens
        self.i = 0
        self.dim = dim
        self.line = line
        self.kind = kind  # "dx" or "at"

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[Token] = None) -> ManifestError:
        tok = tok or self.tok
        return ManifestError(msg, self.line, tok.col)

    def take(self, kind: str) -> Token:
        if self.tok.kind != kind:
            shown = self.tok.text or "end of line"
            raise self.error(f"expected {kind!r}, found {shown!r}")
        t = self.tok
        self.i += 1
        return t

    def coord(self, tok: Token) -> int:
        if not 1 <= tok.value <= self.dim:
            raise self.error(f"coordinate index {tok.value} outside 1..{self.dim}", tok)
        return tok.value

    # polynomial grammar: sum of signed products of powered atoms
    def poly_sum(self) -> Polynomial:
        total = Polynomial.zero(self.dim)
        sign = 1
        if self.tok.kind in ("+", "-"):
            sign = -1 if self.take(self.tok.kind).kind == "-" else 1
        total = total + self.poly_product().scale(sign)
        while self.tok.kind in ("+", "-"):
            sign = -1 if self.take(self.tok.kind).kind == "-" else 1
            total = total + self.poly_product().scale(sign)
        return total

    def poly_product(self) -> Polynomial:
        p = self.poly_power()
        while self.tok.kind in ("*", "/"):
            if self.tok.kind == "/":
                self.take("/")
                den = self.take("num")
                if den.value == 0:
                    raise self.error("division by zero", den)
                p = p.scale(Fraction(1, den.value))
            else:
                self.take("*")
                p = p * self.poly_power()
        return p

    def poly_power(self) -> Polynomial:
        base = self.poly_atom()
        if self.tok.kind == "^":
            self.take("^")
            e = self.take("num")
            if e.value > MAX_EXPONENT:
                raise self.error(f"exponent {e.value} exceeds {MAX_EXPONENT}", e)
            return base ** e.value
        return base

    def poly_atom(self) -> Polynomial:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Polynomial.constant(self.dim, t.value)
        if t.kind == "var":
            self.i += 1
            return Polynomial.var(self.dim, self.coord(t))
        if t.kind == "(":
            self.take("(")
            p = self.poly_sum()
            self.take(")")
            return p
        if t.kind in ("dx", "at"):
            raise self.error(f"{t.text} inside a coefficient")
        raise self.error(f"expected a number, coordinate or '(', found {t.text or 'end of line'!r}")

    # tensor grammar
    def tensor_sum(self) -> Tensor:
        cls = DiffForm if self.kind == "dx" else MultiVec
        total = cls.zero(self.dim)
        sign = 1
        if self.tok.kind in ("+", "-"):
            sign = -1 if self.take(self.tok.kind).kind == "-" else 1
        total = total + self.tensor_term(cls).scale(sign)
        while self.tok.kind in ("+", "-"):
            sign = -1 if self.take(self.tok.kind).kind == "-" else 1
            total = total + self.tensor_term(cls).scale(sign)
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return total

    def tensor_term(self, cls) -> Tensor:
        coeff = Polynomial.one(self.dim)
        if self.tok.kind not in ("dx", "at"):
            coeff = self.term_coefficient()
            if self.tok.kind == "*" and self.toks[self.i + 1].kind in ("dx", "at"):
                self.take("*")
        if self.tok.kind in ("dx", "at"):
            return self.wedge_chain(cls).scale(coeff)
        return cls.function(coeff)

    def term_coefficient(self) -> Polynomial:
        p = self.poly_power()
        while self.tok.kind in ("*", "/"):
            if self.tok.kind == "*" and self.toks[self.i + 1].kind in ("dx", "at"):
                break
            if self.tok.kind == "/":
                self.take("/")
                den = self.take("num")
                if den.value == 0:
                    raise self.error("division by zero", den)
                p = p.scale(Fraction(1, den.value))
            else:
                self.take("*")
                p = p * self.poly_power()
        return p

    def wedge_chain(self, cls) -> Tensor:
        indices = [self.basis_index()]
        while self.tok.kind == "^":
            self.take("^")
            indices.append(self.basis_index())
        return cls.basis(self.dim, *indices)

    def basis_index(self) -> int:
        t = self.tok
        if t.kind not in ("dx", "at"):
            raise self.error(f"expected a basis element, found {t.text or 'end of line'!r}")
        if t.kind != self.kind:
            want = "dx" if self.kind == "dx" else "@"
            raise self.error(f"{t.text} in an expression built from {want}i")
        self.i += 1
        return self.coord(t)


def parse_tensor(text: str, dim: int, kind: str = "dx", line: int = 1, offset: int = 0) -> Tensor:
    """Parse a form (``kind='dx'``) or multivector (``kind='at'``) expression."""
    return _ExprParser(tokenize(text, line, offset), dim, line, kind).tensor_sum()


def parse_form(text: str, dim: int) -> DiffForm:
    return parse_tensor(text, dim, "dx")


def parse_field(text: str, dim: int) -> MultiVec:
    return parse_tensor(text, dim, "at")


# -- statements ------------------------------------------------------------------------

_HEADER = re.compile(r"^manifold\s+R(\d+)\s+plectic\s+(\d+)\s*$")


def _names(toks: list[Token], start: int, line: int) -> tuple[tuple[str, ...], int]:
    i = start
    if toks[i].kind != "(":
        raise ManifestError(f"expected '(', found {toks[i].text or 'end of line'!r}", line, toks[i].col)
    i += 1
    names = []
    while toks[i].kind != ")":
        t = toks[i]
        if t.kind == ",":
            i += 1
            continue
        if t.kind != "name":
            raise ManifestError(f"expected a name, found {t.text or 'end of line'!r}", line, t.col)
        names.append(t.text)
        i += 1
    return tuple(names), i + 1


def _parse_check(body: str, line: int, offset: int) -> Check:
    toks = tokenize(body, line, offset)
    head = toks[0]
    if head.kind != "name" or head.text not in DIRECTIVES:
        raise ManifestError(f"unknown check {head.text!r}; expected one of {', '.join(DIRECTIVES)}", line, head.col)
    kind = head.text

    def name_at(i):
        t = toks[i]
        if t.kind != "name":
            raise ManifestError(f"expected a name, found {t.text or 'end of line'!r}", line, t.col)
        return t.text

    def num_at(i):
        t = toks[i]
        if t.kind != "num":
            raise ManifestError(f"expected an integer, found {t.text or 'end of line'!r}", line, t.col)
        return t.value

    if kind == "nplectic":
        check, nxt = Check(kind, (), line), 1
    elif kind == "classify":
        check, nxt = Check(kind, (name_at(1),), line), 2
    elif kind in ("fundamental", "module"):
        check, nxt = Check(kind, (name_at(1), name_at(2)), line), 3
    elif kind == "kernel":
        check, nxt = Check(kind, (num_at(1),), line), 2
    elif kind == "bracket":
        t = toks[1]
        m = re.fullmatch(r"D(\d+)", t.text) if t.kind == "name" else None
        if m is None:
            raise ManifestError(f"expected Dk, found {t.text or 'end of line'!r}", line, t.col)
        names, nxt = _names(toks, 2, line)
        check = Check(kind, (int(m.group(1)), names), line)
        if check.args[0] != len(names) or not names:
            raise ManifestError(f"D{m.group(1)} takes {m.group(1)} arguments, got {len(names)}", line, t.col)
    else:
        k = num_at(1)
        names, nxt = _names(toks, 2, line)
        check = Check(kind, (k, names), line)
        if k != len(names) or not names:
            raise ManifestError(f"jacobi {k} takes {k} arguments, got {len(names)}", line, toks[1].col)
    if toks[nxt].kind != "end":
        raise ManifestError(f"unexpected {toks[nxt].text!r}", line, toks[nxt].col)
    return check


def parse_manifest(text: str) -> Manifest:
    """Parse manifest text; raises :class:`ManifestError` with a position."""
    manifest: Optional[Manifest] = None
    names_seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.lstrip()
        if not stripped:
            continue
        indent = len(line) - len(stripped)
        if manifest is None:
            m = _HEADER.match(stripped)
            if m is None:
                raise ManifestError("expected header 'manifold R<d> plectic <n>'", lineno, indent + 1)
            dim, n = int(m.group(1)), int(m.group(2))
            if dim < 1:
                raise ManifestError("dimension must be positive", lineno, indent + 1)
            manifest = Manifest(dim, n)
            continue
        keyword = stripped.split(None, 1)[0].split(":", 1)[0]
        if keyword == "check":
            body_start = indent + len("check")
            body = line[body_start:]
            lead = len(body) - len(body.lstrip())
            if not body.strip():
                raise ManifestError("empty check", lineno, body_start + 1)
            manifest.checks.append(_parse_check(body.strip(), lineno, body_start + lead))
            continue
        if ":" not in stripped:
            raise ManifestError("expected 'omega:', 'form NAME:', 'field NAME:' or 'check'", lineno, indent + 1)
        head, _, expr = line.partition(":")
        expr_offset = len(head) + 1
        words = head.split()
        if words == ["omega"]:
            if manifest.omega is not None:
                raise ManifestError("omega given twice", lineno, indent + 1)
            omega = parse_tensor(expr, manifest.dim, "dx", lineno, expr_offset)
            if omega.tensor_degree() != manifest.plectic_degree + 1:
                raise ManifestError(
                    f"omega must have tensor degree {manifest.plectic_degree + 1}", lineno, expr_offset + 1
                )
            manifest.omega = omega
            continue
        if len(words) == 2 and words[0] in ("form", "field"):
            name = words[1]
            name_col = head.index(name, head.index(words[0]) + len(words[0])) + 1
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name) or re.match(r"(dx|x)\d|D\d+$", name):
                raise ManifestError(f"invalid name {name!r}", lineno, name_col)
            if name in names_seen:
                raise ManifestError(f"duplicate name {name!r}", lineno, name_col)
            names_seen.add(name)
            if words[0] == "form":
                manifest.forms[name] = parse_tensor(expr, manifest.dim, "dx", lineno, expr_offset)
            else:
                manifest.fields[name] = parse_tensor(expr, manifest.dim, "at", lineno, expr_offset)
            continue
        raise ManifestError(f"unknown statement {head.strip()!r}", lineno, indent + 1)
    if manifest is None:
        raise ManifestError("empty manifest: missing header", 1, 1)
    _check_names(manifest)
    return manifest


def _check_names(m: Manifest) -> None:
    for c in m.checks:
        if c.kind == "classify":
            wanted = [("form", c.args[0])]
        elif c.kind == "fundamental":
            wanted = [("field", c.args[0]), ("form", c.args[1])]
        elif c.kind == "module":
            wanted = [("form", c.args[0]), ("form", c.args[1])]
        elif c.kind in ("bracket", "jacobi"):
            wanted = [("form", a) for a in c.args[1]]
        else:
            wanted = []
        for kind, name in wanted:
            pool = m.forms if kind == "form" else m.fields
            if name not in pool:
                raise ManifestError(f"unknown {kind} {name!r}", c.line, 1)
        if c.kind == "module":
            g = m.forms[c.args[0]]
            if g and g.degrees() != {0}:
                raise ManifestError(f"module action needs a function, {c.args[0]} is not a 0-form", c.line, 1)
