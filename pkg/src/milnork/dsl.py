"""Expression grammar for fields, units, symbols, chains and scripts.

    field  := "GF(" int ["^" int] ")" ["(" ident {"," ident} ")"]
              ["mod" int | "integral"]
    unit   := factor {("*" | "/") factor}
    factor := "g" ["^" int] | "-" int | int
            | "(" ident "-" const ")" ["^" int]
            | ident ["-" const] ["^" int]
    symbol := "{" unit {"," unit} "}"
    chain  := ["+"|"-"] [int] symbol {("+"|"-") [int] symbol}
    pres   := "[" chain {";" chain} "]"

Integer constants resolve through the dlog table of the base field; zero
is rejected wherever a unit is required.  Extension fields (d > 1) write
constants as g-powers; bare integer literals other than 0 and 1 are
rejected there as ambiguous.  Linear factors may drop their parentheses
when no exponent follows the closing parenthesis would bind to.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import EngineError, ParseError
from .gf import FqElem, make_field
from .kchain import KChain, Symbol
from .operations import Presentation
from .tower import Place, TowerField, UnitElem, make_tower

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


@dataclass(frozen=True, slots=True)
class _Tok:
    kind: str  # "int", "ident", or the punctuation character itself
    value: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    out = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            break
        i = m.end()
        if m.group(1) is not None:
            out.append(_Tok("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            out.append(_Tok("ident", m.group(2), m.start(2)))
        else:
            ch = m.group(3)
            if ch.strip():
                out.append(_Tok(ch, ch, m.start(3)))
            elif not ch.isspace():
                raise ParseError(f"unexpected character {ch!r}", m.start(3))
    return out


class _Parser:
    def __init__(self, text: str, field: TowerField | None = None, env: dict[str, UnitElem] | None = None):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.field = field
        self.env = env or {}

    # -- token plumbing --

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> _Tok:
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of input", len(self.text))
        self.i += 1
        return t

    def expect(self, kind: str) -> _Tok:
        t = self.peek()
        if t is None or t.kind != kind:
            raise ParseError(f"expected {kind!r}", t.pos if t else len(self.text))
        return self.next()

    def at(self, kind: str) -> bool:
        t = self.peek()
        return t is not None and t.kind == kind

    def done(self):
        t = self.peek()
        if t is not None:
            raise ParseError(f"trailing input {t.value!r}", t.pos)

    # -- grammar --

    def field_decl(self) -> TowerField:
        t = self.expect("ident")
        if t.value != "GF":
            raise ParseError("expected GF(...)", t.pos)
        self.expect("(")
        p = int(self.expect("int").value)
        d = 1
        if self.at("^"):
            self.next()
            d = int(self.expect("int").value)
        self.expect(")")
        names: list[str] = []
        if self.at("("):
            self.next()
            names.append(self.expect("ident").value)
            while self.at(","):
                self.next()
                names.append(self.expect("ident").value)
            self.expect(")")
        mode: int | str = "integral"
        if self.at("ident") and self.peek().value in ("mod", "integral"):
            t = self.next()
            if t.value == "mod":
                mode = int(self.expect("int").value)
        try:
            return make_tower(make_field(p, d), names, mode)
        except EngineError as exc:
            raise ParseError(str(exc), t.pos) from exc

    def _exponent(self) -> int:
        self.next()  # '^'
        neg = False
        if self.at("-"):
            self.next()
            neg = True
        e = int(self.expect("int").value)
        return -e if neg else e

    def _const(self) -> FqElem:
        base = self.field.base
        t = self.peek()
        if t is None:
            raise ParseError("expected a constant", len(self.text))
        if t.kind == "-":
            self.next()
            c = self.expect("int")
            return -base.from_int_literal(int(c.value))
        if t.kind == "int":
            self.next()
            return base.from_int_literal(int(t.value))
        if t.kind == "ident" and t.value == "g":
            self.next()
            k = self._exponent() if self.at("^") else 1
            return base.exp(k)
        raise ParseError("expected a constant (int, -int or g^k)", t.pos)

    def _factor(self) -> UnitElem:
        field = self.field
        t = self.peek()
        if t is None:
            raise ParseError("expected a unit factor", len(self.text))
        if t.kind == "-" or t.kind == "int" or (t.kind == "ident" and t.value == "g"):
            pos = t.pos
            c = self._const()
            if c.is_zero:
                raise ParseError("zero is not a unit", pos)
            u = field.unit_const(c)
            if self.at("^"):
                u = u ** self._exponent()
            return u
        if t.kind == "(":
            self.next()
            name = self.expect("ident")
            self.expect("-")
            root = self._const()
            self.expect(")")
            u = self._linear(name, root)
            if self.at("^"):
                u = u ** self._exponent()
            return u
        if t.kind == "ident":
            name = self.next()
            root = field.base.zero
            if self.at("-"):
                self.next()
                root = self._const()
                u = self._linear(name, root)
            elif name.value in self.env and name.value not in field.vars:
                u = self.env[name.value]
            else:
                u = self._linear(name, root)
            if self.at("^"):
                u = u ** self._exponent()
            return u
        raise ParseError(f"unexpected {t.value!r} in unit", t.pos)

    def _linear(self, name: _Tok, root: FqElem) -> UnitElem:
        try:
            return self.field.unit_linear(name.value, root)
        except EngineError as exc:
            raise ParseError(str(exc), name.pos) from exc

    def unit(self) -> UnitElem:
        u = self._factor()
        while self.at("*") or self.at("/"):
            op = self.next()
            v = self._factor()
            u = u * v if op.kind == "*" else u / v
        return u

    def symbol(self) -> Symbol:
        self.expect("{")
        entries = [self.unit()]
        while self.at(","):
            self.next()
            entries.append(self.unit())
        self.expect("}")
        return Symbol(tuple(entries))

    def chain_terms(self) -> list[tuple[int, Symbol]]:
        terms = []
        sign = 1
        if self.at("+") or self.at("-"):
            sign = -1 if self.next().kind == "-" else 1
        terms.append(self._signed_term(sign))
        while self.at("+") or self.at("-"):
            sign = -1 if self.next().kind == "-" else 1
            terms.append(self._signed_term(sign))
        return terms

    def _signed_term(self, sign: int) -> tuple[int, Symbol]:
        coeff = sign
        if self.at("int"):
            coeff = sign * int(self.next().value)
        return coeff, self.symbol()

    def chain(self) -> KChain:
        terms = self.chain_terms()
        degree = terms[0][1].degree
        out = KChain.zero(self.field, degree)
        for c, s in terms:
            if s.degree != degree:
                raise ParseError("mixed symbol degrees in one chain", 0)
            out = out + KChain(self.field, degree, {s: c})
        return out

    def presentation(self) -> Presentation:
        start = self.expect("[")
        terms = list(self.chain_terms())
        while self.at(";"):
            self.next()
            terms.extend(self.chain_terms())
        self.expect("]")
        degree = terms[0][1].degree
        try:
            return Presentation(self.field, degree, tuple(terms))
        except EngineError as exc:
            raise ParseError(str(exc), start.pos) from exc

    def place(self) -> Place:
        t = self.expect("ident")
        if t.value == "inf":
            return Place.at_infinity()
        if t.value != self.field.top_var:
            raise ParseError(
                f"places use the outermost variable {self.field.top_var!r}", t.pos
            )
        self.expect("=")
        return Place.finite(self._const())


def parse_field(text: str) -> TowerField:
    p = _Parser(text)
    f = p.field_decl()
    p.done()
    return f


def parse_unit(text: str, field: TowerField, env=None) -> UnitElem:
    p = _Parser(text, field, env)
    u = p.unit()
    p.done()
    return u


def parse_chain(text: str, field: TowerField, env=None) -> KChain:
    p = _Parser(text, field, env)
    c = p.chain()
    p.done()
    return c


def parse_presentation(text: str, field: TowerField, env=None) -> Presentation:
    p = _Parser(text, field, env)
    pres = p.presentation()
    p.done()
    return pres


def parse_place(text: str, field: TowerField) -> Place:
    p = _Parser(text, field)
    pl = p.place()
    p.done()
    return pl


# --- scripts ---


@dataclass(frozen=True, slots=True)
class Script:
    """A field declaration plus resolved let-bindings and commands."""

    field: TowerField
    statements: tuple[tuple, ...]  # ("let", name, unit) | (command, payload...)


def parse_script(text: str) -> Script:
    field: TowerField | None = None
    env: dict[str, UnitElem] = {}
    statements: list[tuple] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if field is None:
                body = line[5:] if line.startswith("field") else line
                try:
                    field = parse_field(body.strip())
                except ParseError:
                    raise ParseError("script must start with a field declaration", 0) from None
                continue
            head, _, rest = line.partition(" ")
            rest = rest.strip()
            if head == "let":
                name, _, expr = rest.partition("=")
                name = name.strip()
                if not name.isidentifier() or name in field.vars:
                    raise ParseError(f"bad binding name {name!r}", 0)
                env[name] = parse_unit(expr.strip(), field, env)
                statements.append(("let", name, env[name]))
            elif head == "normalize":
                statements.append(("normalize", parse_chain(rest, field, env)))
            elif head == "support":
                statements.append(("support", parse_chain(rest, field, env)))
            elif head == "equal":
                lhs, _, rhs = rest.partition(";")
                statements.append(
                    ("equal", parse_chain(lhs.strip(), field, env), parse_chain(rhs.strip(), field, env))
                )
            elif head == "residue":
                expr, _, at = rest.partition(" at ")
                statements.append(
                    ("residue", parse_chain(expr.strip(), field, env), parse_place(at.strip(), field))
                )
            elif head == "specialize":
                expr, _, at = rest.partition(" at ")
                place_text, _, by = at.partition(" by ")
                statements.append(
                    (
                        "specialize",
                        parse_chain(expr.strip(), field, env),
                        parse_place(place_text.strip(), field),
                        parse_unit(by.strip(), field, env) if by.strip() else None,
                    )
                )
            elif head == "gamma":
                n_text, _, pres_text = rest.partition(" ")
                statements.append(
                    ("gamma", int(n_text), parse_presentation(pres_text.strip(), field, env))
                )
            else:
                raise ParseError(f"unknown command {head!r}", 0)
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc.message}", exc.position) from None
    if field is None:
        raise ParseError("script needs a field declaration", 0)
    return Script(field, tuple(statements))


def parse_config(text: str) -> dict[str, str]:
    """TOML-like key = value pairs; '#' starts a comment."""
    out: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise ParseError(f"expected key = value, got {line!r}", 0)
        value = value.strip()
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "'\"":
            value = value[1:-1]
        out[key.strip()] = value
    return out
