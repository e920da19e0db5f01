"""Symbols, formal chains, residue and specialization maps, normal forms.

The equality test is a recursive decomposition along the split exact
sequence of a rational function field: a chain over GF(q)(t_1..t_m) is
sent to its specialization at infinity (over the dropped tower) plus its
residues at the finitely many rational places where some entry ramifies.
At the bottom the data is an integer (degree 0), a dlog class mod q-1
(degree 1), or identically zero (degree >= 2 over a finite field).  The
decomposition is canonical and complete on chains with entries in the
factored unit group, so structural equality of the trees decides
equality of classes, integrally or mod p.

Signs are tracked in Z throughout; mod-p reduction happens only in the
leaves, so the mod-2 phenomena the operation suite must exhibit are not
masked by early reduction.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import gcd
from typing import Iterable, Iterator

from .errors import EngineError, FieldMismatchError
from .gf import FqElem
from .tower import Place, TowerField, UnitElem, residue_unit, uniformizer, valuation


@dataclass(frozen=True, slots=True)
class Symbol:
    """An ordered tuple of units; the empty tuple is the ring unit."""

    entries: tuple[UnitElem, ...]

    @property
    def degree(self) -> int:
        return len(self.entries)

    def sort_key(self):
        return tuple(u.sort_key() for u in self.entries)

    def retype(self, field: TowerField) -> "Symbol":
        return Symbol(tuple(u.retype(field) for u in self.entries))

    def text(self) -> str:
        return "{" + ", ".join(u.text() for u in self.entries) + "}"

    def to_json(self) -> list:
        return [u.to_json() for u in self.entries]


class KChain:
    """A formal integer combination of same-degree symbols over one tower.

    Treated as immutable; all arithmetic returns fresh chains.
    Coefficients stay arbitrary-precision integers even in mod-p mode:
    reduction is deferred to the normal-form leaves.
    """

    __slots__ = ("field", "degree", "terms")

    def __init__(self, field: TowerField, degree: int, terms: dict[Symbol, int]):
        self.field = field
        self.degree = degree
        self.terms = {s: c for s, c in terms.items() if c}

    # -- constructors --

    @staticmethod
    def zero(field: TowerField, degree: int) -> "KChain":
        return KChain(field, degree, {})

    @staticmethod
    def unit(field: TowerField) -> "KChain":
        """The empty symbol with coefficient one: the unit of the graded ring."""
        return KChain(field, 0, {Symbol(()): 1})

    @staticmethod
    def of(field: TowerField, units: Iterable[UnitElem], coeff: int = 1) -> "KChain":
        entries = tuple(units)
        for u in entries:
            if u.field != field:
                raise FieldMismatchError("symbol entry from another tower")
        return KChain(field, len(entries), {Symbol(entries): coeff})

    # -- linear structure --

    def _check(self, other: "KChain", same_degree: bool = True):
        if not isinstance(other, KChain) or other.field != self.field:
            raise FieldMismatchError("chains over different towers or modes")
        if same_degree and other.degree != self.degree:
            raise EngineError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other: "KChain") -> "KChain":
        self._check(other)
        terms = dict(self.terms)
        for s, c in other.terms.items():
            terms[s] = terms.get(s, 0) + c
        return KChain(self.field, self.degree, terms)

    def __neg__(self) -> "KChain":
        return KChain(self.field, self.degree, {s: -c for s, c in self.terms.items()})

    def __sub__(self, other: "KChain") -> "KChain":
        return self + (-other)

    def scale(self, k: int) -> "KChain":
        return KChain(self.field, self.degree, {s: k * c for s, c in self.terms.items()})

    def __mul__(self, other: "KChain") -> "KChain":
        """Concatenation product; no reordering, bilinear in both factors."""
        self._check(other, same_degree=False)
        terms: dict[Symbol, int] = {}
        for s1, c1 in self.terms.items():
            for s2, c2 in other.terms.items():
                sym = Symbol(s1.entries + s2.entries)
                terms[sym] = terms.get(sym, 0) + c1 * c2
        return KChain(self.field, self.degree + other.degree, terms)

    @property
    def is_syntactically_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> list[tuple[Symbol, int]]:
        return sorted(self.terms.items(), key=lambda item: item[0].sort_key())

    def retype(self, field: TowerField) -> "KChain":
        return KChain(field, self.degree, {s.retype(field): c for s, c in self.terms.items()})

    def text(self) -> str:
        if not self.terms:
            return "0"
        if self.degree == 0:
            return str(sum(self.terms.values()))
        parts = []
        for i, (sym, c) in enumerate(self.sorted_terms()):
            mag = abs(c)
            body = ("" if mag == 1 else f"{mag} ") + sym.text()
            if i == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "terms": [
                {"coeff": c, "symbol": s.to_json()} for s, c in self.sorted_terms()
            ],
            "text": self.text(),
        }

    def __repr__(self):
        return f"<chain deg {self.degree} over {self.field.text()}: {self.text()}>"


def symbol_chain(field: TowerField, units: Iterable[UnitElem], coeff: int = 1) -> KChain:
    return KChain.of(field, units, coeff)


# --- residue and specialization maps ---

_PI = -1        # uniformizer marker in term reduction
_MINUS_ONE = -2  # constant -1 produced by collapsing {pi,pi}


def _reduced_terms(entries, vals, branch) -> Iterator[tuple[int, list[int]]]:
    """Expand one symbol at a place into signed terms with at most one pi.

    Yields (signed multiplier, slot list) where slots are entry indices,
    _MINUS_ONE markers, with exactly one _PI removed and implicitly in
    front.  Entries are written pi^v * unit and expanded multilinearly;
    pi's are bubbled left counting transpositions and adjacent pairs
    collapse through {pi,pi} = {pi,-1} until a single pi remains.
    """
    n = len(entries)
    for size in range(1, len(branch) + 1):
        for chosen in combinations(branch, size):
            mult = 1
            for i in chosen:
                mult *= vals[i]
            chosen_set = set(chosen)
            work = [_PI if i in chosen_set else i for i in range(n)]
            sign = 1
            pis = [i for i in range(n) if i in chosen_set]
            while len(pis) >= 2:
                i, j = pis[0], pis[1]
                # bring the second pi next to the first, then collapse it to -1
                sign = -sign if (j - i - 1) % 2 else sign
                work.pop(j)
                work.insert(i + 1, _MINUS_ONE)
                pis = [k for k, slot in enumerate(work) if slot == _PI]
            i = pis[0]
            sign = -sign if i % 2 else sign
            rest = work[:i] + work[i + 1 :]
            yield mult * sign, rest


def residue(x: KChain, place: Place) -> KChain:
    """The residue map at a rational place of the top variable.

    Degree drops by one; the result lives over the dropped tower.  Terms
    whose evaluated entries contain the constant 1 are discarded: such
    symbols are zero in every mode.
    """
    field = x.field
    if field.num_vars == 0:
        raise EngineError("residue needs at least one tower variable")
    if x.degree == 0:
        raise EngineError("residue is undefined in degree 0")
    small = field.drop_top()
    small_minus_one = small.minus_one_unit()
    out: dict[Symbol, int] = {}
    for sym, coeff in x.terms.items():
        entries = sym.entries
        vals = [valuation(u, place) for u in entries]
        branch = [i for i, v in enumerate(vals) if v]
        if not branch:
            continue
        evaluated: dict[int, UnitElem] = {}
        for mult, rest in _reduced_terms(entries, vals, branch):
            units = []
            dead = False
            for slot in rest:
                if slot == _MINUS_ONE:
                    u = small_minus_one
                else:
                    u = evaluated.get(slot)
                    if u is None:
                        u = residue_unit(entries[slot], place)
                        evaluated[slot] = u
                if u.is_one:
                    dead = True
                    break
                units.append(u)
            if dead:
                continue
            outsym = Symbol(tuple(units))
            out[outsym] = out.get(outsym, 0) + coeff * mult
    return KChain(small, x.degree - 1, out)


def specialize(x: KChain, place: Place, uniformizer_unit: UnitElem) -> KChain:
    """Specialization with an explicit local parameter: d({-pi} * x)."""
    field = x.field
    if uniformizer_unit.field != field:
        raise FieldMismatchError("uniformizer from another tower")
    if valuation(uniformizer_unit, place) != 1:
        raise EngineError("uniformizer must have valuation 1 at the place")
    minus_pi = field.minus_one_unit() * uniformizer_unit
    return residue(KChain.of(field, [minus_pi]) * x, place)


def specialize_at_infinity(x: KChain) -> KChain:
    """The fixed splitting of the sequence: specialize at t=inf with 1/t."""
    field = x.field
    if field.num_vars == 0:
        raise EngineError("no place at infinity over a finite field")
    if x.degree == 0:
        return x.retype(field.drop_top())
    pi = uniformizer(field, Place.at_infinity())
    return specialize(x, Place.at_infinity(), pi)


def inject(x: KChain, field: TowerField) -> KChain:
    """Re-type a chain into a tower extending its own; pure bookkeeping."""
    src = x.field
    if field.base != src.base or field.mode != src.mode:
        raise FieldMismatchError("inject into an incompatible tower")
    if field.vars[: src.num_vars] != src.vars:
        raise FieldMismatchError("inject target does not extend the source tower")
    return x.retype(field)


def _top_roots(x: KChain) -> list[FqElem]:
    """Roots of the top variable appearing in any entry, sorted."""
    m = x.field.num_vars - 1
    seen: dict[int, FqElem] = {}
    for sym in x.terms:
        for u in sym.entries:
            for j, a, _ in u.factors:
                if j == m:
                    seen.setdefault(a.sort_key(), a)
    return [seen[k] for k in sorted(seen)]


def support(x: KChain) -> tuple[Place, ...]:
    """Finite places with nonzero residue class."""
    if x.field.num_vars == 0:
        raise EngineError("support needs at least one tower variable")
    places = []
    for a in _top_roots(x):
        pl = Place.finite(a)
        if not normal_form(residue(x, pl)).is_zero():
            places.append(pl)
    return tuple(places)


# --- normal forms ---


@dataclass(frozen=True, slots=True)
class LeafK0:
    """Degree-0 data: an integer, reduced mod p when modulus > 0."""

    value: int
    modulus: int

    def is_zero(self) -> bool:
        return self.value == 0

    def to_json(self):
        return {"K0": self.value}


@dataclass(frozen=True, slots=True)
class LeafK1:
    """Degree-1 data over GF(q): a dlog class; modulus q-1 or gcd(p, q-1)."""

    value: int
    modulus: int

    def is_zero(self) -> bool:
        return self.value == 0

    def to_json(self):
        return {"K1": self.value}


@dataclass(frozen=True, slots=True)
class LeafZero:
    """Degree >= 2 over a finite field: identically zero."""

    def is_zero(self) -> bool:
        return True

    def to_json(self):
        return {"zero": True}


@dataclass(frozen=True, slots=True)
class SplitNode:
    """One tower level: data at infinity plus residues at ramified places."""

    base: "NormalForm"
    residues: tuple[tuple[int, FqElem, "NormalForm"], ...]  # (root key, root, subtree)

    def is_zero(self) -> bool:
        return self.base.is_zero() and not self.residues

    def to_json(self):
        return {
            "base": self.base.to_json(),
            "residues": {
                ("a=zero" if a.is_zero else f"a={key}"): nf.to_json()
                for key, a, nf in self.residues
            },
        }


NormalForm = LeafK0 | LeafK1 | LeafZero | SplitNode


def normal_form(x: KChain) -> NormalForm:
    """Canonical decomposition tree; equal chains have equal trees."""
    field = x.field
    n = x.degree
    if field.num_vars == 0:
        q1 = field.base.order - 1
        if n == 0:
            total = sum(x.terms.values())
            if field.mode is None:
                return LeafK0(total, 0)
            return LeafK0(total % field.mode, field.mode)
        if n == 1:
            total = 0
            for sym, c in x.terms.items():
                total += c * sym.entries[0].const_dlog
            if field.mode is None:
                return LeafK1(total % q1, q1)
            m = gcd(field.mode, q1)
            return LeafK1(total % m, m)
        return LeafZero()
    if n == 0:
        small = x.field.drop_top()
        return SplitNode(normal_form(x.retype(small)), ())
    base = normal_form(specialize_at_infinity(x))
    residues = []
    for a in _top_roots(x):
        sub = normal_form(residue(x, Place.finite(a)))
        if not sub.is_zero():
            residues.append((a.sort_key(), a, sub))
    return SplitNode(base, tuple(residues))


def nf_add(a: NormalForm, b: NormalForm) -> NormalForm:
    """Componentwise sum of two trees of the same field and degree."""
    if isinstance(a, LeafZero) and isinstance(b, LeafZero):
        return a
    if isinstance(a, LeafK0) and isinstance(b, LeafK0) and a.modulus == b.modulus:
        v = a.value + b.value
        return LeafK0(v % a.modulus if a.modulus else v, a.modulus)
    if isinstance(a, LeafK1) and isinstance(b, LeafK1) and a.modulus == b.modulus:
        return LeafK1((a.value + b.value) % a.modulus if a.modulus else a.value + b.value, a.modulus)
    if isinstance(a, SplitNode) and isinstance(b, SplitNode):
        merged: dict[int, tuple[FqElem, NormalForm]] = {k: (root, nf) for k, root, nf in a.residues}
        for k, root, nf in b.residues:
            if k in merged:
                merged[k] = (root, nf_add(merged[k][1], nf))
            else:
                merged[k] = (root, nf)
        residues = tuple(
            (k, root, nf) for k, (root, nf) in sorted(merged.items()) if not nf.is_zero()
        )
        return SplitNode(nf_add(a.base, b.base), residues)
    raise EngineError("normal forms of mismatched shape")


def is_zero(x: KChain) -> bool:
    return normal_form(x).is_zero()


def equal(x: KChain, y: KChain) -> bool:
    """Complete equality test; requires matching field, degree and mode."""
    if x.field != y.field:
        raise FieldMismatchError("equal() across fields or modulus modes")
    if x.degree != y.degree:
        raise EngineError("equal() across degrees")
    return is_zero(x - y)


def nf_text(nf: NormalForm, field: TowerField, indent: int = 0) -> str:
    """Human-readable rendering of a normal form tree."""
    pad = "  " * indent
    if nf.is_zero():
        return pad + "zero"
    if isinstance(nf, LeafK0):
        mod = f" (mod {nf.modulus})" if nf.modulus else ""
        return f"{pad}K0: {nf.value}{mod}"
    if isinstance(nf, LeafK1):
        return f"{pad}K1: dlog {nf.value} (mod {nf.modulus})"
    lines = [f"{pad}split on {field.top_var}:"]
    lines.append(f"{pad}  at inf:")
    lines.append(nf_text(nf.base, field.drop_top(), indent + 2))
    for _, a, sub in nf.residues:
        lines.append(f"{pad}  at {field.top_var}={a.text()}:")
        lines.append(nf_text(sub, field.drop_top(), indent + 2))
    return "\n".join(lines)
