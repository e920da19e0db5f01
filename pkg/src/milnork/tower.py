"""Iterated rational function fields and their factored unit subgroup.

A tower is GF(q)(t_1, ..., t_m) with the variables strictly ordered; the
engine computes inside the subgroup G of units of the shape
c * prod (t_j - a)^e with roots a in GF(q).  G is closed under product,
inverse, valuation at the rational places of the top variable, and
evaluation there, which is exactly what the normal-form recursion needs.
Places of inner variables are reached by building the tower in a
different variable order, never by runtime dispatch.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .errors import EngineError, FieldMismatchError, NotAUnitError
from .gf import FqElem, FqField, is_prime

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_RESERVED = {"g", "inf", "mod", "integral", "GF", "let", "at", "by"}


@dataclass(frozen=True, slots=True)
class TowerField:
    """GF(q)(vars...) together with the coefficient mode of the K-theory.

    mode is None for integral coefficients or an odd/even prime p for
    K-theory mod p; the mode is independent of the characteristic.
    """

    base: FqField
    vars: tuple[str, ...]
    mode: int | None

    @property
    def num_vars(self) -> int:
        return len(self.vars)

    @property
    def top_var(self) -> str:
        if not self.vars:
            raise EngineError("finite field has no tower variable")
        return self.vars[-1]

    def drop_top(self) -> "TowerField":
        if not self.vars:
            raise EngineError("finite field has no tower variable to drop")
        return TowerField(self.base, self.vars[:-1], self.mode)

    def var_index(self, name: str) -> int:
        try:
            return self.vars.index(name)
        except ValueError:
            raise EngineError(f"unknown variable {name!r} in {self.text()}") from None

    # -- unit constructors --

    def one(self) -> "UnitElem":
        return UnitElem(self, 0, ())

    def unit_const(self, c) -> "UnitElem":
        c = self.base.from_int_literal(c) if isinstance(c, int) else c
        if c.field != self.base:
            raise FieldMismatchError("constant from another base field")
        if c.is_zero:
            raise NotAUnitError("zero is not a unit")
        return UnitElem(self, c.dlog, ())

    def minus_one_unit(self) -> "UnitElem":
        return self.unit_const(self.base.minus_one())

    def unit_linear(self, var: str, root) -> "UnitElem":
        """The unit t_j - a for a variable t_j and a root a in GF(q)."""
        j = self.var_index(var)
        root = self.base.from_int_literal(root) if isinstance(root, int) else root
        if root.field != self.base:
            raise FieldMismatchError("root from another base field")
        return UnitElem(self, 0, ((j, root, 1),))

    def text(self) -> str:
        head = f"GF({self.base.char}^{self.base.degree})" if self.base.degree > 1 else f"GF({self.base.char})"
        if self.vars:
            head += "(" + ",".join(self.vars) + ")"
        return head + (" integral" if self.mode is None else f" mod {self.mode}")

    def json_header(self) -> dict:
        h = self.base.json_header()
        h["vars"] = list(self.vars)
        h["mode"] = "integral" if self.mode is None else self.mode
        if self.vars:
            # fixed splitting convention for the top place at infinity
            h["s_infinity_uniformizer"] = f"{self.top_var}^-1"
        return h


def make_tower(base: FqField, vars: Iterable[str], mode="integral") -> TowerField:
    """Build GF(q)(vars...); mode is "integral", None, or a prime."""
    names = tuple(vars)
    if len(set(names)) != len(names):
        raise EngineError("duplicate variable names")
    for n in names:
        if not _NAME.match(n) or n in _RESERVED:
            raise EngineError(f"illegal variable name {n!r}")
    if mode == "integral" or mode is None:
        m = None
    else:
        m = int(mode)
        if not is_prime(m):
            raise EngineError(f"coefficient modulus {m} is not prime")
    return TowerField(base, names, m)


def _root_key(root: FqElem) -> int:
    return root.sort_key()


@dataclass(frozen=True, slots=True)
class UnitElem:
    """c * prod (t_j - a)^e in canonical form: sorted factors, no zero exponents."""

    field: TowerField
    const_dlog: int
    factors: tuple[tuple[int, FqElem, int], ...]

    @property
    def is_one(self) -> bool:
        return self.const_dlog == 0 and not self.factors

    @property
    def is_constant(self) -> bool:
        return not self.factors

    def constant(self) -> FqElem:
        """The constant coefficient c as a field element."""
        return self.field.base.exp(self.const_dlog)

    def _check(self, other: "UnitElem"):
        if not isinstance(other, UnitElem) or other.field != self.field:
            raise FieldMismatchError("units from different towers")

    def __mul__(self, other: "UnitElem") -> "UnitElem":
        self._check(other)
        return _build_unit(
            self.field,
            self.const_dlog + other.const_dlog,
            list(self.factors) + list(other.factors),
        )

    def __pow__(self, e: int) -> "UnitElem":
        return _build_unit(
            self.field,
            self.const_dlog * e,
            [(j, a, k * e) for (j, a, k) in self.factors],
        )

    def inverse(self) -> "UnitElem":
        return self**-1

    def __truediv__(self, other: "UnitElem") -> "UnitElem":
        return self * other.inverse()

    def sort_key(self):
        return (self.const_dlog, tuple((j, _root_key(a), e) for (j, a, e) in self.factors))

    def top_degree(self) -> int:
        """Total degree in the outermost variable."""
        m = self.field.num_vars - 1
        return sum(e for (j, _, e) in self.factors if j == m)

    def retype(self, field: TowerField) -> "UnitElem":
        """Move to a tower whose variable list extends this one's (prefix)."""
        if field.base != self.field.base or field.mode != self.field.mode:
            raise FieldMismatchError("retype into an incompatible tower")
        if field.vars[: self.field.num_vars] != self.field.vars:
            raise FieldMismatchError("retype target does not extend the source tower")
        return UnitElem(field, self.const_dlog, self.factors)

    def text(self) -> str:
        parts = []
        if self.const_dlog or not self.factors:
            parts.append(_gpow_text(self.const_dlog))
        for j, a, e in self.factors:
            var = self.field.vars[j]
            if a.is_zero:
                body = var
            else:
                body = f"({var}-{a.text()})"
            parts.append(body if e == 1 else f"{body}^{e}")
        return " * ".join(parts)

    def to_json(self) -> dict:
        return {
            "c": self.const_dlog,
            "factors": [
                {"var": self.field.vars[j], "root": a.to_json(), "exp": e}
                for (j, a, e) in self.factors
            ],
        }

    def __repr__(self):
        return f"<{self.text()} in {self.field.text()}>"


def _gpow_text(k: int) -> str:
    if k == 0:
        return "1"
    return "g" if k == 1 else f"g^{k}"


def _build_unit(field: TowerField, const_dlog: int, raw_factors) -> UnitElem:
    m = field.base.order - 1
    merged: dict[tuple[int, int], list] = {}
    for j, a, e in raw_factors:
        key = (j, _root_key(a))
        if key in merged:
            merged[key][2] += e
        else:
            merged[key] = [j, a, e]
    factors = tuple(
        (j, a, e) for (j, a, e) in (tuple(v) for _, v in sorted(merged.items())) if e != 0
    )
    return UnitElem(field, const_dlog % m, factors)


@dataclass(frozen=True, slots=True)
class Place:
    """A rational place of the outermost variable: t = a, or t = infinity."""

    root: FqElem | None

    @classmethod
    def finite(cls, root: FqElem) -> "Place":
        return cls(root)

    @classmethod
    def at_infinity(cls) -> "Place":
        return cls(None)

    @property
    def is_infinity(self) -> bool:
        return self.root is None

    def text(self, field: TowerField) -> str:
        if self.is_infinity:
            return f"{field.top_var}=inf"
        return f"{field.top_var}={self.root.text()}"

    def json_key(self) -> str:
        if self.is_infinity:
            return "inf"
        return "a=zero" if self.root.is_zero else f"a={self.root.dlog}"

    def sort_key(self) -> int:
        return -2 if self.is_infinity else _root_key(self.root)


def uniformizer(field: TowerField, place: Place) -> UnitElem:
    """The canonical local parameter: t - a at finite places, 1/t at infinity."""
    if field.num_vars == 0:
        raise EngineError("finite field has no places")
    if place.is_infinity:
        return field.unit_linear(field.top_var, field.base.zero) ** -1
    return field.unit_linear(field.top_var, place.root)


def valuation(u: UnitElem, place: Place) -> int:
    """Order of vanishing of u at a rational place of the top variable."""
    field = u.field
    if field.num_vars == 0:
        raise EngineError("valuation needs at least one tower variable")
    m = field.num_vars - 1
    if place.is_infinity:
        return -u.top_degree()
    key = _root_key(place.root)
    for j, a, e in u.factors:
        if j == m and _root_key(a) == key:
            return e
    return 0


def residue_unit(u: UnitElem, place: Place) -> UnitElem:
    """Evaluate u * pi^(-v(u)) at the place; lands in G of the dropped tower.

    Closure under this map is what the root restriction buys: every
    surviving linear factor evaluates to a nonzero constant.
    """
    field = u.field
    if field.num_vars == 0:
        raise EngineError("residue_unit needs at least one tower variable")
    m = field.num_vars - 1
    small = field.drop_top()
    const = u.const_dlog
    inner = []
    for j, a, e in u.factors:
        if j != m:
            inner.append((j, a, e))
        elif not place.is_infinity and _root_key(a) != _root_key(place.root):
            # (t - a) evaluates to root - a, a unit of the base field
            const += e * (place.root - a).dlog
        # factors at the place itself are the stripped pi-powers;
        # at infinity every (t - a)/t tends to 1
    return _build_unit(small, const, inner)


def one_minus(u: UnitElem) -> UnitElem | None:
    """1 - u when it stays inside G, else None.

    Defined for constants and single linear factors c*(t_j - a) with
    exponent one; everything else leaves the factored subgroup.
    """
    if u.is_one:
        raise NotAUnitError("1 - u vanishes for u = 1")
    field = u.field
    if u.is_constant:
        c = field.base.one - u.constant()
        return None if c.is_zero else field.unit_const(c)
    if len(u.factors) == 1 and u.factors[0][2] == 1:
        j, a, _ = u.factors[0]
        c = field.base.exp(u.const_dlog)
        # 1 - c*(t-a) = -c * (t - (a + 1/c))
        shifted = a + c.inverse()
        return field.unit_const(-c) * field.unit_linear(field.vars[j], shifted)
    return None
