"""Exact arithmetic in small finite fields with table-based discrete logs.

A field GF(p^d) is built deterministically: the modulus is the
lexicographically smallest monic irreducible polynomial of degree d
(coefficients compared from the constant term up) and the generator is
the first element, in the same coefficient order, whose multiplicative
order is exactly q-1.  Power and dlog tables are materialised once at
construction; q is capped so the tables stay small and every unit
operation afterwards is a table lookup.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product as _cartesian
from typing import Iterator

from .errors import EngineError, FieldMismatchError, NotAUnitError

#: Largest field order the engine accepts (tables stay well under a MiB).
MAX_ORDER = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n, ascending."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return out


# --- dense polynomial helpers over F_p (little-endian coefficient tuples) ---


def _ptrim(c: list[int]) -> tuple[int, ...]:
    n = len(c)
    while n > 1 and c[n - 1] == 0:
        n -= 1
    return tuple(c[:n])


def _pdeg(a: tuple[int, ...]) -> int:
    return len(a) - 1 if any(a) else -1


def _pmod(a: tuple[int, ...], f: tuple[int, ...], p: int) -> tuple[int, ...]:
    # f monic
    r = list(a)
    df = len(f) - 1
    for i in range(len(r) - 1, df - 1, -1):
        c = r[i] % p
        if c:
            for j in range(df + 1):
                r[i - df + j] = (r[i - df + j] - c * f[j]) % p
    return _ptrim([x % p for x in r[:df]] or [0])


def _pmul(a: tuple[int, ...], b: tuple[int, ...], p: int) -> tuple[int, ...]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _ptrim(out)


def _pmulmod(a, b, f, p):
    return _pmod(_pmul(a, b, p), f, p)


def _ppowmod(a: tuple[int, ...], e: int, f: tuple[int, ...], p: int) -> tuple[int, ...]:
    result = (1,)
    base = _pmod(a, f, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, f, p)
        base = _pmulmod(base, base, f, p)
        e >>= 1
    return result


def _pgcd(a: tuple[int, ...], b: tuple[int, ...], p: int) -> tuple[int, ...]:
    while _pdeg(b) >= 0:
        lead = b[-1]
        inv = pow(lead, p - 2, p) if lead != 1 else 1
        monic = tuple((c * inv) % p for c in b)
        a, b = monic, _pmod(a, monic, p)
    return a


def _is_irreducible(f: tuple[int, ...], p: int) -> bool:
    """Rabin test for a monic polynomial f over F_p."""
    d = len(f) - 1
    if d == 1:
        return True
    x = (0, 1)
    if _ppowmod(x, p**d, f, p) != _pmod(x, f, p):
        return False
    for ell in prime_factors(d):
        g = list(_ppowmod(x, p ** (d // ell), f, p))
        while len(g) < 2:
            g.append(0)
        g[1] = (g[1] - 1) % p
        if _pdeg(_pgcd(f, _ptrim(g), p)) > 0:
            return False
    return True


def _lex_modulus(p: int, d: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree d over F_p."""
    for coeffs in _cartesian(range(p), repeat=d):
        f = coeffs + (1,)
        if _is_irreducible(f, p):
            return f
    raise EngineError(f"no irreducible polynomial of degree {d} over F_{p}")  # pragma: no cover


class FqField:
    """A finite field GF(p^d) with fixed generator and dlog table.

    Immutable after construction; two fields with equal (p, d) are
    interchangeable because modulus and generator are deterministic.
    """

    __slots__ = ("char", "degree", "order", "modulus", "_pow", "_dlog")

    def __init__(self, char: int, degree: int, max_order: int = MAX_ORDER):
        if not is_prime(char):
            raise EngineError(f"{char} is not prime")
        if degree < 1:
            raise EngineError("extension degree must be >= 1")
        order = char**degree
        if order > max_order:
            raise EngineError(f"field order {order} exceeds the budget {max_order}")
        self.char = char
        self.degree = degree
        self.order = order
        self.modulus = _lex_modulus(char, degree)
        gen = self._find_generator()
        # power table g^0 .. g^(q-2), then its inverse
        pow_table = [None] * (order - 1)
        dlog = {}
        cur = self._one_key()
        for k in range(order - 1):
            pow_table[k] = cur
            dlog[cur] = k
            cur = self._raw_mul(cur, gen)
        if cur != self._one_key():  # pragma: no cover - deterministic sanity
            raise EngineError("generator order mismatch")
        self._pow = tuple(pow_table)
        self._dlog = dlog

    # -- raw coefficient-vector arithmetic (used only during construction) --

    def _zero_key(self) -> tuple[int, ...]:
        return (0,) * self.degree

    def _one_key(self) -> tuple[int, ...]:
        return (1,) + (0,) * (self.degree - 1)

    def _raw_mul(self, a, b):
        prod = _pmod(_pmul(a, b, self.char), self.modulus, self.char)
        return tuple(prod) + (0,) * (self.degree - len(prod))

    def _raw_pow(self, a, e):
        r = self._one_key()
        while e:
            if e & 1:
                r = self._raw_mul(r, a)
            a = self._raw_mul(a, a)
            e >>= 1
        return r

    def _find_generator(self) -> tuple[int, ...]:
        target = self.order - 1
        checks = [target // ell for ell in prime_factors(target)]
        for coeffs in _cartesian(range(self.char), repeat=self.degree):
            if not any(coeffs):
                continue
            if all(self._raw_pow(coeffs, e) != self._one_key() for e in checks):
                return coeffs
        raise EngineError("no generator found")  # pragma: no cover

    # -- equality / hashing: (p, d) determines the field entirely --

    def __eq__(self, other):
        return isinstance(other, FqField) and (self.char, self.degree) == (other.char, other.degree)

    def __hash__(self):
        return hash((FqField, self.char, self.degree))

    def __repr__(self):
        return f"GF({self.char}^{self.degree})" if self.degree > 1 else f"GF({self.char})"

    # -- elements --

    @property
    def zero(self) -> "FqElem":
        return FqElem(self, self._zero_key())

    @property
    def one(self) -> "FqElem":
        return FqElem(self, self._one_key())

    @property
    def generator(self) -> "FqElem":
        return FqElem(self, self._pow[1 % (self.order - 1)] if self.order > 2 else self._pow[0])

    def elem(self, coeffs) -> "FqElem":
        c = tuple(x % self.char for x in coeffs)
        if len(c) != self.degree:
            raise EngineError(f"expected {self.degree} coefficients, got {len(c)}")
        return FqElem(self, c)

    def exp(self, k: int) -> "FqElem":
        """generator ** k (k taken mod q-1)."""
        return FqElem(self, self._pow[k % (self.order - 1)])

    def dlog(self, x: "FqElem") -> int:
        if x.field != self:
            raise FieldMismatchError("dlog of an element from another field")
        if x.is_zero:
            raise NotAUnitError("dlog(0) is undefined")
        return self._dlog[x.coeffs]

    def from_int_literal(self, c: int) -> "FqElem":
        """Resolve an integer literal; ambiguous for d > 1 except 0 and 1."""
        c = int(c)
        if self.degree == 1:
            return FqElem(self, (c % self.char,))
        if c == 0:
            return self.zero
        if c == 1:
            return self.one
        raise EngineError(
            f"integer literal {c} is ambiguous in GF({self.char}^{self.degree}); use g^k syntax"
        )

    def minus_one(self) -> "FqElem":
        return -self.one

    def is_square(self, x: "FqElem") -> bool:
        if x.is_zero:
            raise NotAUnitError("is_square(0) is undefined")
        if self.char == 2:
            return True
        return self.dlog(x) % 2 == 0

    def elements(self) -> Iterator["FqElem"]:
        for coeffs in _cartesian(range(self.char), repeat=self.degree):
            yield FqElem(self, coeffs)

    def units(self) -> Iterator["FqElem"]:
        for k in range(self.order - 1):
            yield FqElem(self, self._pow[k])

    def json_header(self) -> dict:
        return {"p": self.char, "d": self.degree, "modulus": list(self.modulus)}


@dataclass(frozen=True, slots=True)
class FqElem:
    """An element of an FqField, stored as its coefficient vector."""

    field: FqField
    coeffs: tuple[int, ...]

    def _check(self, other: "FqElem"):
        if not isinstance(other, FqElem) or other.field != self.field:
            raise FieldMismatchError("mixed-field operands")

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    @property
    def is_one(self) -> bool:
        return self.coeffs == self.field._one_key()

    @property
    def dlog(self) -> int:
        return self.field.dlog(self)

    def sort_key(self) -> int:
        """Deterministic total order: zero first, units by dlog."""
        return -1 if self.is_zero else self.field._dlog[self.coeffs]

    def __add__(self, other):
        self._check(other)
        p = self.field.char
        return FqElem(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        self._check(other)
        p = self.field.char
        return FqElem(self.field, tuple((a - b) % p for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        p = self.field.char
        return FqElem(self.field, tuple((-a) % p for a in self.coeffs))

    def __mul__(self, other):
        self._check(other)
        if self.is_zero or other.is_zero:
            return self.field.zero
        f = self.field
        return FqElem(f, f._pow[(f._dlog[self.coeffs] + f._dlog[other.coeffs]) % (f.order - 1)])

    def inverse(self) -> "FqElem":
        if self.is_zero:
            raise NotAUnitError("inverse of zero")
        f = self.field
        return FqElem(f, f._pow[(-f._dlog[self.coeffs]) % (f.order - 1)])

    def __truediv__(self, other):
        self._check(other)
        return self * other.inverse()

    def __pow__(self, e: int):
        if self.is_zero:
            if e > 0:
                return self
            if e == 0:
                return self.field.one
            raise NotAUnitError("negative power of zero")
        f = self.field
        return FqElem(f, f._pow[(f._dlog[self.coeffs] * e) % (f.order - 1)])

    def text(self) -> str:
        """Canonical constant syntax: decimal for prime fields, g^k above."""
        if self.is_zero:
            return "0"
        if self.field.degree == 1:
            return str(self.coeffs[0])
        k = self.dlog
        return "g" if k == 1 else f"g^{k}"

    def to_json(self) -> dict:
        if self.is_zero:
            return {"zero": True}
        return {"dlog": self.dlog}

    def __repr__(self):
        return f"{self.field!r}:{self.text()}"


@lru_cache(maxsize=None)
def make_field(p0: int, d: int = 1, max_order: int = MAX_ORDER) -> FqField:
    """Deterministic GF(p0^d); identical arguments share one instance."""
    return FqField(p0, d, max_order)
