"""Divided powers, operation specs, Stiefel-Whitney classes, move fuzzing.

A divided power consumes a Presentation, never a bare chain: the defining
formula depends on how an element is written as an ordered sum of
symbols, and whether that dependence vanishes is precisely what the
regime machinery and the property suite decide.  Coefficients expand
through products of (coefficient * symbol) over index subsets, so a term
listed once with coefficient 2 is not the same presentation as the same
symbol listed twice.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb, factorial

from .errors import EngineError, FieldMismatchError, SideConditionError
from .kchain import KChain, Symbol, equal, inject, is_zero, symbol_chain
from .tower import TowerField, UnitElem, make_tower, one_minus

REGIMES = ("always", "odd-p-even-i", "sqrt-minus-one", "char-2-even-i", "none")


@dataclass(frozen=True, slots=True)
class Presentation:
    """An ordered list of (coefficient, symbol) pairs of one degree."""

    field: TowerField
    degree: int
    terms: tuple[tuple[int, Symbol], ...]

    def __post_init__(self):
        for _, s in self.terms:
            if s.degree != self.degree:
                raise EngineError("presentation terms must share one degree")
            for u in s.entries:
                if u.field != self.field:
                    raise FieldMismatchError("presentation entry from another tower")

    def image(self) -> KChain:
        """Forget the ordering: the chain this presentation presents."""
        out = KChain.zero(self.field, self.degree)
        for c, s in self.terms:
            out = out + KChain(self.field, self.degree, {s: c})
        return out

    def text(self) -> str:
        def one(c, s):
            mag = "" if abs(c) == 1 else f"{abs(c)} "
            return ("-" if c < 0 else "") + mag + s.text()

        return "[" + "; ".join(one(c, s) for c, s in self.terms) + "]"

    def __len__(self):
        return len(self.terms)


def presentation(field: TowerField, chains) -> Presentation:
    """Build a presentation from chains/(coeff, entries) pairs, in order."""
    terms = []
    degree = None
    for item in chains:
        if isinstance(item, KChain):
            pairs = [(c, s) for s, c in item.sorted_terms()]
        else:
            coeff, entries = item
            pairs = [(coeff, Symbol(tuple(entries)))]
        for c, s in pairs:
            if degree is None:
                degree = s.degree
            terms.append((c, s))
    if degree is None:
        raise EngineError("empty presentation needs an explicit degree")
    return Presentation(field, degree, tuple(terms))


def chain_presentation(x: KChain) -> Presentation:
    """The canonical presentation of a chain: terms in sorted order."""
    return Presentation(x.field, x.degree, tuple((c, s) for s, c in x.sorted_terms()))


def empty_presentation(field: TowerField, degree: int) -> Presentation:
    return Presentation(field, degree, ())


def divided_power(n: int, pres: Presentation) -> KChain:
    """Sum over n-subsets of listed terms of the product (c_l * s_l)...

    Degree multiplies by n; n = 0 gives the ring unit and n = 1 the
    presented chain itself.
    """
    if n < 0:
        raise EngineError("divided power index must be >= 0")
    if n == 0:
        return KChain.unit(pres.field)
    out: dict[Symbol, int] = {}
    for subset in combinations(range(len(pres.terms)), n):
        coeff = 1
        entries: tuple[UnitElem, ...] = ()
        for idx in subset:
            c, s = pres.terms[idx]
            coeff *= c
            entries = entries + s.entries
        sym = Symbol(entries)
        out[sym] = out.get(sym, 0) + coeff
    return KChain(pres.field, n * pres.degree, out)


def regime(source_degree: int, field: TowerField) -> str:
    """Where the naive divided powers (n >= 2) are well-defined.

    Degrees 0 and 1 are unconditional.  Otherwise: odd modulus needs the
    source degree even; modulus 2 needs -1 a square in the constants;
    integral coefficients need characteristic 2 and even source degree.
    """
    if source_degree <= 1:
        return "always"
    mode = field.mode
    if mode is None:
        if field.base.char == 2 and source_degree % 2 == 0:
            return "char-2-even-i"
        return "none"
    if mode == 2:
        if field.base.is_square(field.base.minus_one()):
            return "sqrt-minus-one"
        return "none"
    return "odd-p-even-i" if source_degree % 2 == 0 else "none"


def minus_one_twist(i: int, y: KChain) -> KChain:
    """Multiply by i-1 copies of {-1}; the identity map for i = 1."""
    field = y.field
    tw = KChain.unit(field)
    mone = KChain.of(field, [field.minus_one_unit()])
    for _ in range(max(i - 1, 0)):
        tw = tw * mone
    return tw * y


def in_twist_kernel(i: int, y: KChain) -> bool:
    return is_zero(minus_one_twist(i, y))


def is_two_torsion(y: KChain) -> bool:
    return is_zero(y.scale(2))


def weak_divided_power(y: KChain, n: int, pres: Presentation) -> KChain:
    """inject(y) * divided_power(n, pres) after checking the side condition.

    The coefficient y lives over a prefix tower of the presentation's.
    Mod 2 the condition is membership in the twist kernel; integrally it
    is the twist kernel for even source degree and additionally
    2-torsion for odd source degree.  Violations raise with the failing
    condition named.
    """
    i = pres.degree
    mode = pres.field.mode
    if y.field.mode != mode:
        raise FieldMismatchError("coefficient and presentation disagree on modulus mode")
    if n < 2:
        raise EngineError("weak divided powers start at n = 2; use divided_power")
    if mode == 2:
        if not in_twist_kernel(i, y):
            raise SideConditionError(f"y is not in ker(tau_{i}) mod 2")
    elif mode is None:
        if not in_twist_kernel(i, y):
            raise SideConditionError(f"y is not in ker(tau_{i})")
        if i % 2 == 1 and not is_two_torsion(y):
            raise SideConditionError("y is not 2-torsion (odd source degree, integral mode)")
    else:
        if i % 2 == 1:
            raise SideConditionError(
                "odd source degree with an odd modulus admits no n >= 2 coefficients"
            )
    return inject(y, pres.field) * divided_power(n, pres)


@dataclass(frozen=True, slots=True)
class OperationSpec:
    """A candidate operation sum_r y_r * gamma_r with y_r over a base tower."""

    field: TowerField
    source_degree: int
    coeffs: tuple[tuple[int, KChain], ...]  # (r, y_r), r ascending, y_r nonzero syntactically

    @staticmethod
    def build(field: TowerField, source_degree: int, coeffs: dict[int, KChain]) -> "OperationSpec":
        items = []
        for r, y in sorted(coeffs.items()):
            if r < 0:
                raise EngineError("coefficient index must be >= 0")
            if y.field != field:
                raise FieldMismatchError("coefficient over the wrong base tower")
            if not y.is_syntactically_zero:
                items.append((r, y))
        return OperationSpec(field, source_degree, tuple(items))

    def coeff(self, r: int) -> KChain | None:
        for k, y in self.coeffs:
            if k == r:
                return y
        return None

    def to_json(self) -> dict:
        return {
            "i": self.source_degree,
            "mode": "integral" if self.field.mode is None else self.field.mode,
            "field": self.field.json_header(),
            "coeffs": {str(r): y.text() for r, y in self.coeffs},
        }


def validate_operation_spec(spec: OperationSpec) -> list[str]:
    """Regime constraints on the r >= 2 coefficients; empty list means ok."""
    violations = []
    i = spec.source_degree
    mode = spec.field.mode
    target = None
    for r, y in spec.coeffs:
        if is_zero(y):
            continue
        t = y.degree + r * i
        if target is None:
            target = t
        elif t != target:
            violations.append(f"y_{r} lands in degree {t}, expected {target}")
        if r < 2:
            continue
        if i <= 1:
            violations.append(f"y_{r} must vanish: source degree {i} admits only gamma_0, gamma_1")
        elif mode is None:
            if not in_twist_kernel(i, y):
                violations.append(f"y_{r} not in ker tau_{i}")
            elif i % 2 == 1 and not is_two_torsion(y):
                violations.append(f"y_{r} not 2-torsion (odd source degree, integral mode)")
        elif mode == 2:
            if not in_twist_kernel(i, y):
                violations.append(f"y_{r} not in ker tau_{i}")
        else:
            if i % 2 == 1:
                violations.append(f"y_{r} must vanish: odd source degree with odd modulus")
    return violations


def evaluate_operation(spec: OperationSpec, pres: Presentation) -> KChain:
    """sum_r inject(y_r) * divided_power(r, pres); target degree must be uniform."""
    if pres.degree != spec.source_degree:
        raise EngineError("presentation degree does not match the operation's source degree")
    violations = validate_operation_spec(spec)
    if violations:
        raise SideConditionError("; ".join(violations))
    target = None
    out = None
    for r, y in spec.coeffs:
        part = inject(y, pres.field) * divided_power(r, pres)
        if out is None:
            out = part
            target = part.degree
        else:
            if part.degree != target:
                raise EngineError("operation coefficients land in mixed degrees")
            out = out + part
    return out if out is not None else KChain.zero(pres.field, 0)


def additivity_check(spec: OperationSpec, rng=None, cases: int = 6, extra_vars: int = 0) -> bool:
    """Whether evaluate(spec, x || y) = evaluate(spec, x) + evaluate(spec, y).

    Always probes the empty split (detects y_0) and the disjoint-variable
    witness that separates every higher divided power; optional random
    cases sharpen the verdict when an rng is supplied.
    """
    i = spec.source_degree
    r_max = max((r for r, _ in spec.coeffs), default=0)
    want = max(2 * max(r_max, 1) * i, i) + extra_vars
    fresh_names = []
    k = 0
    while len(fresh_names) < want:
        name = f"x{k}"
        if name not in spec.field.vars:
            fresh_names.append(name)
        k += 1
    names = tuple(spec.field.vars) + tuple(fresh_names)
    big = make_tower(spec.field.base, names, "integral" if spec.field.mode is None else spec.field.mode)

    def pres_of(symbols):
        return Presentation(big, i, tuple((1, s) for s in symbols))

    def split_ok(x: Presentation, y: Presentation) -> bool:
        joint = Presentation(big, i, x.terms + y.terms)
        lhs = evaluate_operation(spec, joint)
        rhs = evaluate_operation(spec, x) + evaluate_operation(spec, y)
        return equal(lhs, rhs)

    # empty split: phi(0) = phi(0) + phi(0)
    if not split_ok(empty_presentation(big, i), empty_presentation(big, i)):
        return False
    # disjoint-variable witness, r_max symbols on each side
    fresh = [big.unit_linear(n, 0) for n in names[spec.field.num_vars :]]
    blocks = [Symbol(tuple(fresh[k * i : (k + 1) * i])) for k in range(len(fresh) // i)]
    half = max(r_max, 1)
    if len(blocks) >= 2 * half:
        if not split_ok(pres_of(blocks[:half]), pres_of(blocks[half : 2 * half])):
            return False
    if rng is not None:
        for _ in range(cases):
            k1, k2 = rng.integers(0, 2, size=2) + 1
            picks = [blocks[int(rng.integers(0, len(blocks)))] for _ in range(int(k1 + k2))]
            if not split_ok(pres_of(picks[:k1]), pres_of(picks[k1:])):
                return False
    return True


# --- Stiefel-Whitney classes of diagonal quadratic forms ---


@dataclass(frozen=True, slots=True)
class DiagonalForm:
    """<a_1, ..., a_r> with nonzero entries over a mod-2 tower, char != 2."""

    field: TowerField
    entries: tuple[UnitElem, ...]

    def __post_init__(self):
        if self.field.base.char == 2:
            raise EngineError("quadratic form invariants need characteristic != 2")
        if self.field.mode != 2:
            raise EngineError("Stiefel-Whitney classes live in mod-2 K-theory")
        for u in self.entries:
            if u.field != self.field:
                raise FieldMismatchError("diagonal entry from another tower")

    @property
    def rank(self) -> int:
        return len(self.entries)


def sw_classes(form: DiagonalForm) -> list[KChain]:
    """[w_0, ..., w_rank] by direct expansion of prod (1 + {a_k})."""
    out = [KChain.zero(form.field, k) for k in range(form.rank + 1)]
    out[0] = KChain.unit(form.field)
    for subset_size in range(1, form.rank + 1):
        terms: dict[Symbol, int] = {}
        for subset in combinations(range(form.rank), subset_size):
            sym = Symbol(tuple(form.entries[i] for i in subset))
            terms[sym] = terms.get(sym, 0) + 1
        out[subset_size] = KChain(form.field, subset_size, terms)
    return out


def sw_class(form: DiagonalForm, k: int) -> KChain:
    if k < 0:
        raise EngineError("class index must be >= 0")
    if k > form.rank:
        return KChain.zero(form.field, k)
    return sw_classes(form)[k]


def sw_identities_check(form: DiagonalForm) -> dict[str, bool]:
    """Milnor/Becher identities at normal-form level.

    The binary-product identity holds over any base; the divided-power
    identities additionally need -1 to be a square in the constants and
    use the expanded presentation of w_2.
    """
    w = sw_classes(form)

    def wk(k):
        return w[k] if k <= form.rank else KChain.zero(form.field, k)

    report: dict[str, bool] = {}
    if form.rank >= 3:
        report["w1*w2=w3"] = equal(w[1] * w[2], w[3])
    for n in range(2, form.rank + 1):
        bits = [i for i in range(n.bit_length()) if n >> i & 1]
        if len(bits) < 2:
            continue
        prod = None
        for i in bits:
            prod = wk(2**i) if prod is None else prod * wk(2**i)
        report[f"w{n}=prod w_2^i"] = equal(wk(n), prod)
    if form.field.base.is_square(form.field.base.minus_one()):
        w2_pres = chain_presentation(w[2]) if form.rank >= 2 else empty_presentation(form.field, 2)
        for n in range(1, form.rank // 2 + 1):
            report[f"w{2 * n}=gamma_{n}(w2)"] = equal(wk(2 * n), divided_power(n, w2_pres))
            if 2 * n + 1 <= form.rank:
                report[f"w{2 * n + 1}=w1*gamma_{n}(w2)"] = equal(
                    wk(2 * n + 1), w[1] * divided_power(n, w2_pres)
                )
    return report


# --- presentation moves (the class-preserving fuzzer) ---


def _split_unit(u: UnitElem, rng) -> tuple[UnitElem, UnitElem] | None:
    """A random factorization u = u1 * u2 inside G, if u has any content."""
    field = u.field
    choices = []
    if u.factors:
        choices.append("factor")
    if u.const_dlog:
        choices.append("const")
    if not choices:
        return None
    kind = choices[int(rng.integers(0, len(choices)))]
    if kind == "factor":
        j, a, e = u.factors[int(rng.integers(0, len(u.factors)))]
        part = field.unit_linear(field.vars[j], a)
        take = 1 if e > 0 else -1
        u1 = part**take
    else:
        k = int(rng.integers(1, u.const_dlog + 1))
        u1 = field.unit_const(field.base.exp(k))
    return u1, u * u1**-1


def presentation_moves(
    pres: Presentation, rng, moves: int = 10, max_terms: int = 8
) -> tuple[Presentation, tuple[str, ...]]:
    """Apply class-preserving rewrites; asserts the image class is unchanged.

    Moves: bilinear entry split, adjacent entry swap with a sign flip,
    insertion of a cancelling +/- symbol pair, multiplication of an entry
    by a p-th power (mod-p mode only), and insertion of a Steinberg
    symbol {u, 1-u} padded to the presentation degree.
    """
    field = pres.field
    base = field.base
    terms = list(pres.terms)
    trace = []

    def rand_entry():
        u = field.unit_const(base.exp(int(rng.integers(0, base.order - 1))))
        if field.num_vars and rng.integers(0, 4):
            var = field.vars[int(rng.integers(0, field.num_vars))]
            root = base.zero if rng.integers(0, base.order) == 0 else base.exp(int(rng.integers(0, base.order - 1)))
            u = u * field.unit_linear(var, root)
        return u

    for _ in range(moves):
        options = ["swap", "swap", "cancel-pair", "steinberg"]
        if len(terms) < max_terms:
            options.append("split")
        if field.mode is not None:
            options.append("p-th-power")
        if len(terms) > 2 and terms[-2][1] == terms[-1][1] and terms[-2][0] == -terms[-1][0]:
            options.append("drop-pair")
        move = options[int(rng.integers(0, len(options)))]
        if move == "swap" and terms:
            ti = int(rng.integers(0, len(terms)))
            c, s = terms[ti]
            if s.degree >= 2:
                ei = int(rng.integers(0, s.degree - 1))
                ent = list(s.entries)
                ent[ei], ent[ei + 1] = ent[ei + 1], ent[ei]
                terms[ti] = (-c, Symbol(tuple(ent)))
                trace.append(f"swap entries {ei},{ei + 1} of term {ti}")
        elif move == "split" and terms:
            ti = int(rng.integers(0, len(terms)))
            c, s = terms[ti]
            ei = int(rng.integers(0, s.degree)) if s.degree else 0
            if s.degree:
                split = _split_unit(s.entries[ei], rng)
                if split is not None:
                    u1, u2 = split
                    if not u1.is_one and not u2.is_one:
                        e1 = list(s.entries)
                        e2 = list(s.entries)
                        e1[ei], e2[ei] = u1, u2
                        terms[ti : ti + 1] = [(c, Symbol(tuple(e1))), (c, Symbol(tuple(e2)))]
                        trace.append(f"split entry {ei} of term {ti}")
        elif move == "cancel-pair" and len(terms) < max_terms:
            c = int(rng.integers(1, 3))
            s = Symbol(tuple(rand_entry() for _ in range(pres.degree)))
            pos = int(rng.integers(0, len(terms) + 1))
            terms[pos:pos] = [(c, s), (-c, s)]
            trace.append(f"insert cancelling pair at {pos}")
        elif move == "drop-pair":
            del terms[-2:]
            trace.append("drop cancelling tail pair")
        elif move == "p-th-power" and terms:
            ti = int(rng.integers(0, len(terms)))
            c, s = terms[ti]
            if s.degree:
                ei = int(rng.integers(0, s.degree))
                ent = list(s.entries)
                ent[ei] = ent[ei] * rand_entry() ** field.mode
                terms[ti] = (c, Symbol(tuple(ent)))
                trace.append(f"multiply entry {ei} of term {ti} by a p-th power")
        elif move == "steinberg" and pres.degree >= 2 and len(terms) < max_terms:
            u = rand_entry()
            if u.is_one:
                continue
            v = one_minus(u)
            if v is None:
                continue
            pad = tuple(rand_entry() for _ in range(pres.degree - 2))
            s = Symbol((u, v) + pad)
            terms.append((int(rng.integers(1, 3)) * (1 if rng.integers(0, 2) else -1), s))
            trace.append("insert Steinberg symbol")
    moved = Presentation(field, pres.degree, tuple(terms))
    if not equal(pres.image(), moved.image()):  # pragma: no cover - moves are class-safe
        raise EngineError("presentation move broke the class; trace: " + "; ".join(trace))
    return moved, tuple(trace)


def length_upper_bound(pres: Presentation) -> int:
    """Number of listed terms; scaling a symbol keeps it a symbol."""
    return len(pres.terms)


def vanishing_check(field: TowerField, degree: int, rng, cases: int = 50) -> bool:
    """Random degree-n chains over a finite field normalize to zero."""
    if field.num_vars:
        raise EngineError("vanishing check applies to finite fields (no variables)")
    if degree < 2:
        raise EngineError("vanishing starts in degree 2")
    base = field.base
    for _ in range(cases):
        entries = [
            field.unit_const(base.exp(int(rng.integers(0, base.order - 1))))
            for _ in range(degree)
        ]
        chain = symbol_chain(field, entries, int(rng.integers(1, 5)))
        if not is_zero(chain):
            return False
    return True


def independence_witness(field: TowerField, i: int, r: int) -> Presentation:
    """r disjoint-variable symbols of degree i: gamma_r is nonzero on it,
    gamma_s for s > r is empty."""
    if field.num_vars < i * r:
        raise EngineError(f"need at least {i * r} variables, field has {field.num_vars}")
    blocks = [
        Symbol(tuple(field.unit_linear(field.vars[k * i + j], 0) for j in range(i)))
        for k in range(r)
    ]
    return Presentation(field, i, tuple((1, s) for s in blocks))


def composition_coefficient(n: int, m: int) -> int:
    """(nm)! / (m! * n!^m), computed exactly before any reduction."""
    num = factorial(n * m)
    den = factorial(m) * factorial(n) ** m
    assert num % den == 0
    return num // den


def binomial(a: int, b: int) -> int:
    return comb(a, b)
