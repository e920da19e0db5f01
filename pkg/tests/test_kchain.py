"""Chains, residues, specializations and the normal-form equality test."""

from __future__ import annotations

import random

import pytest

from milnork.errors import EngineError, FieldMismatchError
from milnork.gf import make_field
from milnork.kchain import (
    KChain,
    LeafK0,
    LeafK1,
    LeafZero,
    SplitNode,
    equal,
    inject,
    is_zero,
    nf_add,
    normal_form,
    residue,
    specialize,
    specialize_at_infinity,
    support,
    symbol_chain,
)
from milnork.tower import Place, make_tower, uniformizer, valuation

F5 = make_field(5)
F7 = make_field(7)


def tower(base, names, mode="integral"):
    return make_tower(base, names, mode)


def units(tw, *specs):
    """Shorthand: int -> constant, str -> bare variable, (var, root[, exp])."""
    out = []
    for s in specs:
        if isinstance(s, int):
            out.append(tw.unit_const(s))
        elif isinstance(s, str):
            out.append(tw.unit_linear(s, 0))
        else:
            var, root, *exp = s
            u = tw.unit_linear(var, root)
            out.append(u ** exp[0] if exp else u)
    return out


def sym(tw, *specs, coeff=1):
    return symbol_chain(tw, units(tw, *specs), coeff)


# --- linear structure and products ---


def test_chain_linear_algebra():
    tw = tower(F5, ["t"])
    t = sym(tw, "t")
    assert (t - t).is_syntactically_zero
    two = sym(tw, "t") + sym(tw, ("t", 1))
    assert len(two.terms) == 2
    with pytest.raises(EngineError):
        t + sym(tw, "t", coeff=1) * sym(tw, "t")


def test_product_examples():
    tw = tower(F5, ["t", "u"])
    t, u, v = sym(tw, "t"), sym(tw, "u"), sym(tw, ("u", 1))
    tu = t * u
    assert list(tu.terms) == [next(iter(sym(tw, "t", "u").terms))]
    assert equal(KChain.unit(tw) * t, t)
    lhs = (t + u) * v
    rhs = sym(tw, "t", ("u", 1)) + sym(tw, "u", ("u", 1))
    assert lhs.terms == rhs.terms


def test_field_mismatch_errors():
    t5, t7 = tower(F5, ["t"]), tower(F7, ["t"])
    with pytest.raises(FieldMismatchError):
        sym(t5, "t") * sym(t7, "t")
    with pytest.raises(FieldMismatchError):
        equal(sym(t5, "t"), sym(t7, "t"))
    assert not equal(sym(t5, "t"), sym(t5, ("t", 1)))
    with pytest.raises(FieldMismatchError):
        equal(sym(t5, "t"), sym(tower(F5, ["t"], 2), "t"))


# --- residue map ---


def test_residue_frozen_examples():
    tw = tower(F5, ["t"])
    # d_{t=0}{t, t-2} = {-2 evaluated} = {g^3}
    r = residue(sym(tw, "t", ("t", 2)), Place.finite(F5.zero))
    assert len(r.terms) == 1
    ((s, c),) = r.terms.items()
    assert c == 1 and s.entries[0].const_dlog == 3
    # d_{t=0}{t} = 1 in K_0
    r0 = residue(sym(tw, "t"), Place.finite(F5.zero))
    assert r0.degree == 0 and sum(r0.terms.values()) == 1
    # d_{t=1}{t, -(t-1)} = 0
    minus = tw.unit_const(F5.minus_one()) * tw.unit_linear("t", 1)
    r1 = residue(KChain.of(tw, [tw.unit_linear("t", 0), minus]), Place.finite(F5.elem([1])))
    assert r1.is_syntactically_zero


def test_residue_errors():
    tw = tower(F5, ["t"])
    with pytest.raises(EngineError):
        residue(KChain.unit(tw), Place.finite(F5.zero))
    with pytest.raises(EngineError):
        residue(KChain.of(tower(F5, []), [tower(F5, []).unit_const(2)]), Place.finite(F5.zero))


def eval_unit_at_place(u, place) -> int:
    """Independent evaluation of a place-unit: returns its dlog in GF(q)."""
    base = u.field.base
    m = u.field.num_vars - 1
    acc = u.const_dlog
    for j, a, e in u.factors:
        assert j == m, "oracle only handles one-variable towers"
        if place.is_infinity:
            continue  # (t-a)/t contributes 1 at infinity per monic normalisation
        acc += e * (place.root - a).dlog
    return acc % (base.order - 1)


def tame_symbol(f, g, place) -> int | None:
    """Independent degree-2 oracle: dlog of (-1)^(vf*vg) g^vf / f^vg at the place.

    Returns None when the value is 1 (zero symbol).
    """
    vf, vg = valuation(f, place), valuation(g, place)
    h = g**vf / f**vg
    base = f.field.base
    sign_dlog = base.minus_one().dlog if (vf * vg) % 2 else 0
    d = (eval_unit_at_place(h, place) + sign_dlog) % (base.order - 1)
    return None if d == 0 else d


@pytest.mark.parametrize("q", [5, 7])
def test_residue_degree2_matches_tame_symbol_oracle(q):
    base = make_field(q)
    tw = tower(base, ["t"])
    rng = random.Random(q)
    places = [Place.finite(x) for x in base.elements()] + [Place.at_infinity()]

    def rand_unit():
        u = tw.unit_const(base.exp(rng.randrange(q - 1)))
        for _ in range(rng.randrange(3)):
            u = u * tw.unit_linear("t", base.elem([rng.randrange(q)])) ** rng.choice([-1, 1, 2])
        return u

    for _ in range(120):
        f, g = rand_unit(), rand_unit()
        chain = KChain.of(tw, [f, g])
        for pl in places:
            got = residue(chain, pl)
            want = tame_symbol(f, g, pl)
            nf = normal_form(got)
            if want is None:
                assert nf.is_zero()
            else:
                assert isinstance(nf, LeafK1) and nf.value == want % nf.modulus


# --- specialization maps ---


def test_specialize_examples():
    tw = tower(F5, ["t"])
    t0 = Place.finite(F5.zero)
    pi = uniformizer(tw, t0)
    # s_t({t*c}) = {c}
    tc = KChain.of(tw, [tw.unit_linear("t", 0) * tw.unit_const(3)])
    assert equal(specialize(tc, t0, pi), KChain.of(tower(F5, []), [tower(F5, []).unit_const(3)]))
    # units specialize to their residue
    tw2 = tower(F5, ["u", "t"])
    u = KChain.of(tw2, [tw2.unit_linear("u", 2)])
    spec = specialize(u, Place.finite(F5.zero), uniformizer(tw2, Place.finite(F5.zero)))
    assert equal(spec, KChain.of(tw2.drop_top(), [tw2.drop_top().unit_linear("u", 2)]))
    # degree 0 is fixed
    three = KChain(tw, 0, {next(iter(KChain.unit(tw).terms)): 3})
    assert specialize(three, t0, pi).terms == {next(iter(KChain.unit(tw).terms)): 3}


def test_specialize_requires_valuation_one():
    tw = tower(F5, ["t"])
    with pytest.raises(EngineError):
        specialize(sym(tw, "t"), Place.finite(F5.zero), tw.unit_linear("t", 0) ** 2)


def test_infinity_examples():
    tw = tower(F5, ["t"])
    assert is_zero(specialize_at_infinity(sym(tw, "t")))
    c = sym(tw, 3)
    assert equal(specialize_at_infinity(c), sym(tower(F5, []), 3))
    minus = tw.unit_const(F5.minus_one()) * tw.unit_linear("t", 1)
    st = KChain.of(tw, [tw.unit_linear("t", 0), minus])
    assert is_zero(specialize_at_infinity(st))


def test_inject_and_exactness():
    small = tower(F5, ["t"])
    big = tower(F5, ["t", "u"])
    rng = random.Random(1)
    for _ in range(50):
        b = sym(small, ("t", rng.randrange(5)), ("t", rng.randrange(5)))
        x = inject(b, big)
        for a in F5.elements():
            assert residue(x, Place.finite(a)).is_syntactically_zero
        assert equal(specialize_at_infinity(x), b)
    with pytest.raises(FieldMismatchError):
        inject(sym(big, "t"), small)


# --- normal forms ---


def test_normal_form_frozen_structures():
    tw = tower(F5, ["t"])
    nf = normal_form(sym(tw, "t"))
    assert isinstance(nf, SplitNode)
    assert nf.base == LeafK1(0, 4)
    assert len(nf.residues) == 1
    key, root, sub = nf.residues[0]
    assert root.is_zero and sub == LeafK0(1, 0)
    assert nf.to_json() == {"base": {"K1": 0}, "residues": {"a=zero": {"K0": 1}}}


def test_normal_form_steinberg_and_degree3():
    tw = tower(F5, ["t"])
    minus = tw.unit_const(F5.minus_one()) * tw.unit_linear("t", 1)
    assert is_zero(KChain.of(tw, [tw.unit_linear("t", 0), minus]))
    rng = random.Random(5)
    for _ in range(20):
        entries = [
            tw.unit_const(F5.exp(rng.randrange(4))) * tw.unit_linear("t", rng.randrange(5))
            for _ in range(3)
        ]
        assert is_zero(KChain.of(tw, entries))  # K_3 of GF(5)(t) vanishes


def test_mod2_minus_one_split():
    t5 = tower(F5, [], 2)
    t7 = tower(F7, [], 2)
    assert is_zero(KChain.of(t5, [t5.minus_one_unit()]))
    assert not is_zero(KChain.of(t7, [t7.minus_one_unit()]))


def test_anticommutativity_and_square_rule():
    rng = random.Random(9)
    for base in (F5, F7):
        tw = tower(base, ["t", "u"])
        for _ in range(60):
            x = tw.unit_const(base.exp(rng.randrange(base.order - 1))) * tw.unit_linear(
                rng.choice(tw.vars), base.elem([rng.randrange(base.char)])
            )
            y = tw.unit_linear(rng.choice(tw.vars), base.elem([rng.randrange(base.char)]))
            assert equal(KChain.of(tw, [x, y]), -KChain.of(tw, [y, x]))
            assert equal(KChain.of(tw, [x, x]), KChain.of(tw, [x, tw.minus_one_unit()]))


def test_scaling_normalizes_mod_p():
    tw = tower(F5, ["t", "u"], 2)
    x = sym(tw, "t", "u", coeff=3)
    assert equal(x, sym(tw, "t", "u"))


def test_degree_one_leaf_soundness_exhaustive():
    for q_args, p in [((2,), 2), ((3,), 2), ((5,), 2), ((5,), 3), ((7,), 2), ((7,), 3)]:
        base = make_field(*q_args)
        q1 = base.order - 1
        from math import gcd

        m = gcd(p, q1)
        tw = tower(base, [], p)
        for i in range(q1):
            for j in range(q1):
                xs = KChain.of(tw, [tw.unit_const(base.exp(i))])
                ys = KChain.of(tw, [tw.unit_const(base.exp(j))])
                assert equal(xs, ys) == ((i - j) % m == 0)


def test_nf_additivity_random():
    tw = tower(F5, ["t", "u"], 2)
    rng = random.Random(13)
    for _ in range(40):
        x = sym(tw, ("t", rng.randrange(5)), ("u", rng.randrange(5)), coeff=rng.choice([-2, 1]))
        y = sym(tw, ("u", rng.randrange(5)), ("t", rng.randrange(5)), coeff=rng.choice([1, 3]))
        assert nf_add(normal_form(x), normal_form(y)) == normal_form(x + y)


def test_support_examples():
    tw = tower(F5, ["t"])
    sup = support(sym(tw, "t"))
    assert len(sup) == 1 and sup[0].root.is_zero
    big = tower(F5, ["t", "u"])
    assert support(inject(sym(tower(F5, ["t"]), "t", ("t", 1)), big)) == ()
    sup2 = support(sym(big, "t", "u"))
    assert len(sup2) == 1 and sup2[0].root.is_zero


def test_trivial_entry_is_killed_by_nf():
    tw = tower(F5, ["t"])
    assert is_zero(KChain.of(tw, [tw.unit_linear("t", 0), tw.one()]))


def test_uniformizer_change_formula():
    """s_{PQ}(x) = s_P(x) - s_P({Q}) * d_P(x), exactly, plus the sign-slip check:
    the variant with {-Q} differs from the truth by exactly {-1} * d_P(x)."""
    rng = random.Random(17)
    for base in (F5, F7):
        for mode in ("integral", 2):
            tw = tower(base, ["u", "t"], mode)
            small = tw.drop_top()
            for _ in range(40):
                a = base.elem([rng.randrange(base.char)])
                P = Place.finite(a)
                piP = uniformizer(tw, P)
                # random chain of degree 2
                def ru():
                    u = tw.unit_const(base.exp(rng.randrange(base.order - 1)))
                    for _ in range(rng.randrange(2)):
                        u = u * tw.unit_linear(rng.choice(tw.vars), base.elem([rng.randrange(base.char)]))
                    return u

                x = KChain.of(tw, [ru(), ru()]) + KChain.of(tw, [ru(), ru()], coeff=-1)
                # P-unit Q: adjust any valuation away
                Q = ru()
                v = valuation(Q, P)
                if v:
                    Q = Q * piP**-v
                if Q.is_one:
                    Q = tw.unit_const(base.generator)
                lhs = specialize(x, P, piP * Q)
                sP = specialize(x, P, piP)
                dP = residue(x, P)
                sPQ = specialize(KChain.of(tw, [Q]), P, piP)
                assert equal(lhs, sP - sPQ * dP)
                # literal printed form with {-Q}: off by {-1} * d_P(x)
                sPmQ = specialize(KChain.of(tw, [tw.minus_one_unit() * Q]), P, piP)
                minus_one = KChain.of(small, [small.minus_one_unit()])
                assert equal(sP - sPmQ * dP, lhs - minus_one * dP)


def test_residue_is_bilinear_in_entries():
    tw = tower(F5, ["t"])
    rng = random.Random(21)
    for _ in range(40):
        u = tw.unit_linear("t", rng.randrange(5)) * tw.unit_const(F5.exp(rng.randrange(4)))
        w = tw.unit_linear("t", rng.randrange(5))
        z = tw.unit_linear("t", rng.randrange(5))
        combined = KChain.of(tw, [u * w, z])
        split = KChain.of(tw, [u, z]) + KChain.of(tw, [w, z])
        for a in F5.elements():
            d = residue(combined - split, Place.finite(a))
            assert is_zero(d)


def test_nf_is_insensitive_to_term_insertion_order():
    tw = tower(F5, ["t", "u"], 2)
    rng = random.Random(29)
    parts = [
        sym(tw, ("t", rng.randrange(5)), ("u", rng.randrange(5)), coeff=rng.choice([1, -1, 2]))
        for _ in range(6)
    ]
    fwd = parts[0]
    for p in parts[1:]:
        fwd = fwd + p
    rev = parts[-1]
    for p in reversed(parts[:-1]):
        rev = rev + p
    assert normal_form(fwd) == normal_form(rev)


def test_nf_json_and_text_render():
    from milnork.kchain import nf_text

    tw = tower(F5, ["t"])
    nf = normal_form(sym(tw, "t"))
    assert "K0: 1" in nf_text(nf, tw)
    assert normal_form(KChain.zero(tw, 2)).is_zero()
    assert normal_form(KChain.zero(tower(F5, []), 2)) == LeafZero()
