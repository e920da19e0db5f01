"""Acceptance gate: every criterion exact (identically-zero differences),
at its stated case count and time budget, one printed line per criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines.
"""

from __future__ import annotations

import time
from math import gcd

from milnork import caserand as cr
from milnork.dsl import parse_field
from milnork.gf import make_field
from milnork.kchain import (
    KChain,
    Symbol,
    equal,
    inject,
    is_zero,
    residue,
    specialize,
    specialize_at_infinity,
    symbol_chain,
)
from milnork.operations import (
    DiagonalForm,
    OperationSpec,
    Presentation,
    additivity_check,
    divided_power,
    independence_witness,
    sw_identities_check,
    validate_operation_spec,
    vanishing_check,
    weak_divided_power,
)
from milnork.suite import SuiteProfile, run_suite
from milnork.tower import Place, make_tower, one_minus, uniformizer, valuation

F5 = make_field(5)
F7 = make_field(7)


class Budget:
    def __init__(self, name: str, limit_s: float):
        self.name = name
        self.limit = limit_s
        self.t0 = time.perf_counter()

    def done(self):
        elapsed = time.perf_counter() - self.t0
        verdict = "PASS" if elapsed < self.limit else "SLOW"
        print(f"ACCEPTANCE {self.name}: {verdict} ({elapsed:.2f}s < {self.limit:.0f}s)")
        assert elapsed < self.limit, f"{self.name} exceeded its {self.limit}s budget"


def test_01_steinberg_emergence():
    b = Budget("1 steinberg emergence", 10)
    total = 0
    for fi, base in enumerate((F5, F7)):
        for mi, mode in enumerate(("integral", 2, 3)):
            tw = make_tower(base, ["t", "u", "v"], mode)
            for idx in range(34):
                rng = cr.make_rng(1, fi * 3 + mi, idx)
                u = None
                while u is None:
                    cand = (
                        tw.unit_const(cr.rand_fq_unit(rng, base))
                        if rng.integers(0, 3) == 0
                        else cr.rand_linear_unit(rng, tw)
                    )
                    if cand.is_one:
                        continue
                    v = one_minus(cand)
                    if v is not None:
                        u = cand
                z = cr.rand_unit(rng, tw)
                assert is_zero(KChain.of(tw, [u, v, z])), (tw.text(), u.text())
                total += 1
    assert total >= 200
    b.done()


def test_02_commutativity_and_square_rule():
    b = Budget("2 graded commutativity and {x,x}={x,-1}", 10)
    profiles = [
        make_tower(F5, ["t", "u"], 2),
        make_tower(F7, ["t", "u"], 3),
        make_tower(F5, ["t", "u"], "integral"),
        make_tower(F7, ["t", "u"], "integral"),
    ]
    for pi, tw in enumerate(profiles):
        for idx in range(500):
            rng = cr.make_rng(2, pi, idx)
            x, y = cr.rand_unit(rng, tw), cr.rand_unit(rng, tw)
            assert equal(KChain.of(tw, [x, y]), -KChain.of(tw, [y, x]))
            assert equal(KChain.of(tw, [x, x]), KChain.of(tw, [x, tw.minus_one_unit()]))
    b.done()


def test_03_milnor_sequence_exactness():
    b = Budget("3 sequence exactness and embedding witness", 10)
    for pi, (base, mode) in enumerate(((F5, 2), (F7, 3), (F5, "integral"))):
        small = make_tower(base, ["u"], mode)
        big = make_tower(base, ["u", "t"], mode)
        count = 0
        idx = 0
        while count < 67:
            rng = cr.make_rng(3, pi, idx)
            idx += 1
            xdeg = cr.rand_int(rng, 1, 2)
            bchain = cr.rand_chain(rng, small, xdeg, cr.rand_int(rng, 1, 2))
            lifted = inject(bchain, big)
            for a in base.elements():
                assert residue(lifted, Place.finite(a)).is_syntactically_zero
            assert equal(specialize_at_infinity(lifted), bchain)
            if is_zero(bchain):
                continue
            # embedding witness d_0({t} * a) = a, and {t} * a is nonzero
            x = KChain.of(big, [big.unit_linear("t", 0)]) * lifted
            assert equal(residue(x, Place.finite(base.zero)), bchain)
            assert not is_zero(x)
            count += 1
    b.done()


def test_04_divided_power_axioms_by_regime():
    b = Budget("4 divided power axioms (six laws, three regimes)", 60)
    fields = (
        "GF(5)(t,u,v,w) mod 3",
        "GF(7)(t,u,v,w) mod 3",
        "GF(5)(t,u,v,w) mod 2",
        "GF(2)(t,u,v,w) integral",
        "GF(2^2)(t,u,v) integral",
    )
    for text in fields:
        profile = SuiteProfile("prop2.3", parse_field(text), source_degree=2, cases=200, seed=4)
        report = run_suite(profile)
        assert report["ok"], (text, report["laws"])
        for law in report["laws"]:
            assert law["status"] == "pass" and law["cases"] == 200, (text, law)
    b.done()


def test_05_presentation_invariance_under_moves():
    b = Budget("5 presentation invariance of gamma_2, gamma_3", 60)
    fields = (
        "GF(5)(t,u,v,w) mod 3",
        "GF(5)(t,u,v,w) mod 2",
        "GF(2^2)(t,u,v) integral",
    )
    for text in fields:
        profile = SuiteProfile("invariance", parse_field(text), source_degree=2, cases=70, seed=5)
        report = run_suite(profile)
        (law,) = report["laws"]
        assert law["status"] == "pass" and law["cases"] == 70, (text, law)
    b.done()


def test_06_mod2_obstruction_fixture():
    b = Budget("6 mod-2 obstruction and weak divided power fix", 1)
    tw = parse_field("GF(7)(t,u,v) mod 2")
    t, u, v = (tw.unit_linear(n, 0) for n in ("t", "u", "v"))
    p1 = Presentation(tw, 2, ((1, Symbol((t, u))), (1, Symbol((t, v)))))
    p2 = Presentation(tw, 2, ((1, Symbol((t, u * v))),))
    assert equal(p1.image(), p2.image())
    d = divided_power(2, p1) - divided_power(2, p2)
    witness = symbol_chain(tw, [tw.minus_one_unit(), t, u, v])
    assert not is_zero(d)
    assert not is_zero(witness)
    assert equal(d, witness)
    k0 = make_tower(F7, [], 2)
    y = KChain.of(k0, [k0.minus_one_unit()])
    assert equal(weak_divided_power(y, 2, p1), weak_divided_power(y, 2, p2))
    b.done()


def test_07_uniformizer_change_formula():
    b = Budget("7 uniformizer-change formula", 10)
    checked = 0
    for pi, (base, mode) in enumerate(((F5, "integral"), (F5, 2), (F7, "integral"), (F7, 2))):
        tw = make_tower(base, ["u", "t"], mode)
        small = tw.drop_top()
        for idx in range(50):
            rng = cr.make_rng(7, pi, idx)
            a = base.elem([cr.rand_int(rng, 0, base.char - 1)])
            P = Place.finite(a)
            piP = uniformizer(tw, P)
            x = cr.rand_chain(rng, tw, cr.rand_int(rng, 1, 2), cr.rand_int(rng, 1, 2))
            Q = cr.rand_unit(rng, tw)
            vq = valuation(Q, P)
            if vq:
                Q = Q * piP**-vq
            if Q.is_one:
                Q = tw.unit_const(base.generator)
            lhs = specialize(x, P, piP * Q)
            sP = specialize(x, P, piP)
            dP = residue(x, P)
            sQ = specialize(KChain.of(tw, [Q]), P, piP)
            assert equal(lhs, sP - sQ * dP)
            # the {-Q} variant differs from the truth by exactly {-1} * d_P(x)
            sMQ = specialize(KChain.of(tw, [tw.minus_one_unit() * Q]), P, piP)
            mone = KChain.of(small, [small.minus_one_unit()])
            assert equal(sP - sMQ * dP, lhs - mone * dP)
            checked += 1
    assert checked >= 200
    b.done()


def test_08_stiefel_whitney_identities():
    b = Budget("8 Stiefel-Whitney identities", 30)
    forms = 0
    for pi, base in enumerate((F5, F7)):
        names = ["a", "b", "c", "d", "e", "f"]
        tw = make_tower(base, names, 2)
        sqrt_minus_one = base.is_square(base.minus_one())
        for idx in range(50):
            rng = cr.make_rng(8, pi, idx)
            rank = cr.rand_int(rng, 2, 6)
            form = DiagonalForm(tw, tuple(cr.rand_unit(rng, tw, max_factors=1) for _ in range(rank)))
            report = sw_identities_check(form)
            assert all(report.values()), (tw.text(), report)
            if rank >= 3:
                assert "w1*w2=w3" in report
            if sqrt_minus_one and rank >= 2:
                assert "w2=gamma_1(w2)" in report
            forms += 1
    assert forms >= 100
    b.done()


PRIME_POWERS_LE_49 = [
    (2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1),
    (2, 4), (17, 1), (19, 1), (23, 1), (5, 2), (3, 3), (29, 1), (31, 1),
    (2, 5), (37, 1), (41, 1), (43, 1), (47, 1), (7, 2),
]


def steinberg_products_span(base) -> bool:
    """Independent oracle: dlog(x) * dlog(1-x) spans Z/(q-1), so K_2 = 0."""
    m = base.order - 1
    g = m
    for x in base.units():
        y = base.one - x
        if y.is_zero:
            continue
        g = gcd(g, (base.dlog(x) * base.dlog(y)) % m)
    return g == 1


def test_09_vanishing():
    b = Budget("9 finite-field and tower vanishing", 10)
    for p0, d in PRIME_POWERS_LE_49:
        base = make_field(p0, d)
        assert steinberg_products_span(base), (p0, d)
        for p in (2, 3):
            tw = make_tower(base, [], p)
            # exhaustive over degree-2 symbol generators {g^a, g^b}
            m = base.order - 1
            for a in range(m):
                for bb in range(m):
                    s = KChain.of(tw, [tw.unit_const(base.exp(a)), tw.unit_const(base.exp(bb))])
                    assert is_zero(s)
            rng = cr.make_rng(9, p0 * 100 + d, p)
            assert vanishing_check(tw, 3, rng, cases=5)
    # K_3 of GF(q)(t) mod p on random chains
    count = 0
    for pi, (base, p) in enumerate(((F5, 2), (F5, 3), (F7, 2), (F7, 3))):
        tw = make_tower(base, ["t"], p)
        for idx in range(26):
            rng = cr.make_rng(9, 50 + pi, idx)
            x = cr.rand_chain(rng, tw, 3, cr.rand_int(rng, 1, 2))
            assert is_zero(x)
            count += 1
    assert count >= 100
    b.done()


def test_10_operation_classification_corollaries():
    b = Budget("10 operation classification corollaries", 30)
    # rejection: y_2 not in ker tau_2 over GF(7) mod 2
    k7 = make_tower(F7, [], 2)
    bad = OperationSpec.build(k7, 2, {2: KChain.unit(k7)})
    msgs = validate_operation_spec(bad)
    assert msgs and "ker tau_2" in msgs[0]
    good = OperationSpec.build(k7, 2, {2: KChain.of(k7, [k7.minus_one_unit()])})
    assert validate_operation_spec(good) == []
    # rejection: y_2 != 0 for (p, i) = (3, 3)
    k7_3 = make_tower(F7, [], 3)
    odd = OperationSpec.build(k7_3, 3, {2: KChain.of(k7_3, [k7_3.unit_const(3)])})
    msgs = validate_operation_spec(odd)
    assert msgs and "odd" in msgs[0]
    # gamma_r independence witnesses over GF(5)(t1..t6) mod 3
    tw = make_tower(F5, [f"t{i}" for i in range(1, 7)], 3)
    for r in (1, 2, 3):
        pres = independence_witness(tw, 2, r)
        assert not is_zero(divided_power(r, pres))
        for s in range(r + 1, r + 3):
            assert divided_power(s, pres).is_syntactically_zero
    # additivity on the three example specs
    k0 = make_tower(F7, [], 3)
    a = KChain.of(k0, [k0.unit_const(F7.generator)])
    assert additivity_check(OperationSpec.build(k0, 2, {1: a}), cr.make_rng(10, 0))
    assert not additivity_check(OperationSpec.build(k0, 2, {0: a}), cr.make_rng(10, 1))
    assert not additivity_check(OperationSpec.build(k0, 2, {2: KChain.unit(k0)}), cr.make_rng(10, 2))
    b.done()
