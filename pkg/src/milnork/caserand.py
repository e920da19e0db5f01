"""Seeded case generation for the property suite and the test harness.

The PRNG is PCG64 behind numpy's Generator, seeded through SeedSequence
with the entropy tuple (suite seed, law index, case index), so every
case is reproducible in isolation and reports are byte-stable per seed.
"""

from __future__ import annotations

import numpy as np

from .gf import FqElem, FqField
from .kchain import KChain, Symbol, symbol_chain
from .operations import Presentation
from .tower import TowerField, UnitElem


def make_rng(*entropy: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(list(entropy))))


def rand_int(rng, lo: int, hi: int) -> int:
    """Uniform integer in [lo, hi] inclusive."""
    return int(rng.integers(lo, hi + 1))


def rand_fq_unit(rng, base: FqField) -> FqElem:
    return base.exp(rand_int(rng, 0, base.order - 2))


def rand_coeff(rng) -> int:
    return int(rng.choice([-2, -1, 1, 1, 2]))


def rand_unit(rng, field: TowerField, max_factors: int = 2, exp_hi: int = 2) -> UnitElem:
    """A random element of G with small exponents; never one on request."""
    u = field.unit_const(rand_fq_unit(rng, field.base))
    for _ in range(rand_int(rng, 0, max_factors)):
        var = field.vars[rand_int(rng, 0, field.num_vars - 1)]
        root = field.base.elem([rand_int(rng, 0, field.base.char - 1)]) if field.base.degree == 1 else (
            field.base.zero if rng.integers(0, 4) == 0 else rand_fq_unit(rng, field.base)
        )
        e = 0
        while e == 0:
            e = rand_int(rng, -exp_hi, exp_hi)
        u = u * field.unit_linear(var, root) ** e
    return u


def rand_linear_unit(rng, field: TowerField) -> UnitElem:
    var = field.vars[rand_int(rng, 0, field.num_vars - 1)]
    root = (
        field.base.elem([rand_int(rng, 0, field.base.char - 1)])
        if field.base.degree == 1
        else rand_fq_unit(rng, field.base)
    )
    return field.unit_const(rand_fq_unit(rng, field.base)) * field.unit_linear(var, root)


def rand_symbol(rng, field: TowerField, degree: int, max_factors: int = 1) -> Symbol:
    return Symbol(tuple(rand_unit(rng, field, max_factors) for _ in range(degree)))


def rand_presentation(
    rng, field: TowerField, degree: int, nterms: int, max_factors: int = 1
) -> Presentation:
    terms = tuple(
        (rand_coeff(rng), rand_symbol(rng, field, degree, max_factors)) for _ in range(nterms)
    )
    return Presentation(field, degree, terms)


def rand_chain(rng, field: TowerField, degree: int, nterms: int, max_factors: int = 1) -> KChain:
    out = KChain.zero(field, degree)
    for _ in range(nterms):
        out = out + symbol_chain(
            field, [rand_unit(rng, field, max_factors) for _ in range(degree)], rand_coeff(rng)
        )
    return out
