"""Exact symbol calculus in Milnor K-theory of finite fields and
iterated rational function fields, with a complete normal-form equality
test, divided-power operations and a seeded property-law suite."""

from .errors import (
    EngineError,
    FieldMismatchError,
    NotAUnitError,
    ParseError,
    SideConditionError,
)
from .gf import FqElem, FqField, make_field
from .kchain import (
    KChain,
    LeafK0,
    LeafK1,
    LeafZero,
    NormalForm,
    SplitNode,
    Symbol,
    equal,
    inject,
    is_zero,
    nf_add,
    nf_text,
    normal_form,
    residue,
    specialize,
    specialize_at_infinity,
    support,
    symbol_chain,
)
from .operations import (
    DiagonalForm,
    OperationSpec,
    Presentation,
    additivity_check,
    chain_presentation,
    divided_power,
    evaluate_operation,
    in_twist_kernel,
    independence_witness,
    is_two_torsion,
    length_upper_bound,
    minus_one_twist,
    presentation,
    presentation_moves,
    regime,
    sw_class,
    sw_classes,
    sw_identities_check,
    validate_operation_spec,
    vanishing_check,
    weak_divided_power,
)
from .tower import (
    Place,
    TowerField,
    UnitElem,
    make_tower,
    one_minus,
    residue_unit,
    uniformizer,
    valuation,
)

__version__ = "0.1.0"
