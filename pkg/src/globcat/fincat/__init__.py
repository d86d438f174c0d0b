"""Finite categories, functors, functor categories and structural checks."""
from .algebra import (
    FinGroup,
    FinMonoid,
    GroupAction,
    classifying_category,
    cyclic_group,
    direct_product,
    enumerate_monoid_homs,
    fiedorowicz_monoid,
    idempotent_monoid,
    m_objects_category,
    m_objects_iso,
    monoid_from_dict,
    quotient_by_free_action,
    symmetric_group,
    translation_groupoid,
    trivial_monoid,
)
from .category import (
    FinCategory,
    FinFunctor,
    NatTransformation,
    constant_functor,
    coproduct_category,
    empty_category,
    full_subcategory,
    functor_from_dict,
    identity_functor,
    identity_nat,
    make_category,
    make_functor,
    opposite_category,
    poset_category,
    poset_from_relations,
    product_category,
    product_functor,
    simplex_category,
    subcategory,
    terminal_category,
    validate_category,
    whisker_left,
    whisker_right,
)
from .funcat import (
    FunctorCategory,
    constant_functor_map,
    enumerate_functors,
    enumerate_nat_transformations,
    evaluation_at_terminal,
    functor_category,
    postcompose,
    precompose,
)
from .structure import (
    EquivalenceVerdict,
    EquivalenceWitness,
    check_equivalence,
    identity_witness,
    is_poset,
    is_strongly_connected,
    poset_reflection,
    pseudo_inverse,
    reachability,
    validate_homotopy_witness,
    witness_from_adjunction,
    witness_from_equivalence,
)

__all__ = [
    "FinGroup",
    "FinMonoid",
    "GroupAction",
    "classifying_category",
    "cyclic_group",
    "direct_product",
    "enumerate_monoid_homs",
    "fiedorowicz_monoid",
    "idempotent_monoid",
    "m_objects_category",
    "m_objects_iso",
    "monoid_from_dict",
    "quotient_by_free_action",
    "symmetric_group",
    "translation_groupoid",
    "trivial_monoid",
    "FinCategory",
    "FinFunctor",
    "NatTransformation",
    "constant_functor",
    "coproduct_category",
    "empty_category",
    "full_subcategory",
    "functor_from_dict",
    "identity_functor",
    "identity_nat",
    "make_category",
    "make_functor",
    "opposite_category",
    "poset_category",
    "poset_from_relations",
    "product_category",
    "product_functor",
    "simplex_category",
    "subcategory",
    "terminal_category",
    "validate_category",
    "whisker_left",
    "whisker_right",
    "FunctorCategory",
    "constant_functor_map",
    "enumerate_functors",
    "enumerate_nat_transformations",
    "evaluation_at_terminal",
    "functor_category",
    "postcompose",
    "precompose",
    "EquivalenceVerdict",
    "EquivalenceWitness",
    "check_equivalence",
    "identity_witness",
    "is_poset",
    "is_strongly_connected",
    "poset_reflection",
    "pseudo_inverse",
    "reachability",
    "validate_homotopy_witness",
    "witness_from_adjunction",
    "witness_from_equivalence",
]
