"""Complexes of groups, the associated category, reconstruction and Grothendieck constructions."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from globcat.cgroups import (
    CatDiagram,
    ComplexOfGroups,
    associated_category,
    check_conditions,
    complex_from_dict,
    constant_diagram,
    default_choices,
    fun_grothendieck_comparison,
    grothendieck,
    point_complex,
    random_choices,
    reconstruct_complex,
    simple_complex,
    simple_complex_diagram,
    validate_complex,
)
from globcat.corpus import all_posets, complex_corpus, diamond, parallel_pair, random_simple_complex, vee, wedge
from globcat.errors import (
    CocycleViolation,
    ComplexViolation,
    ConditionsFailed,
    GlobcatError,
    InvalidCategory,
    LaxFunctorialityViolation,
    NotStronglyConnected,
    UnitalityViolation,
)
from globcat.fincat import (
    FinFunctor,
    classifying_category,
    cyclic_group,
    idempotent_monoid,
    opposite_category,
    simplex_category,
    symmetric_group,
    terminal_category,
    trivial_monoid,
)

C1, C2, C3, C4 = trivial_monoid(), cyclic_group(2), cyclic_group(3), cyclic_group(4)
S3 = symmetric_group(3)
BC2 = classifying_category(C2)
T = terminal_category()
p1, p2, p3 = simplex_category(1), simplex_category(2), simplex_category(3)
CORPUS = complex_corpus()


# -- oracles ------------------------------------------------------------------------------------

def brute_associative(C):
    for h in range(C.n_morphisms):
        for g in range(C.n_morphisms):
            if C.comp[h, g] < 0:
                continue
            for f in range(C.n_morphisms):
                if C.comp[g, f] < 0:
                    continue
                if C.comp[C.comp[h, g], f] != C.comp[h, C.comp[g, f]]:
                    return False
    return True


def brute_axioms_hold(cg):
    """Lax functoriality and the cocycle identity, evaluated element by element."""
    G, T_, t = cg.local, cg.transition, cg.twist
    for x, y, z in cg.chains(3):
        Gz = G[z]
        inv = [u for u in range(Gz.order) if Gz.mult[t[(x, y, z)], u] == Gz.unit][0]
        for a in range(G[x].order):
            lhs = Gz.mult[Gz.mult[t[(x, y, z)], T_[(x, z)][a]], inv]
            if lhs != T_[(y, z)][T_[(x, y)][a]]:
                return False
    for w, x, y, z in cg.chains(4):
        Gz = G[z]
        if Gz.mult[t[(x, y, z)], t[(w, x, z)]] != Gz.mult[T_[(y, z)][t[(w, x, y)]], t[(w, y, z)]]:
            return False
    return True


def p3_c2_complex(twist=None):
    ident = [0, 1]
    trans = {(x, y): ident for x in range(4) for y in range(x + 1, 4)}
    return ComplexOfGroups(p3, [C2] * 4, trans, twist or {}, name="p3-C2")


# -- validation -----------------------------------------------------------------------------------

def test_simple_and_point_complexes_validate():
    simple_complex(p1, [C2, C2], {(0, 1): [0, 1]})
    point_complex(S3)
    assert point_complex(C2).is_simple()


def test_twisted_complex_validates():
    name, cg = [c for c in CORPUS if c[0] == "twisted-p2-C2"][0]
    assert not cg.is_simple()
    assert brute_associative(associated_category(cg))


def test_mutated_twist_breaks_cocycle():
    p3_c2_complex()
    with pytest.raises(CocycleViolation) as exc:
        p3_c2_complex({(0, 1, 2): 1})
    assert exc.value.args


def test_unitality_violations():
    with pytest.raises(UnitalityViolation):
        ComplexOfGroups(p1, [C2, C2], {(0, 1): [0, 1]}, {(0, 0, 1): 1})
    with pytest.raises(UnitalityViolation):
        # inversion on C3 is a homomorphism but not the identity
        ComplexOfGroups(p1, [C3, C3], {(0, 0): [0, 2, 1], (0, 1): [0, 1, 2]})


def test_non_homomorphism_transition():
    with pytest.raises(ComplexViolation):
        simple_complex(p1, [C2, C3], {(0, 1): [0, 1]})


def test_lax_functoriality_violation():
    # over p[2] with S3 on top: composite of transitions differs from the long transition
    t = [a for a in range(6) if S3.element_orders()[a] == 2]
    trans = {(0, 1): [0, 1], (1, 2): [0, t[0]], (0, 2): [0, t[1]]}
    with pytest.raises(LaxFunctorialityViolation):
        ComplexOfGroups(p2, [C2, C2, S3], trans)
    # the right twist conjugating t[1] to t[0] repairs it
    g = [g for g in range(6) if S3.conj(g, [t[1]])[0] == t[0]][0]
    ComplexOfGroups(p2, [C2, C2, S3], trans, {(0, 1, 2): g})


def test_rejects_non_poset_base():
    with pytest.raises(InvalidCategory):
        ComplexOfGroups(BC2, [C2], {})


def test_dict_round_trip_over_corpus():
    for name, cg in CORPUS:
        again = complex_from_dict(cg.to_dict())
        assert again.to_dict() == cg.to_dict(), name
        assert validate_complex(cg.to_dict()).is_simple() == cg.is_simple()
    with pytest.raises(GlobcatError):
        complex_from_dict({"poset": {"elements": ["0"]}})


@settings(max_examples=30)
@given(st.sampled_from(CORPUS), st.data())
def test_mutate_and_check(named, data):
    _, cg = named
    chains = [c for c in cg.chains(3) if c[0] != c[1] and c[1] != c[2]]
    if not chains:
        return
    c = data.draw(st.sampled_from(chains))
    g = data.draw(st.integers(0, cg.local[c[2]].order - 1))
    twist = dict(cg.twist)
    twist[c] = g
    mutated = ComplexOfGroups(cg.P, cg.local, cg.transition, twist, check=False)
    expect_ok = brute_axioms_hold(mutated)
    try:
        mutated.validate()
        ok = True
    except (LaxFunctorialityViolation, CocycleViolation):
        ok = False
    assert ok == expect_ok


# -- associated category -------------------------------------------------------------------------

def test_point_complex_gives_bg():
    C = associated_category(point_complex(S3))
    assert C.n_objects == 1 and C.n_morphisms == 6


def test_simple_p1_c2_hom_counts():
    C = associated_category(simple_complex(p1, [C2, C2], {(0, 1): [0, 1]}))
    assert C.hom_counts().tolist() == [[2, 2], [0, 2]]


@pytest.mark.parametrize("name,cg", CORPUS, ids=[c[0] for c in CORPUS])
def test_associated_category_is_associative_and_passes_conditions(name, cg):
    C = associated_category(cg)
    assert brute_associative(C)
    assert check_conditions(C, "plain")
    assert check_conditions(opposite_category(C), "opposite")


# -- conditions --------------------------------------------------------------------------------

def test_posets_pass_both_variants():
    for P in [p1, p2, vee(), wedge(), diamond()] + all_posets(3):
        assert check_conditions(P, "plain") and check_conditions(P, "opposite")


def test_parallel_pair_fails_b():
    rep = check_conditions(parallel_pair(), "plain")
    assert not rep and {v["condition"] for v in rep.violations} == {"b"}
    assert rep.to_dict()["ok"] is False


def test_condition_a_violation():
    from globcat.fincat import translation_groupoid

    EC2, _ = translation_groupoid(C2)
    rep = check_conditions(EC2)
    assert any(v["condition"] == "a" for v in rep.violations)


def test_idempotent_fails_b():
    assert not check_conditions(classifying_category(idempotent_monoid()))


def test_non_injective_transition_lint():
    rep = check_conditions(associated_category(simple_complex(p1, [C2, C1], {(0, 1): [0, 0]})))
    assert rep and rep.non_free_pairs == [["0", "1"]]


def test_unknown_variant():
    with pytest.raises(ValueError):
        check_conditions(p1, "sideways")


# -- reconstruction --------------------------------------------------------------------------

def test_reconstruct_bg():
    cg, kappa = reconstruct_complex(BC2)
    assert cg.P.n_objects == 1 and cg.local[0].order == 2
    assert kappa.is_isomorphism() and np.array_equal(kappa.mor_map, np.arange(2))


@pytest.mark.parametrize("name,cg", CORPUS, ids=[c[0] for c in CORPUS])
def test_unit_choice_round_trip_is_exact(name, cg):
    C = associated_category(cg)
    back, kappa = reconstruct_complex(C)
    assert back == cg
    assert np.array_equal(kappa.mor_map, np.arange(C.n_morphisms))


@pytest.mark.parametrize("name,cg", CORPUS, ids=[c[0] for c in CORPUS])
def test_random_choices_give_isomorphic_kappa(name, cg):
    C = associated_category(cg)
    for seed in range(10):
        back, kappa = reconstruct_complex(C, random_choices(C, seed))
        assert kappa.is_isomorphism()
        back.validate()


def test_reconstruction_on_opposite():
    for name, cg in CORPUS[:8]:
        Cop = opposite_category(associated_category(cg))
        assert check_conditions(Cop, "opposite")
        _, kappa = reconstruct_complex(opposite_category(Cop))
        assert kappa.is_isomorphism()


def test_reconstruction_rejects_bad_input():
    with pytest.raises(ConditionsFailed):
        reconstruct_complex(parallel_pair())
    C = associated_category(simple_complex(p1, [C2, C2], {(0, 1): [0, 1]}))
    choices = default_choices(C)
    choices[(0, 0)] = C.mor_index["0->0|1"]
    with pytest.raises(GlobcatError):
        reconstruct_complex(C, choices)


@settings(max_examples=20)
@given(st.sampled_from(all_posets(3) + [diamond(), p3]), st.integers(0, 10_000))
def test_random_simple_complexes_round_trip(P, seed):
    cg = random_simple_complex(P, seed)
    back, _ = reconstruct_complex(associated_category(cg))
    assert back == cg


# -- Grothendieck constructions -----------------------------------------------------------------

def test_grothendieck_constant_terminal_is_base():
    for K in [p2, BC2, vee()]:
        G = grothendieck(constant_diagram(K, T))
        assert (G.n_objects, G.n_morphisms) == (K.n_objects, K.n_morphisms)


def test_grothendieck_over_terminal_is_fibre():
    G = grothendieck(constant_diagram(T, vee()))
    assert (G.n_objects, G.n_morphisms) == (3, 5)


def test_grothendieck_p1_bc2():
    G = grothendieck(constant_diagram(p1, BC2))
    assert G.hom_counts().tolist() == [[2, 2], [0, 2]]


def test_grothendieck_of_simple_complex_equals_associated_category():
    for name, cg in CORPUS:
        if not cg.is_simple():
            continue
        A = associated_category(cg)
        G = grothendieck(simple_complex_diagram(cg))
        assert G.n_objects == A.n_objects and G.n_morphisms == A.n_morphisms, name
        assert np.array_equal(G.src, A.src) and np.array_equal(G.tgt, A.tgt), name
        assert np.array_equal(G.comp, A.comp), name


def test_twisted_complex_is_not_a_strict_diagram():
    _, cg = [c for c in CORPUS if c[0] == "twisted-p2-C2"][0]
    with pytest.raises(GlobcatError):
        simple_complex_diagram(cg)


def test_non_functorial_diagram_rejected():
    swap = FinFunctor(BC2, BC2, [0], [0, 1])
    with pytest.raises(GlobcatError):
        CatDiagram(p1, [BC2, T], [swap, swap, FinFunctor(T, T, [0], [0])])


def test_comparison_over_poset_is_isomorphism():
    for I in [T, BC2]:
        cmp = fun_grothendieck_comparison(I, constant_diagram(p1, BC2))
        assert cmp and cmp.base_is_poset


def test_comparison_over_terminal_is_isomorphism():
    assert fun_grothendieck_comparison(BC2, constant_diagram(T, BC2))


def test_comparison_over_bc2_is_not_isomorphism():
    cmp = fun_grothendieck_comparison(BC2, constant_diagram(BC2, BC2))
    assert not cmp and not cmp.base_is_poset
    assert cmp.to_dict()["object_counts"] == [2, 4]
    assert cmp.homology.kind == "Distinguished" and cmp.homology.degree == 0


def test_comparison_requires_strong_connectivity():
    with pytest.raises(NotStronglyConnected):
        fun_grothendieck_comparison(p1, constant_diagram(p1, BC2))


@pytest.mark.parametrize("name,cg", [c for c in CORPUS if c[1].is_simple()][:10], ids=lambda v: v if isinstance(v, str) else "")
def test_comparison_for_simple_complexes(name, cg):
    assert fun_grothendieck_comparison(BC2, simple_complex_diagram(cg))
