"""Finite groups: homomorphisms, hom groupoids, global nerves, cells and fixed points."""
from itertools import product

import numpy as np
import pytest

from globcat.corpus import named_group
from globcat.errors import SizeLimitExceeded
from globcat.fincat import (
    classifying_category,
    cyclic_group,
    direct_product,
    functor_category,
    idempotent_monoid,
    is_poset,
    simplex_category,
    symmetric_group,
    terminal_category,
    translation_groupoid,
    trivial_monoid,
)
from globcat.homology import category_homology, homology, pi0
from globcat.orbit import (
    abelianization_invariants,
    conjugate_hom,
    conjugation,
    enumerate_homs,
    fixed_point_equivalences,
    gamma_cell,
    generating_cell,
    global_nerve_value,
    hom_groupoid,
    iso_to_fun,
    restriction,
    structure_report,
)
from globcat.simplicial import boundary, nerve, standard_simplex

C1, C2, C3, C4, C6 = trivial_monoid(), cyclic_group(2), cyclic_group(3), cyclic_group(4), cyclic_group(6)
S3 = symmetric_group(3)
T = terminal_category()
BC2 = classifying_category(C2)


# -- oracles ----------------------------------------------------------------------------------

def brute_homs(K, G):
    """Every map of underlying sets that preserves multiplication."""
    out = []
    for img in product(range(G.order), repeat=K.order):
        a = np.array(img)
        if np.array_equal(a[K.mult], G.mult[a[:, None], a[None, :]]):
            out.append(tuple(img))
    return sorted(out)


def brute_classes(K, G):
    homs = brute_homs(K, G)
    seen, classes = set(), []
    for a in homs:
        if a in seen:
            continue
        cls = set()
        for g in range(G.order):
            ginv = [x for x in range(G.order) if G.mult[g, x] == G.unit][0]
            cls.add(tuple(int(G.mult[G.mult[g, x], ginv]) for x in a))
        seen |= cls
        classes.append(sorted(cls))
    return classes


def brute_abelianization_order(G, subset):
    """|H / [H, H]| for the subgroup H on ``subset``, by closing commutators under products."""
    H = list(subset)
    inv = {x: [y for y in range(G.order) if G.mult[x, y] == G.unit][0] for x in H}
    comm = {int(G.mult[G.mult[x, y], G.mult[inv[x], inv[y]]]) for x in H for y in H}
    closure = set(comm) | {G.unit}
    while True:
        new = {int(G.mult[a, b]) for a in closure for b in closure} | closure
        if new == closure:
            break
        closure = new
    return len(H) // len(closure)


def centralizer(G, image):
    return [g for g in range(G.order) if all(G.mult[g, x] == G.mult[x, g] for x in image)]


GROUPS = [C1, C2, C3, C4, C6, S3]


# -- homomorphisms -------------------------------------------------------------------------

@pytest.mark.parametrize("K", GROUPS, ids=lambda g: g.name)
@pytest.mark.parametrize("G", GROUPS, ids=lambda g: g.name)
def test_enumerate_homs_matches_brute_force(K, G):
    assert enumerate_homs(K, G) == brute_homs(K, G)


def test_hom_counts():
    assert len(enumerate_homs(C2, C2)) == 2
    assert len(enumerate_homs(C2, C3)) == 1
    for G in GROUPS:
        assert len(enumerate_homs(C1, G)) == 1
    assert len(enumerate_homs(C2, S3)) == 4
    assert len(enumerate_homs(S3, S3)) == 10


def test_hom_limits():
    with pytest.raises(SizeLimitExceeded):
        enumerate_homs(C2, S3, limit=2)
    with pytest.raises(SizeLimitExceeded):
        enumerate_homs(C2, S3, max_order=4)


def test_conjugate_hom():
    alpha = enumerate_homs(C2, S3)[1]
    images = {conjugate_hom(S3, g, alpha) for g in range(6)}
    assert len(images) == 3


# -- abelianization ------------------------------------------------------------------------

@pytest.mark.parametrize(
    "G,expected",
    [(C1, []), (C2, [2]), (C6, [6]), (S3, [2]), (direct_product(C2, C4), [2, 4]), (direct_product(C2, C2), [2, 2])],
    ids=lambda v: getattr(v, "name", str(v)),
)
def test_abelianization_invariants(G, expected):
    assert abelianization_invariants(G) == expected


@pytest.mark.parametrize("G", GROUPS + [symmetric_group(4), direct_product(C2, C4)], ids=lambda g: g.name)
def test_abelianization_matches_homology_and_brute_force(G):
    inv = abelianization_invariants(G)
    assert (int(np.prod(inv)) if inv else 1) == brute_abelianization_order(G, range(G.order))
    if G.order <= 8:
        assert category_homology(classifying_category(G), 1).torsion[1] == inv


# -- hom groupoids --------------------------------------------------------------------------

@pytest.mark.parametrize("K", [C1, C2, C3, C4, C6, S3], ids=lambda g: g.name)
@pytest.mark.parametrize("G", [C1, C2, C3, C4, C6, S3], ids=lambda g: g.name)
def test_structure_report(K, G):
    rep = structure_report(K, G)
    assert rep.ok, rep.checks
    classes = brute_classes(K, G)
    assert rep.pi0 == len(classes)
    assert sorted(c.members for c in rep.classes) == sorted(classes)
    for c in rep.classes:
        cent = centralizer(G, set(c.representative))
        assert c.centralizer == cent
        order = int(np.prod(c.abelianization)) if c.abelianization else 1
        assert order == brute_abelianization_order(G, cent)


def test_c2_c2_groupoid():
    hg = hom_groupoid(C2, C2)
    C = hg.category
    assert (C.n_objects, C.n_morphisms) == (2, 4)
    rep = structure_report(C2, C2)
    assert rep.pi0 == 2 and all(len(c.automorphisms) == 2 for c in rep.classes)
    F = iso_to_fun(C2, C2)
    assert (F.codomain.n_objects, F.codomain.n_morphisms) == (2, 4)


def test_c2_s3_centralizers():
    rep = structure_report(C2, S3)
    sizes = sorted(len(c.centralizer) for c in rep.classes)
    assert sizes == [2, 6]
    assert sorted(len(c.members) for c in rep.classes) == [1, 3]


def test_trivial_source_has_vertex_group_g():
    rep = structure_report(C1, S3)
    assert rep.pi0 == 1 and len(rep.classes[0].automorphisms) == 6


def test_groupoid_morphisms_invertible():
    C = hom_groupoid(C2, S3).category
    for f in range(C.n_morphisms):
        back = [g for g in C.hom(C.tgt[f], C.src[f]).tolist() if C.comp[g, f] == C.identity[C.src[f]]]
        assert back


def test_report_to_dict():
    d = structure_report(C2, S3).to_dict()
    assert d["pi0"] == 2 and d["homomorphisms"] == 4
    assert all(v for v in d["checks"].values())


@pytest.mark.parametrize("K,G", [(C1, C1), (C2, C2), (C2, S3), (C3, C6)], ids=["C1-C1", "C2-C2", "C2-S3", "C3-C6"])
def test_iso_to_fun(K, G):
    F = iso_to_fun(K, G)
    assert F.is_isomorphism()
    assert F.codomain.n_objects == len(brute_homs(K, G))


def test_iso_to_fun_composition_compatibility():
    F = iso_to_fun(C2, C2)
    A, B = F.domain, F.codomain
    for g in range(A.n_morphisms):
        for f in range(A.n_morphisms):
            if A.comp[g, f] >= 0:
                assert F.mor_map[A.comp[g, f]] == B.comp[F.mor_map[g], F.mor_map[f]]


# -- global nerve ---------------------------------------------------------------------------

def test_global_nerve_of_terminal_is_a_point():
    for G in [C2, C3, S3]:
        v = global_nerve_value(T, G, 2)
        assert v.value.counts() == [1, 1, 1]


@pytest.mark.parametrize("K,G", [(C2, C2), (C2, C3), (C3, C6), (C2, S3), (S3, C2)], ids=["C2-C2", "C2-C3", "C3-C6", "C2-S3", "S3-C2"])
def test_global_nerve_of_bk_is_nerve_of_hom_groupoid(K, G):
    v = global_nerve_value(classifying_category(K), G, 2)
    N = nerve(hom_groupoid(G, K).category, 2)
    assert v.value.counts() == N.counts()
    assert v.value.nondegenerate_counts() == N.nondegenerate_counts()
    assert pi0(v.value)[0] == pi0(N)[0]


def test_fun_bc2_ec2_is_contractible():
    EC2, _ = translation_groupoid(C2)
    v = global_nerve_value(EC2, C2, 3)
    assert homology(v.value, 2).groups() == ["Z", "0", "0"]
    from globcat.fincat import check_equivalence, constant_functor

    assert check_equivalence(constant_functor(v.functor_category, T, 0))


@pytest.mark.parametrize("C", [BC2, classifying_category(C3), classifying_category(idempotent_monoid()), simplex_category(1)], ids=lambda c: c.name)
def test_restriction_is_strictly_functorial(C):
    # K = C2 -> G = C6 -> L = C6 (via x -> 5x), composable chain of homomorphisms
    FL = functor_category(classifying_category(C6), C)
    FG = functor_category(classifying_category(C6), C)
    FK = functor_category(classifying_category(C2), C)
    for alpha in enumerate_homs(C2, C6):
        for beta in enumerate_homs(C6, C6):
            ba = tuple(beta[a] for a in alpha)
            lhs = restriction(FL, FK, ba)
            rhs = restriction(FL, FG, beta).then(restriction(FG, FK, alpha))
            assert lhs == rhs


@pytest.mark.parametrize("C", [BC2, classifying_category(S3), simplex_category(1)], ids=lambda c: c.name)
def test_conjugations_compose_by_the_group_law(C):
    G, K = S3, C2
    FG = functor_category(classifying_category(G), C)
    FK = functor_category(classifying_category(K), C)
    for alpha in enumerate_homs(K, G):
        for g in range(G.order):
            for h in range(G.order):
                lh = conjugation(FG, FK, G, alpha, h)
                lg = conjugation(FG, FK, G, conjugate_hom(G, h, alpha), g)
                lgh = conjugation(FG, FK, G, alpha, int(G.mult[g, h]))
                comp = FK.comp[lg.components, lh.components]
                assert np.array_equal(comp, lgh.components)


def test_global_nerve_value_attaches_restrictions():
    v = global_nerve_value(BC2, C2, 2, restrict_to=[C1, C2])
    assert set(k[0] for k in v.restrictions) == {C1.name, C2.name}
    assert len(v.conjugations) == 2 * (1 + 2)
    for key, nat in v.conjugations.items():
        nat.validate()


# -- cells and Gamma ----------------------------------------------------------------------------

def test_generating_cells():
    cell, cert = generating_cell(0, C2)
    assert cell.domain.n_objects == 0 and cell.codomain.n_objects == 1
    cell, cert = generating_cell(1, C1)
    assert cell.codomain.n_objects == 5 and is_poset(cell.codomain)
    assert cell.domain.n_objects == 2
    cell, cert = generating_cell(2, C1)
    assert cell.domain.n_objects == 12
    with pytest.raises(SizeLimitExceeded):
        generating_cell(3, C1)


@pytest.mark.parametrize("n", [0, 1, 2])
@pytest.mark.parametrize("G", [C1, C2], ids=lambda g: g.name)
def test_generating_cells_recertify(n, G):
    from globcat.dwyer import check_dwyer, verify_certificate

    cell, cert = generating_cell(n, G)
    assert verify_certificate(cert)[0]
    assert check_dwyer(cell)
    assert is_poset(generating_cell(n, C1)[0].codomain)


def test_gamma_cell():
    assert gamma_cell(standard_simplex(0), BC2).n_morphisms == 2
    P = gamma_cell(standard_simplex(1), T)
    assert P.n_objects == 5 and is_poset(P)
    two = gamma_cell(boundary(1)[0], BC2)
    assert two.n_objects == 2 and two.hom_counts().tolist() == [[2, 0], [0, 2]]


# -- fixed points -------------------------------------------------------------------------------

@pytest.mark.parametrize("G,H", [("C2", [0, 1]), ("C2", [0]), ("C4", [0, 2])])
@pytest.mark.parametrize("C", [BC2, T, simplex_category(1)], ids=lambda c: c.name)
def test_fixed_point_chain(G, H, C):
    chain = fixed_point_equivalences(named_group(G), H, C)
    assert chain, chain.verdicts


def test_fixed_point_endpoint_size():
    chain = fixed_point_equivalences(C2, [0, 1], BC2)
    assert chain.evaluation.codomain.n_objects == 2


def test_fixed_point_terminal():
    chain = fixed_point_equivalences(C2, [0, 1], T)
    assert chain.fixed.n_objects == 1


def test_non_subgroup_rejected():
    from globcat.errors import GlobcatError

    with pytest.raises(GlobcatError):
        fixed_point_equivalences(C4, [0, 1], T)
