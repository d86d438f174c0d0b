"""Dwyer maps: certificates, explicit pushouts, the universal property and Fun(I, -)."""
from itertools import product

import numpy as np
import pytest

from globcat.corpus import dwyer_suite, horn_square, universal_test_family, vee, wedge
from globcat.dwyer import (
    DwyerFailure,
    check_dwyer,
    dwyer_pushout,
    fun_preservation,
    induced_dwyer,
    mediator,
    nerve_pushout_comparison,
    product_dwyer,
    pushout_homology_check,
    verify_certificate,
    verify_universal_property,
)
from globcat.errors import NotStronglyConnected
from globcat.fincat import (
    FinFunctor,
    classifying_category,
    coproduct_category,
    cyclic_group,
    empty_category,
    identity_functor,
    idempotent_monoid,
    is_strongly_connected,
    simplex_category,
    terminal_category,
)
from globcat.homology import compare_maps

T = terminal_category()
BC2 = classifying_category(cyclic_group(2))
BC3 = classifying_category(cyclic_group(3))
BIdem2 = classifying_category(idempotent_monoid())
p0, p1, p2 = simplex_category(0), simplex_category(1), simplex_category(2)
SUITE = dwyer_suite()


def point(C, obj):
    return FinFunctor(T, C, [obj], [C.identity[obj]])


# -- oracle ---------------------------------------------------------------------------

def brute_functors(A, E):
    """All functors A -> E as (object map, morphism map), by trying every assignment."""
    out = []
    for om in product(range(E.n_objects), repeat=A.n_objects):
        om = np.array(om, dtype=np.int64)
        choices = [np.nonzero((E.src == om[A.src[f]]) & (E.tgt == om[A.tgt[f]]))[0] for f in range(A.n_morphisms)]
        for mm in product(*choices):
            mm = np.array(mm, dtype=np.int64)
            if np.any(mm[A.identity] != E.identity[om]):
                continue
            g, f = np.nonzero(A.comp >= 0)
            if np.all(mm[A.comp[g, f]] == E.comp[mm[g], mm[f]]):
                out.append((tuple(om.tolist()), tuple(mm.tolist())))
    return out


def brute_cocone_count(i, k, E):
    B_f = brute_functors(i.codomain, E)
    C_f = brute_functors(k.codomain, E)
    restrict_b = {}
    for om, mm in B_f:
        key = (tuple(np.array(om)[i.obj_map].tolist()), tuple(np.array(mm)[i.mor_map].tolist()))
        restrict_b[key] = restrict_b.get(key, 0) + 1
    total = 0
    for om, mm in C_f:
        key = (tuple(np.array(om)[k.obj_map].tolist()), tuple(np.array(mm)[k.mor_map].tolist()))
        total += restrict_b.get(key, 0)
    return total


# -- certificates ---------------------------------------------------------------------------

def test_d1_is_dwyer_with_w_the_whole_interval():
    cert = check_dwyer(point(p1, 0))
    assert cert and set(cert.W_objects) == {"0", "1"}
    assert cert.r.obj_map.tolist() == [0, 0]
    assert verify_certificate(cert) == (True, None)


def test_d0_fails_the_sieve_condition():
    res = check_dwyer(point(p1, 1))
    assert isinstance(res, DwyerFailure) and not res
    assert res.reason == "NotSieve" and res.detail["morphism"] == "0->1"


def test_identity_is_dwyer():
    for C in [BC2, p2, vee()]:
        cert = check_dwyer(identity_functor(C))
        assert cert and cert.W.n_objects == C.n_objects


def test_non_full_inclusion_fails():
    # the two objects of a discrete category mapped onto the ends of p[1]
    D = coproduct_category(T, T)
    res = check_dwyer(FinFunctor(D, p1, [0, 1], [p1.identity[0], p1.identity[1]]))
    assert res.reason == "NotFull"


def test_non_injective_fails():
    res = check_dwyer(FinFunctor(coproduct_category(T, T), T, [0, 0], [0, 0]))
    assert res.reason == "NotInjectiveOnObjects"


def test_sieve_without_right_adjoint():
    # in V (0 <= 2 >= 1) the sieve {0, 1} has no terminal object under 2
    from globcat.fincat import full_subcategory

    _, inc = full_subcategory(vee(), [0, 1])
    res = check_dwyer(inc)
    assert res.reason == "NoRightAdjoint" and res.detail["object"] == "2"


def test_tampered_certificate_is_rejected():
    cert = check_dwyer(identity_functor(BC2))
    assert verify_certificate(cert)[0]
    cert.r = FinFunctor(cert.W, cert.A, cert.r.obj_map, [0, 0])
    ok, reason = verify_certificate(cert)
    assert not ok and reason == "r is not the identity on A"


def test_to_dict():
    d = check_dwyer(point(p1, 0)).to_dict()
    assert d["dwyer"] and d["W"] == ["0", "1"] and d["counit"] == {"0": "0->0", "1": "0->1"}
    assert check_dwyer(point(p1, 1)).to_dict()["dwyer"] is False


def test_induced_and_product_certificates():
    cert = check_dwyer(point(p1, 0))
    for I in [T, BC2, p1, BIdem2]:
        assert induced_dwyer(cert, I)
        assert product_dwyer(cert, I)
    c_t = induced_dwyer(cert, T)
    assert c_t.W.n_objects == cert.W.n_objects and c_t.A.n_objects == cert.A.n_objects


def test_composites_recertify():
    # p[0] -> p[1] -> p[2] (bottoms)
    i1 = point(p1, 0)
    i2 = FinFunctor(p1, p2, [0, 1], [p2.mor_index["0->0"], p2.mor_index["0->1"], p2.mor_index["1->1"]])
    assert check_dwyer(i1) and check_dwyer(i2)
    assert check_dwyer(i1.then(i2))


@pytest.mark.parametrize("name,cert,k", SUITE, ids=[s[0] for s in SUITE])
def test_cobase_change_recertifies(name, cert, k):
    p = dwyer_pushout(cert, k)
    assert check_dwyer(p.j)


# -- pushouts ---------------------------------------------------------------------------

def test_empty_domain_gives_coproduct():
    E = empty_category()
    cert = check_dwyer(FinFunctor(E, p1, [], []))
    p = dwyer_pushout(cert, FinFunctor(E, BC2, [], []))
    assert p.D.n_objects == 3 and p.D.n_morphisms == BC2.n_morphisms + p1.n_morphisms
    assert p.v_objects == ("v:0", "v:1")


def test_pushout_along_identity_is_b():
    cert = check_dwyer(point(p2, 0))
    p = dwyer_pushout(cert, identity_functor(T))
    assert p.h.is_isomorphism()


def test_pushout_into_bc2():
    cert = check_dwyer(point(p1, 0))
    p = dwyer_pushout(cert, point(BC2, 0))
    D = p.D
    assert D.n_objects == 2
    assert D.hom_counts().tolist() == [[2, 2], [0, 1]]
    assert p.c_objects == ("c:*",) and p.v_objects == ("v:1",)


def test_horn_pushout_is_p2():
    _, cert, k = horn_square()
    p = dwyer_pushout(cert, k)
    assert p.D.n_objects == 3 and p.D.hom_counts().tolist() == [[1, 1, 1], [0, 1, 1], [0, 0, 1]]


@pytest.mark.parametrize("name,cert,k", SUITE, ids=[s[0] for s in SUITE])
def test_pushout_invariants(name, cert, k):
    p = dwyer_pushout(cert, k)
    D = p.D
    nC = len(p.c_objects)
    is_c = np.arange(D.n_objects) < nC
    # no morphism from V to C; C and V are full
    assert not np.any(~is_c[D.src] & is_c[D.tgt])
    assert all(kd == "c" for kd, s, t in zip(p.kind, D.src, D.tgt) if is_c[s] and is_c[t])
    assert cert.inclusion.then(p.h) == k.then(p.j)
    assert p.j.is_injective_on_objects()


def test_mediator_for_terminal():
    _, cert, k = horn_square()
    p = dwyer_pushout(cert, k)
    phi = FinFunctor(p1, T, [0, 0], [0, 0, 0])
    psi = FinFunctor(p1, T, [0, 0], [0, 0, 0])
    m = mediator(p, phi, psi)
    assert p.h.then(m) == phi


# -- universal property -----------------------------------------------------------------------

@pytest.mark.parametrize("name,cert,k", SUITE, ids=[s[0] for s in SUITE])
def test_universal_property_on_family(name, cert, k):
    p = dwyer_pushout(cert, k)
    for E in universal_test_family():
        rep = verify_universal_property(p, E)
        assert rep, (name, E.name, rep.failures[:2])
        assert rep.cocones == rep.functors_from_D


@pytest.mark.parametrize("E", [T, p2, BC2, vee(), wedge()], ids=lambda c: c.name)
def test_cocone_count_matches_brute_force(E):
    _, cert, k = horn_square()
    p = dwyer_pushout(cert, k)
    rep = verify_universal_property(p, E)
    assert rep.cocones == brute_cocone_count(cert.inclusion, k, E)
    assert rep.functors_from_D == len(brute_functors(p.D, E))


def test_cell_square_cocones_match_brute_force():
    name, cert, k = SUITE[1]
    p = dwyer_pushout(cert, k)
    rep = verify_universal_property(p, BC2)
    assert rep.cocones == brute_cocone_count(cert.inclusion, k, BC2) == len(brute_functors(p.D, BC2))


# -- Fun(I, -) --------------------------------------------------------------------------------

@pytest.mark.parametrize("I", [T, BC2, BC3, BIdem2], ids=lambda c: c.name)
@pytest.mark.parametrize("name,cert,k", SUITE, ids=[s[0] for s in SUITE])
def test_fun_preserves_dwyer_pushouts(I, name, cert, k):
    v = fun_preservation(I, cert, k)
    assert v, (name, I.name, v.detail)
    assert v.detail["dichotomy"] and v.detail["mixed_hom_identity"]


def test_horn_counterexample_with_interval():
    _, cert, k = horn_square()
    with pytest.raises(NotStronglyConnected):
        fun_preservation(p1, cert, k)
    v = fun_preservation(p1, cert, k, allow_non_strongly_connected=True)
    assert not v
    assert v.detail["pushout_objects"] < v.detail["fun_D_objects"]
    assert not v.detail["dichotomy"]


def test_dichotomy_for_strongly_connected_i():
    for name, cert, k in SUITE:
        p = dwyer_pushout(cert, k)
        from globcat.fincat import functor_category

        for I in [BC2, BIdem2]:
            assert is_strongly_connected(I)
            FD = functor_category(I, p.D)
            nC = len(p.c_objects)
            for row in FD.obj_maps:
                assert np.all(row < nC) or np.all(row >= nC)


# -- homotopical shadows ------------------------------------------------------------------------

def test_horn_nerve_comparison_is_homology_consistent():
    _, cert, k = horn_square()
    p = dwyer_pushout(cert, k)
    f = nerve_pushout_comparison(p, 3)
    assert compare_maps(f, 2).kind == "HomologyConsistent"
    assert not f.is_injective() or f.domain.counts() != f.codomain.counts()


def test_pushout_homology_check():
    _, cert, k = horn_square()
    out = pushout_homology_check(cert, k, 2, [T])
    assert out["terminal"].kind in ("HomologyConsistent", "CertifiedEquivalence")
    cert_id = check_dwyer(identity_functor(p1))
    out = pushout_homology_check(cert_id, identity_functor(p1), 2, [T, BC2])
    assert all(v.kind == "CertifiedEquivalence" for v in out.values())


def test_cell_square_homology_with_bc2():
    name, cert, k = SUITE[1]
    out = pushout_homology_check(cert, identity_functor(cert.A), 1, [BC2])
    assert all(v.kind == "CertifiedEquivalence" for v in out.values())


def test_cell_square_is_a_homotopy_pushout():
    # gluing both ends of (interval x BC2) to one BC2 gives BC2 x circle: H_1 = Z + Z/2
    from globcat.homology import category_homology

    name, cert, k = SUITE[1]
    D = dwyer_pushout(cert, k).D
    assert category_homology(D, 1).groups() == ["Z", "Z + Z/2"]
    assert category_homology(cert.B, 1).groups() == ["Z", "Z/2"]
