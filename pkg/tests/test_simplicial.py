"""Simplicial sets: nerve, categorification, subdivision, Ex, products and pushouts."""
from itertools import combinations, product
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from globcat.corpus import all_posets, counit_corpus, diamond, fiedorowicz_category, parallel_pair, vee
from globcat.errors import InvalidSimplicialSet, NotFinite, SizeLimitExceeded
from globcat.fincat import (
    classifying_category,
    cyclic_group,
    is_poset,
    poset_reflection,
    product_category,
    simplex_category,
    symmetric_group,
    terminal_category,
)
from globcat.simplicial import (
    FinSimplicialSet,
    SimplicialMap,
    boundary,
    categorify,
    categorify_data,
    counit,
    empty_simplicial_set,
    enumerate_simplicial_maps,
    ex_truncated,
    horn,
    longest_chain,
    nerve,
    nerve_map,
    simplicial_set_from_dict,
    sset_product,
    sset_pushout,
    standard_simplex,
    subdivide,
    subdivide_map,
    subset_poset,
)

BC2 = classifying_category(cyclic_group(2))


# -- oracles ------------------------------------------------------------------------

def brute_nerve_counts(C, d):
    """(all, nondegenerate) strings of composable morphisms per degree, by brute force."""
    allc, nondeg = [C.n_objects], [C.n_objects]
    ids = set(C.identity.tolist())
    for n in range(1, d + 1):
        a = b = 0
        for word in product(range(C.n_morphisms), repeat=n):
            if all(C.tgt[word[i]] == C.src[word[i + 1]] for i in range(n - 1)):
                a += 1
                b += not any(f in ids for f in word)
        allc.append(a)
        nondeg.append(b)
    return allc, nondeg


def strict_flags(n, k):
    """Strictly increasing chains of k+1 nonempty subsets of [n]."""
    subsets = [frozenset(s) for r in range(1, n + 2) for s in combinations(range(n + 1), r)]
    count = 0
    for chain in product(subsets, repeat=k + 1):
        if all(chain[i] < chain[i + 1] for i in range(k)):
            count += 1
    return count


def monotone_maps_into_chain(k, n):
    """Order-preserving maps from the nonempty subsets of [k] into [n]."""
    subsets = [frozenset(s) for r in range(1, k + 2) for s in combinations(range(k + 1), r)]
    count = 0
    for vals in product(range(n + 1), repeat=len(subsets)):
        f = dict(zip(subsets, vals))
        if all(f[a] <= f[b] for a in subsets for b in subsets if a <= b):
            count += 1
    return count


def check_identities(X):
    """Independent exhaustive check of the simplicial identities, element by element."""
    f, s = X.faces, X.degens
    for k in range(2, X.bound + 1):
        for x in range(len(X.labels[k])):
            for j in range(k + 1):
                for i in range(j):
                    assert f[k - 1][f[k][x, j], i] == f[k - 1][f[k][x, i], j - 1]
    for k in range(X.bound):
        for x in range(len(X.labels[k])):
            for j in range(k + 1):
                for i in range(k + 2):
                    lhs = f[k + 1][s[k][x, j], i]
                    if i < j:
                        rhs = s[k - 1][f[k][x, i], j - 1]
                    elif i in (j, j + 1):
                        rhs = x
                    else:
                        rhs = s[k - 1][f[k][x, i - 1], j]
                    assert lhs == rhs


# -- standard simplices and sub-objects -----------------------------------------------------

@pytest.mark.parametrize("n", range(5))
def test_standard_simplex_counts(n):
    D = standard_simplex(n)
    assert D.nondegenerate_counts() == [comb(n + 1, k + 1) for k in range(n + 1)]
    assert D.counts() == [comb(n + k + 1, k + 1) for k in range(n + 1)]
    assert D.skeletal and D.dimension == n
    check_identities(D)


def test_boundary_and_horn():
    B, inc = boundary(2)
    assert B.nondegenerate_counts() == [3, 3, 0]
    assert inc.is_injective()
    L, _ = horn(2, 1)
    assert L.nondegenerate_counts() == [3, 2, 0]
    L0, _ = horn(3, 0)
    assert L0.nondegenerate_counts() == [4, 6, 3, 0]


def test_empty_simplicial_set():
    E = empty_simplicial_set(2)
    assert E.counts() == [0, 0, 0] and E.dimension == -1


def test_ez_and_apply_monotone_round_trip():
    D = standard_simplex(2, bound=4)
    for k in range(5):
        for x in range(len(D.labels[k])):
            q, y, sigma = D.ez(k, x)
            assert D.apply_monotone(sigma, q, y) == x
            assert y in D.nondegenerate(q).tolist()


def test_invalid_face_table_is_rejected():
    with pytest.raises(InvalidSimplicialSet):
        FinSimplicialSet(1, [["a", "b"], ["e"]], [None, [[0, 5]]], [[[0], [0]]], True)


def test_broken_identity_is_rejected():
    # the degenerate edge on vertex "a" claims vertex "b" as a face
    with pytest.raises(InvalidSimplicialSet):
        FinSimplicialSet(1, [["a", "b"], ["aa", "bb"]], [None, [[1, 0], [1, 1]]], [[[0], [1]], None], True)


def test_dict_round_trip():
    X = nerve(vee(), 2)
    Y = simplicial_set_from_dict(X.to_dict())
    assert Y.counts() == X.counts() and Y.skeletal == X.skeletal
    assert all(np.array_equal(a, b) for a, b in zip(X.faces[1:], Y.faces[1:]))
    with pytest.raises(InvalidSimplicialSet):
        simplicial_set_from_dict({"bound": 0})


# -- nerve --------------------------------------------------------------------------

@pytest.mark.parametrize(
    "C,d",
    [(simplex_category(2), 3), (BC2, 3), (fiedorowicz_category(), 3), (vee(), 3), (parallel_pair(), 2),
     (classifying_category(symmetric_group(3)), 2), (diamond(), 3)],
    ids=lambda v: getattr(v, "name", str(v)),
)
def test_nerve_counts_match_brute_force(C, d):
    N = nerve(C, d)
    allc, nondeg = brute_nerve_counts(C, d)
    assert N.counts() == allc
    assert N.nondegenerate_counts() == nondeg
    check_identities(N)


@pytest.mark.parametrize("n", range(4))
def test_nerve_of_simplex_category_is_standard_simplex(n):
    N = nerve(simplex_category(n), n)
    assert N.nondegenerate_counts() == [comb(n + 1, k + 1) for k in range(n + 1)]
    assert N.skeletal


def test_nerve_bc2_and_fiedorowicz_counts():
    assert nerve(BC2, 3).nondegenerate_counts() == [1, 1, 1, 1]
    assert not nerve(BC2, 3).skeletal
    assert nerve(fiedorowicz_category(), 3).nondegenerate_counts() == [1, 4, 16, 64]


@pytest.mark.parametrize("order", [2, 3, 4, 5])
def test_group_nerve_nondegenerate_count(order):
    N = nerve(classifying_category(cyclic_group(order)), 3)
    assert N.nondegenerate_counts() == [(order - 1) ** n for n in range(4)]


def test_longest_chain():
    assert longest_chain(simplex_category(3)) == 3
    assert longest_chain(BC2) == float("inf")
    assert longest_chain(terminal_category()) == 0


def test_nerve_size_cap():
    with pytest.raises(SizeLimitExceeded):
        nerve(classifying_category(symmetric_group(3)), 6, max_simplices=1000)


def test_nerve_map_is_simplicial():
    F = vee()
    from globcat.fincat import constant_functor

    G = constant_functor(F, BC2, 0)
    f = nerve_map(G, nerve(F, 2), nerve(BC2, 2))
    f.validate()


def test_nerve_preserves_products():
    A, B = simplex_category(1), BC2
    P = sset_product(nerve(A, 2), nerve(B, 2))
    N = nerve(product_category(A, B), 2)
    assert P.counts() == N.counts()
    assert P.nondegenerate_counts() == N.nondegenerate_counts()


# -- categorification ------------------------------------------------------------------

def test_counit_is_isomorphism_on_corpus():
    cats = counit_corpus()
    assert len(cats) >= 20
    for C in cats:
        assert counit(C).is_isomorphism(), C.name


@pytest.mark.parametrize("n", range(4))
def test_categorify_standard_simplex(n):
    C = categorify(standard_simplex(n))
    assert C.n_objects == n + 1 and C.n_morphisms == comb(n + 2, 2)
    assert is_poset(C)


def test_categorify_boundary_of_triangle_is_free():
    # three generators 0->1, 1->2, 0->2 with no relation: 0 to 2 has two morphisms
    C = categorify(boundary(2)[0])
    assert C.n_morphisms == 3 + 3 + 1


def test_categorify_detects_infinite_category():
    # a circle with one nondegenerate loop freely generates the natural numbers
    X = FinSimplicialSet(1, [["v"], ["vv", "e"]], [None, [[0, 0], [0, 0]]], [[[0]], None], skeletal=True)
    with pytest.raises(NotFinite):
        categorify_data(X, word_bound=6)


def test_categorify_rejects_short_truncation():
    with pytest.raises(InvalidSimplicialSet):
        categorify(nerve(BC2, 1))


def test_categorify_sd2_simplex_is_poset():
    X = subdivide(subdivide(standard_simplex(2)))
    C = categorify(X)
    R, _ = poset_reflection(C)
    assert is_poset(C) and R.n_objects == C.n_objects


# -- subdivision ---------------------------------------------------------------------

def test_sd_of_interval_and_triangle_boundary():
    S = subdivide(standard_simplex(1))
    assert S.nondegenerate_counts() == [3, 2]
    H = subdivide(boundary(2)[0])
    assert H.nondegenerate_counts()[:2] == [6, 6]
    assert H.nondegenerate_counts()[2] == 0


def test_sd2_of_point_is_point():
    S = subdivide(subdivide(standard_simplex(0)))
    assert S.counts() == [1]


@pytest.mark.parametrize("n", range(4))
def test_sd_counts_equal_flag_counts(n):
    S = subdivide(standard_simplex(n))
    assert S.nondegenerate_counts() == [strict_flags(n, k) for k in range(n + 1)]
    check_identities(S)


def test_sd_matches_nerve_of_subset_poset():
    for n in range(3):
        assert subdivide(standard_simplex(n)).counts() == nerve(subset_poset(n), n).counts()


def test_sd_rejects_non_skeletal():
    with pytest.raises(InvalidSimplicialSet):
        subdivide(nerve(BC2, 2))


def test_sd_of_degenerate_collapse():
    # Sd of the nerve of V (two edges into a common vertex) has 5 vertices and 4 edges
    S = subdivide(nerve(vee(), 2))
    assert S.nondegenerate_counts()[:2] == [5, 4]


def test_subdivide_map_of_inclusion():
    B, inc = boundary(2)
    f = subdivide_map(inc, subdivide(B), subdivide(standard_simplex(2)))
    assert f.is_injective()


# -- maps and Ex -------------------------------------------------------------------------

def test_maps_between_standard_simplices_are_monotone_maps():
    # maps Delta[m] -> Delta[n] are monotone maps [m] -> [n]: C(n+m+1, m+1)
    for m in range(3):
        for n in range(3):
            A = standard_simplex(m)
            X = standard_simplex(n, bound=max(m, n))
            assert len(enumerate_simplicial_maps(A, X)) == comb(n + m + 1, m + 1)


def test_ex_of_point():
    r = ex_truncated(standard_simplex(0, bound=2), 2)
    assert r.ex.counts() == [1, 1, 1]


def test_ex_of_interval_counts():
    r = ex_truncated(standard_simplex(1, bound=2), 2)
    assert r.ex.counts() == [monotone_maps_into_chain(k, 1) for k in range(3)]
    assert r.ex.counts()[:2] == [2, 5]


def test_ex_of_triangle_degree_one():
    r = ex_truncated(standard_simplex(2), 1)
    assert r.ex.counts() == [monotone_maps_into_chain(k, 2) for k in range(2)]


def test_kappa_is_injective_on_vertices():
    for X in [standard_simplex(1, bound=2), nerve(vee(), 2), nerve(BC2, 2), boundary(2)[0]]:
        r = ex_truncated(X, 2)
        assert len(set(r.kappa.maps[0].tolist())) == len(X.labels[0])
        r.kappa.validate()


def test_ex_adjunction_counts():
    # (Ex X)_k is in bijection with maps Sd Delta[k] -> X
    X = nerve(BC2, 2)
    r = ex_truncated(X, 2)
    for k in range(3):
        assert r.ex.counts()[k] == len(enumerate_simplicial_maps(nerve(subset_poset(k), 2), X))


def test_ex_requires_bound():
    with pytest.raises(InvalidSimplicialSet):
        ex_truncated(nerve(BC2, 1), 2)


def test_map_enumeration_cap():
    with pytest.raises(SizeLimitExceeded):
        enumerate_simplicial_maps(nerve(subset_poset(1), 2), nerve(classifying_category(cyclic_group(5)), 2), limit=10)


# -- products and pushouts --------------------------------------------------------------

def test_product_with_point():
    X = nerve(vee(), 2)
    P = sset_product(X, standard_simplex(0, bound=2))
    assert P.counts() == X.counts()


def test_prism_has_two_triangles():
    P = sset_product(standard_simplex(1, bound=2), standard_simplex(1, bound=2))
    assert P.nondegenerate_counts() == [4, 5, 2]
    check_identities(P)


def test_horn_pushout_is_horn():
    # the glued object is stored up to the smallest bound, so the point is stored up to degree 1
    p0 = standard_simplex(0, bound=1)
    D1 = standard_simplex(1)
    f = SimplicialMap(p0, D1, [[0], [0]])
    g = SimplicialMap(p0, D1, [[1], [2]])
    P, jX, jY = sset_pushout(f, g)
    assert P.nondegenerate_counts() == [3, 2]


@settings(max_examples=25)
@given(st.sampled_from(all_posets(3) + all_posets(2)), st.sampled_from(all_posets(2)))
def test_product_nerves_property(A, B):
    P = sset_product(nerve(A, 3), nerve(B, 3))
    N = nerve(product_category(A, B), 3)
    assert P.counts() == N.counts()
    assert P.nondegenerate_counts() == N.nondegenerate_counts()
