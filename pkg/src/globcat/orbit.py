"""Finite groups in the global setting: homomorphism groupoids, global nerves, cells, fixed points."""
from dataclasses import dataclass, field

import numpy as np

from .errors import GlobcatError, SizeLimitExceeded
from .fincat.algebra import (
    FinGroup,
    check_group_order,
    classifying_category,
    m_objects_iso,
    quotient_by_free_action,
    translation_groupoid,
)
from .fincat.category import (
    FinCategory,
    FinFunctor,
    NatTransformation,
    identity_functor,
    product_category,
    product_functor,
    subcategory,
)
from .fincat.funcat import DEFAULT_MAX_FUNCTORS, functor_category, precompose
from .fincat.structure import check_equivalence

DEFAULT_MAX_GROUP_ORDER = 24
DEFAULT_MAX_HOMS = 100_000


# -- homomorphisms -----------------------------------------------------------------

def enumerate_homs(K, G, limit=DEFAULT_MAX_HOMS, max_order=DEFAULT_MAX_GROUP_ORDER):
    """All homomorphisms ``K -> G`` as tuples of ``G`` indices, in lexicographic order.

    Generator images are restricted to elements whose order divides the
    generator's order before the full multiplication table is checked.
    """
    check_group_order(K, max_order)
    check_group_order(G, max_order)
    gens = K.generators()
    ko, go = K.element_orders(), G.element_orders()
    cands = [np.nonzero(ko[s] % go == 0)[0].tolist() for s in gens]
    # every element of K as a word in the generators (breadth first)
    word = {K.unit: ()}
    frontier = [K.unit]
    while frontier:
        nxt = []
        for x in frontier:
            for t, s in enumerate(gens):
                y = int(K.mult[x, s])
                if y not in word:
                    word[y] = word[x] + (t,)
                    nxt.append(y)
        frontier = nxt
    out = []

    def rec(t, images):
        if t == len(gens):
            alpha = np.zeros(K.order, dtype=np.int64)
            for x, w in word.items():
                v = G.unit
                for letter in w:
                    v = int(G.mult[v, images[letter]])
                alpha[x] = v
            if np.array_equal(alpha[K.mult], G.mult[alpha[:, None], alpha[None, :]]):
                out.append(tuple(alpha.tolist()))
                if len(out) > limit:
                    raise SizeLimitExceeded("number of homomorphisms", limit)
            return
        for c in cands[t]:
            rec(t + 1, images + [c])

    rec(0, [])
    return sorted(set(out))


def conjugate_hom(G, g, alpha):
    """``c_g o alpha``."""
    return tuple(int(G.conj(g, a)) for a in alpha)


def _hom_id(G, alpha):
    return "hom[" + ",".join(G.elements[a] for a in alpha) + "]"


# -- abelian invariants (independent of homology) ----------------------------------------

def _prime_factors(n):
    out, p = [], 2
    while p * p <= n:
        while n % p == 0:
            if p not in out:
                out.append(p)
            n //= p
        p += 1
    if n > 1 and n not in out:
        out.append(n)
    return out


def abelianization_invariants(G, subset=None):
    """Invariant factors (> 1) of the abelianization of the subgroup on ``subset``.

    Computed by counting, for each prime power ``q``, the cosets ``x[H,H]`` with
    ``x^q`` in the commutator subgroup; these counts determine the
    elementary divisors, which are then merged into invariant factors.
    """
    H = G if subset is None else G.subgroup(subset)
    comm = np.zeros(H.order, dtype=bool)
    comm[H.commutator_subgroup()] = True
    order = H.order // int(comm.sum())
    elems = np.arange(H.order)

    def count(q):
        cur = np.full(H.order, H.unit)
        for _ in range(q):
            cur = H.mult[cur, elems]
        return int(comm[cur].sum()) // int(comm.sum())

    elementary = []
    for p in _prime_factors(order):
        # number of cyclic factors of order >= p^e is log_p(N(p^e) / N(p^(e-1)))
        e, prev, ranks = 1, 1, []
        while True:
            n = count(p ** e)
            if n == prev:
                break
            r = 0
            ratio = n // prev
            while ratio > 1:
                ratio //= p
                r += 1
            ranks.append(r)
            prev = n
            e += 1
        ranks.append(0)
        for e in range(1, len(ranks)):
            elementary += [p ** e] * (ranks[e - 1] - ranks[e])
    # merge elementary divisors into invariant factors
    by_prime = {}
    for q in sorted(elementary, reverse=True):
        by_prime.setdefault(_prime_factors(q)[0], []).append(q)
    width = max((len(v) for v in by_prime.values()), default=0)
    factors = [1] * width
    for qs in by_prime.values():
        for t, q in enumerate(qs):
            factors[t] *= q
    return sorted(f for f in factors if f > 1)


# -- the homomorphism groupoid ----------------------------------------------------------

@dataclass
class HomGroupoid:
    """``grp(K, G)``: homomorphisms ``K -> G`` and conjugating elements ``(g, alpha): alpha -> c_g alpha``."""

    K: FinGroup
    G: FinGroup
    homs: list
    category: FinCategory


def hom_groupoid(K, G, max_order=DEFAULT_MAX_GROUP_ORDER):
    homs = enumerate_homs(K, G, max_order=max_order)
    index = {a: t for t, a in enumerate(homs)}
    n = G.order
    nh = len(homs)
    src = np.repeat(np.arange(nh), n)
    gs = np.tile(np.arange(n), nh)
    tgt = np.array([index[conjugate_hom(G, g, homs[a])] for a, g in zip(src.tolist(), gs.tolist())], dtype=np.int64)
    mids = [f"{G.elements[g]}:{_hom_id(G, homs[a])}" for a, g in zip(src.tolist(), gs.tolist())]
    comp = -np.ones((nh * n, nh * n), dtype=np.int64)
    for f in range(nh * n):
        # (g2, beta) o (g, alpha) = (g2 g, alpha) whenever beta = c_g alpha
        outs = np.nonzero(src == tgt[f])[0]
        comp[outs, f] = src[f] * n + G.mult[gs[outs], gs[f]]
    ident = np.arange(nh) * n + G.unit
    C = FinCategory([_hom_id(G, a) for a in homs], mids, src, tgt, ident, comp, name=f"grp({K.name},{G.name})")
    return HomGroupoid(K, G, homs, C)


@dataclass
class ConjugacyClassReport:
    representative: tuple
    members: list
    centralizer: list
    automorphisms: list
    abelianization: list
    component_H1_torsion: list = None
    component_H1_betti: int = None


@dataclass
class HomGroupoidReport:
    K: str
    G: str
    homs: int
    classes: list
    pi0: int
    checks: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(self.checks.values())

    def to_dict(self):
        return {
            "K": self.K,
            "G": self.G,
            "homomorphisms": self.homs,
            "pi0": self.pi0,
            "classes": [
                {
                    "representative": list(c.representative),
                    "size": len(c.members),
                    "centralizer": c.centralizer,
                    "abelianization": c.abelianization,
                    "H1": {"betti": c.component_H1_betti, "torsion": c.component_H1_torsion},
                }
                for c in self.classes
            ],
            "checks": self.checks,
        }


def structure_report(K, G, with_homology=True, max_order=DEFAULT_MAX_GROUP_ORDER):
    """Conjugacy classes, centralizers and nerve checks for ``grp(K, G)``."""
    from .homology import homology, pi0
    from .simplicial import nerve

    hg = hom_groupoid(K, G, max_order=max_order)
    C = hg.category
    seen, classes = set(), []
    for a, alpha in enumerate(hg.homs):
        if alpha in seen:
            continue
        members = sorted({conjugate_hom(G, g, alpha) for g in range(G.order)})
        seen.update(members)
        cent = G.centralizer(sorted(set(alpha))).tolist()
        auts = [f % G.order for f in C.hom(a, a).tolist()]
        classes.append(
            ConjugacyClassReport(alpha, members, cent, sorted(auts), abelianization_invariants(G, cent))
        )
    N = nerve(C, 2)
    n_comp, comp_of = pi0(N)
    checks = {
        "pi0_equals_classes": n_comp == len(classes),
        "automorphisms_equal_centralizer": all(c.automorphisms == c.centralizer for c in classes),
    }
    if with_homology:
        ok = True
        for c in classes:
            objs = [hg.homs.index(m) for m in c.members]
            sub, _ = subcategory(C, objs, [f for f in range(C.n_morphisms) if C.src[f] in objs and C.tgt[f] in objs])
            H = homology(nerve(sub, 2), 1)
            c.component_H1_betti = H.betti[1]
            c.component_H1_torsion = H.torsion[1]
            ok &= H.betti[1] == 0 and H.torsion[1] == c.abelianization and H.betti[0] == 1
        checks["H1_equals_abelianized_centralizer"] = ok
    return HomGroupoidReport(K.name, G.name, len(hg.homs), classes, n_comp, checks)


def iso_to_fun(K, G, FKG=None):
    """The isomorphism ``grp(K, G) -> Fun(BK, BG)``, verified bijective."""
    hg = hom_groupoid(K, G)
    C = hg.category
    FKG = FKG if FKG is not None else functor_category(classifying_category(K), classifying_category(G))
    om = np.array([FKG.index_of_functor(np.array(a)) for a in hg.homs], dtype=np.int64)
    n = G.order
    mm = np.array(
        [FKG.index_of_nat(om[C.src[f]], om[C.tgt[f]], [f % n]) for f in range(C.n_morphisms)], dtype=np.int64
    )
    F = FinFunctor(C, FKG, om, mm)
    if not F.is_isomorphism():
        raise GlobcatError("grp(K, G) -> Fun(BK, BG) is not bijective")
    return F


# -- global nerve ---------------------------------------------------------------------

@dataclass
class GlobalNerveValue:
    """``N Fun(BG, C)`` with restrictions ``alpha^*`` and conjugations ``l_g`` attached."""

    C: FinCategory
    G: FinGroup
    functor_category: FinCategory
    value: object
    restrictions: dict = field(default_factory=dict)
    conjugations: dict = field(default_factory=dict)
    targets: dict = field(default_factory=dict)


def restriction(FG, FK, alpha):
    """``alpha^*: Fun(BG, C) -> Fun(BK, C)``, precomposition with ``B alpha``."""
    Ba = FinFunctor(FK.I, FG.I, [0], list(alpha))
    return precompose(FG, FK, Ba)


def conjugation(FG, FK, G, alpha, g):
    """``l_g: alpha^* => (c_g alpha)^*``; its component at ``F`` has the single component ``F(g)``."""
    beta = conjugate_hom(G, g, alpha)
    ra, rb = restriction(FG, FK, alpha), restriction(FG, FK, beta)
    comps = [FK.index_of_nat(ra.obj_map[F], rb.obj_map[F], [FG.mor_maps[F][g]]) for F in range(FG.n_objects)]
    return NatTransformation(ra, rb, comps)


def global_nerve_value(C, G, d, restrict_to=(), max_functors=DEFAULT_MAX_FUNCTORS):
    """The value of the global nerve of ``C`` at ``G``: the nerve of ``Fun(BG, C)``, truncated at ``d``.

    For each group ``K`` in ``restrict_to`` every ``alpha: K -> G`` gets its
    restriction functor and every ``g`` in ``G`` its conjugation
    isomorphism, all verified.
    """
    from .simplicial import nerve

    BG = classifying_category(G)
    FG = functor_category(BG, C, max_functors)
    out = GlobalNerveValue(C, G, FG, nerve(FG, d))
    for K in restrict_to:
        FK = functor_category(classifying_category(K), C, max_functors)
        out.targets[K.name] = FK
        for alpha in enumerate_homs(K, G):
            out.restrictions[(K.name, alpha)] = restriction(FG, FK, alpha)
            for g in range(G.order):
                out.conjugations[(K.name, alpha, g)] = conjugation(FG, FK, G, alpha, g)
    return out


# -- cells and Gamma ---------------------------------------------------------------------

def _sd2_categories(n):
    from .simplicial import boundary, categorify_data, categorify_map, subdivide, subdivide_map

    dB, incl = boundary(n)
    S1b, S1 = subdivide(dB), subdivide(incl.codomain)
    m1 = subdivide_map(incl, S1b, S1)
    S2b, S2 = subdivide(S1b), subdivide(S1)
    m2 = subdivide_map(m1, S2b, S2)
    cb, c = categorify_data(S2b), categorify_data(S2)
    return categorify_map(m2, cb, c)


def generating_cell(n, G, max_n=2):
    """``c(Sd^2 dDelta[n]) x BG -> c(Sd^2 Delta[n]) x BG`` and its Dwyer certificate."""
    from .dwyer import check_dwyer

    if n > max_n:
        raise SizeLimitExceeded(f"cell dimension {n}", max_n)
    inc = _sd2_categories(n)
    BG = classifying_category(G)
    cell = product_functor(inc, identity_functor(BG))
    cert = check_dwyer(cell)
    if not cert:
        raise GlobcatError(f"generating cell failed to certify: {cert.reason}")
    return cell, cert


def gamma_cell(A, J):
    """``c(Sd^2 A) x J``, the value of the left adjoint on the cell module ``A x O(-, J)``."""
    from .simplicial import categorify, subdivide

    return product_category(categorify(subdivide(subdivide(A))), J)


# -- fixed points of Fun(EG, C) --------------------------------------------------------------

@dataclass
class FixedPointChain:
    """The three comparison functors with their verdicts."""

    fixed: FinCategory
    quotient_pullback: FinFunctor
    b_pullback: FinFunctor
    evaluation: FinFunctor
    verdicts: dict

    def __bool__(self):
        return all(self.verdicts.values())


def fixed_subcategory(FEC, action):
    """``Fun(EG, C)^H`` for the action on ``EG`` restricted to ``H``, by precomposition."""
    H = action.group
    keep_obj = [F for F in range(FEC.n_objects) if all(np.array_equal(FEC.mor_maps[F][action.mor_perm[h]], FEC.mor_maps[F]) for h in range(H.order))]
    keep_mor = [
        t for t in range(FEC.n_morphisms)
        if FEC.src[t] in keep_obj and FEC.tgt[t] in keep_obj
        and all(np.array_equal(FEC.components[t][action.obj_perm[h]], FEC.components[t]) for h in range(H.order))
    ]
    return subcategory(FEC, keep_obj, keep_mor, name=f"{FEC.name}^{H.name}")


def fixed_point_equivalences(G, H_subset, C, max_functors=DEFAULT_MAX_FUNCTORS):
    """``Fun(EG,C)^H <- Fun(EG/H, C) -> Fun(BH, C) -> HC`` with verdicts.

    The first and last functors must be isomorphisms and the middle one an
    equivalence.  ``H_subset`` lists element indices of ``G``.
    """
    EG, act = translation_groupoid(G)
    H_subset = sorted(int(h) for h in H_subset)
    if not G.is_subgroup(H_subset):
        raise GlobcatError("H is not a subgroup of G")
    actH = act.restrict(H_subset)
    H = actH.group
    H.name = H.name or f"H{len(H_subset)}"
    Q, q = quotient_by_free_action(actH)
    n = G.order
    BH = classifying_category(H)
    e = G.unit
    b = FinFunctor(BH, Q, [q.obj_map[e]], [q.mor_map[h * n + e] for h in H_subset])
    FEC = functor_category(EG, C, max_functors)
    fixed, fixed_incl = fixed_subcategory(FEC, actH)
    FQC = functor_category(Q, C, max_functors)
    FBC = functor_category(BH, C, max_functors)
    qstar_full = precompose(FQC, FEC, q)
    inv_o = -np.ones(FEC.n_objects, dtype=np.int64)
    inv_o[fixed_incl.obj_map] = np.arange(fixed.n_objects)
    inv_m = -np.ones(FEC.n_morphisms, dtype=np.int64)
    inv_m[fixed_incl.mor_map] = np.arange(fixed.n_morphisms)
    if np.any(inv_o[qstar_full.obj_map] < 0) or np.any(inv_m[qstar_full.mor_map] < 0):
        raise GlobcatError("precomposition with the quotient leaves the fixed subcategory")
    qstar = FinFunctor(FQC, fixed, inv_o[qstar_full.obj_map], inv_m[qstar_full.mor_map])
    bstar = precompose(FQC, FBC, b)
    HC, ev = m_objects_iso(H, C)
    verdicts = {
        "quotient_iso": qstar.is_isomorphism(),
        "restriction_equivalence": bool(check_equivalence(bstar)),
        "evaluation_iso": ev.is_isomorphism() and ev.domain.n_objects == FBC.n_objects,
        "b_equivalence": bool(check_equivalence(b)),
    }
    return FixedPointChain(fixed, qstar, bstar, ev, verdicts)
