"""Structural predicates: strong connectivity, poset reflection, equivalences, witnesses."""
from dataclasses import dataclass, field

import numpy as np

from ..errors import GlobcatError
from .category import FinFunctor, NatTransformation, _poset_from_matrix, identity_functor


def reachability(C):
    """Boolean matrix ``R[x, y]``: there is a morphism ``x -> y``."""
    R = np.zeros((C.n_objects, C.n_objects), dtype=bool)
    R[C.src, C.tgt] = True
    return R


def is_strongly_connected(C):
    """True iff every ordered pair of objects has a morphism (vacuous for the empty category)."""
    return bool(reachability(C).all())


def first_missing_pair(C):
    bad = np.argwhere(~reachability(C))
    if bad.size:
        return C.objects[bad[0][0]], C.objects[bad[0][1]]
    return None


def is_poset(C):
    """At most one morphism between any two objects and no non-identity isomorphism."""
    counts = C.hom_counts()
    if np.any(counts > 1):
        return False
    R = counts > 0
    return not np.any(R & R.T & ~np.eye(C.n_objects, dtype=bool))


def poset_reflection(C):
    """``pos(C)`` and the quotient functor ``C -> pos(C)``.

    Classes of mutually reachable objects are ordered by existence of a
    morphism.  Singleton classes keep their object id; larger classes are
    named ``"[a|b|...]"``.  Returns ``(P, q)``.
    """
    n = C.n_objects
    R = reachability(C)
    for k in range(n):
        R |= R[:, k:k + 1] & R[k:k + 1, :]
    same = R & R.T
    cls = np.argmax(same, axis=1) if n else np.zeros(0, dtype=np.int64)  # least equivalent object
    reps = np.unique(cls)
    q_obj = np.searchsorted(reps, cls)
    names = []
    for r in reps.tolist():
        members = [C.objects[x] for x in np.nonzero(cls == r)[0]]
        names.append(members[0] if len(members) == 1 else "[" + "|".join(members) + "]")
    rel = R[np.ix_(reps, reps)] if n else np.zeros((0, 0), dtype=bool)
    P = _poset_from_matrix(names, rel, name=f"pos({C.name})" if C.name else None)
    k = len(reps)
    pair_index = -np.ones((k, k), dtype=np.int64)
    pair_index[P.src, P.tgt] = np.arange(P.n_morphisms)
    q_mor = pair_index[q_obj[C.src], q_obj[C.tgt]]
    return P, FinFunctor(C, P, q_obj, q_mor)


# -- equivalences -------------------------------------------------------------------

@dataclass
class EquivalenceVerdict:
    """Outcome of :func:`check_equivalence`.

    ``reason`` is ``None`` for an equivalence, otherwise one of ``"NotFaithful"``,
    ``"NotFull"``, ``"NotEssentiallySurjective"``; ``pair`` names the failing
    object pair (domain ids) or the missed codomain object.
    """

    is_equivalence: bool
    reason: str = None
    pair: tuple = None
    correspondence: dict = field(default_factory=dict)

    def __bool__(self):
        return self.is_equivalence

    def to_dict(self):
        return {
            "equivalence": self.is_equivalence,
            "reason": self.reason,
            "pair": list(self.pair) if self.pair else None,
            "correspondence": self.correspondence,
        }


def _isomorphic_objects(C):
    """``iso[x, y]``: x and y are isomorphic; plus one chosen isomorphism index (or -1)."""
    n = C.n_objects
    iso = -np.ones((n, n), dtype=np.int64)
    for f in range(C.n_morphisms):
        x, y = C.src[f], C.tgt[f]
        if iso[x, y] >= 0:
            continue
        back = C.hom(y, x)
        if len(back):
            if np.any(C.comp[back, f] == C.identity[x]) and np.any(C.comp[f, back] == C.identity[y]):
                inv = back[(C.comp[back, f] == C.identity[x]) & (C.comp[f, back] == C.identity[y])]
                if len(inv):
                    iso[x, y] = f
    return iso


def check_equivalence(F):
    """Decide whether ``F`` is an equivalence of categories by exhaustive hom-set checks.

    Faithfulness and fullness are checked pair by pair in index order, then
    essential surjectivity; the first failure is reported.
    """
    A, B = F.domain, F.codomain
    for x in range(A.n_objects):
        for y in range(A.n_objects):
            hom = A.hom(x, y)
            images = F.mor_map[hom]
            if len(np.unique(images)) != len(images):
                return EquivalenceVerdict(False, "NotFaithful", (A.objects[x], A.objects[y]))
            if len(images) != len(B.hom(F.obj_map[x], F.obj_map[y])):
                return EquivalenceVerdict(False, "NotFull", (A.objects[x], A.objects[y]))
    iso = _isomorphic_objects(B)
    corr = {}
    for b in range(B.n_objects):
        hits = [x for x in range(A.n_objects) if iso[F.obj_map[x], b] >= 0]
        if not hits:
            return EquivalenceVerdict(False, "NotEssentiallySurjective", (B.objects[b],))
        corr[B.objects[b]] = A.objects[hits[0]]
    return EquivalenceVerdict(True, correspondence=corr)


def pseudo_inverse(F):
    """For an equivalence ``F: A -> B`` build ``G: B -> A`` with unit and counit isomorphisms.

    Returns ``(G, eta, eps)`` with ``eta: Id_A => G F`` and ``eps: F G => Id_B``.
    """
    verdict = check_equivalence(F)
    if not verdict:
        raise GlobcatError(f"not an equivalence: {verdict.reason} at {verdict.pair}")
    A, B = F.domain, F.codomain
    iso = _isomorphic_objects(B)
    go = np.zeros(B.n_objects, dtype=np.int64)
    eps = np.zeros(B.n_objects, dtype=np.int64)  # eps_b : F G b -> b
    for b in range(B.n_objects):
        x = next(x for x in range(A.n_objects) if iso[F.obj_map[x], b] >= 0)
        go[b] = x
        eps[b] = iso[F.obj_map[x], b]

    def inverse_of(f):
        x, y = B.src[f], B.tgt[f]
        back = B.hom(y, x)
        return back[(B.comp[back, f] == B.identity[x])][0]

    gm = np.zeros(B.n_morphisms, dtype=np.int64)
    for f in range(B.n_morphisms):
        b, c = B.src[f], B.tgt[f]
        target = B.comp[inverse_of(eps[c]), B.comp[f, eps[b]]]  # F G b -> F G c
        hom = A.hom(go[b], go[c])
        gm[f] = hom[F.mor_map[hom] == target][0]
    G = FinFunctor(B, A, go, gm)
    eta = np.zeros(A.n_objects, dtype=np.int64)
    for x in range(A.n_objects):
        # eta_x : x -> G F x is the preimage of eps_{Fx}^{-1}
        target = inverse_of(eps[F.obj_map[x]])
        hom = A.hom(x, go[F.obj_map[x]])
        eta[x] = hom[F.mor_map[hom] == target][0]
    return (
        G,
        NatTransformation(identity_functor(A), F.then(G), eta),
        NatTransformation(G.then(F), identity_functor(B), eps),
    )


# -- homotopy witnesses -----------------------------------------------------------------

@dataclass
class EquivalenceWitness:
    """Forward/backward functors and two zig-zags of natural transformations.

    ``chain_backward_forward`` connects ``backward o forward`` (a functor on the
    domain of ``forward``) to the identity; ``chain_forward_backward`` connects
    ``forward o backward`` to the identity.  Each entry is ``(tau, direction)``
    with direction ``+1`` when ``tau`` points along the chain and ``-1`` when
    it points against it.
    """

    forward: FinFunctor
    backward: FinFunctor
    chain_backward_forward: list = field(default_factory=list)
    chain_forward_backward: list = field(default_factory=list)


def _chain_ok(chain, start, end):
    cur = start
    for tau, direction in chain:
        if not isinstance(tau, NatTransformation) or direction not in (1, -1):
            return False
        if not tau.is_natural():
            return False
        here, there = (tau.source, tau.target) if direction == 1 else (tau.target, tau.source)
        if here != cur:
            return False
        cur = there
    return cur == end


def validate_homotopy_witness(w):
    """True iff both chains consist of natural transformations and have the stated endpoints."""
    F, G = w.forward, w.backward
    try:
        if F.codomain != G.domain or G.codomain != F.domain:
            return False
        F.validate()
        G.validate()
    except GlobcatError:
        return False
    return _chain_ok(w.chain_backward_forward, F.then(G), identity_functor(F.domain)) and _chain_ok(
        w.chain_forward_backward, G.then(F), identity_functor(G.domain)
    )


def identity_witness(C):
    ident = identity_functor(C)
    return EquivalenceWitness(ident, ident, [], [])


def witness_from_equivalence(F):
    """An :class:`EquivalenceWitness` from the unit and counit of a pseudo-inverse."""
    G, eta, eps = pseudo_inverse(F)
    return EquivalenceWitness(F, G, [(eta, -1)], [(eps, 1)])


def witness_from_adjunction(i, r, counit):
    """Witness for an inclusion ``i: A -> W`` with right adjoint ``r`` and ``r i = Id_A``.

    The chain for ``r o i`` is empty (it is the identity); the counit
    ``i r => Id_W`` is the single chain element on the other side.
    """
    return EquivalenceWitness(i, r, [], [(counit, 1)])
