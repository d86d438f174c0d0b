"""Complexes of groups over finite posets, their associated categories, and Grothendieck constructions."""
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CocycleViolation,
    ComplexViolation,
    ConditionsFailed,
    GlobcatError,
    InvalidCategory,
    LaxFunctorialityViolation,
    NotStronglyConnected,
    SizeLimitExceeded,
    UnitalityViolation,
)
from .fincat.algebra import FinGroup, monoid_from_dict
from .fincat.category import FinCategory, FinFunctor, _poset_from_matrix, poset_from_relations
from .fincat.funcat import DEFAULT_MAX_FUNCTORS, functor_category, postcompose
from .fincat.structure import first_missing_pair, is_poset, is_strongly_connected, reachability

DEFAULT_MAX_MORPHISMS = 200_000


# -- complexes of groups ----------------------------------------------------------------

class ComplexOfGroups:
    """A complex of groups over a finite poset category ``P``.

    ``local[x]`` is a :class:`FinGroup` for the object index ``x``;
    ``transition[(x, y)]`` is an index array ``G(x) -> G(y)`` for every
    ``x <= y`` (including ``x == y``); ``twist[(x, y, z)]`` is an element
    index of ``G(z)`` for every chain ``x <= y <= z``.  Missing twists
    default to the unit and missing diagonal transitions to the identity.
    """

    def __init__(self, P, local, transition, twist=None, name=None, check=True):
        if not is_poset(P):
            raise InvalidCategory("the index category of a complex of groups must be a poset")
        self.P = P
        self.leq = reachability(P)
        self.local = list(local)
        self.name = name
        n = P.n_objects
        if len(self.local) != n:
            raise GlobcatError("one local group per poset element is required")
        self.transition = {}
        for x, y in self.pairs():
            if (x, y) in transition:
                self.transition[(x, y)] = np.asarray(transition[(x, y)], dtype=np.int64)
            elif x == y:
                self.transition[(x, y)] = np.arange(self.local[x].order)
            else:
                raise GlobcatError(f"missing transition {P.objects[x]} <= {P.objects[y]}")
        twist = twist or {}
        self.twist = {c: int(twist.get(c, self.local[c[2]].unit)) for c in self.chains(3)}
        if check:
            self.validate()

    def pairs(self):
        return [(int(x), int(y)) for x, y in np.argwhere(self.leq)]

    def chains(self, length):
        """All weakly increasing chains ``x_0 <= ... <= x_{length-1}`` as index tuples."""
        out = [(x,) for x in range(self.P.n_objects)]
        for _ in range(length - 1):
            out = [c + (int(y),) for c in out for y in np.nonzero(self.leq[c[-1]])[0]]
        return out

    def _ids(self, chain):
        return tuple(self.P.objects[x] for x in chain)

    def validate(self):
        G, T, t = self.local, self.transition, self.twist
        for (x, y), hom in T.items():
            Gx, Gy = G[x], G[y]
            if hom.shape != (Gx.order,) or np.any(hom < 0) or np.any(hom >= Gy.order):
                raise ComplexViolation(self._ids((x, y)), "transition is not a map of the local groups")
            if not np.array_equal(hom[Gx.mult], Gy.mult[hom[:, None], hom[None, :]]):
                raise ComplexViolation(self._ids((x, y)), "transition is not a homomorphism")
        for x in range(self.P.n_objects):
            if not np.array_equal(T[(x, x)], np.arange(G[x].order)):
                raise UnitalityViolation(self._ids((x, x)), "G(x,x) is not the identity")
        for (x, y, z), g in t.items():
            if not 0 <= g < G[z].order:
                raise ComplexViolation(self._ids((x, y, z)), "twist is not an element of G(z)")
            if (x == y or y == z) and g != G[z].unit:
                raise UnitalityViolation(self._ids((x, y, z)), "degenerate twist is not the unit")
        for x, y, z in self.chains(3):
            Gz = G[z]
            lhs = Gz.conj(t[(x, y, z)], T[(x, z)])
            rhs = T[(y, z)][T[(x, y)]]
            if not np.array_equal(lhs, rhs):
                b = int(np.nonzero(lhs != rhs)[0][0])
                raise LaxFunctorialityViolation(self._ids((x, y, z)), f"fails at {G[x].elements[b]}")
        for w, x, y, z in self.chains(4):
            Gz = G[z]
            lhs = Gz.mult[t[(x, y, z)], t[(w, x, z)]]
            rhs = Gz.mult[T[(y, z)][t[(w, x, y)]], t[(w, y, z)]]
            if lhs != rhs:
                raise CocycleViolation(self._ids((w, x, y, z)))
        return self

    def is_simple(self):
        return all(g == self.local[c[2]].unit for c, g in self.twist.items())

    def __eq__(self, other):
        if not isinstance(other, ComplexOfGroups):
            return NotImplemented
        if self.P != other.P:
            return False
        for a, b in zip(self.local, other.local):
            if a.elements != b.elements or a.unit != b.unit or not np.array_equal(a.mult, b.mult):
                return False
        return all(np.array_equal(v, other.transition[k]) for k, v in self.transition.items()) and self.twist == other.twist

    def __repr__(self):
        return f"ComplexOfGroups({self.name or ''} over {self.P.n_objects} elements)"

    def to_dict(self):
        P, G = self.P, self.local
        groups = {}
        local = {}
        for x, g in enumerate(G):
            key = f"G_{P.objects[x]}"
            groups[key] = g.to_dict()
            local[P.objects[x]] = key
        return {
            "poset": {
                "elements": list(P.objects),
                "relations": [[P.objects[x], P.objects[y]] for x, y in self.pairs() if x != y],
            },
            "groups": groups,
            "local": local,
            "transitions": {
                f"{P.objects[x]}<{P.objects[y]}": [G[y].elements[v] for v in hom.tolist()]
                for (x, y), hom in self.transition.items()
                if x != y
            },
            "twists": {
                "<".join(self._ids(c)): G[c[2]].elements[g]
                for c, g in self.twist.items()
                if g != G[c[2]].unit
            },
        }


def complex_from_dict(raw):
    """Parse the JSON layout used by :meth:`ComplexOfGroups.to_dict` (validation included)."""
    try:
        pos = raw["poset"]
        P = poset_from_relations(pos["elements"], pos.get("relations", []))
        groups = {k: monoid_from_dict(v, name=k) for k, v in raw["groups"].items()}
        local = [groups[raw["local"][x]] for x in P.objects]
        if not all(isinstance(g, FinGroup) for g in local):
            raise GlobcatError("local monoids must be groups")
        idx = P.obj_index
        transition = {}
        for key, images in raw.get("transitions", {}).items():
            a, b = key.split("<")
            x, y = idx[a], idx[b]
            if isinstance(images, dict):
                images = [images[e] for e in local[x].elements]
            transition[(x, y)] = [local[y].index[str(v)] for v in images]
        twist = {}
        for key, g in raw.get("twists", {}).items():
            c = tuple(idx[s] for s in key.split("<"))
            twist[c] = local[c[2]].index[str(g)]
    except (KeyError, TypeError, ValueError) as exc:
        raise GlobcatError(f"malformed complex of groups description: {exc!r}") from None
    return ComplexOfGroups(P, local, transition, twist)


def validate_complex(data):
    """Validate a complex given as a :class:`ComplexOfGroups` or as a JSON dictionary."""
    if isinstance(data, ComplexOfGroups):
        return data.validate()
    return complex_from_dict(data)


def simple_complex(P, local, transition, name=None):
    """A complex with all twists trivial; transitions on strict pairs are required."""
    return ComplexOfGroups(P, local, transition, {}, name=name)


def point_complex(G):
    P = poset_from_relations(["0"], [])
    return ComplexOfGroups(P, [G], {}, name=f"pt({G.name})")


# -- associated category --------------------------------------------------------------

def associated_category(cg):
    """``c(G)``: hom(x, y) = G(y) for ``x <= y`` with ``g o h = g . G(y,z)(h) . G(x,y,z)``.

    Morphism ids are ``"x->y|g"``; associativity is re-verified on construction.
    """
    P, G, T, t = cg.P, cg.local, cg.transition, cg.twist
    mors, src, tgt, grp_el = [], [], [], []
    block = {}
    for x, y in cg.pairs():
        block[(x, y)] = len(mors)
        for g in range(G[y].order):
            mors.append(f"{P.objects[x]}->{P.objects[y]}|{G[y].elements[g]}")
            src.append(x)
            tgt.append(y)
            grp_el.append(g)
    m = len(mors)
    comp = -np.ones((m, m), dtype=np.int64)
    for x, y, z in cg.chains(3):
        Gz = G[z]
        hs = np.arange(G[y].order)
        gs = np.arange(Gz.order)
        prod = Gz.mult[Gz.mult[gs[:, None], T[(y, z)][hs][None, :]], t[(x, y, z)]]
        comp[np.ix_(block[(y, z)] + gs, block[(x, y)] + hs)] = block[(x, z)] + prod
    ident = [block[(x, x)] + G[x].unit for x in range(P.n_objects)]
    return FinCategory(list(P.objects), mors, src, tgt, ident, comp, name=f"c({cg.name})" if cg.name else None)


# -- conditions (a) and (b) -----------------------------------------------------------------

@dataclass
class ConditionsReport:
    """Result of :func:`check_conditions`; truthy iff no violation was found."""

    variant: str
    violations: list = field(default_factory=list)
    finite_automorphisms: bool = True
    non_free_pairs: list = field(default_factory=list)

    def __bool__(self):
        return not self.violations and self.finite_automorphisms

    def to_dict(self):
        return {
            "variant": self.variant,
            "ok": bool(self),
            "violations": self.violations,
            "finite_automorphisms": self.finite_automorphisms,
            "lint_non_injective_pairs": self.non_free_pairs,
        }


def check_conditions(C, variant="plain"):
    """Check (a) and (b) (``variant="plain"``) or (a) and the dual (b) (``variant="opposite"``).

    (b) is checked in the equivalent form: for each ``f: x -> y`` the map
    ``alpha -> alpha o f`` from ``C(y, y)`` to ``C(x, y)`` is bijective (and
    dually ``omega -> f o omega`` from ``C(x, x)``).  The report also lists
    pairs where the other-side action is not free, which is where transition
    homomorphisms of the corresponding complex fail to be injective.
    """
    if variant not in ("plain", "opposite"):
        raise ValueError("variant must be 'plain' or 'opposite'")
    rep = ConditionsReport(variant)
    R = reachability(C)
    n = C.n_objects
    for x in range(n):
        for y in range(x + 1, n):
            if R[x, y] and R[y, x]:
                rep.violations.append({"condition": "a", "objects": [C.objects[x], C.objects[y]]})
    for f in range(C.n_morphisms):
        x, y = int(C.src[f]), int(C.tgt[f])
        hom = C.hom(x, y)
        if variant == "plain":
            acting = C.hom(y, y)
            image = C.comp[acting, f]
            other = C.comp[f, C.hom(x, x)]
        else:
            acting = C.hom(x, x)
            image = C.comp[f, acting]
            other = C.comp[C.hom(y, y), f]
        if len(np.unique(image)) != len(image) or len(image) != len(hom):
            rep.violations.append({"condition": "b" if variant == "plain" else "b_op", "morphism": C.morphisms[f]})
        if len(np.unique(other)) != len(other):
            pair = [C.objects[x], C.objects[y]]
            if pair not in rep.non_free_pairs:
                rep.non_free_pairs.append(pair)
    return rep


# -- reconstruction -------------------------------------------------------------------------

def _strip(prefix, label):
    return label[len(prefix):] if label.startswith(prefix) else label


def default_choices(C):
    """``f_{y,x}`` for every comparable pair: the identity on the diagonal, else a
    unit-labeled morphism ``"x->y|e"`` when present, else the least morphism id."""
    choices = {}
    R = reachability(C)
    for x, y in np.argwhere(R).tolist():
        if x == y:
            choices[(x, y)] = int(C.identity[x])
            continue
        hom = C.hom(x, y).tolist()
        unit = _strip(f"{C.objects[y]}->{C.objects[y]}|", C.morphisms[C.identity[y]])
        want = f"{C.objects[x]}->{C.objects[y]}|{unit}"
        hits = [f for f in hom if C.morphisms[f] == want]
        choices[(x, y)] = hits[0] if hits else min(hom, key=lambda f: C.morphisms[f])
    return choices


def random_choices(C, seed):
    """Choices drawn uniformly from each hom set with ``numpy.random.default_rng(seed)``."""
    rng = np.random.default_rng(seed)
    choices = {}
    for x, y in np.argwhere(reachability(C)).tolist():
        hom = C.hom(x, y)
        choices[(x, y)] = int(C.identity[x]) if x == y else int(hom[rng.integers(len(hom))])
    return choices


def _solve_left(C, acting, f, target):
    """The unique ``alpha`` in ``acting`` with ``alpha o f == target``."""
    hit = acting[C.comp[acting, f] == target]
    if len(hit) != 1:
        raise ConditionsFailed([{"condition": "b", "morphism": C.morphisms[f]}])
    return int(hit[0])


def reconstruct_complex(C, choices=None):
    """Build ``aut: pos(C) -> grp`` from choices ``f_{y,x}`` and ``kappa: c(aut) -> C``.

    ``choices`` maps object index pairs ``(x, y)`` with a morphism ``x -> y`` to a
    morphism index; the default is :func:`default_choices`.  Returns
    ``(complex, kappa)`` with ``kappa`` verified to be an isomorphism.
    """
    rep = check_conditions(C, "plain")
    if not rep:
        raise ConditionsFailed(rep.violations)
    choices = dict(default_choices(C) if choices is None else choices)
    R = reachability(C)
    for (x, y), f in choices.items():
        if C.src[f] != x or C.tgt[f] != y:
            raise GlobcatError(f"choice for {C.objects[x]}<={C.objects[y]} has the wrong endpoints")
    for x, y in np.argwhere(R).tolist():
        if (x, y) not in choices:
            raise GlobcatError(f"no choice for {C.objects[x]} <= {C.objects[y]}")
        if x == y and choices[(x, y)] != C.identity[x]:
            raise GlobcatError("choices must be identities on the diagonal")
    n = C.n_objects
    P = _poset_from_matrix(list(C.objects), R, name=f"pos({C.name})" if C.name else None)
    autos = [C.hom(x, x) for x in range(n)]
    local = []
    for x in range(n):
        a = autos[x]
        pos = {int(v): k for k, v in enumerate(a)}
        table = [[pos[int(C.comp[g, h])] for h in a] for g in a]
        names = [_strip(f"{C.objects[x]}->{C.objects[x]}|", C.morphisms[g]) for g in a]
        local.append(FinGroup(names, pos[int(C.identity[x])], table, name=f"Aut({C.objects[x]})"))
    position = [{int(v): k for k, v in enumerate(a)} for a in autos]
    transition = {}
    for x, y in np.argwhere(R).tolist():
        f = choices[(x, y)]
        transition[(x, y)] = [
            position[y][_solve_left(C, autos[y], f, C.comp[f, b])] for b in autos[x].tolist()
        ]
    twist = {}
    cg0 = ComplexOfGroups(P, local, transition, check=False)
    for x, y, z in cg0.chains(3):
        target = C.comp[choices[(y, z)], choices[(x, y)]]
        twist[(x, y, z)] = position[z][_solve_left(C, autos[z], choices[(x, z)], target)]
    cg = ComplexOfGroups(P, local, transition, twist, name=f"aut({C.name})" if C.name else None)
    cC = associated_category(cg)
    mm = np.empty(cC.n_morphisms, dtype=np.int64)
    for k in range(cC.n_morphisms):
        x, y = int(cC.src[k]), int(cC.tgt[k])
        gamma = autos[y][cg.local[y].index[cC.morphisms[k].split("|", 1)[1]]]
        mm[k] = C.comp[gamma, choices[(x, y)]]
    kappa = FinFunctor(cC, C, np.arange(n), mm)
    if not kappa.is_isomorphism():
        raise GlobcatError("kappa is not an isomorphism")
    return cg, kappa


# -- Grothendieck construction ----------------------------------------------------------------

class CatDiagram:
    """A strict functor ``K -> cat``: one category per object and one functor per morphism."""

    def __init__(self, K, categories, functors, check=True):
        self.K = K
        self.categories = list(categories)
        self.functors = list(functors)
        if check:
            self.validate()

    def validate(self):
        K, cats, fun = self.K, self.categories, self.functors
        if len(cats) != K.n_objects or len(fun) != K.n_morphisms:
            raise GlobcatError("diagram needs one category per object and one functor per morphism")
        for f in range(K.n_morphisms):
            F = fun[f]
            if F.domain != cats[K.src[f]] or F.codomain != cats[K.tgt[f]]:
                raise GlobcatError(f"functor for {K.morphisms[f]} has the wrong endpoints")
        for x in range(K.n_objects):
            F = fun[K.identity[x]]
            if not (np.array_equal(F.obj_map, np.arange(cats[x].n_objects)) and np.array_equal(F.mor_map, np.arange(cats[x].n_morphisms))):
                raise GlobcatError(f"identity of {K.objects[x]} is not sent to an identity functor")
        gs, fs = np.nonzero(K.comp >= 0)
        for g, f in zip(gs.tolist(), fs.tolist()):
            gf = fun[K.comp[g, f]]
            if not (np.array_equal(gf.mor_map, fun[g].mor_map[fun[f].mor_map]) and np.array_equal(gf.obj_map, fun[g].obj_map[fun[f].obj_map])):
                raise GlobcatError(f"diagram is not functorial at ({K.morphisms[g]}, {K.morphisms[f]})")
        return self


def constant_diagram(K, C):
    ident = FinFunctor(C, C, np.arange(C.n_objects), np.arange(C.n_morphisms), check=False)
    return CatDiagram(K, [C] * K.n_objects, [ident] * K.n_morphisms)


def grothendieck(diagram, max_morphisms=DEFAULT_MAX_MORPHISMS):
    """``K int F``: objects ``(y, k)``; morphisms ``(psi, f): (x, j) -> (y, k)`` with
    ``psi: F(f)(x) -> y``; ``(phi, g) o (psi, f) = (phi o F(g)(psi), g o f)``."""
    K, cats, fun = diagram.K, diagram.categories, diagram.functors
    obj_key, objs = {}, []
    for k in range(K.n_objects):
        for y in range(cats[k].n_objects):
            obj_key[(y, k)] = len(objs)
            objs.append(f"({cats[k].objects[y]},{K.objects[k]})")
    mor_key, mors, src, tgt = {}, [], [], []
    for f in range(K.n_morphisms):
        j, k = int(K.src[f]), int(K.tgt[f])
        Cj, Ck, F = cats[j], cats[k], fun[f]
        for x in range(Cj.n_objects):
            for psi in np.nonzero(Ck.src == F.obj_map[x])[0].tolist():
                mor_key[(psi, f, x)] = len(mors)
                mors.append(f"({Ck.morphisms[psi]},{K.morphisms[f]})@{Cj.objects[x]}")
                src.append(obj_key[(x, j)])
                tgt.append(obj_key[(int(Ck.tgt[psi]), k)])
                if len(mors) > max_morphisms:
                    raise SizeLimitExceeded("Grothendieck construction morphisms", max_morphisms)
    keys = list(mor_key)
    m = len(keys)
    comp = -np.ones((m, m), dtype=np.int64)
    by_src = {}
    for a, (psi, f, x) in enumerate(keys):
        by_src.setdefault(src[a], []).append(a)
    for b, (psi, f, x) in enumerate(keys):
        for a in by_src.get(tgt[b], []):
            phi, g, _ = keys[a]
            Cl = cats[K.tgt[g]]
            new = Cl.comp[phi, fun[g].mor_map[psi]]
            comp[a, b] = mor_key[(int(new), int(K.comp[g, f]), x)]
    ident = [mor_key[(int(cats[k].identity[y]), int(K.identity[k]), y)] for (y, k) in obj_key]
    return FinCategory(objs, mors, src, tgt, ident, comp, name=f"{K.name or 'K'}∫F")


def simple_complex_diagram(cg):
    """A simple complex as the strict diagram ``x -> B G(x)`` over its poset."""
    from .fincat.algebra import classifying_category

    if not cg.is_simple():
        raise GlobcatError("only simple complexes are strict diagrams")
    P = cg.P
    cats = [classifying_category(g) for g in cg.local]
    fun = [
        FinFunctor(cats[P.src[f]], cats[P.tgt[f]], [0], cg.transition[(int(P.src[f]), int(P.tgt[f]))])
        for f in range(P.n_morphisms)
    ]
    return CatDiagram(P, cats, fun)


@dataclass
class GrothendieckComparison:
    functor: FinFunctor
    isomorphism: bool
    base_is_poset: bool
    homology: object = None

    def __bool__(self):
        return self.isomorphism

    def to_dict(self):
        return {
            "isomorphism": self.isomorphism,
            "base_is_poset": self.base_is_poset,
            "object_counts": [self.functor.domain.n_objects, self.functor.codomain.n_objects],
            "morphism_counts": [self.functor.domain.n_morphisms, self.functor.codomain.n_morphisms],
            "homology": self.homology.to_dict() if self.homology is not None else None,
        }


def fun_grothendieck_comparison(I, diagram, max_functors=DEFAULT_MAX_FUNCTORS, k_max=1):
    """``K int Fun(I, F) -> Fun(I, K int F)`` from the evaluation functor.

    An object ``(psi, k)`` goes to ``i -> (psi(i), k)``; a morphism
    ``(tau, f)`` goes to the transformation with components ``(tau_i, f)``.
    The result is checked for being an isomorphism; when it is not, the
    homology comparison verdict through degree ``k_max`` is attached.
    """
    if not is_strongly_connected(I):
        raise NotStronglyConnected(*first_missing_pair(I))
    K, cats, fun = diagram.K, diagram.categories, diagram.functors
    KF = grothendieck(diagram)
    FI = [functor_category(I, c, max_functors) for c in cats]
    fdiag = CatDiagram(
        K, FI, [postcompose(FI[K.src[f]], FI[K.tgt[f]], fun[f]) for f in range(K.n_morphisms)], check=False
    )
    KFI = grothendieck(fdiag)
    target = functor_category(I, KF, max_functors)
    mkey = {m: t for t, m in enumerate(KF.morphisms)}
    # recover (index data) for each object / morphism of K int Fun(I, F)
    obj_data = [(y, k) for k in range(K.n_objects) for y in range(FI[k].n_objects)]
    om = np.empty(KFI.n_objects, dtype=np.int64)
    for t, (psi, k) in enumerate(obj_data):
        Ck = cats[k]
        row = [
            mkey[f"({Ck.morphisms[FI[k].mor_maps[psi][u]]},{K.morphisms[K.identity[k]]})@{Ck.objects[Ck.src[FI[k].mor_maps[psi][u]]]}"]
            for u in range(I.n_morphisms)
        ]
        om[t] = target.index_of_functor(np.array(row, dtype=np.int64))
    mm = np.empty(KFI.n_morphisms, dtype=np.int64)
    t = 0
    for f in range(K.n_morphisms):
        j, k = int(K.src[f]), int(K.tgt[f])
        Fj, Fk, Ff = FI[j], FI[k], fdiag.functors[f]
        for x in range(Fj.n_objects):
            for tau in np.nonzero(Fk.src == Ff.obj_map[x])[0].tolist():
                comps = []
                for i in range(I.n_objects):
                    Ck = cats[k]
                    c = Fk.components[tau][i]
                    xi = cats[j].objects[Fj.obj_maps[x][i]]
                    comps.append(mkey[f"({Ck.morphisms[c]},{K.morphisms[f]})@{xi}"])
                a = KFI.src[t]
                b = KFI.tgt[t]
                mm[t] = target.index_of_nat(om[a], om[b], comps)
                t += 1
    F = FinFunctor(KFI, target, om, mm)
    iso = F.is_isomorphism()
    verdict = None
    if not iso:
        from .homology import compare

        verdict = compare(F, k_max)
    return GrothendieckComparison(F, iso, is_poset(K), verdict)
