"""Finite monoids and groups, classifying categories, M-objects, EG and quotients."""
from itertools import permutations

import numpy as np

from ..errors import ActionNotFree, InvalidMonoid, NonAssociative, SizeLimitExceeded
from .category import FinCategory, FinFunctor
from .funcat import DEFAULT_MAX_FUNCTORS, functor_category


class FinMonoid:
    """A finite monoid given by a multiplication table on indices.

    ``mult[a, b]`` is the index of ``a * b``; the unit is ``elements[unit]``.
    """

    def __init__(self, elements, unit, mult, name=None, check=True):
        self.elements = tuple(str(e) for e in elements)
        self.index = {e: k for k, e in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise InvalidMonoid("duplicate elements")
        self.unit = int(unit)
        self.mult = np.array(mult, dtype=np.int64).reshape(len(self.elements), len(self.elements))
        self.mult.setflags(write=False)
        self.name = name
        if check:
            self.validate()

    @property
    def order(self):
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name or ''} of order {self.order}>"

    def __eq__(self, other):
        if not isinstance(other, FinMonoid):
            return NotImplemented
        return (
            self.elements == other.elements
            and self.unit == other.unit
            and np.array_equal(self.mult, other.mult)
        )

    def __hash__(self):
        return hash(self.elements)

    def validate(self):
        n = self.order
        if n == 0 or not 0 <= self.unit < n:
            raise InvalidMonoid("a monoid needs a unit element")
        if self.mult.min() < 0 or self.mult.max() >= n:
            raise InvalidMonoid("multiplication table out of range")
        ar = np.arange(n)
        if np.any(self.mult[self.unit] != ar) or np.any(self.mult[:, self.unit] != ar):
            raise InvalidMonoid("unit law fails")
        # (ab)c == a(bc) for all triples, vectorised over the table
        left = self.mult[self.mult, :]          # left[a, b, c] = (ab)c
        right = self.mult[:, self.mult]         # right[a, b, c] = a(bc)
        bad = np.argwhere(left != right)
        if bad.size:
            a, b, c = bad[0]
            raise NonAssociative(self.elements[a], self.elements[b], self.elements[c])
        return self

    def mul(self, a, b):
        return self.elements[self.mult[self.index[a], self.index[b]]]

    def to_dict(self):
        return {
            "elements": list(self.elements),
            "unit": self.elements[self.unit],
            "mult": [[self.elements[v] for v in row] for row in self.mult.tolist()],
        }

    def is_group(self):
        return bool(np.all((self.mult == self.unit).any(axis=1)))


class FinGroup(FinMonoid):
    """A finite monoid in which every element has a verified inverse."""

    def validate(self):
        super().validate()
        hits = self.mult == self.unit
        if not hits.any(axis=1).all():
            bad = int(np.nonzero(~hits.any(axis=1))[0][0])
            raise InvalidMonoid(f"element {self.elements[bad]} has no inverse")
        inv = hits.argmax(axis=1)
        if np.any(self.mult[inv, np.arange(self.order)] != self.unit):
            raise InvalidMonoid("left and right inverses differ")
        self.inverse = inv
        self.inverse.setflags(write=False)
        return self

    def conj(self, g, x):
        """``g x g^-1`` on indices."""
        return self.mult[self.mult[g, x], self.inverse[g]]

    def element_orders(self):
        n = self.order
        orders = np.zeros(n, dtype=np.int64)
        cur = np.arange(n)
        for k in range(1, n + 1):
            hit = (cur == self.unit) & (orders == 0)
            orders[hit] = k
            cur = self.mult[cur, np.arange(n)]
        return orders

    def is_subgroup(self, subset):
        s = sorted(set(int(x) for x in subset))
        if not s or self.unit not in s:
            return False
        mask = np.zeros(self.order, dtype=bool)
        mask[s] = True
        return bool(mask[self.mult[np.ix_(s, s)]].all() and mask[self.inverse[s]].all())

    def subgroup(self, subset, name=None):
        """The subgroup on the given element indices (verified)."""
        s = sorted(set(int(x) for x in subset))
        if not self.is_subgroup(s):
            raise InvalidMonoid("element subset is not a subgroup")
        pos = {v: k for k, v in enumerate(s)}
        table = [[pos[int(self.mult[a, b])] for b in s] for a in s]
        return FinGroup([self.elements[a] for a in s], pos[self.unit], table, name=name)

    def centralizer(self, subset):
        """Indices of elements commuting with every element of ``subset``."""
        subset = np.asarray(list(subset), dtype=np.int64)
        if subset.size == 0:
            return np.arange(self.order)
        ok = (self.mult[:, subset] == self.mult[subset, :].T).all(axis=1)
        return np.nonzero(ok)[0]

    def generated_subgroup(self, gens):
        elems = {self.unit}
        frontier = [self.unit]
        gens = [int(g) for g in gens]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = int(self.mult[x, g])
                    if y not in elems:
                        elems.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(elems)

    def commutator_subgroup(self):
        n = self.order
        a = np.arange(n)
        comms = self.mult[self.mult[self.mult[a[:, None], a[None, :]], self.inverse[a][:, None]], self.inverse[a][None, :]]
        return self.generated_subgroup(np.unique(comms))

    def generators(self):
        """A small generating set chosen greedily (deterministic)."""
        gens, span = [], {self.unit}
        orders = self.element_orders()
        for x in sorted(range(self.order), key=lambda k: (-orders[k], k)):
            if x not in span:
                gens.append(x)
                span = set(self.generated_subgroup(gens))
        return gens


def monoid_from_dict(raw, name=None):
    """Build a monoid (or a group, if every element is invertible) from the JSON layout."""
    try:
        elements = [str(e) for e in raw["elements"]]
        index = {e: k for k, e in enumerate(elements)}
        unit = index[str(raw["unit"])]
        mult = [[index[str(v)] for v in row] for row in raw["mult"]]
    except (KeyError, TypeError) as exc:
        raise InvalidMonoid(f"malformed monoid description: {exc}") from None
    mon = FinMonoid(elements, unit, mult, name=name)
    if mon.is_group():
        return FinGroup(elements, unit, mult, name=name)
    return mon


def cyclic_group(n):
    """C_n with elements ``"0" .. "n-1"`` under addition mod n."""
    ar = np.arange(n)
    return FinGroup([str(k) for k in range(n)], 0, (ar[:, None] + ar[None, :]) % n, name=f"C{n}")


def symmetric_group(n):
    """S_n; elements are permutation words, ``(p*q)(i) = p(q(i))``."""
    perms = list(permutations(range(n)))
    index = {p: k for k, p in enumerate(perms)}
    table = [[index[tuple(p[q[i]] for i in range(n))] for q in perms] for p in perms]
    return FinGroup(["".join(map(str, p)) for p in perms], 0, table, name=f"S{n}")


def trivial_monoid():
    return FinGroup(["1"], 0, [[0]], name="C1")


def fiedorowicz_monoid():
    """The five-element monoid generated by a, b with a^2 = a = aba and b^2 = b = bab."""
    elements = ["1", "a", "b", "ab", "ba"]
    words = {"1": "", "a": "a", "b": "b", "ab": "ab", "ba": "ba"}

    def reduce(w):
        changed = True
        while changed:
            changed = False
            for pat, rep in (("aa", "a"), ("bb", "b"), ("aba", "a"), ("bab", "b")):
                if pat in w:
                    w = w.replace(pat, rep, 1)
                    changed = True
        return w or "1"

    index = {e: k for k, e in enumerate(elements)}
    table = [[index[reduce(words[x] + words[y])] for y in elements] for x in elements]
    return FinMonoid(elements, 0, table, name="Fiedorowicz")


def idempotent_monoid():
    """The two-element monoid {1, e} with e*e = e."""
    return FinMonoid(["1", "e"], 0, [[0, 1], [1, 1]], name="Idem2")


def direct_product(G, H, name=None):
    nh = H.order
    elements = [f"({a},{b})" for a in G.elements for b in H.elements]
    ga = np.repeat(np.arange(G.order), nh)
    hb = np.tile(np.arange(nh), G.order)
    table = G.mult[ga[:, None], ga[None, :]] * nh + H.mult[hb[:, None], hb[None, :]]
    cls = FinGroup if isinstance(G, FinGroup) and isinstance(H, FinGroup) else FinMonoid
    return cls(elements, G.unit * nh + H.unit, table, name=name)


# -- categories from monoids and groups -----------------------------------------------

def classifying_category(M):
    """BM: one object ``*``, morphisms the elements of M, composition ``g o f = g*f``."""
    n = M.order
    return FinCategory(
        ["*"], list(M.elements), np.zeros(n), np.zeros(n), [M.unit], M.mult, name=f"B{M.name or 'M'}", check=False
    )


def enumerate_monoid_homs(M, C, x):
    """All monoid homomorphisms ``M -> C(x, x)`` as arrays of morphism indices.

    Brute force over images of a generating set with closure; used as an
    independent cross-check of functor enumeration for ``Fun(BM, C)``.
    """
    endo = C.hom(x, x)
    # generating set of M by closure
    gens, span = [], {M.unit}
    for a in range(M.order):
        if a not in span:
            gens.append(a)
            span = _monoid_closure(M, gens)
    out = []
    for images in np.array(np.meshgrid(*([endo] * len(gens)), indexing="ij")).reshape(len(gens), -1).T if gens else [()]:
        rho = -np.ones(M.order, dtype=np.int64)
        rho[M.unit] = C.identity[x]
        for g, im in zip(gens, images):
            rho[g] = im
        frontier = [M.unit] + list(gens)
        ok = True
        seen = set(frontier)
        while frontier and ok:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = int(M.mult[a, g])
                    val = C.comp[rho[a], rho[g]]
                    if rho[b] == -1:
                        rho[b] = val
                    elif rho[b] != val:
                        ok = False
                        break
                    if b not in seen:
                        seen.add(b)
                        nxt.append(b)
                if not ok:
                    break
            frontier = nxt
        if not ok:
            continue
        if np.all(C.comp[rho[:, None], rho[None, :]] == rho[M.mult]):
            out.append(rho)
    out.sort(key=lambda r: tuple(r.tolist()))
    return out


def _monoid_closure(M, gens):
    span = {M.unit}
    frontier = [M.unit]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = int(M.mult[a, g])
                if b not in span:
                    span.add(b)
                    nxt.append(b)
        frontier = nxt
    return span


def m_objects_category(M, C):
    """The category MC of M-objects, built directly (independent of functor enumeration).

    Objects are pairs (x, rho) with id ``"x@[rho images]"``; morphisms are
    equivariant C-morphisms, with id ``"f:(source)->(target)"``.
    Returns the category and the list of ``(x, rho)`` pairs.
    """
    objs = []
    for x in range(C.n_objects):
        for rho in enumerate_monoid_homs(M, C, x):
            objs.append((x, rho))
    oids = [f"{C.objects[x]}@[" + ",".join(C.morphisms[r] for r in rho) + "]" for x, rho in objs]
    mors, src, tgt = [], [], []
    for s, (x, rx) in enumerate(objs):
        for t, (y, ry) in enumerate(objs):
            for f in C.hom(x, y).tolist():
                if np.all(C.comp[ry, f] == C.comp[f, rx]):
                    mors.append(f)
                    src.append(s)
                    tgt.append(t)
    mors = np.array(mors, dtype=np.int64)
    src = np.array(src, dtype=np.int64)
    tgt = np.array(tgt, dtype=np.int64)
    key = {(int(f), int(s), int(t)): k for k, (f, s, t) in enumerate(zip(mors, src, tgt))}
    m = len(mors)
    comp = -np.ones((m, m), dtype=np.int64)
    for g in range(m):
        for f in np.nonzero(tgt == src[g])[0].tolist():
            comp[g, f] = key[(int(C.comp[mors[g], mors[f]]), int(src[f]), int(tgt[g]))]
    ident = [key[(int(C.identity[x]), k, k)] for k, (x, _) in enumerate(objs)]
    mids = [f"{C.morphisms[f]}:{oids[s]}->{oids[t]}" for f, s, t in zip(mors.tolist(), src.tolist(), tgt.tolist())]
    MC = FinCategory(oids, mids, src, tgt, ident, comp, name=f"{M.name or 'M'}{C.name or 'C'}")
    return MC, objs, mors


def m_objects_iso(M, C, max_functors=DEFAULT_MAX_FUNCTORS):
    """Build MC directly and the evaluation isomorphism ``Fun(BM, C) -> MC``.

    Returns ``(MC, ev)``; ``ev`` is verified to be a functor that is bijective
    on objects and on morphisms.
    """
    BM = classifying_category(M)
    F = functor_category(BM, C, max_functors=max_functors)
    MC, objs, mors = m_objects_category(M, C)
    okey = {(x, tuple(rho.tolist())): k for k, (x, rho) in enumerate(objs)}
    om = np.array(
        [okey[(int(F.obj_maps[k, 0]), tuple(F.mor_maps[k].tolist()))] for k in range(F.n_objects)], dtype=np.int64
    ).reshape(F.n_objects)
    mkey = {(int(f), int(s), int(t)): k for k, (f, s, t) in enumerate(zip(mors, MC.src, MC.tgt))}
    mm = np.array(
        [mkey[(int(F.components[k, 0]), int(om[F.src[k]]), int(om[F.tgt[k]]))] for k in range(F.n_morphisms)],
        dtype=np.int64,
    ).reshape(F.n_morphisms)
    ev = FinFunctor(F, MC, om, mm)
    if not ev.is_isomorphism():
        raise AssertionError("evaluation functor Fun(BM, C) -> MC is not bijective")
    return MC, ev


# -- translation groupoid, actions and quotients -----------------------------------

class GroupAction:
    """A right action of a group on a finite category by automorphisms.

    ``obj_perm[g, x]`` is ``x . g`` and ``mor_perm[g, f]`` is ``f . g``.
    """

    def __init__(self, group, category, obj_perm, mor_perm, check=True):
        self.group = group
        self.category = category
        self.obj_perm = np.asarray(obj_perm, dtype=np.int64)
        self.mor_perm = np.asarray(mor_perm, dtype=np.int64)
        if check:
            self.validate()

    def validate(self):
        G, C = self.group, self.category
        for g in range(G.order):
            FinFunctor(C, C, self.obj_perm[g], self.mor_perm[g])
        ar = np.arange(G.order)
        # (x.g).h == x.(gh)
        lhs = self.obj_perm[ar[None, :, None], self.obj_perm[ar[:, None, None], np.arange(C.n_objects)[None, None, :]]]
        rhs = self.obj_perm[G.mult[ar[:, None], ar[None, :]]]
        if not np.array_equal(lhs, rhs):
            raise InvalidMonoid("object action is not a right action")
        lhs = self.mor_perm[ar[None, :, None], self.mor_perm[ar[:, None, None], np.arange(C.n_morphisms)[None, None, :]]]
        rhs = self.mor_perm[G.mult[ar[:, None], ar[None, :]]]
        if not np.array_equal(lhs, rhs):
            raise InvalidMonoid("morphism action is not a right action")
        return self

    def restrict(self, subset):
        subset = sorted(int(h) for h in subset)
        H = self.group.subgroup(subset)
        return GroupAction(H, self.category, self.obj_perm[subset], self.mor_perm[subset], check=False)


def translation_groupoid(G):
    """EG with objects G and morphisms ``(g,h): h -> g``, plus the right translation action."""
    n = G.order
    ar = np.arange(n)
    tg = np.repeat(ar, n)   # morphism index g*n + h
    sh = np.tile(ar, n)
    comp = -np.ones((n * n, n * n), dtype=np.int64)
    # (g,h) o (h,k) = (g,k)
    for a in range(n * n):
        fs = np.nonzero(tg == sh[a])[0]
        comp[a, fs] = tg[a] * n + sh[fs]
    mids = [f"({G.elements[g]},{G.elements[h]})" for g, h in zip(tg.tolist(), sh.tolist())]
    EG = FinCategory(list(G.elements), mids, sh, tg, ar * n + ar, comp, name=f"E{G.name or 'G'}")
    obj_perm = G.mult[:, :].T.copy()                      # obj_perm[a, x] = x * a
    mor_perm = (G.mult[tg[None, :], ar[:, None]] * n + G.mult[sh[None, :], ar[:, None]])
    return EG, GroupAction(G, EG, obj_perm, mor_perm)


def _orbit_id(ids):
    return ids[0] if len(ids) == 1 else "{" + "|".join(ids) + "}"


def quotient_by_free_action(action):
    """The orbit category ``C/G`` of a free action; returns ``(C/G, quotient functor)``.

    Raises :class:`ActionNotFree` if some non-unit element fixes an object.
    """
    G, C = action.group, action.category
    for g in range(G.order):
        if g == G.unit:
            continue
        fixed = np.nonzero(action.obj_perm[g] == np.arange(C.n_objects))[0]
        if fixed.size:
            raise ActionNotFree(C.objects[fixed[0]], G.elements[g])
    obj_orbit = np.min(action.obj_perm, axis=0)         # representative: least index in the orbit
    mor_orbit = np.min(action.mor_perm, axis=0)
    obj_reps = np.unique(obj_orbit)
    mor_reps = np.unique(mor_orbit)
    oq = np.searchsorted(obj_reps, obj_orbit)
    mq = np.searchsorted(mor_reps, mor_orbit)
    nq, mqn = len(obj_reps), len(mor_reps)
    src = oq[C.src[mor_reps]]
    tgt = oq[C.tgt[mor_reps]]
    comp = -np.ones((mqn, mqn), dtype=np.int64)
    for a, g in enumerate(mor_reps.tolist()):
        for b, f in enumerate(mor_reps.tolist()):
            if src[a] != tgt[b]:
                continue
            # translate g so that its source is the target of f (unique by freeness)
            k = np.nonzero(C.src[action.mor_perm[:, g]] == C.tgt[f])[0]
            comp[a, b] = mq[C.comp[action.mor_perm[k[0], g], f]]
    oids = [_orbit_id([C.objects[x] for x in np.nonzero(oq == q)[0]]) for q in range(nq)]
    mids = [_orbit_id([C.morphisms[f] for f in np.nonzero(mq == q)[0]]) for q in range(mqn)]
    ident = mq[C.identity[obj_reps]]
    Q = FinCategory(oids, mids, src, tgt, ident, comp, name=f"{C.name or 'C'}/{G.name or 'G'}")
    return Q, FinFunctor(C, Q, oq, mq)


def check_group_order(G, limit):
    if G.order > limit:
        raise SizeLimitExceeded(f"group order {G.order}", limit)
