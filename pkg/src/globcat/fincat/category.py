"""Finite categories, functors and natural transformations as integer tables.

A :class:`FinCategory` keeps its objects and morphisms as tuples of string
ids in a fixed order; all structure maps are numpy integer arrays indexed by
position.  ``comp[g, f]`` is the index of ``g o f`` (``-1`` when the target of
``f`` is not the source of ``g``).
"""
from functools import cached_property

import numpy as np

from .. import _kernels
from ..errors import (
    BadIdentity,
    InvalidCategory,
    InvalidFunctor,
    InvalidNatTransformation,
    MissingComposite,
    NonAssociative,
)


def _frozen(arr, dtype=np.int64):
    out = np.array(arr, dtype=dtype)
    out.setflags(write=False)
    return out


class FinCategory:
    """A finite category given by a total composition table.

    Parameters
    ----------
    objects, morphisms : sequence of str
        Distinct ids, kept in the given order.
    src, tgt : int arrays of length ``len(morphisms)``
        Indices into ``objects``.
    identity : int array of length ``len(objects)``
        Index of the identity morphism of each object.
    comp : int array of shape ``(m, m)``
        ``comp[g, f]`` is ``g o f`` or ``-1``.
    check : bool
        Verify all category axioms exhaustively (default).
    """

    def __init__(self, objects, morphisms, src, tgt, identity, comp, name=None, check=True):
        self.objects = tuple(str(o) for o in objects)
        self.morphisms = tuple(str(f) for f in morphisms)
        self.src = _frozen(src).reshape(len(self.morphisms))
        self.tgt = _frozen(tgt).reshape(len(self.morphisms))
        self.identity = _frozen(identity).reshape(len(self.objects))
        m = len(self.morphisms)
        self.comp = _frozen(comp).reshape(m, m)
        self.name = name
        self.obj_index = {o: k for k, o in enumerate(self.objects)}
        self.mor_index = {f: k for k, f in enumerate(self.morphisms)}
        if len(self.obj_index) != len(self.objects):
            raise InvalidCategory("duplicate object ids")
        if len(self.mor_index) != len(self.morphisms):
            raise InvalidCategory("duplicate morphism ids")
        if check:
            self.validate()

    # -- basic accessors -----------------------------------------------------
    @property
    def n_objects(self):
        return len(self.objects)

    @property
    def n_morphisms(self):
        return len(self.morphisms)

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<FinCategory{label}: {self.n_objects} objects, {self.n_morphisms} morphisms>"

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FinCategory):
            return NotImplemented
        return (
            self.objects == other.objects
            and self.morphisms == other.morphisms
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.tgt, other.tgt)
            and np.array_equal(self.identity, other.identity)
            and np.array_equal(self.comp, other.comp)
        )

    def __hash__(self):
        return hash((self.objects, self.morphisms))

    @cached_property
    def _hom_table(self):
        n = self.n_objects
        key = self.src * n + self.tgt
        order = np.argsort(key, kind="stable")
        bounds = np.searchsorted(key[order], np.arange(n * n + 1))
        return order, bounds

    def hom(self, x, y):
        """Indices of morphisms ``x -> y`` (objects given as indices)."""
        order, bounds = self._hom_table
        k = x * self.n_objects + y
        return order[bounds[k]:bounds[k + 1]]

    def hom_counts(self):
        """Matrix of hom-set sizes, ``counts[x, y] = |C(x, y)|``."""
        n = self.n_objects
        counts = np.zeros((n, n), dtype=np.int64)
        np.add.at(counts, (self.src, self.tgt), 1)
        return counts

    def o(self, g, f):
        """Compose morphisms given by id: returns the id of ``g o f``."""
        r = self.comp[self.mor_index[g], self.mor_index[f]]
        if r < 0:
            raise ValueError(f"{g!r} and {f!r} are not composable")
        return self.morphisms[r]

    def is_identity(self, f):
        return self.identity[self.src[f]] == f

    @cached_property
    def non_identity(self):
        mask = np.ones(self.n_morphisms, dtype=bool)
        mask[self.identity] = False
        return np.nonzero(mask)[0]

    # -- validation ----------------------------------------------------------
    def validate(self):
        n, m = self.n_objects, self.n_morphisms
        if m and (self.src.min() < 0 or self.src.max() >= n or self.tgt.min() < 0 or self.tgt.max() >= n):
            raise InvalidCategory("source/target out of range")
        for x in range(n):
            e = self.identity[x]
            if not (0 <= e < m) or self.src[e] != x or self.tgt[e] != x:
                raise BadIdentity(self.objects[x], "identity is not an endomorphism of the object")
        composable = self.src[:, None] == self.tgt[None, :]
        defined = self.comp >= 0
        bad = np.argwhere(composable & ~defined)
        if bad.size:
            g, f = bad[0]
            raise MissingComposite(self.morphisms[g], self.morphisms[f])
        bad = np.argwhere(~composable & defined)
        if bad.size:
            g, f = bad[0]
            raise MissingComposite(self.morphisms[g], self.morphisms[f], "composite given for a non-composable pair")
        gs, fs = np.nonzero(composable)
        if gs.size:
            r = self.comp[gs, fs]
            if r.max() >= m:
                raise InvalidCategory("composite index out of range")
            wrong = np.nonzero((self.src[r] != self.src[fs]) | (self.tgt[r] != self.tgt[gs]))[0]
            if wrong.size:
                g, f = gs[wrong[0]], fs[wrong[0]]
                raise MissingComposite(self.morphisms[g], self.morphisms[f], "composite has wrong source or target")
        for x in range(n):
            e = self.identity[x]
            outs = np.nonzero(self.src == x)[0]
            ins = np.nonzero(self.tgt == x)[0]
            if np.any(self.comp[outs, e] != outs) or np.any(self.comp[e, ins] != ins):
                raise BadIdentity(self.objects[x], "identity is not a two-sided unit")
        hit = _kernels.first_assoc_violation(self.comp)
        if hit is not None:
            h, g, f = hit
            raise NonAssociative(self.morphisms[h], self.morphisms[g], self.morphisms[f])
        return self

    # -- serialisation -------------------------------------------------------
    def to_dict(self):
        gs, fs = np.nonzero(self.comp >= 0)
        return {
            "objects": list(self.objects),
            "morphisms": [
                {"id": f, "src": self.objects[self.src[k]], "tgt": self.objects[self.tgt[k]]}
                for k, f in enumerate(self.morphisms)
            ],
            "identities": {o: self.morphisms[self.identity[k]] for k, o in enumerate(self.objects)},
            "compose": [
                [self.morphisms[g], self.morphisms[f], self.morphisms[self.comp[g, f]]]
                for g, f in zip(gs.tolist(), fs.tolist())
            ],
        }


def make_category(objects, morphisms, identities, compose, name=None, check=True):
    """Build a category from ids.

    ``morphisms`` is a sequence of ``(id, src, tgt)``; ``identities`` maps
    object ids to morphism ids; ``compose`` is either a mapping
    ``(g, f) -> gf`` on ids or a callable ``(g, f) -> gf``.  Composites with an
    identity may be omitted.
    """
    objects = list(objects)
    oi = {o: k for k, o in enumerate(objects)}
    mids = [f for f, _, _ in morphisms]
    mi = {f: k for k, f in enumerate(mids)}
    try:
        src = [oi[s] for _, s, _ in morphisms]
        tgt = [oi[t] for _, _, t in morphisms]
    except KeyError as exc:
        raise InvalidCategory(f"morphism endpoint {exc.args[0]!r} is not an object") from None
    try:
        ident = [mi[identities[o]] for o in objects]
    except KeyError as exc:
        raise BadIdentity(exc.args[0], "missing or unknown identity") from None
    m = len(mids)
    comp = -np.ones((m, m), dtype=np.int64)
    ident_set = set(ident)
    lookup = compose if callable(compose) else (lambda g, f: compose.get((g, f)))
    for g in range(m):
        for f in range(m):
            if src[g] != tgt[f]:
                continue
            r = lookup(mids[g], mids[f])
            if r is None:
                if g in ident_set:
                    r = mids[f]
                elif f in ident_set:
                    r = mids[g]
                else:
                    raise MissingComposite(mids[g], mids[f])
            if r not in mi:
                raise MissingComposite(mids[g], mids[f], f"unknown composite {r!r}")
            comp[g, f] = mi[r]
    return FinCategory(objects, mids, src, tgt, ident, comp, name=name, check=check)


def validate_category(raw):
    """Validate a category description in the JSON layout and return a FinCategory.

    ``raw`` has keys ``objects``, ``morphisms`` (list of ``{"id","src","tgt"}``),
    ``identities`` and ``compose`` (list of ``[g, f, gf]``).
    """
    try:
        objects = list(raw["objects"])
        morphisms = [(d["id"], d["src"], d["tgt"]) for d in raw["morphisms"]]
        identities = dict(raw["identities"])
        table = {}
        for g, f, gf in raw.get("compose", []):
            if (g, f) in table and table[(g, f)] != gf:
                raise MissingComposite(g, f, "composite given twice with different values")
            table[(g, f)] = gf
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, MissingComposite):
            raise
        raise InvalidCategory(f"malformed category description: {exc}") from None
    return make_category(objects, morphisms, identities, table)


# -- functors --------------------------------------------------------------------

class FinFunctor:
    """A functor between finite categories, stored as index maps."""

    def __init__(self, domain, codomain, obj_map, mor_map, name=None, check=True):
        self.domain = domain
        self.codomain = codomain
        self.obj_map = _frozen(obj_map).reshape(domain.n_objects)
        self.mor_map = _frozen(mor_map).reshape(domain.n_morphisms)
        self.name = name
        if check:
            self.validate()

    def __repr__(self):
        return f"<FinFunctor {self.name or ''} {self.domain!r} -> {self.codomain!r}>"

    def __eq__(self, other):
        if not isinstance(other, FinFunctor):
            return NotImplemented
        return (
            self.domain == other.domain
            and self.codomain == other.codomain
            and np.array_equal(self.obj_map, other.obj_map)
            and np.array_equal(self.mor_map, other.mor_map)
        )

    def __hash__(self):
        return hash((self.obj_map.tobytes(), self.mor_map.tobytes()))

    def validate(self):
        A, B = self.domain, self.codomain
        if A.n_objects and (self.obj_map.min() < 0 or self.obj_map.max() >= B.n_objects):
            raise InvalidFunctor("object map out of range")
        if A.n_morphisms and (self.mor_map.min() < 0 or self.mor_map.max() >= B.n_morphisms):
            raise InvalidFunctor("morphism map out of range")
        bad = np.nonzero(
            (B.src[self.mor_map] != self.obj_map[A.src]) | (B.tgt[self.mor_map] != self.obj_map[A.tgt])
        )[0]
        if bad.size:
            raise InvalidFunctor(f"morphism {A.morphisms[bad[0]]!r} is sent to a morphism with wrong endpoints")
        bad = np.nonzero(self.mor_map[A.identity] != B.identity[self.obj_map])[0]
        if bad.size:
            raise InvalidFunctor(f"identity of {A.objects[bad[0]]!r} is not preserved")
        hit = _kernels.first_functor_violation(A.comp, B.comp, self.mor_map)
        if hit is not None:
            g, f = hit
            raise InvalidFunctor(f"composition not preserved at ({A.morphisms[g]!r}, {A.morphisms[f]!r})")
        return self

    def fobj(self, x):
        return self.codomain.objects[self.obj_map[self.domain.obj_index[x]]]

    def fmor(self, f):
        return self.codomain.morphisms[self.mor_map[self.domain.mor_index[f]]]

    def then(self, other):
        """The composite ``other o self``."""
        if other.domain != self.codomain:
            raise InvalidFunctor("functors are not composable")
        return FinFunctor(
            self.domain, other.codomain, other.obj_map[self.obj_map], other.mor_map[self.mor_map], check=False
        )

    def is_injective_on_objects(self):
        return len(np.unique(self.obj_map)) == self.domain.n_objects

    def is_isomorphism(self):
        """Bijective on objects and on morphisms."""
        A, B = self.domain, self.codomain
        return (
            A.n_objects == B.n_objects
            and A.n_morphisms == B.n_morphisms
            and len(np.unique(self.obj_map)) == A.n_objects
            and len(np.unique(self.mor_map)) == A.n_morphisms
        )

    def inverse(self):
        if not self.is_isomorphism():
            raise InvalidFunctor("functor is not an isomorphism")
        inv_o = np.empty(self.codomain.n_objects, dtype=np.int64)
        inv_o[self.obj_map] = np.arange(self.domain.n_objects)
        inv_m = np.empty(self.codomain.n_morphisms, dtype=np.int64)
        inv_m[self.mor_map] = np.arange(self.domain.n_morphisms)
        return FinFunctor(self.codomain, self.domain, inv_o, inv_m)

    def to_dict(self):
        A, B = self.domain, self.codomain
        return {
            "domain": A.to_dict(),
            "codomain": B.to_dict(),
            "object_map": {A.objects[k]: B.objects[v] for k, v in enumerate(self.obj_map.tolist())},
            "morphism_map": {A.morphisms[k]: B.morphisms[v] for k, v in enumerate(self.mor_map.tolist())},
        }


def make_functor(domain, codomain, object_map, morphism_map=None, name=None, check=True):
    """Build a functor from id dictionaries; identity images may be omitted."""
    morphism_map = dict(morphism_map or {})
    try:
        om = [codomain.obj_index[object_map[o]] for o in domain.objects]
    except KeyError as exc:
        raise InvalidFunctor(f"object map is missing or wrong at {exc.args[0]!r}") from None
    mm = []
    for k, f in enumerate(domain.morphisms):
        if f in morphism_map:
            if morphism_map[f] not in codomain.mor_index:
                raise InvalidFunctor(f"unknown image {morphism_map[f]!r}")
            mm.append(codomain.mor_index[morphism_map[f]])
        elif domain.is_identity(k):
            mm.append(codomain.identity[om[domain.src[k]]])
        else:
            raise InvalidFunctor(f"morphism map is missing {f!r}")
    return FinFunctor(domain, codomain, om, mm, name=name, check=check)


def functor_from_dict(raw):
    A = validate_category(raw["domain"])
    B = validate_category(raw["codomain"])
    return make_functor(A, B, raw["object_map"], raw.get("morphism_map", {}))


def identity_functor(C):
    return FinFunctor(C, C, np.arange(C.n_objects), np.arange(C.n_morphisms), check=False)


def constant_functor(I, C, x):
    """The functor ``I -> C`` constant at object index ``x``."""
    return FinFunctor(
        I, C, np.full(I.n_objects, x), np.full(I.n_morphisms, C.identity[x]), check=False
    )


class NatTransformation:
    """A natural transformation ``source => target`` with one component per object."""

    def __init__(self, source, target, components, check=True):
        if source.domain != target.domain or source.codomain != target.codomain:
            raise InvalidNatTransformation("source and target functors are not parallel")
        self.source = source
        self.target = target
        self.components = _frozen(components).reshape(source.domain.n_objects)
        if check:
            self.validate()

    def __repr__(self):
        return f"<NatTransformation {list(self.components)}>"

    def __eq__(self, other):
        if not isinstance(other, NatTransformation):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and np.array_equal(self.components, other.components)
        )

    def __hash__(self):
        return hash(self.components.tobytes())

    def is_natural(self):
        try:
            self.validate()
        except InvalidNatTransformation:
            return False
        return True

    def validate(self):
        F, G, c = self.source, self.target, self.components
        I, C = F.domain, F.codomain
        if I.n_objects == 0:
            return self
        if c.min() < 0 or c.max() >= C.n_morphisms:
            raise InvalidNatTransformation("component index out of range")
        bad = np.nonzero((C.src[c] != F.obj_map) | (C.tgt[c] != G.obj_map))[0]
        if bad.size:
            raise InvalidNatTransformation(f"component at {I.objects[bad[0]]!r} has wrong endpoints")
        lhs = C.comp[G.mor_map, c[I.src]]
        rhs = C.comp[c[I.tgt], F.mor_map]
        bad = np.nonzero(lhs != rhs)[0]
        if bad.size:
            raise InvalidNatTransformation(f"naturality fails at {I.morphisms[bad[0]]!r}")
        return self

    def vcompose(self, before):
        """Vertical composite ``self . before`` (``before`` first)."""
        if before.target != self.source:
            raise InvalidNatTransformation("transformations are not composable")
        C = self.source.codomain
        return NatTransformation(before.source, self.target, C.comp[self.components, before.components])


def identity_nat(F):
    return NatTransformation(F, F, F.codomain.identity[F.obj_map], check=False)


def whisker_right(tau, H):
    """``H tau``: postcompose a transformation with a functor ``H``."""
    return NatTransformation(tau.source.then(H), tau.target.then(H), H.mor_map[tau.components])


def whisker_left(K, tau):
    """``tau K``: precompose a transformation with a functor ``K``."""
    return NatTransformation(K.then(tau.source), K.then(tau.target), tau.components[K.obj_map])


# -- standard constructions ---------------------------------------------------------

def terminal_category():
    return FinCategory(["*"], ["id_*"], [0], [0], [0], [[0]], name="terminal")


def empty_category():
    return FinCategory([], [], [], [], [], np.zeros((0, 0)), name="empty")


def poset_category(elements, leq, name=None):
    """Category of a finite preorder relation; ``leq(x, y)`` on element ids.

    The relation must be reflexive and transitive; morphism ids are ``"x->y"``.
    """
    elements = [str(e) for e in elements]
    n = len(elements)
    rel = np.array([[bool(leq(a, b)) for b in elements] for a in elements], dtype=bool).reshape(n, n)
    return _poset_from_matrix(elements, rel, name)


def _poset_from_matrix(elements, rel, name=None):
    n = len(elements)
    if n and not rel.diagonal().all():
        raise InvalidCategory("order relation is not reflexive")
    if n and np.any((rel.astype(np.int64) @ rel.astype(np.int64) > 0) & ~rel):
        raise InvalidCategory("order relation is not transitive")
    pairs = np.argwhere(rel)
    m = len(pairs)
    idx = -np.ones((n, n), dtype=np.int64)
    idx[pairs[:, 0], pairs[:, 1]] = np.arange(m)
    src = pairs[:, 0] if m else np.zeros(0, dtype=np.int64)
    tgt = pairs[:, 1] if m else np.zeros(0, dtype=np.int64)
    comp = -np.ones((m, m), dtype=np.int64)
    for g in range(m):
        fs = np.nonzero(tgt == src[g])[0]
        comp[g, fs] = idx[src[fs], tgt[g]]
    mids = [f"{elements[a]}->{elements[b]}" for a, b in pairs.tolist()]
    return FinCategory(elements, mids, src, tgt, idx.diagonal() if n else [], comp, name=name, check=True)


def poset_from_relations(elements, relations, name=None):
    """Poset category generated by the pairs ``(x, y)`` meaning ``x <= y``."""
    elements = [str(e) for e in elements]
    n = len(elements)
    index = {e: k for k, e in enumerate(elements)}
    rel = np.eye(n, dtype=bool)
    for a, b in relations:
        rel[index[str(a)], index[str(b)]] = True
    for k in range(n):  # transitive closure
        rel |= rel[:, k:k + 1] & rel[k:k + 1, :]
    if np.any(rel & rel.T & ~np.eye(n, dtype=bool)):
        raise InvalidCategory("relations contain a cycle; not a partial order")
    return _poset_from_matrix(elements, rel, name)


def simplex_category(n):
    """The poset category p[n] of {0 < 1 < ... < n}."""
    return poset_category([str(i) for i in range(n + 1)], lambda a, b: int(a) <= int(b), name=f"p[{n}]")


def product_category(A, B, name=None):
    """The product ``A x B`` with ids ``"(a,b)"``."""
    nb = B.n_objects
    ma, mb = A.n_morphisms, B.n_morphisms
    objects = [f"({a},{b})" for a in A.objects for b in B.objects]
    morphisms = [f"({f},{g})" for f in A.morphisms for g in B.morphisms]
    fa = np.repeat(np.arange(ma), mb)
    fb = np.tile(np.arange(mb), ma)
    src = A.src[fa] * nb + B.src[fb]
    tgt = A.tgt[fa] * nb + B.tgt[fb]
    ident = (A.identity[:, None] * mb + B.identity[None, :]).reshape(-1)
    ca = A.comp[fa[:, None], fa[None, :]]
    cb = B.comp[fb[:, None], fb[None, :]]
    comp = np.where((ca >= 0) & (cb >= 0), ca * mb + cb, -1)
    return FinCategory(objects, morphisms, src, tgt, ident, comp, name=name, check=False)


def product_functor(F, G):
    """``F x G`` between product categories built by :func:`product_category`."""
    A = product_category(F.domain, G.domain)
    B = product_category(F.codomain, G.codomain)
    nbg, mbg = G.codomain.n_objects, G.codomain.n_morphisms
    om = (F.obj_map[:, None] * nbg + G.obj_map[None, :]).reshape(-1)
    mm = (F.mor_map[:, None] * mbg + G.mor_map[None, :]).reshape(-1)
    return FinFunctor(A, B, om, mm, check=False)


def coproduct_category(*cats, tags=None, name=None):
    """Disjoint union; ids are prefixed ``"tag:"`` (default tags ``0, 1, ...``)."""
    tags = [str(t) for t in (tags or range(len(cats)))]
    objects, morphisms, src, tgt, ident = [], [], [], [], []
    blocks = []
    o_off = m_off = 0
    for tag, C in zip(tags, cats):
        objects += [f"{tag}:{o}" for o in C.objects]
        morphisms += [f"{tag}:{f}" for f in C.morphisms]
        src += (C.src + o_off).tolist()
        tgt += (C.tgt + o_off).tolist()
        ident += (C.identity + m_off).tolist()
        blocks.append((m_off, C))
        o_off += C.n_objects
        m_off += C.n_morphisms
    comp = -np.ones((m_off, m_off), dtype=np.int64)
    for off, C in blocks:
        m = C.n_morphisms
        comp[off:off + m, off:off + m] = np.where(C.comp >= 0, C.comp + off, -1)
    return FinCategory(objects, morphisms, src, tgt, ident, comp, name=name, check=False)


def opposite_category(C):
    return FinCategory(
        C.objects, C.morphisms, C.tgt, C.src, C.identity, C.comp.T, name=f"{C.name}^op" if C.name else None, check=False
    )


def subcategory(C, objects, morphisms, name=None):
    """Subcategory on object and morphism index lists (closure is verified)."""
    objects = sorted(set(int(x) for x in objects))
    morphisms = sorted(set(int(f) for f in morphisms) | set(C.identity[objects].tolist()))
    oi = -np.ones(C.n_objects, dtype=np.int64)
    oi[objects] = np.arange(len(objects))
    mi = -np.ones(C.n_morphisms, dtype=np.int64)
    mi[morphisms] = np.arange(len(morphisms))
    mors = np.array(morphisms, dtype=np.int64)
    if np.any(oi[C.src[mors]] < 0) or np.any(oi[C.tgt[mors]] < 0):
        raise InvalidCategory("morphism endpoints leave the object set")
    sub = C.comp[np.ix_(mors, mors)]
    comp = np.where(sub >= 0, mi[np.where(sub >= 0, sub, 0)], -1)
    if np.any((sub >= 0) & (comp < 0)):
        raise InvalidCategory("morphism set is not closed under composition")
    D = FinCategory(
        [C.objects[x] for x in objects],
        [C.morphisms[f] for f in morphisms],
        oi[C.src[mors]],
        oi[C.tgt[mors]],
        mi[C.identity[objects]],
        comp,
        name=name,
        check=False,
    )
    incl = FinFunctor(D, C, np.array(objects, dtype=np.int64), mors, check=False)
    return D, incl


def full_subcategory(C, objects, name=None):
    """Full subcategory on the given object indices, with its inclusion functor."""
    objects = sorted(set(int(x) for x in objects))
    mask = np.zeros(C.n_objects, dtype=bool)
    mask[objects] = True
    mors = np.nonzero(mask[C.src] & mask[C.tgt])[0]
    return subcategory(C, objects, mors, name=name)
