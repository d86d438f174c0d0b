"""Exhaustive enumeration of functors and natural transformations.

``functor_category(I, C)`` returns a :class:`FunctorCategory`, an ordinary
:class:`FinCategory` that also remembers the functor and transformation data
so that functors between functor categories can be assembled by lookup.
"""
import numpy as np

from ..errors import SizeLimitExceeded
from .category import FinCategory, FinFunctor, NatTransformation

DEFAULT_MAX_FUNCTORS = 20_000
DEFAULT_MAX_MORPHISMS = 200_000


def enumerate_functors(I, C, limit=DEFAULT_MAX_FUNCTORS):
    """All functors ``I -> C`` as ``(obj_maps, mor_maps)`` integer arrays.

    Rows are sorted lexicographically by object images, then morphism images
    (positions in ``C``).  Raises :class:`SizeLimitExceeded` past ``limit``.
    """
    nI, mI = I.n_objects, I.n_morphisms
    if nI == 0:
        return np.zeros((1, 0), dtype=np.int64), np.zeros((1, 0), dtype=np.int64)
    if C.n_objects == 0:
        return np.zeros((0, nI), dtype=np.int64), np.zeros((0, mI), dtype=np.int64)

    compI = I.comp
    compC = C.comp
    srcI, tgtI = I.src.tolist(), I.tgt.tolist()
    srcC, tgtC = C.src, C.tgt
    idI, idC = I.identity.tolist(), C.identity.tolist()
    # composable partners, precomputed as python lists
    after = [np.nonzero(compI[:, f] >= 0)[0].tolist() for f in range(mI)]   # g with g o f defined
    before = [np.nonzero(compI[f, :] >= 0)[0].tolist() for f in range(mI)]  # h with f o h defined

    om = [-1] * nI
    mm = [-1] * mI
    trail = []
    results = []

    def set_obj(x, y, queue):
        if om[x] == -1:
            om[x] = y
            trail.append(("o", x))
            e = idI[x]
            if mm[e] == -1:
                mm[e] = idC[y]
                trail.append(("m", e))
                queue.append(e)
            return True
        return om[x] == y

    def set_mor(f, g, queue):
        if mm[f] != -1:
            return mm[f] == g
        if not set_obj(srcI[f], int(srcC[g]), queue) or not set_obj(tgtI[f], int(tgtC[g]), queue):
            return False
        mm[f] = g
        trail.append(("m", f))
        queue.append(f)
        return True

    def propagate(queue):
        while queue:
            f = queue.pop()
            imf = mm[f]
            for g in after[f]:
                img = mm[g]
                if img != -1:
                    if not set_mor(int(compI[g, f]), int(compC[img, imf]), queue):
                        return False
            for h in before[f]:
                imh = mm[h]
                if imh != -1:
                    if not set_mor(int(compI[f, h]), int(compC[imf, imh]), queue):
                        return False
        return True

    def undo(mark):
        while len(trail) > mark:
            kind, k = trail.pop()
            if kind == "o":
                om[k] = -1
            else:
                mm[k] = -1

    non_id = [f for f in range(mI) if idI[srcI[f]] != f]

    def search(pos_obj, pos_mor):
        # assign objects in order; after each object, the morphisms among assigned objects
        while pos_mor < len(non_id) and mm[non_id[pos_mor]] != -1:
            pos_mor += 1
        if pos_mor < len(non_id):
            f = non_id[pos_mor]
            x, y = srcI[f], tgtI[f]
            if om[x] != -1 and om[y] != -1:
                for g in C.hom(om[x], om[y]).tolist():
                    mark = len(trail)
                    queue = []
                    if set_mor(f, g, queue) and propagate(queue):
                        search(pos_obj, pos_mor + 1)
                    undo(mark)
                return
        while pos_obj < nI and om[pos_obj] != -1:
            pos_obj += 1
        if pos_obj == nI:
            results.append((tuple(om), tuple(mm)))
            if len(results) > limit:
                raise SizeLimitExceeded(f"number of functors {I.name or 'I'} -> {C.name or 'C'}", limit)
            return
        for y in range(C.n_objects):
            mark = len(trail)
            queue = []
            if set_obj(pos_obj, y, queue) and propagate(queue):
                search(pos_obj + 1, 0)
            undo(mark)

    search(0, 0)
    results.sort()
    obj_maps = np.array([r[0] for r in results], dtype=np.int64).reshape(len(results), nI)
    mor_maps = np.array([r[1] for r in results], dtype=np.int64).reshape(len(results), mI)
    return obj_maps, mor_maps


def enumerate_nat_transformations(I, C, F_obj, F_mor, G_obj, G_mor):
    """All component tuples of natural transformations ``F => G`` (sorted)."""
    nI = I.n_objects
    if nI == 0:
        return np.zeros((1, 0), dtype=np.int64)
    comp = C.comp
    cand = [C.hom(F_obj[x], G_obj[x]) for x in range(nI)]
    if any(len(c) == 0 for c in cand):
        return np.zeros((0, nI), dtype=np.int64)
    # morphisms of I grouped by which endpoint is decided last (objects in index order)
    checks = [[] for _ in range(nI)]
    for f in range(I.n_morphisms):
        checks[max(I.src[f], I.tgt[f])].append(f)
    out = []
    chosen = np.zeros(nI, dtype=np.int64)

    def rec(x):
        if x == nI:
            out.append(chosen.copy())
            return
        cands = cand[x]
        ok = np.ones(len(cands), dtype=bool)
        for f in checks[x]:
            s, t = I.src[f], I.tgt[f]
            cs = cands if s == x else np.full(len(cands), chosen[s])
            ct = cands if t == x else np.full(len(cands), chosen[t])
            ok &= comp[G_mor[f], cs] == comp[ct, F_mor[f]]
        for c in cands[ok].tolist():
            chosen[x] = c
            rec(x + 1)

    rec(0)
    if not out:
        return np.zeros((0, nI), dtype=np.int64)
    return np.array(out, dtype=np.int64)


def _functor_id(I, C, om, mm):
    objs = ",".join(C.objects[y] for y in om)
    mors = ",".join(C.morphisms[mm[f]] for f in I.non_identity.tolist())
    return f"F({objs}|{mors})"


class _KeyIndex:
    """Maps integer rows to positions, by mixed-radix keys when they fit in int64."""

    def __init__(self, rows, radix):
        rows = np.asarray(rows, dtype=np.int64)
        self.width = rows.shape[1]
        self.radix = max(int(radix), 1)
        self.use_int = self.width == 0 or self.width * np.log2(self.radix + 1) < 62
        if self.use_int:
            keys = self._keys(rows)
            self.order = np.argsort(keys, kind="stable")
            self.sorted = keys[self.order]
        else:
            self.table = {tuple(r): k for k, r in enumerate(rows.tolist())}

    def _keys(self, rows):
        w = self.radix ** np.arange(self.width, dtype=np.int64)[::-1] if self.width else np.zeros(0, np.int64)
        return rows @ w if self.width else np.zeros(len(rows), dtype=np.int64)

    def lookup(self, rows):
        rows = np.asarray(rows, dtype=np.int64)
        if rows.ndim == 1:
            rows = rows.reshape(1, -1)
        if not self.use_int:
            return np.array([self.table.get(tuple(r), -1) for r in rows.tolist()], dtype=np.int64)
        keys = self._keys(rows)
        if len(self.sorted) == 0:
            return -np.ones(len(keys), dtype=np.int64)
        pos = np.minimum(np.searchsorted(self.sorted, keys), len(self.sorted) - 1)
        return np.where(self.sorted[pos] == keys, self.order[pos], -1)


class FunctorCategory(FinCategory):
    """``Fun(I, C)``: objects are all functors, morphisms all natural transformations.

    Extra attributes: ``I``, ``C``, ``obj_maps``/``mor_maps`` (one row per
    functor), ``components`` (one row per transformation).
    """

    def __init__(self, I, C, obj_maps, mor_maps, nat_src, nat_tgt, components, name=None):
        self.I, self.C = I, C
        self.obj_maps = obj_maps
        self.mor_maps = mor_maps
        self.components = components
        nF = len(mor_maps)
        m = len(components)
        self._functor_index = _KeyIndex(mor_maps, C.n_morphisms)
        # transformation lookup keyed by (source functor, target functor, components)
        self._nat_index = _KeyIndex(
            np.column_stack([nat_src, nat_tgt, components]) if m else np.zeros((0, 2 + I.n_objects), np.int64),
            max(C.n_morphisms, nF),
        )
        ident = self._nat_index.lookup(
            np.column_stack([np.arange(nF), np.arange(nF), C.identity[obj_maps]]) if nF else np.zeros((0, 2 + I.n_objects), np.int64)
        )
        comp = -np.ones((m, m), dtype=np.int64)
        for G in range(nF):
            ins = np.nonzero(nat_tgt == G)[0]
            outs = np.nonzero(nat_src == G)[0]
            if not len(ins) or not len(outs):
                continue
            cc = C.comp[components[outs][:, None, :], components[ins][None, :, :]]
            rows = np.concatenate(
                [
                    np.broadcast_to(nat_src[ins][None, :, None], (len(outs), len(ins), 1)),
                    np.broadcast_to(nat_tgt[outs][:, None, None], (len(outs), len(ins), 1)),
                    cc,
                ],
                axis=2,
            ).reshape(-1, 2 + I.n_objects)
            comp[np.ix_(outs, ins)] = self._nat_index.lookup(rows).reshape(len(outs), len(ins))
        fids = [_functor_id(I, C, obj_maps[k], mor_maps[k]) for k in range(nF)]
        nids = [
            f"{fids[s]}=>{fids[t]}@(" + ",".join(C.morphisms[c] for c in components[k]) + ")"
            for k, (s, t) in enumerate(zip(nat_src.tolist(), nat_tgt.tolist()))
        ]
        super().__init__(fids, nids, nat_src, nat_tgt, ident, comp, name=name, check=False)

    def functor(self, k):
        return FinFunctor(self.I, self.C, self.obj_maps[k], self.mor_maps[k], check=False)

    def nat(self, k):
        s, t = self.src[k], self.tgt[k]
        return NatTransformation(self.functor(s), self.functor(t), self.components[k], check=False)

    def index_of_functor(self, mor_map):
        if isinstance(mor_map, FinFunctor):
            mor_map = mor_map.mor_map
        return int(self._functor_index.lookup(np.asarray(mor_map).reshape(1, -1))[0])

    def functor_indices(self, mor_maps):
        return self._functor_index.lookup(mor_maps)

    def index_of_nat(self, source, target, components):
        row = np.concatenate([[source, target], np.asarray(components, dtype=np.int64)])
        return int(self._nat_index.lookup(row.reshape(1, -1))[0])

    def nat_indices(self, sources, targets, components):
        rows = np.column_stack([sources, targets, components])
        return self._nat_index.lookup(rows)


def functor_category(I, C, max_functors=DEFAULT_MAX_FUNCTORS, max_morphisms=DEFAULT_MAX_MORPHISMS):
    """The functor category ``Fun(I, C)`` built by exhaustive enumeration."""
    obj_maps, mor_maps = enumerate_functors(I, C, limit=max_functors)
    nF = len(mor_maps)
    srcs, tgts, comps = [], [], []
    total = 0
    for s in range(nF):
        for t in range(nF):
            nats = enumerate_nat_transformations(I, C, obj_maps[s], mor_maps[s], obj_maps[t], mor_maps[t])
            if len(nats):
                total += len(nats)
                if total > max_morphisms:
                    raise SizeLimitExceeded("number of natural transformations", max_morphisms)
                srcs.append(np.full(len(nats), s))
                tgts.append(np.full(len(nats), t))
                comps.append(nats)
    if comps:
        nat_src = np.concatenate(srcs)
        nat_tgt = np.concatenate(tgts)
        components = np.concatenate(comps)
    else:
        nat_src = np.zeros(0, dtype=np.int64)
        nat_tgt = np.zeros(0, dtype=np.int64)
        components = np.zeros((0, I.n_objects), dtype=np.int64)
    name = f"Fun({I.name or 'I'},{C.name or 'C'})"
    return FunctorCategory(I, C, obj_maps, mor_maps, nat_src, nat_tgt, components, name=name)


def postcompose(FI_A, FI_B, H):
    """``Fun(I, H): Fun(I, A) -> Fun(I, B)`` for a functor ``H: A -> B``."""
    if FI_A.I != FI_B.I:
        raise ValueError("functor categories have different sources")
    om = FI_B.functor_indices(H.mor_map[FI_A.mor_maps]) if FI_A.n_objects else np.zeros(0, np.int64)
    if FI_A.n_morphisms:
        mm = FI_B.nat_indices(om[FI_A.src], om[FI_A.tgt], H.mor_map[FI_A.components])
    else:
        mm = np.zeros(0, dtype=np.int64)
    return FinFunctor(FI_A, FI_B, om, mm)


def precompose(FJ_C, FI_C, U):
    """``Fun(U, C): Fun(J, C) -> Fun(I, C)`` for a functor ``U: I -> J``."""
    om = FI_C.functor_indices(FJ_C.mor_maps[:, U.mor_map]) if FJ_C.n_objects else np.zeros(0, np.int64)
    if FJ_C.n_morphisms:
        mm = FI_C.nat_indices(om[FJ_C.src], om[FJ_C.tgt], FJ_C.components[:, U.obj_map])
    else:
        mm = np.zeros(0, dtype=np.int64)
    return FinFunctor(FJ_C, FI_C, om, mm)


def evaluation_at_terminal(FT_C):
    """The isomorphism ``Fun(terminal, C) -> C`` given by evaluation at the point."""
    C = FT_C.C
    return FinFunctor(FT_C, C, FT_C.obj_maps[:, 0], FT_C.components[:, 0])


def constant_functor_map(I, P, FI_P):
    """The constant-functor map ``P -> Fun(I, P)``."""
    om = FI_P.functor_indices(P.identity[:, None].repeat(I.n_morphisms, axis=1)) if P.n_objects else np.zeros(0, np.int64)
    mm = FI_P.nat_indices(om[P.src], om[P.tgt], np.repeat(np.arange(P.n_morphisms)[:, None], I.n_objects, axis=1))
    return FinFunctor(P, FI_P, om, mm)
