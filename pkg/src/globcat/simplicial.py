"""Finite, degree-bounded simplicial sets: nerve, categorification, Sd, Ex, products, pushouts.

A :class:`FinSimplicialSet` stores simplices in degrees ``0..bound``.  Faces
are tables ``faces[k]`` of shape ``(n_k, k+1)`` into degree ``k-1``;
degeneracies ``degens[k]`` of shape ``(n_k, k+1)`` into degree ``k+1`` for
``k < bound``.  ``skeletal`` records that every simplex above the bound is
degenerate, so the stored data determines the whole simplicial set.
"""
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, combinations_with_replacement

import numpy as np

from .errors import InvalidSimplicialSet, NotFinite, SizeLimitExceeded
from .fincat.category import FinCategory, FinFunctor, _poset_from_matrix

DEFAULT_WORD_BOUND = 16
DEFAULT_MAX_NODES = 200_000
DEFAULT_MAX_MAPS = 100_000


def _table(rows, width):
    arr = np.array(rows, dtype=np.int64).reshape(len(rows), width)
    arr.setflags(write=False)
    return arr


class FinSimplicialSet:
    """A simplicial set truncated at ``bound`` with explicit face and degeneracy tables."""

    def __init__(self, bound, labels, faces, degens, skeletal, name=None, check=True):
        self.bound = int(bound)
        if len(labels) != self.bound + 1:
            raise InvalidSimplicialSet("need one label list per degree 0..bound")
        self.labels = [tuple(str(s) for s in lab) for lab in labels]
        n = [len(lab) for lab in self.labels]
        self.faces = [_table([], 0) if k == 0 else _table(faces[k], k + 1) for k in range(self.bound + 1)]
        self.degens = [
            _table(degens[k], k + 1) if k < self.bound else _table([], 0) for k in range(self.bound + 1)
        ]
        for k in range(self.bound + 1):
            if k and len(self.faces[k]) != n[k]:
                raise InvalidSimplicialSet(f"face table in degree {k} has wrong length")
            if k < self.bound and len(self.degens[k]) != n[k]:
                raise InvalidSimplicialSet(f"degeneracy table in degree {k} has wrong length")
        self.skeletal = bool(skeletal)
        self.name = name
        if check:
            self.validate()

    def __repr__(self):
        return f"<FinSimplicialSet {self.name or ''} bound={self.bound} counts={self.counts()} skeletal={self.skeletal}>"

    def counts(self):
        return [len(lab) for lab in self.labels]

    @cached_property
    def label_index(self):
        return [{s: k for k, s in enumerate(lab)} for lab in self.labels]

    @cached_property
    def degenerate_masks(self):
        masks = []
        for k in range(self.bound + 1):
            mask = np.zeros(len(self.labels[k]), dtype=bool)
            if k > 0 and len(self.degens[k - 1]):
                mask[self.degens[k - 1].reshape(-1)] = True
            masks.append(mask)
        return masks

    def nondegenerate(self, k):
        """Indices of the nondegenerate simplices in degree ``k``."""
        return np.nonzero(~self.degenerate_masks[k])[0]

    def nondegenerate_counts(self):
        return [int((~m).sum()) for m in self.degenerate_masks]

    @property
    def dimension(self):
        """Largest stored degree containing a nondegenerate simplex (``-1`` if empty)."""
        dims = [k for k, c in enumerate(self.nondegenerate_counts()) if c]
        return max(dims) if dims else -1

    # -- axioms -----------------------------------------------------------------
    def validate(self):
        d, f, s = self.bound, self.faces, self.degens
        n = self.counts()
        for k in range(1, d + 1):
            if n[k] and (f[k].min() < 0 or f[k].max() >= n[k - 1]):
                raise InvalidSimplicialSet(f"face index out of range in degree {k}")
        for k in range(d):
            if n[k] and (s[k].min() < 0 or s[k].max() >= n[k + 1]):
                raise InvalidSimplicialSet(f"degeneracy index out of range in degree {k}")
        for k in range(2, d + 1):
            for j in range(k + 1):
                for i in range(j):
                    if np.any(f[k - 1][f[k][:, j], i] != f[k - 1][f[k][:, i], j - 1]):
                        raise InvalidSimplicialSet(f"d_{i} d_{j} = d_{j - 1} d_{i} fails in degree {k}")
        for k in range(d):
            ar = np.arange(n[k])
            for j in range(k + 1):
                sj = s[k][:, j]
                for i in range(k + 2):
                    lhs = f[k + 1][sj, i]
                    if i < j:
                        rhs = s[k - 1][f[k][:, i], j - 1]
                    elif i in (j, j + 1):
                        rhs = ar
                    else:
                        rhs = s[k - 1][f[k][:, i - 1], j]
                    if np.any(lhs != rhs):
                        raise InvalidSimplicialSet(f"d_{i} s_{j} identity fails in degree {k}")
        for k in range(d - 1):
            for j in range(k + 1):
                for i in range(j + 1):
                    if np.any(s[k + 1][s[k][:, j], i] != s[k + 1][s[k][:, i], j + 1]):
                        raise InvalidSimplicialSet(f"s_{i} s_{j} = s_{j + 1} s_{i} fails in degree {k}")
        return self

    # -- simplicial operators ------------------------------------------------------
    def ez(self, k, x):
        """Eilenberg-Zilber decomposition ``x = sigma^* y`` with ``y`` nondegenerate.

        Returns ``(q, y, sigma)`` where ``sigma`` is a tuple describing the
        monotone surjection ``[k] -> [q]``.
        """
        sigma = list(range(k + 1))
        cur, ck = int(x), k
        while ck > 0:
            for j in range(ck):
                z = int(self.faces[ck][cur, j])
                if self.degens[ck - 1][z, j] == cur:
                    sigma = [a if a <= j else a - 1 for a in sigma]
                    cur, ck = z, ck - 1
                    break
            else:
                break
        return ck, cur, tuple(sigma)

    def apply_monotone(self, theta, k, x):
        """``theta^* x`` for a monotone map ``theta: [m] -> [k]`` given as a tuple."""
        image = sorted(set(theta))
        cur, ck = int(x), k
        for i in reversed([i for i in range(k + 1) if i not in image]):
            cur = int(self.faces[ck][cur, i])
            ck -= 1
        pos = {v: p for p, v in enumerate(image)}
        sig = [pos[t] for t in theta]
        for j in range(len(sig) - 1):
            if sig[j] == sig[j + 1]:
                if ck >= self.bound:
                    raise InvalidSimplicialSet("degeneracy leaves the stored range")
                cur = int(self.degens[ck][cur, j])
                ck += 1
        return cur

    def vertices_of(self, k, x):
        """Vertex indices of a ``k``-simplex in order."""
        return [self.apply_monotone((i,), k, x) for i in range(k + 1)]

    def to_dict(self):
        return {
            "bound": self.bound,
            "skeletal": self.skeletal,
            "simplices": [list(lab) for lab in self.labels],
            "faces": [f.tolist() for f in self.faces],
            "degeneracies": [s.tolist() for s in self.degens],
        }


def simplicial_set_from_dict(raw):
    try:
        return FinSimplicialSet(
            raw["bound"], raw["simplices"], raw["faces"], raw["degeneracies"], raw["skeletal"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSimplicialSet(f"malformed simplicial set description: {exc}") from None


class SimplicialMap:
    """Level maps ``maps[k]`` for ``k <= min(bounds)``, commuting with faces and degeneracies."""

    def __init__(self, domain, codomain, maps, check=True):
        self.domain = domain
        self.codomain = codomain
        self.bound = min(domain.bound, codomain.bound)
        self.maps = [np.asarray(maps[k], dtype=np.int64).reshape(len(domain.labels[k])) for k in range(self.bound + 1)]
        if check:
            self.validate()

    def validate(self):
        X, Y = self.domain, self.codomain
        for k in range(self.bound + 1):
            fk = self.maps[k]
            if len(fk) and (fk.min() < 0 or fk.max() >= len(Y.labels[k])):
                raise InvalidSimplicialSet(f"level map out of range in degree {k}")
            if k:
                if np.any(Y.faces[k][fk] != self.maps[k - 1][X.faces[k]]):
                    raise InvalidSimplicialSet(f"map does not commute with faces in degree {k}")
            if k < self.bound and len(fk):
                if np.any(Y.degens[k][fk] != self.maps[k + 1][X.degens[k]]):
                    raise InvalidSimplicialSet(f"map does not commute with degeneracies in degree {k}")
        return self

    def then(self, other):
        b = min(self.bound, other.bound)
        return SimplicialMap(self.domain, other.codomain, [other.maps[k][self.maps[k]] for k in range(b + 1)], check=False)

    def is_injective(self):
        return all(len(np.unique(m)) == len(m) for m in self.maps)

    @classmethod
    def by_labels(cls, X, Y):
        """The inclusion of ``X`` into ``Y`` matching simplices by label."""
        b = min(X.bound, Y.bound)
        try:
            maps = [[Y.label_index[k][s] for s in X.labels[k]] for k in range(b + 1)]
        except KeyError as exc:
            raise InvalidSimplicialSet(f"label {exc.args[0]!r} missing from the codomain") from None
        return cls(X, Y, maps)


# -- standard simplices -------------------------------------------------------------

def _seq_label(seq, n):
    return "".join(map(str, seq)) if n < 10 else ",".join(map(str, seq))


def standard_simplex(n, bound=None):
    """Delta[n] stored up to ``bound`` (default ``n``); simplices are monotone vertex words."""
    bound = n if bound is None else bound
    levels = [list(combinations_with_replacement(range(n + 1), k + 1)) for k in range(bound + 1)]
    index = [{s: i for i, s in enumerate(lv)} for lv in levels]
    faces = [None] + [
        [[index[k - 1][s[:i] + s[i + 1:]] for i in range(k + 1)] for s in levels[k]] for k in range(1, bound + 1)
    ]
    degens = [[[index[k + 1][s[:j + 1] + s[j:]] for j in range(k + 1)] for s in levels[k]] for k in range(bound)] + [None]
    labels = [[_seq_label(s, n) for s in lv] for lv in levels]
    return FinSimplicialSet(bound, labels, faces, degens, skeletal=n <= bound, name=f"Delta[{n}]", check=False)


def sub_simplicial_set(X, keep, name=None):
    """Sub-simplicial set generated by the given ``(degree, index)`` simplices.

    Returns the subobject (labels kept) and its inclusion map.
    """
    masks = [np.zeros(len(lab), dtype=bool) for lab in X.labels]
    stack = list(keep)
    while stack:
        k, x = stack.pop()
        if masks[k][x]:
            continue
        masks[k][x] = True
        if k:
            stack.extend((k - 1, int(y)) for y in X.faces[k][x])
    for k in range(X.bound):  # close under degeneracies, degree by degree
        idx = np.nonzero(masks[k])[0]
        if len(idx):
            masks[k + 1][X.degens[k][idx].reshape(-1)] = True
    return restrict_to(X, masks, name=name)


def restrict_to(X, masks, name=None, skeletal=None):
    newidx = []
    for m in masks:
        ni = -np.ones(len(m), dtype=np.int64)
        ni[m] = np.arange(int(m.sum()))
        newidx.append(ni)
    labels = [[X.labels[k][i] for i in np.nonzero(masks[k])[0]] for k in range(X.bound + 1)]
    faces = [None] + [newidx[k - 1][X.faces[k][masks[k]]] for k in range(1, X.bound + 1)]
    degens = [newidx[k + 1][X.degens[k][masks[k]]] for k in range(X.bound)] + [None]
    for k in range(1, X.bound + 1):
        if np.any(faces[k] < 0):
            raise InvalidSimplicialSet("subset is not closed under faces")
    for k in range(X.bound):
        if np.any(degens[k] < 0):
            raise InvalidSimplicialSet("subset is not closed under degeneracies")
    sub = FinSimplicialSet(X.bound, labels, faces, degens, X.skeletal if skeletal is None else skeletal, name=name, check=False)
    incl = SimplicialMap(sub, X, [np.nonzero(m)[0] for m in masks], check=False)
    return sub, incl


def boundary(n, bound=None):
    """The boundary of Delta[n] and its inclusion."""
    D = standard_simplex(n, bound)
    keep = [(n - 1, D.label_index[n - 1][_seq_label(face, n)]) for face in combinations(range(n + 1), n)] if n else []
    return sub_simplicial_set(D, keep, name=f"dDelta[{n}]")


def horn(n, k, bound=None):
    """The horn Lambda^k[n] (all faces but the k-th) and its inclusion."""
    D = standard_simplex(n, bound)
    keep = [
        (n - 1, D.label_index[n - 1][_seq_label(face, n)])
        for face in combinations(range(n + 1), n)
        if k in face
    ]
    return sub_simplicial_set(D, keep, name=f"Lambda{k}[{n}]")


def empty_simplicial_set(bound=0):
    return FinSimplicialSet(bound, [[] for _ in range(bound + 1)], [None] + [[]] * bound, [[]] * bound + [None], True, name="empty")


# -- nerve -------------------------------------------------------------------------

def longest_chain(C):
    """Length of the longest string of composable non-identity morphisms (``inf`` on a cycle)."""
    non_id = C.non_identity
    if len(non_id) == 0:
        return 0
    # graph on objects with an edge per non-identity morphism; a cycle means unbounded strings
    n = C.n_objects
    adj = [[] for _ in range(n)]
    for f in non_id.tolist():
        adj[C.src[f]].append(C.tgt[f])
    state = [0] * n
    depth = [0] * n

    def visit(v):
        stack = [(v, iter(adj[v]))]
        state[v] = 1
        while stack:
            u, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[u] = 2
                depth[u] = max([depth[w] + 1 for w in adj[u]], default=0)
                stack.pop()
            elif state[nxt] == 1:
                return False
            elif state[nxt] == 0:
                state[nxt] = 1
                stack.append((nxt, iter(adj[nxt])))
        return True

    for v in range(n):
        if state[v] == 0 and not visit(v):
            return float("inf")
    return max(depth)


class _RowIndex:
    def __init__(self, rows, radix):
        self.rows = rows
        self.radix = max(radix, 1)
        w = rows.shape[1]
        self.use_int = w * np.log2(self.radix + 1) < 62
        if self.use_int:
            self.weights = self.radix ** np.arange(w, dtype=np.int64)[::-1]
            self.keys = rows @ self.weights if w else np.zeros(len(rows), dtype=np.int64)
        else:
            self.table = {tuple(r): i for i, r in enumerate(rows.tolist())}

    def lookup(self, rows):
        if self.use_int:
            keys = rows @ self.weights if rows.shape[1] else np.zeros(len(rows), dtype=np.int64)
            pos = np.searchsorted(self.keys, keys)
            if len(pos) and (np.any(pos >= len(self.keys)) or np.any(self.keys[np.minimum(pos, len(self.keys) - 1)] != keys)):
                raise KeyError("simplex not found")
            return pos
        return np.array([self.table[tuple(r)] for r in rows.tolist()], dtype=np.int64)


def nerve(C, d, max_simplices=2_000_000):
    """The nerve of ``C`` truncated at degree ``d``.

    An ``n``-simplex is a string ``(f_1, ..., f_n)`` with ``f_i: x_{i-1} -> x_i``;
    labels are object ids in degree 0 and ``"f1|...|fn"`` above.  The
    attribute ``chains[n]`` holds the strings as morphism index rows.
    """
    m = C.n_morphisms
    chains = [np.arange(C.n_objects).reshape(-1, 1)]
    if d >= 1:
        chains.append(np.arange(m).reshape(-1, 1))
    out_by_obj = [np.nonzero(C.src == x)[0] for x in range(C.n_objects)]
    for n in range(2, d + 1):
        prev = chains[-1]
        last_t = C.tgt[prev[:, -1]]
        counts = np.array([len(out_by_obj[t]) for t in last_t.tolist()], dtype=np.int64)
        if counts.sum() > max_simplices:
            raise SizeLimitExceeded(f"nerve simplices in degree {n}", max_simplices)
        rep = np.repeat(np.arange(len(prev)), counts)
        ext = np.concatenate([out_by_obj[t] for t in last_t.tolist()]) if len(prev) else np.zeros(0, np.int64)
        chains.append(np.column_stack([prev[rep], ext]) if len(rep) else np.zeros((0, n), dtype=np.int64))
    idx = [None] + [_RowIndex(chains[n], m) for n in range(1, d + 1)]
    faces, degens = [None], []
    for n in range(1, d + 1):
        ch = chains[n]
        if n == 1:
            faces.append(np.column_stack([C.tgt[ch[:, 0]], C.src[ch[:, 0]]]))
            continue
        cols = []
        for i in range(n + 1):
            if i == 0:
                rows = ch[:, 1:]
            elif i == n:
                rows = ch[:, :-1]
            else:
                rows = np.column_stack([ch[:, :i - 1], C.comp[ch[:, i], ch[:, i - 1]], ch[:, i + 1:]])
            cols.append(idx[n - 1].lookup(rows))
        faces.append(np.column_stack(cols))
    for n in range(d):
        ch = chains[n]
        if n == 0:
            degens.append(C.identity[ch[:, 0]].reshape(-1, 1))
            continue
        verts = np.column_stack([C.src[ch[:, 0]], C.tgt[ch]])
        cols = []
        for j in range(n + 1):
            rows = np.column_stack([ch[:, :j], C.identity[verts[:, j]], ch[:, j:]])
            cols.append(idx[n + 1].lookup(rows))
        degens.append(np.column_stack(cols))
    degens.append(None)
    labels = [list(C.objects)] + [["|".join(C.morphisms[f] for f in row) for row in chains[n].tolist()] for n in range(1, d + 1)]
    X = FinSimplicialSet(d, labels, faces, degens, skeletal=longest_chain(C) <= d, name=f"N({C.name or 'C'})", check=False)
    X.chains = chains
    X.category = C
    X._chain_index = idx
    return X


def nerve_map(F, NA, NB):
    """``N(F): N(A) -> N(B)`` between nerves built by :func:`nerve`."""
    b = min(NA.bound, NB.bound)
    maps = [F.obj_map[NA.chains[0][:, 0]]]
    for n in range(1, b + 1):
        maps.append(NB._chain_index[n].lookup(F.mor_map[NA.chains[n]]))
    return SimplicialMap(NA, NB, maps, check=False)


# -- categorification ----------------------------------------------------------------

@dataclass
class Categorification:
    """``c(X)`` with bookkeeping: the category, the image of every 1-simplex and a word per morphism."""

    category: FinCategory
    edge_image: np.ndarray
    words: list


def categorify_data(X, word_bound=DEFAULT_WORD_BOUND, max_nodes=DEFAULT_MAX_NODES):
    """Compute ``c(X)`` by congruence closure on paths of 1-simplices.

    ``c(X)`` only depends on simplices of degree at most 2, so any ``X`` with
    ``bound >= 2`` (or a skeletal ``X``) is accepted.  Raises
    :class:`NotFinite` when the closure needs words longer than ``word_bound``.
    """
    if X.bound < 2 and not X.skeletal:
        raise InvalidSimplicialSet("categorification needs degree-2 data or a skeletal input")
    V = len(X.labels[0])
    gens = X.nondegenerate(1) if X.bound >= 1 else np.zeros(0, dtype=np.int64)
    gsrc = X.faces[1][gens, 1] if len(gens) else np.zeros(0, np.int64)
    gtgt = X.faces[1][gens, 0] if len(gens) else np.zeros(0, np.int64)
    gpos = {int(e): k for k, e in enumerate(gens.tolist())}
    ng = len(gens)
    out_gens = [[k for k in range(ng) if gsrc[k] == v] for v in range(V)]

    def word(e):
        return (gpos[int(e)],) if int(e) in gpos else ()

    rels = [[] for _ in range(V)]
    if X.bound >= 2:
        seen = set()
        for s in X.nondegenerate(2).tolist():
            d0, d1, d2 = X.faces[2][s]
            lhs, rhs = word(d2) + word(d0), word(d1)
            if lhs != rhs and (lhs, rhs) not in seen:
                seen.add((lhs, rhs))
                rels[int(X.faces[1][d2, 1]) if len(word(d2)) else int(X.apply_monotone((0,), 2, s))].append((lhs, rhs))

    parent = list(range(V))
    start = list(range(V))
    end = list(range(V))
    depth = [0] * V
    act = [[-1] * ng for _ in range(V)]

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def new_node(frm, g):
        if len(parent) >= max_nodes:
            raise NotFinite(word_bound)
        dep = depth[frm] + 1
        if dep > word_bound:
            raise NotFinite(word_bound)
        k = len(parent)
        parent.append(k)
        start.append(start[frm])
        end.append(int(gtgt[g]))
        depth.append(dep)
        act.append([-1] * ng)
        act[frm][g] = k
        return k

    def step(a, g, define):
        t = act[a][g]
        if t == -1:
            return new_node(a, g) if define else -1
        return find(t)

    def trace(a, w):
        for g in w:
            a = step(find(a), g, True)
        return find(a)

    def coincide(a, b):
        queue = [(a, b)]
        while queue:
            a, b = queue.pop()
            a, b = find(a), find(b)
            if a == b:
                continue
            if a > b:
                a, b = b, a
            parent[b] = a
            for g in range(ng):
                tb = act[b][g]
                if tb == -1:
                    continue
                ta = act[a][g]
                if ta == -1:
                    act[a][g] = tb
                else:
                    queue.append((ta, tb))

    p = 0
    while p < len(parent):
        n = p
        p += 1
        if find(n) != n:
            continue
        for lhs, rhs in rels[end[n]]:
            if find(n) != n:
                break
            a = trace(n, lhs)
            b = trace(n, rhs)
            if a != b:
                coincide(a, b)
        if find(n) != n:
            continue
        for g in out_gens[end[n]]:
            if act[n][g] == -1:
                new_node(n, g)

    # canonical order: breadth first from the identities, generators in order
    order, words = [], []
    pos = {}
    queue = [(find(v), ()) for v in range(V)]
    head = 0
    for v in range(V):
        pos[find(v)] = v
    order = [find(v) for v in range(V)]
    words = [() for _ in range(V)]
    while head < len(order):
        a = order[head]
        w = words[head]
        head += 1
        for g in out_gens[end[a]]:
            b = find(act[a][g])
            if b not in pos:
                pos[b] = len(order)
                order.append(b)
                words.append(w + (g,))
    del queue
    M = len(order)
    src = np.array([start[a] for a in order], dtype=np.int64)
    tgt = np.array([end[a] for a in order], dtype=np.int64)
    if np.any(src[:V] != np.arange(V)) or np.any(tgt[:V] != np.arange(V)):
        raise InvalidSimplicialSet("identity nodes were identified with other morphisms across objects")
    comp = -np.ones((M, M), dtype=np.int64)
    for f in range(M):
        for g in np.nonzero(src == tgt[f])[0].tolist():
            comp[g, f] = pos[trace(order[f], words[g])]
    labels = X.labels
    gl = [labels[1][e] for e in gens.tolist()] if ng else []
    mids = [
        f"id_{labels[0][src[k]]}" if not words[k] else " o ".join(gl[g] for g in reversed(words[k]))
        for k in range(M)
    ]
    C = FinCategory(labels[0], mids, src, tgt, np.arange(V), comp, name=f"c({X.name or 'X'})")
    edge_image = np.zeros(len(labels[1]) if X.bound >= 1 else 0, dtype=np.int64)
    for e in range(len(edge_image)):
        if int(e) in gpos:
            edge_image[e] = pos[find(act[find(int(X.faces[1][e, 1]))][gpos[int(e)]])]
        else:
            edge_image[e] = int(X.faces[1][e, 1])  # degenerate edge: identity (identity of v has index v)
    return Categorification(C, edge_image, words)


def categorify(X, word_bound=DEFAULT_WORD_BOUND):
    """The category ``c(X)`` freely generated by the 1-simplices modulo the 2-simplex relations."""
    return categorify_data(X, word_bound).category


def categorify_map(f, cX, cY):
    """``c(f): c(X) -> c(Y)`` for a simplicial map, given both categorifications."""
    X = f.domain
    A, B = cX.category, cY.category
    gens = X.nondegenerate(1) if X.bound >= 1 else np.zeros(0, dtype=np.int64)
    gim = cY.edge_image[f.maps[1][gens]] if len(gens) else np.zeros(0, dtype=np.int64)
    mm = np.zeros(A.n_morphisms, dtype=np.int64)
    om = f.maps[0]
    for k, w in enumerate(cX.words):
        cur = B.identity[om[A.src[k]]]
        for g in w:
            cur = B.comp[gim[g], cur]
        mm[k] = cur
    return FinFunctor(A, B, om, mm)


def counit(C, d=2, word_bound=DEFAULT_WORD_BOUND):
    """The counit ``c(N C) -> C`` (verified to be a functor)."""
    N = nerve(C, d)
    data = categorify_data(N, word_bound)
    cN = data.category
    gens = N.nondegenerate(1)
    mm = np.zeros(cN.n_morphisms, dtype=np.int64)
    for k, w in enumerate(data.words):
        cur = C.identity[cN.src[k]]
        for g in w:
            cur = C.comp[N.chains[1][gens[g], 0], cur]
        mm[k] = cur
    return FinFunctor(cN, C, np.arange(C.n_objects), mm)


# -- subdivision ---------------------------------------------------------------------

def _chains_ending_full(p, k):
    """Weakly increasing chains of ``k+1`` nonempty subsets of [p] (bitmasks) ending at [p]."""
    full = (1 << (p + 1)) - 1
    subsets_of = {}

    def subs(top):
        if top not in subsets_of:
            subsets_of[top] = [s for s in range(1, top + 1) if s & top == s]
        return subsets_of[top]

    def rec(length, top):
        if length == 1:
            return [(top,)]
        return [c + (top,) for s in subs(top) for c in rec(length - 1, s)]

    return sorted(rec(k + 1, full))


def _mask_str(mask):
    return "".join(str(i) for i in range(mask.bit_length()) if mask >> i & 1)


def subdivide(X):
    """Kan's subdivision ``Sd X`` for a skeletal ``X``, stored up to the same bound.

    A simplex is a pair ``(y, S_0 <= ... <= S_k)`` with ``y`` nondegenerate of
    dimension ``p`` and a weakly increasing chain of nonempty subsets of
    ``[p]`` ending at ``[p]``; labels are ``"y@S_0<...<S_k"``.
    """
    if not X.skeletal:
        raise InvalidSimplicialSet("Sd is only implemented for skeletal simplicial sets")
    d = X.bound
    nd = [X.nondegenerate(p) for p in range(d + 1)]
    chain_cache = {}

    def chains(p, k):
        if (p, k) not in chain_cache:
            chain_cache[(p, k)] = _chains_ending_full(p, k)
        return chain_cache[(p, k)]

    levels = []
    for k in range(d + 1):
        lv = []
        for p in range(d + 1):
            for y in nd[p].tolist():
                for c in chains(p, k):
                    lv.append((p, y, c))
        levels.append(lv)
    index = [{s: i for i, s in enumerate(lv)} for lv in levels]

    def normal(p, y, chain):
        top = chain[-1]
        full = (1 << (p + 1)) - 1
        if top == full:
            return (p, y, chain)
        verts = [i for i in range(p + 1) if top >> i & 1]
        x = X.apply_monotone(tuple(verts), p, y)
        q, z, sigma = X.ez(len(verts) - 1, x)
        pos = {v: j for j, v in enumerate(verts)}
        new = []
        for S in chain:
            m = 0
            for i in range(p + 1):
                if S >> i & 1:
                    m |= 1 << sigma[pos[i]]
            new.append(m)
        return (q, z, tuple(new))

    faces = [None]
    for k in range(1, d + 1):
        rows = []
        for p, y, c in levels[k]:
            rows.append([index[k - 1][normal(p, y, c[:i] + c[i + 1:])] for i in range(k + 1)])
        faces.append(rows)
    degens = []
    for k in range(d):
        rows = []
        for p, y, c in levels[k]:
            rows.append([index[k + 1][(p, y, c[:j + 1] + c[j:])] for j in range(k + 1)])
        degens.append(rows)
    degens.append(None)
    labels = [
        [f"{X.labels[p][y]}@" + "<".join(_mask_str(S) for S in c) for p, y, c in lv] for lv in levels
    ]
    return FinSimplicialSet(d, labels, faces, degens, skeletal=True, name=f"Sd({X.name or 'X'})", check=False)


def subdivide_map(f, SdX, SdY):
    """``Sd(f)`` for a simplicial map between skeletal simplicial sets."""
    X, Y = f.domain, f.codomain
    b = min(SdX.bound, SdY.bound)
    maps = []
    for k in range(b + 1):
        out = []
        for lab in SdX.labels[k]:
            ylab, chain = lab.rsplit("@", 1)
            masks = [sum(1 << int(ch) for ch in part) for part in chain.split("<")]
            p = max(m.bit_length() for m in masks) - 1
            y = X.label_index[p][ylab]
            q, z, sigma = Y.ez(p, int(f.maps[p][y]))
            new = []
            for S in masks:
                m = 0
                for i in range(p + 1):
                    if S >> i & 1:
                        m |= 1 << sigma[i]
                new.append(m)
            out.append(SdY.label_index[k][f"{Y.labels[q][z]}@" + "<".join(_mask_str(S) for S in new)])
        maps.append(out)
    return SimplicialMap(SdX, SdY, maps)


# -- maps out of finite simplicial sets, and Ex ------------------------------------------

def enumerate_simplicial_maps(A, X, limit=DEFAULT_MAX_MAPS):
    """All simplicial maps ``A -> X`` for skeletal ``A``, as lists of level arrays.

    Requires ``X.bound >= A.bound``; maps are determined by their values on
    nondegenerate simplices, which are chosen degree by degree subject to the
    face conditions.
    """
    if not A.skeletal:
        raise InvalidSimplicialSet("the source of a map enumeration must be skeletal")
    if X.bound < A.bound:
        raise InvalidSimplicialSet("target must be stored at least up to the source bound")
    b = A.bound
    nd = [A.nondegenerate(k).tolist() for k in range(b + 1)]
    by_faces = [None] + [{} for _ in range(b)]
    for k in range(1, b + 1):
        for x, row in enumerate(X.faces[k].tolist()):
            by_faces[k].setdefault(tuple(row), []).append(x)
    ez_cache = [[A.ez(k, a) for a in range(len(A.labels[k]))] for k in range(b + 1)]
    order = [(k, a) for k in range(b + 1) for a in nd[k]]
    assign = [dict() for _ in range(b + 1)]
    results = []

    def value(k, a):
        q, y, sigma = ez_cache[k][a]
        if q == k:
            return assign[k][a]
        return X.apply_monotone(sigma, q, assign[q][y])

    def rec(pos):
        if pos == len(order):
            maps = [np.array([value(k, a) for a in range(len(A.labels[k]))], dtype=np.int64) for k in range(b + 1)]
            results.append(maps)
            if len(results) > limit:
                raise SizeLimitExceeded("number of simplicial maps", limit)
            return
        k, a = order[pos]
        if k == 0:
            cands = range(len(X.labels[0]))
        else:
            key = tuple(value(k - 1, int(A.faces[k][a, i])) for i in range(k + 1))
            cands = by_faces[k].get(key, [])
        for x in cands:
            assign[k][a] = x
            rec(pos + 1)
        assign[k].pop(a, None)

    rec(0)
    return results


def subset_poset(k):
    """The poset of nonempty subsets of [k] under inclusion (ids are digit strings)."""
    masks = list(range(1, 1 << (k + 1)))
    masks.sort(key=lambda m: (bin(m).count("1"), [i for i in range(k + 1) if m >> i & 1]))
    rel = np.array([[a & b == a for b in masks] for a in masks], dtype=bool)
    P = _poset_from_matrix([_mask_str(m) for m in masks], rel, name=f"P[{k}]")
    P.masks = masks
    return P


def _poset_map_functor(P, Q, fn):
    om = np.array([Q.obj_index[_mask_str(fn(m))] for m in P.masks], dtype=np.int64)
    pair = -np.ones((Q.n_objects, Q.n_objects), dtype=np.int64)
    pair[Q.src, Q.tgt] = np.arange(Q.n_morphisms)
    return FinFunctor(P, Q, om, pair[om[P.src], om[P.tgt]])


def _apply_to_mask(theta, mask):
    out = 0
    for i, t in enumerate(theta):
        if mask >> i & 1:
            out |= 1 << t
    return out


@dataclass
class ExResult:
    """Truncated ``Ex X`` with the maps ``Sd Delta[k] -> X`` behind each simplex and ``kappa``."""

    ex: FinSimplicialSet
    maps: list
    kappa: SimplicialMap


def ex_truncated(X, n, limit=DEFAULT_MAX_MAPS):
    """``(Ex X)_k`` for ``k <= n``: simplicial maps ``Sd Delta[k] -> X``, plus ``kappa: X -> Ex X``.

    ``Sd Delta[k]`` is modelled as the nerve of the poset of nonempty subsets
    of ``[k]``; faces and degeneracies act by precomposition and ``kappa``
    precomposes with the last-vertex map.  Requires ``X.bound >= n``.
    """
    if X.bound < n:
        raise InvalidSimplicialSet(f"Ex up to degree {n} needs X stored up to degree {n}")
    P = [subset_poset(k) for k in range(n + 1)]
    Q = [nerve(P[k], n) for k in range(n + 1)]
    Xn = X if X.bound == n else _truncate(X, n)
    levels, keys = [], []

    def key_of(maps, k):
        return tuple(tuple(maps[j][Q[k].nondegenerate(j)].tolist()) for j in range(n + 1))

    for k in range(n + 1):
        maps = enumerate_simplicial_maps(Q[k], Xn, limit=limit)
        levels.append(maps)
        keys.append({key_of(m, k): i for i, m in enumerate(maps)})

    def precompose(maps, U, Qs, Qt):
        N = nerve_map(U, Qs, Qt)
        return [maps[j][N.maps[j]] for j in range(n + 1)]

    faces = [None]
    for k in range(1, n + 1):
        cols = []
        for i in range(k + 1):
            delta = tuple(t for t in range(k + 1) if t != i)
            U = _poset_map_functor(P[k - 1], P[k], lambda m, d=delta: _apply_to_mask(d, m))
            cols.append([keys[k - 1][key_of(precompose(m, U, Q[k - 1], Q[k]), k - 1)] for m in levels[k]])
        faces.append(np.array(cols, dtype=np.int64).T.reshape(len(levels[k]), k + 1))
    degens = []
    for k in range(n):
        cols = []
        for j in range(k + 1):
            sigma = tuple(t if t <= j else t - 1 for t in range(k + 2))
            U = _poset_map_functor(P[k + 1], P[k], lambda m, s=sigma: _apply_to_mask(s, m))
            cols.append([keys[k + 1][key_of(precompose(m, U, Q[k + 1], Q[k]), k + 1)] for m in levels[k]])
        degens.append(np.array(cols, dtype=np.int64).T.reshape(len(levels[k]), k + 1))
    degens.append(None)
    labels = [[f"ex{k}.{i}" for i in range(len(levels[k]))] for k in range(n + 1)]
    EX = FinSimplicialSet(n, labels, faces, degens, skeletal=False, name=f"Ex({X.name or 'X'})")
    kmaps = []
    for k in range(n + 1):
        out = []
        for x in range(len(Xn.labels[k])):
            # x o (last vertex map): a chain S_0 <= ... <= S_j goes to (max S_0, ..., max S_j)
            maps = []
            for j in range(n + 1):
                vals = []
                for row in Q[k].chains[j].tolist():
                    if j == 0:
                        masks = [P[k].masks[row[0]]]
                    else:
                        masks = [P[k].masks[P[k].src[row[0]]]] + [P[k].masks[P[k].tgt[f]] for f in row]
                    theta = tuple(m.bit_length() - 1 for m in masks)
                    vals.append(Xn.apply_monotone(theta, k, x) if j <= Xn.bound else 0)
                maps.append(np.array(vals, dtype=np.int64))
            out.append(keys[k][key_of(maps, k)])
        kmaps.append(out)
    kappa = SimplicialMap(Xn, EX, kmaps)
    return ExResult(EX, levels, kappa)


def _truncate(X, n):
    return FinSimplicialSet(
        n, X.labels[:n + 1], X.faces[:n + 1], X.degens[:n] + [None], skeletal=X.skeletal and X.dimension <= n, name=X.name, check=False
    )


# -- products and pushouts ---------------------------------------------------------

def sset_product(X, Y):
    """Degreewise product with diagonal structure maps; bound is the smaller bound."""
    b = min(X.bound, Y.bound)
    ny = [len(Y.labels[k]) for k in range(b + 1)]
    labels = [[f"({x},{y})" for x in X.labels[k] for y in Y.labels[k]] for k in range(b + 1)]
    faces = [None] + [
        (X.faces[k][:, None, :] * ny[k - 1] + Y.faces[k][None, :, :]).reshape(-1, k + 1) for k in range(1, b + 1)
    ]
    degens = [
        (X.degens[k][:, None, :] * ny[k + 1] + Y.degens[k][None, :, :]).reshape(-1, k + 1) for k in range(b)
    ] + [None]
    skeletal = X.skeletal and Y.skeletal and X.dimension + Y.dimension <= b
    P = FinSimplicialSet(b, labels, faces, degens, skeletal, name=f"{X.name}x{Y.name}", check=False)
    return P


def sset_pushout(f, g):
    """Pushout of ``X <- A -> Y`` along two simplicial maps out of the same ``A``.

    Returns ``(P, jX, jY)``.  Simplices are classes of ``X + Y`` under the
    generated identification; a class keeps the label of its first member
    (``"X:"`` or ``"Y:"`` prefixed).
    """
    X, Y = f.codomain, g.codomain
    b = min(X.bound, Y.bound, f.bound, g.bound)
    classes, maps_x, maps_y, labels = [], [], [], []
    for k in range(b + 1):
        nx, nyk = len(X.labels[k]), len(Y.labels[k])
        parent = list(range(nx + nyk))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for a in range(len(f.maps[k])):
            r1, r2 = find(int(f.maps[k][a])), find(nx + int(g.maps[k][a]))
            if r1 != r2:
                parent[max(r1, r2)] = min(r1, r2)
        roots = [find(a) for a in range(nx + nyk)]
        reps = sorted(set(roots))
        pos = {r: i for i, r in enumerate(reps)}
        cls = np.array([pos[r] for r in roots], dtype=np.int64)
        classes.append((cls, reps))
        maps_x.append(cls[:nx])
        maps_y.append(cls[nx:])
        labels.append([("X:" + X.labels[k][r]) if r < nx else ("Y:" + Y.labels[k][r - nx]) for r in reps])
    faces = [None]
    for k in range(1, b + 1):
        cls, reps = classes[k]
        nx = len(X.labels[k])
        rows = []
        for r in reps:
            rows.append(maps_x[k - 1][X.faces[k][r]] if r < nx else maps_y[k - 1][Y.faces[k][r - nx]])
        faces.append(np.array(rows, dtype=np.int64).reshape(len(reps), k + 1))
    degens = []
    for k in range(b):
        cls, reps = classes[k]
        nx = len(X.labels[k])
        rows = []
        for r in reps:
            rows.append(maps_x[k + 1][X.degens[k][r]] if r < nx else maps_y[k + 1][Y.degens[k][r - nx]])
        degens.append(np.array(rows, dtype=np.int64).reshape(len(reps), k + 1))
    degens.append(None)
    P = FinSimplicialSet(b, labels, faces, degens, skeletal=X.skeletal and Y.skeletal, name="pushout")
    return P, SimplicialMap(X, P, maps_x), SimplicialMap(Y, P, maps_y)


def copairing(P, jX, jY, hX, hY):
    """The map out of a pushout determined by compatible maps ``hX: X -> Z`` and ``hY: Y -> Z``."""
    Z = hX.codomain
    b = min(P.bound, hX.bound, hY.bound)
    maps = []
    for k in range(b + 1):
        out = -np.ones(len(P.labels[k]), dtype=np.int64)
        for src, h in ((jX, hX), (jY, hY)):
            for a, p in enumerate(src.maps[k].tolist()):
                v = int(h.maps[k][a])
                if out[p] not in (-1, v):
                    raise InvalidSimplicialSet("maps do not agree on the glued part")
                out[p] = v
        maps.append(out)
    return SimplicialMap(P, Z, maps)
