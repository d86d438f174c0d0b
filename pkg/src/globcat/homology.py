"""Integer homology of finite simplicial sets via Smith normal form, plus comparison verdicts."""
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from . import _kernels
from .errors import GlobcatError, InsufficientTruncation
from .fincat.structure import check_equivalence, validate_homotopy_witness


# -- Smith normal form ------------------------------------------------------------

def _snf_bigint(rows):
    """Diagonal of a Smith-type reduction using Python integers (exact, unbounded)."""
    a = [list(map(int, r)) for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    diag = []
    t = 0
    while t < m and t < n:
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (piv is None or abs(a[i][j]) < abs(a[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        i, j = piv
        a[t], a[i] = a[i], a[t]
        for r in a:
            r[t], r[j] = r[j], r[t]
        while True:
            p = a[t][t]
            for i in range(t + 1, m):
                q = a[i][t] // p
                if q:
                    ai, at = a[i], a[t]
                    for j in range(t, n):
                        ai[j] -= q * at[j]
            for j in range(t + 1, n):
                q = a[t][j] // p
                if q:
                    for i in range(t, m):
                        a[i][j] -= q * a[i][t]
            rest = [(abs(a[i][t]), i, None) for i in range(t + 1, m) if a[i][t]]
            rest += [(abs(a[t][j]), None, j) for j in range(t + 1, n) if a[t][j]]
            if not rest:
                break
            _, bi, bj = min(rest, key=lambda x: x[0])
            if bi is not None:
                a[t], a[bi] = a[bi], a[t]
            else:
                for r in a:
                    r[t], r[bj] = r[bj], r[t]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def _normalize_diagonal(diag):
    """Turn a nonzero diagonal into invariant factors d_1 | d_2 | ... (gcd/lcm exchange)."""
    d = sorted(int(x) for x in diag if x)
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = gcd(d[i], d[j])
            if g != d[i]:
                d[i], d[j] = g, d[i] * d[j] // g
    return sorted(d)


@dataclass(frozen=True)
class SNFResult:
    factors: tuple
    rank: int

    @property
    def torsion(self):
        return tuple(f for f in self.factors if f > 1)


def smith_normal_form(M):
    """Invariant factors (all nonzero ones, including 1s) and rank of an integer matrix.

    Uses the int64 kernel when it can prove the reduction stays in range and
    falls back to exact Python integers otherwise.
    """
    A = np.asarray(M, dtype=object) if not isinstance(M, np.ndarray) else M
    if A.size == 0:
        return SNFResult((), 0)
    try:
        small = np.asarray(A, dtype=np.int64)
        in_range = bool(np.all(np.abs(small) < (1 << 31))) and np.array_equal(small.astype(object), np.asarray(A, dtype=object))
    except (OverflowError, TypeError):
        in_range = False
    diag = None
    if in_range:
        d, ok = _kernels.snf_diagonal_int64(small)
        if ok:
            diag = d.tolist()
    if diag is None:
        diag = _snf_bigint(np.asarray(A, dtype=object).tolist())
    factors = _normalize_diagonal(diag)
    return SNFResult(tuple(factors), len(factors))


# -- chains and homology -----------------------------------------------------------

@dataclass
class ChainComplex:
    """Normalized chains: ``ranks[k]`` basis elements and ``boundary[k]: C_k -> C_{k-1}``."""

    ranks: list
    boundary: list
    basis: list = field(default_factory=list)

    def check(self):
        for k in range(2, len(self.boundary)):
            prod = self.boundary[k - 1] @ self.boundary[k]
            if np.any(prod != 0):
                raise GlobcatError(f"boundary squared is nonzero in degree {k}")
        return True


def normalized_chains(X):
    """Nondegenerate simplices as basis, alternating face sums with degenerate faces dropped."""
    nd = [X.nondegenerate(k) for k in range(X.bound + 1)]
    pos = []
    for k in range(X.bound + 1):
        p = -np.ones(len(X.labels[k]), dtype=np.int64)
        p[nd[k]] = np.arange(len(nd[k]))
        pos.append(p)
    bd = [np.zeros((0, len(nd[0])), dtype=np.int64)]
    for k in range(1, X.bound + 1):
        D = np.zeros((len(nd[k - 1]), len(nd[k])), dtype=np.int64)
        cols = np.arange(len(nd[k]))
        for i in range(k + 1):
            rows = pos[k - 1][X.faces[k][nd[k], i]]
            keep = rows >= 0
            np.add.at(D, (rows[keep], cols[keep]), (-1) ** i)
        bd.append(D)
    cc = ChainComplex([len(x) for x in nd], bd, nd)
    cc.check()
    return cc


def ceiling(X):
    """Largest degree whose homology the stored data determines (``None``: all degrees)."""
    return None if X.skeletal else X.bound - 1


@dataclass
class HomologyResult:
    """``betti[k]`` and ``torsion[k]`` for ``k <= k_max``; ``ceiling`` as recorded for the input."""

    betti: list
    torsion: list
    ceiling: object

    def group(self, k):
        parts = []
        if self.betti[k]:
            parts.append("Z" if self.betti[k] == 1 else f"Z^{self.betti[k]}")
        parts += [f"Z/{t}" for t in self.torsion[k]]
        return " + ".join(parts) if parts else "0"

    def groups(self):
        return [self.group(k) for k in range(len(self.betti))]

    def invariant(self, k):
        return (self.betti[k], tuple(self.torsion[k]))

    def to_dict(self):
        return {
            "degrees": [{"betti": b, "torsion": list(t)} for b, t in zip(self.betti, self.torsion)],
            "groups": self.groups(),
            "ceiling": self.ceiling,
        }


def _require(X, k_max):
    c = ceiling(X)
    if c is not None and k_max > c:
        raise InsufficientTruncation(X.bound, k_max + 1)


def homology(X, k_max):
    """``H_k(X; Z)`` for ``k <= k_max``; requires ``bound >= k_max + 1`` unless ``X`` is skeletal."""
    _require(X, k_max)
    cc = normalized_chains(X)
    top = X.bound
    ranks, torsion = {}, {}
    for k in range(1, min(top, k_max + 1) + 1):
        snf = smith_normal_form(cc.boundary[k])
        ranks[k] = snf.rank
        torsion[k] = snf.torsion
    betti, tors = [], []
    for k in range(k_max + 1):
        n = cc.ranks[k] if k <= top else 0
        b = n - ranks.get(k, 0) - ranks.get(k + 1, 0)
        betti.append(b)
        tors.append(list(torsion.get(k + 1, ())))
    return HomologyResult(betti, tors, ceiling(X))


def category_homology(C, k_max):
    """Homology of the nerve of a finite category, truncated just high enough."""
    from .simplicial import nerve

    return homology(nerve(C, k_max + 1), k_max)


def pi0(X):
    """Number of path components and the component index of every vertex."""
    n = len(X.labels[0])
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    if X.bound >= 1:
        for a, b in X.faces[1].tolist():
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    roots = [find(a) for a in range(n)]
    order = {r: i for i, r in enumerate(sorted(set(roots)))}
    return len(order), np.array([order[r] for r in roots], dtype=np.int64)


# -- comparison verdicts ---------------------------------------------------------------

@dataclass
class Verdict:
    """``kind`` is ``"CertifiedEquivalence"``, ``"HomologyConsistent"`` or ``"Distinguished"``.

    ``degree`` is the degree bound for a consistency verdict and the first
    differing degree for a distinction; ``provenance`` says which check
    produced the verdict.  Only a certified equivalence is a proof.
    """

    kind: str
    degree: int = None
    provenance: str = ""
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.kind != "Distinguished"

    def to_dict(self):
        return {"verdict": self.kind, "degree": self.degree, "provenance": self.provenance, "detail": self.detail}


def chain_map(f):
    """Matrices of the induced map on normalized chains (degenerate images go to zero)."""
    X, Y = f.domain, f.codomain
    mats = []
    for k in range(f.bound + 1):
        ndx, ndy = X.nondegenerate(k), Y.nondegenerate(k)
        pos = -np.ones(len(Y.labels[k]), dtype=np.int64)
        pos[ndy] = np.arange(len(ndy))
        img = pos[f.maps[k][ndx]]
        M = np.zeros((len(ndy), len(ndx)), dtype=np.int64)
        keep = img >= 0
        M[img[keep], np.nonzero(keep)[0]] = 1
        mats.append(M)
    return mats


def cone_homology_vanishes(f, k_max):
    """First degree ``n <= k_max`` with ``H_n(cone f) != 0`` (``None`` if none)."""
    cx, cy = normalized_chains(f.domain), normalized_chains(f.codomain)
    F = chain_map(f)
    top = k_max + 1

    def rx(k):
        return cx.ranks[k] if 0 <= k <= f.domain.bound else 0

    def ry(k):
        return cy.ranks[k] if 0 <= k <= f.codomain.bound else 0

    def dx(k):
        if 1 <= k <= f.domain.bound:
            return cx.boundary[k]
        return np.zeros((rx(k - 1), rx(k)), dtype=np.int64)

    def dy(k):
        if 1 <= k <= f.codomain.bound:
            return cy.boundary[k]
        return np.zeros((ry(k - 1), ry(k)), dtype=np.int64)

    def fx(k):
        if 0 <= k < len(F):
            return F[k]
        return np.zeros((ry(k), rx(k)), dtype=np.int64)

    def cone_d(n):
        # cone_n = X_{n-1} + Y_n; d(a, b) = (-dx a, f a + dy b)
        top_left = -dx(n - 1)
        bottom_left = fx(n - 1)
        top_right = np.zeros((top_left.shape[0], dy(n).shape[1]), dtype=np.int64)
        return np.block([[top_left, top_right], [bottom_left, dy(n)]])

    ranks = {}
    dims = {}
    for n in range(0, top + 1):
        D = cone_d(n) if n >= 1 else None
        dims[n] = rx(n - 1) + ry(n)
        if n >= 1:
            ranks[n] = smith_normal_form(D) if D.size else None
    for n in range(0, k_max + 1):
        r_in = ranks[n].rank if n >= 1 and ranks[n] is not None else 0
        nxt = ranks.get(n + 1)
        r_out = nxt.rank if nxt is not None else 0
        tors = nxt.torsion if nxt is not None else ()
        if dims[n] - r_in - r_out != 0 or tors:
            return n
    return None


def _compare_sets(X, Y, f, k_max, provenance_prefix=""):
    hx, hy = homology(X, k_max), homology(Y, k_max)
    cx, _ = pi0(X)
    cy, _ = pi0(Y)
    detail = {"domain": hx.groups(), "codomain": hy.groups(), "pi0": [cx, cy]}
    if cx != cy:
        return Verdict("Distinguished", 0, provenance_prefix + "pi0 count", detail)
    for k in range(k_max + 1):
        if hx.invariant(k) != hy.invariant(k):
            return Verdict("Distinguished", k, provenance_prefix + f"H_{k} abstract", detail)
    bad = cone_homology_vanishes(f, k_max)
    if bad is not None:
        # H_m(cone) = 0 for m < n makes the map surjective in degree n-1, hence bijective there because
        # the groups are abstractly isomorphic; so H_n(cone) != 0 means it fails to be onto in degree n
        return Verdict("Distinguished", bad, provenance_prefix + f"mapping cone H_{bad}", detail)
    # H_n(cone) = 0 for n <= k_max gives isomorphisms below k_max and a surjection in degree k_max;
    # a surjection between isomorphic finitely generated abelian groups is an isomorphism.
    return Verdict("HomologyConsistent", k_max, provenance_prefix + "induced chain map", detail)


def compare(F, k_max, witness=None):
    """Verdict for a functor: certified equivalence if possible, else a homology comparison."""
    from .simplicial import nerve, nerve_map

    if witness is not None and witness.forward == F and validate_homotopy_witness(witness):
        return Verdict("CertifiedEquivalence", None, "validate_homotopy_witness")
    eq = check_equivalence(F)
    if eq:
        return Verdict("CertifiedEquivalence", None, "check_equivalence", {"correspondence": eq.correspondence})
    NA, NB = nerve(F.domain, k_max + 1), nerve(F.codomain, k_max + 1)
    v = _compare_sets(NA, NB, nerve_map(F, NA, NB), k_max)
    v.detail["equivalence_check"] = eq.to_dict()
    return v


def compare_maps(f, k_max):
    """Homology verdict for a simplicial map (no certification route exists for maps)."""
    _require(f.domain, k_max)
    _require(f.codomain, k_max)
    return _compare_sets(f.domain, f.codomain, f, k_max)
