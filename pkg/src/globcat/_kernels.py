"""Hot integer-table kernels with a numba path and a pure-numpy path.

The numba path is used when numba imports and ``GLOBCAT_DISABLE_NUMBA`` is
unset (or ``0``).  Both paths are always importable as ``NUMBA_IMPL`` and
``NUMPY_IMPL`` so tests and ``benchmarks/bench_kernels.py`` can compare them.

Composition tables use ``-1`` for non-composable pairs; ``comp[g, f]`` is
``g o f``.
"""
import os

import numpy as np

_FLAG = os.environ.get("GLOBCAT_DISABLE_NUMBA", "0").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

# |q| * |row| must stay below this before an int64 row operation is attempted.
_INT64_GUARD = 1 << 62


# --- associativity ---------------------------------------------------------

def _assoc_loop(comp):
    # both paths report the first violation in (g, h, f) order
    n = comp.shape[0]
    for g in range(n):
        for h in range(n):
            hg = comp[h, g]
            if hg < 0:
                continue
            for f in range(n):
                gf = comp[g, f]
                if gf < 0:
                    continue
                if comp[h, gf] != comp[hg, f]:
                    return h, g, f
    return -1, -1, -1


def _assoc_numpy(comp):
    n = comp.shape[0]
    for g in range(n):
        fs = np.nonzero(comp[g] >= 0)[0]
        hs = np.nonzero(comp[:, g] >= 0)[0]
        if fs.size == 0 or hs.size == 0:
            continue
        left = comp[np.ix_(hs, comp[g, fs])]
        right = comp[np.ix_(comp[hs, g], fs)]
        bad = np.argwhere(left != right)
        if bad.size:
            i, j = bad[0]
            return int(hs[i]), g, int(fs[j])
    return -1, -1, -1


# --- functoriality ---------------------------------------------------------

def _functor_loop(dom_comp, cod_comp, mor_map):
    n = dom_comp.shape[0]
    for g in range(n):
        for f in range(n):
            gf = dom_comp[g, f]
            if gf < 0:
                continue
            if mor_map[gf] != cod_comp[mor_map[g], mor_map[f]]:
                return g, f
    return -1, -1


def _functor_numpy(dom_comp, cod_comp, mor_map):
    gs, fs = np.nonzero(dom_comp >= 0)
    if gs.size == 0:
        return -1, -1
    lhs = mor_map[dom_comp[gs, fs]]
    rhs = cod_comp[mor_map[gs], mor_map[fs]]
    bad = np.nonzero(lhs != rhs)[0]
    if bad.size:
        return int(gs[bad[0]]), int(fs[bad[0]])
    return -1, -1


# --- Smith diagonalisation over int64 ---------------------------------------

def _snf_loop(a):
    """Diagonalise ``a`` in place; return (diagonal, ok).  ok=False on overflow risk."""
    m, n = a.shape
    out = np.zeros(min(m, n), dtype=np.int64)
    t = 0
    while t < m and t < n:
        best = 0
        pi = -1
        pj = -1
        for i in range(t, m):
            for j in range(t, n):
                v = a[i, j]
                if v != 0:
                    av = v if v > 0 else -v
                    if pi < 0 or av < best:
                        best = av
                        pi = i
                        pj = j
        if pi < 0:
            break
        if pi != t:
            for j in range(t, n):
                tmp = a[t, j]
                a[t, j] = a[pi, j]
                a[pi, j] = tmp
        if pj != t:
            for i in range(t, m):
                tmp = a[i, t]
                a[i, t] = a[i, pj]
                a[i, pj] = tmp
        while True:
            p = a[t, t]
            rowmax = 0
            for j in range(t, n):
                v = a[t, j] if a[t, j] > 0 else -a[t, j]
                if v > rowmax:
                    rowmax = v
            colmax = 0
            for i in range(t, m):
                v = a[i, t] if a[i, t] > 0 else -a[i, t]
                if v > colmax:
                    colmax = v
            clean = True
            for i in range(t + 1, m):
                if a[i, t] != 0:
                    q = a[i, t] // p
                    aq = q if q > 0 else -q
                    if aq > 0 and aq > _INT64_GUARD // (rowmax + 1):
                        return out, False
                    for j in range(t, n):
                        a[i, j] -= q * a[t, j]
                    if a[i, t] != 0:
                        clean = False
            for j in range(t + 1, n):
                if a[t, j] != 0:
                    q = a[t, j] // p
                    aq = q if q > 0 else -q
                    if aq > 0 and aq > _INT64_GUARD // (colmax + 1):
                        return out, False
                    for i in range(t, m):
                        a[i, j] -= q * a[i, t]
                    if a[t, j] != 0:
                        clean = False
            if clean:
                break
            # move the smallest leftover of row/column t into the pivot slot
            best = p if p > 0 else -p
            bi = -1
            bj = -1
            for i in range(t + 1, m):
                v = a[i, t] if a[i, t] > 0 else -a[i, t]
                if v != 0 and v < best:
                    best = v
                    bi = i
                    bj = -1
            for j in range(t + 1, n):
                v = a[t, j] if a[t, j] > 0 else -a[t, j]
                if v != 0 and v < best:
                    best = v
                    bj = j
                    bi = -1
            if bi >= 0:
                for j in range(t, n):
                    tmp = a[t, j]
                    a[t, j] = a[bi, j]
                    a[bi, j] = tmp
            elif bj >= 0:
                for i in range(t, m):
                    tmp = a[i, t]
                    a[i, t] = a[i, bj]
                    a[i, bj] = tmp
        out[t] = a[t, t] if a[t, t] > 0 else -a[t, t]
        t += 1
    return out[:t], True


def _snf_numpy(a):
    m, n = a.shape
    diag = []
    t = 0
    while t < m and t < n:
        sub = np.abs(a[t:, t:])
        nz = sub > 0
        if not nz.any():
            break
        masked = np.where(nz, sub, np.iinfo(np.int64).max)
        pi, pj = np.unravel_index(np.argmin(masked), masked.shape)
        pi += t
        pj += t
        a[[t, pi], t:] = a[[pi, t], t:]
        a[t:, [t, pj]] = a[t:, [pj, t]]
        while True:
            p = a[t, t]
            rowmax = int(np.abs(a[t, t:]).max())
            colmax = int(np.abs(a[t:, t]).max())
            q = a[t + 1:, t] // p
            if q.size and int(np.abs(q).max()) > _INT64_GUARD // (rowmax + 1):
                return np.array(diag, dtype=np.int64), False
            a[t + 1:, t:] -= np.outer(q, a[t, t:])
            q = a[t, t + 1:] // p
            if q.size and int(np.abs(q).max()) > _INT64_GUARD // (colmax + 1):
                return np.array(diag, dtype=np.int64), False
            a[t:, t + 1:] -= np.outer(a[t:, t], q)
            col = np.abs(a[t + 1:, t])
            row = np.abs(a[t, t + 1:])
            if not col.any() and not row.any():
                break
            best = abs(int(p))
            cands_c = np.nonzero(col)[0]
            cands_r = np.nonzero(row)[0]
            ci = cands_c[np.argmin(col[cands_c])] if cands_c.size else -1
            rj = cands_r[np.argmin(row[cands_r])] if cands_r.size else -1
            cv = col[ci] if ci >= 0 else best
            rv = row[rj] if rj >= 0 else best
            if ci >= 0 and cv < best and cv <= rv:
                a[[t, t + 1 + ci], t:] = a[[t + 1 + ci, t], t:]
            elif rj >= 0 and rv < best:
                a[t:, [t, t + 1 + rj]] = a[t:, [t + 1 + rj, t]]
        diag.append(abs(int(a[t, t])))
        t += 1
    return np.array(diag, dtype=np.int64), True


NUMPY_IMPL = {
    "assoc": _assoc_numpy,
    "functor": _functor_numpy,
    "snf": _snf_numpy,
}

if HAVE_NUMBA:
    NUMBA_IMPL = {
        "assoc": njit(cache=True)(_assoc_loop),
        "functor": njit(cache=True)(_functor_loop),
        "snf": njit(cache=True)(_snf_loop),
    }
else:  # pragma: no cover
    NUMBA_IMPL = None

BACKEND = "numba" if (HAVE_NUMBA and not _DISABLED) else "numpy"
_active = NUMBA_IMPL if BACKEND == "numba" else NUMPY_IMPL


def set_backend(name):
    """Switch kernels at runtime ("numba" or "numpy"); returns the previous name."""
    global BACKEND, _active
    if name == "numba" and not HAVE_NUMBA:
        raise ValueError("numba is not available")
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    prev = BACKEND
    BACKEND = name
    _active = NUMBA_IMPL if name == "numba" else NUMPY_IMPL
    return prev


def first_assoc_violation(comp):
    h, g, f = _active["assoc"](np.ascontiguousarray(comp, dtype=np.int64))
    return None if h < 0 else (int(h), int(g), int(f))


def first_functor_violation(dom_comp, cod_comp, mor_map):
    g, f = _active["functor"](
        np.ascontiguousarray(dom_comp, dtype=np.int64),
        np.ascontiguousarray(cod_comp, dtype=np.int64),
        np.ascontiguousarray(mor_map, dtype=np.int64),
    )
    return None if g < 0 else (int(g), int(f))


def snf_diagonal_int64(matrix):
    """Return (diagonal entries, ok) from an int64 diagonalisation of a copy of ``matrix``."""
    a = np.array(matrix, dtype=np.int64, copy=True)
    if a.size == 0:
        return np.zeros(0, dtype=np.int64), True
    diag, ok = _active["snf"](a)
    return np.asarray(diag, dtype=np.int64), bool(ok)
