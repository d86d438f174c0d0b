"""The numba kernels agree with the numpy fallback, and the environment flag selects the fallback."""
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from globcat import _kernels
from globcat.corpus import counit_corpus
from globcat.homology import smith_normal_form

pytestmark = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")

NB, NP = _kernels.NUMBA_IMPL, _kernels.NUMPY_IMPL


def brute_assoc(comp):
    """First violating (h, g, f) with g varying slowest, then h, then f."""
    n = comp.shape[0]
    for g in range(n):
        for h in range(n):
            if comp[h, g] < 0:
                continue
            for f in range(n):
                if comp[g, f] >= 0 and comp[comp[h, g], f] != comp[h, comp[g, f]]:
                    return h, g, f
    return None


def as_triple(res):
    return None if res[0] < 0 else tuple(int(v) for v in res)


@pytest.mark.parametrize("C", counit_corpus(), ids=lambda c: c.name)
def test_assoc_parity_on_valid_categories(C):
    comp = np.ascontiguousarray(C.comp, dtype=np.int64)
    assert as_triple(NB["assoc"](comp)) is None
    assert as_triple(NP["assoc"](comp)) is None


@settings(max_examples=60)
@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.integers(0, n - 1), min_size=n * n, max_size=n * n).map(lambda v: (n, v))))
def test_assoc_parity_on_random_magmas(data):
    n, vals = data
    comp = np.array(vals, dtype=np.int64).reshape(n, n)
    expect = brute_assoc(comp)
    assert as_triple(NB["assoc"](comp)) == expect
    assert as_triple(NP["assoc"](comp)) == expect


@settings(max_examples=40)
@given(st.sampled_from(counit_corpus()), st.integers(0, 2**31))
def test_functor_parity_on_random_maps(C, seed):
    rng = np.random.default_rng(seed)
    comp = np.ascontiguousarray(C.comp, dtype=np.int64)
    mor_map = rng.integers(0, C.n_morphisms, size=C.n_morphisms).astype(np.int64)
    if rng.random() < 0.3:
        mor_map = np.arange(C.n_morphisms, dtype=np.int64)
    a = NB["functor"](comp, comp, mor_map)
    b = NP["functor"](comp, comp, mor_map)
    assert (int(a[0]), int(a[1])) == (int(b[0]), int(b[1]))
    if np.array_equal(mor_map, np.arange(C.n_morphisms)):
        assert a[0] < 0


@settings(max_examples=60)
@given(
    st.integers(1, 6).flatmap(
        lambda m: st.integers(1, 6).flatmap(
            lambda n: st.lists(st.integers(-9, 9), min_size=m * n, max_size=m * n).map(
                lambda v: np.array(v, dtype=np.int64).reshape(m, n)
            )
        )
    )
)
def test_snf_parity(M):
    d1, ok1 = NB["snf"](M.copy())
    d2, ok2 = NP["snf"](M.copy())
    assert ok1 and ok2
    f1 = sorted(int(x) for x in d1 if x)
    f2 = sorted(int(x) for x in d2 if x)
    # a diagonalisation need not be the normal form, but its rank and the product of
    # its nonzero entries are invariants of the matrix
    assert len(f1) == len(f2) and int(np.prod(f1)) == int(np.prod(f2))
    prev = _kernels.set_backend("numba")
    try:
        a = smith_normal_form(M).factors
        _kernels.set_backend("numpy")
        assert smith_normal_form(M).factors == a
    finally:
        _kernels.set_backend(prev)


def test_set_backend_rejects_unknown():
    with pytest.raises(ValueError):
        _kernels.set_backend("cuda")


def test_environment_flag_selects_numpy():
    env = dict(os.environ, GLOBCAT_DISABLE_NUMBA="1")
    code = "from globcat import _kernels; print(_kernels.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    env["GLOBCAT_DISABLE_NUMBA"] = "0"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numba"


def test_fallback_runs_the_full_pipeline():
    env = dict(os.environ, GLOBCAT_DISABLE_NUMBA="1")
    proc = subprocess.run([sys.executable, "-m", "globcat", "example", "fiedorowicz"], env=env, capture_output=True, text=True)
    assert proc.returncode == 0
