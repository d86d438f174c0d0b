"""Time the numba kernels against the numpy fallback on realistic table sizes.

Run with ``python benchmarks/bench_kernels.py``.  Each kernel is warmed up once
(so JIT compilation is excluded) and both paths are checked to agree before timing.
"""
import time

import numpy as np

from globcat import _kernels
from globcat.corpus import fiedorowicz_category
from globcat.fincat import classifying_category, cyclic_group, functor_category, product_category, symmetric_group
from globcat.homology import normalized_chains
from globcat.simplicial import nerve


def best_of(fn, *args, repeat=5):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t)
    return min(times)


def cases():
    big = product_category(classifying_category(symmetric_group(3)), classifying_category(cyclic_group(6)))
    fun = functor_category(classifying_category(cyclic_group(2)), classifying_category(symmetric_group(3)))
    comp = np.ascontiguousarray(big.comp, dtype=np.int64)
    yield "assoc  B(S3 x C6), 36 morphisms", "assoc", (comp,)
    fcomp = np.ascontiguousarray(fun.comp, dtype=np.int64)
    yield f"assoc  Fun(BC2, BS3), {fun.n_morphisms} morphisms", "assoc", (fcomp,)
    ident = np.arange(fun.n_morphisms, dtype=np.int64)
    yield "functor identity on Fun(BC2, BS3)", "functor", (fcomp, fcomp, ident)
    for C, d, k in [(fiedorowicz_category(), 4, 3), (classifying_category(symmetric_group(3)), 4, 3)]:
        M = np.asarray(normalized_chains(nerve(C, d)).boundary[k], dtype=np.int64)
        yield f"snf    {C.name} boundary {k}, shape {M.shape}", "snf", (M,)


def main():
    print(f"{'case':48s} {'numpy':>10s} {'numba':>10s} {'speedup':>8s}")
    for label, kernel, args in cases():
        nb, npf = _kernels.NUMBA_IMPL[kernel], _kernels.NUMPY_IMPL[kernel]
        copy = (lambda a: a.copy()) if kernel == "snf" else (lambda a: a)
        r1, r2 = nb(*map(copy, args)), npf(*map(copy, args))
        if kernel != "snf":
            assert tuple(map(int, r1)) == tuple(map(int, r2)), label
        t_np = best_of(lambda: npf(*map(copy, args)))
        t_nb = best_of(lambda: nb(*map(copy, args)))
        print(f"{label:48s} {t_np * 1e3:9.2f}ms {t_nb * 1e3:9.2f}ms {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
