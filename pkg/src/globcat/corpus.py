"""Named instances and deterministic test families shared by the tests, the CLI and the benchmark."""
from itertools import permutations, product

import numpy as np

from .fincat.algebra import (
    FinMonoid,
    classifying_category,
    cyclic_group,
    fiedorowicz_monoid,
    idempotent_monoid,
    symmetric_group,
    translation_groupoid,
    trivial_monoid,
)
from .fincat.category import (
    FinFunctor,
    coproduct_category,
    empty_category,
    make_category,
    poset_from_relations,
    product_category,
    simplex_category,
    terminal_category,
)

# -- small posets ---------------------------------------------------------------------------

def vee():
    """``0 <= 2 >= 1``."""
    return poset_from_relations(["0", "1", "2"], [("0", "2"), ("1", "2")], name="V")


def wedge():
    """``1 >= 0 <= 2``."""
    return poset_from_relations(["0", "1", "2"], [("0", "1"), ("0", "2")], name="Lambda")


def diamond():
    return poset_from_relations(["0", "1", "2", "3"], [("0", "1"), ("0", "2"), ("1", "3"), ("2", "3")], name="diamond")


def discrete(n):
    return poset_from_relations([str(k) for k in range(n)], [], name=f"disc{n}")


def zigzag5():
    """``0 <= 1 >= 2 <= 3 >= 4``."""
    return poset_from_relations(
        [str(k) for k in range(5)], [("0", "1"), ("2", "1"), ("2", "3"), ("4", "3")], name="zigzag5"
    )


def cone_diamond():
    return poset_from_relations(
        [str(k) for k in range(5)], [("0", "1"), ("0", "2"), ("1", "3"), ("2", "3"), ("3", "4")], name="cone(diamond)"
    )


def _poset_relations(n):
    """Reflexive order relations on ``n`` points, one boolean matrix per isomorphism class.

    Every finite poset has a maximal element, so each poset on ``n`` points is a
    poset on ``n - 1`` points with a new top element placed over one of its down-sets.
    """
    if n == 0:
        return [np.zeros((0, 0), dtype=bool)]
    perms = np.array(list(permutations(range(n))), dtype=np.int64)
    weights = 1 << np.arange(n * n, dtype=np.int64)
    seen, out = set(), []
    for small in _poset_relations(n - 1):
        for bits in product([False, True], repeat=n - 1):
            down = np.array(bits, dtype=bool)
            if n > 1 and np.any(small[:, down].any(axis=1) & ~down):
                continue  # not down-closed
            rel = np.eye(n, dtype=bool)
            rel[: n - 1, : n - 1] = small
            rel[: n - 1, n - 1] = down
            codes = rel[perms[:, :, None], perms[:, None, :]].reshape(len(perms), -1) @ weights
            key = int(codes.min())
            if key not in seen:
                seen.add(key)
                out.append(rel)
    return out


def all_posets(n):
    """All partial orders on ``n`` points, one per isomorphism class."""
    out = []
    for rel in _poset_relations(n):
        rels = [(str(a), str(b)) for a, b in np.argwhere(rel & ~np.eye(n, dtype=bool)).tolist()]
        out.append(poset_from_relations([str(k) for k in range(n)], rels, name=f"poset{n}.{len(out)}"))
    return out


# -- small monoids ----------------------------------------------------------------------------

def all_monoids(n):
    """All monoids of order ``n`` up to isomorphism (unit at index 0), by brute force."""
    if n == 1:
        return [trivial_monoid()]
    others = list(range(1, n))
    seen, out = set(), []
    for vals in product(range(n), repeat=(n - 1) * (n - 1)):
        table = np.zeros((n, n), dtype=np.int64)
        table[0, :] = np.arange(n)
        table[:, 0] = np.arange(n)
        table[1:, 1:] = np.array(vals).reshape(n - 1, n - 1)
        if not np.array_equal(table[table[:, :, None], np.arange(n)[None, None, :]], table[np.arange(n)[:, None, None], table[None, :, :]]):
            continue
        keys = []
        for perm in permutations(others):
            p = np.array((0,) + perm)  # relabel x -> p[x]
            inv = np.argsort(p)
            keys.append(p[table[inv[:, None], inv[None, :]]].tobytes())
        key = min(keys)
        if key in seen:
            continue
        seen.add(key)
        out.append(FinMonoid([str(k) for k in range(n)], 0, table, name=f"M{n}.{len(out)}"))
    return out


# -- named categories ---------------------------------------------------------------------------

def fiedorowicz_category():
    return classifying_category(fiedorowicz_monoid())


def parallel_pair():
    return make_category(
        ["a", "b"], [("ia", "a", "a"), ("ib", "b", "b"), ("f", "a", "b"), ("g", "a", "b")], {"a": "ia", "b": "ib"}, {}, name="par"
    )


def named_category(name):
    """Resolve a builtin name: ``terminal``, ``empty``, ``p[n]``, ``BCn``, ``BS3``, ``ECn``,
    ``BIdem2``, ``fiedorowicz``, ``V``, ``Lambda``, ``diamond``, ``par``.  Returns ``None`` if unknown."""
    import re

    if name == "terminal":
        return terminal_category()
    if name == "empty":
        return empty_category()
    if name in ("fiedorowicz", "BFied"):
        return fiedorowicz_category()
    if name == "BIdem2":
        return classifying_category(idempotent_monoid())
    fixed = {"V": vee, "Lambda": wedge, "diamond": diamond, "par": parallel_pair}
    if name in fixed:
        return fixed[name]()
    m = re.fullmatch(r"p\[(\d+)\]", name)
    if m:
        return simplex_category(int(m.group(1)))
    m = re.fullmatch(r"B(.+)", name)
    if m and named_group(m.group(1)) is not None:
        return classifying_category(named_group(m.group(1)))
    m = re.fullmatch(r"E(.+)", name)
    if m and named_group(m.group(1)) is not None:
        return translation_groupoid(named_group(m.group(1)))[0]
    return None


def named_group(name):
    """``Cn`` (n >= 1) or ``S3``/``S4``; ``None`` if unknown."""
    import re

    m = re.fullmatch(r"C(\d+)", name)
    if m and int(m.group(1)) >= 1:
        n = int(m.group(1))
        return trivial_monoid() if n == 1 else cyclic_group(n)
    m = re.fullmatch(r"S(\d)", name)
    if m and int(m.group(1)) >= 1:
        return symmetric_group(int(m.group(1)))
    return None


def counit_corpus():
    """Twenty-plus categories for the counit check ``c(N C) = C``."""
    from .cgroups import associated_category

    cats = [simplex_category(n) for n in range(4)]
    cats += [vee(), wedge(), diamond(), discrete(2), zigzag5(), cone_diamond()]
    cats += [classifying_category(trivial_monoid())] + [classifying_category(cyclic_group(n)) for n in range(2, 7)]
    cats += [classifying_category(symmetric_group(3)), fiedorowicz_category(), classifying_category(idempotent_monoid())]
    cats += [translation_groupoid(cyclic_group(2))[0], parallel_pair()]
    cats += [associated_category(cg) for _, cg in complex_corpus()[4:8]]
    return cats


def universal_test_family():
    """Test categories with at most 3 objects and at most 8 morphisms.

    Every poset on at most 3 points and every monoid of order at most 3 (up
    to isomorphism), plus a set of mixed categories with 2 or 3 objects.
    """
    fam = [empty_category()]
    for n in (1, 2, 3):
        fam += all_posets(n)
    for n in (2, 3):
        fam += [classifying_category(M) for M in all_monoids(n)]
    BC2 = classifying_category(cyclic_group(2))
    T = terminal_category()
    fam += [
        coproduct_category(BC2, T, name="BC2+pt"),
        coproduct_category(BC2, BC2, name="BC2+BC2"),
        product_category(simplex_category(1), BC2, name="p[1]xBC2"),
        translation_groupoid(cyclic_group(2))[0],
        parallel_pair(),
        coproduct_category(classifying_category(idempotent_monoid()), T, T, name="BIdem2+2pt"),
    ]
    from .cgroups import associated_category, simple_complex

    fam.append(associated_category(simple_complex(simplex_category(1), [cyclic_group(2)] * 2, {(0, 1): [0, 1]}, name="C2=C2")))
    fam.append(associated_category(simple_complex(simplex_category(1), [trivial_monoid(), cyclic_group(2)], {(0, 1): [0]}, name="1-C2")))
    for C in fam:
        assert C.n_objects <= 3 and C.n_morphisms <= 8, C.name
    return fam


# -- Dwyer squares -----------------------------------------------------------------------------

def _point_in(C, obj):
    T = terminal_category()
    return FinFunctor(T, C, [obj], [C.identity[obj]])


def horn_square():
    """``p[1] <- p[0] -> p[1]`` with ``i = d1`` (picks 0) and ``k = d0`` (picks 1); the pushout is p[2]."""
    from .dwyer import check_dwyer

    p1 = simplex_category(1)
    return "horn", check_dwyer(_point_in(p1, 0)), _point_in(p1, 1)


def dwyer_suite():
    """Named Dwyer squares ``(name, certificate, k)`` for the pushout checks."""
    from .dwyer import check_dwyer
    from .orbit import generating_cell

    suite = [horn_square()]
    C2 = cyclic_group(2)
    BC2 = classifying_category(C2)
    # a generating cell times BC2, pushed out along the projection to BC2
    cell, cert = generating_cell(1, C2)
    A = cell.domain
    mb = BC2.n_morphisms
    proj = FinFunctor(A, BC2, np.zeros(A.n_objects, dtype=np.int64), np.arange(A.n_morphisms) % mb)
    suite.append(("cell1xC2", cert, proj))
    # the empty cell: pushout is a coproduct
    cell0, cert0 = generating_cell(0, C2)
    suite.append(("cell0xC2", cert0, FinFunctor(cell0.domain, simplex_category(1), [], [])))
    # the bottom of p[2] glued to the top of p[1]
    p2 = simplex_category(2)
    suite.append(("bottom-of-p2", check_dwyer(_point_in(p2, 0)), _point_in(simplex_category(1), 1)))
    # the sieve {0 < 1} in p[2], collapsed to BC2
    p1 = simplex_category(1)
    incl = FinFunctor(p1, p2, [0, 1], [p2.mor_index["0->0"], p2.mor_index["0->1"], p2.mor_index["1->1"]])
    suite.append(("edge-in-p2", check_dwyer(incl), FinFunctor(p1, BC2, [0, 0], [0, 0, 0])))
    # a point into the source of p[1], sent to the object of BC2
    suite.append(("point-to-BC2", check_dwyer(_point_in(p1, 0)), _point_in(BC2, 0)))
    return suite


# -- complexes of groups ----------------------------------------------------------------------

def _cyclic_homs(m, n):
    """Multipliers ``a`` with ``x -> a x`` a homomorphism ``C_m -> C_n``."""
    return [a for a in range(n) if (a * m) % n == 0]


def _group(n):
    return trivial_monoid() if n == 1 else cyclic_group(n)


def random_simple_complex(P, seed, max_order=4):
    """A simple complex of cyclic groups over ``P`` drawn with ``numpy.random.default_rng(seed)``.

    Orders and Hasse-edge multipliers are drawn at random; composites along
    different paths must agree, otherwise the draw is repeated.
    """
    from .cgroups import simple_complex
    from .fincat.structure import reachability

    rng = np.random.default_rng(seed)
    R = reachability(P)
    n = P.n_objects
    strict = R & ~np.eye(n, dtype=bool)
    hasse = strict & ~((strict.astype(int) @ strict.astype(int)) > 0)
    order = sorted(range(n), key=lambda x: int(R[:, x].sum()))
    for _ in range(1000):
        sizes = rng.integers(1, max_order + 1, size=n)
        mult = {}
        for x, y in np.argwhere(hasse).tolist():
            opts = _cyclic_homs(int(sizes[x]), int(sizes[y]))
            mult[(x, y)] = int(opts[rng.integers(len(opts))])
        # compose along paths in topological order, checking agreement
        total = {(x, x): 1 for x in range(n)}
        ok = True
        for y in order:
            for x in order:
                if not strict[x, y]:
                    continue
                vals = {(total[(x, z)] * mult[(z, y)]) % int(sizes[y]) for z in range(n) if hasse[z, y] and (x, z) in total}
                if len(vals) != 1:
                    ok = False
                    break
                total[(x, y)] = vals.pop()
            if not ok:
                break
        if ok:
            local = [_group(int(s)) for s in sizes]
            trans = {
                (x, y): [(a * total[(x, y)]) % int(sizes[y]) for a in range(int(sizes[x]))]
                for (x, y) in total
                if x != y
            }
            return simple_complex(P, local, trans, name=f"{P.name}#{seed}")
    raise RuntimeError("no consistent simple complex found")


def complex_corpus():
    """Complexes of cyclic groups of order at most 4 over posets with at most 5 elements."""
    from .cgroups import ComplexOfGroups, associated_category, point_complex, random_choices, reconstruct_complex, simple_complex

    C = {n: _group(n) for n in range(1, 5)}
    p1, p2, p3 = simplex_category(1), simplex_category(2), simplex_category(3)
    out = [(f"pt({C[n].name})", point_complex(C[n])) for n in range(1, 5)]
    out += [
        ("C2=C2", simple_complex(p1, [C[2], C[2]], {(0, 1): [0, 1]}, name="C2=C2")),
        ("C4->C2", simple_complex(p1, [C[4], C[2]], {(0, 1): [0, 1, 0, 1]}, name="C4->C2")),
        ("C2->C4", simple_complex(p1, [C[2], C[4]], {(0, 1): [0, 2]}, name="C2->C4")),
        ("C1->C3", simple_complex(p1, [C[1], C[3]], {(0, 1): [0]}, name="C1->C3")),
    ]
    ident2 = [0, 1]
    out.append(("twisted-p2-C2", ComplexOfGroups(p2, [C[2]] * 3, {(0, 1): ident2, (1, 2): ident2, (0, 2): ident2}, {(0, 1, 2): 1}, name="twisted-p2-C2")))
    ident4 = [0, 1, 2, 3]
    out.append(("twisted-p2-C4", ComplexOfGroups(p2, [C[4]] * 3, {(0, 1): ident4, (1, 2): ident4, (0, 2): ident4}, {(0, 1, 2): 3}, name="twisted-p2-C4")))
    out.append(("V-C2C2C4", simple_complex(vee(), [C[2], C[2], C[4]], {(0, 2): [0, 2], (1, 2): [0, 2]}, name="V-C2C2C4")))
    posets = [p3, diamond(), wedge(), zigzag5(), cone_diamond(), simplex_category(4)]
    for seed, P in enumerate(posets):
        out.append((f"simple:{P.name}#{seed}", random_simple_complex(P, seed)))
    # twisted complexes from random reconstruction choices on simple ones
    for seed in range(4):
        base = random_simple_complex(posets[seed % len(posets)], 100 + seed)
        cat = associated_category(base)
        cg, _ = reconstruct_complex(cat, random_choices(cat, seed))
        cg.name = f"rechoose:{base.name}/{seed}"
        out.append((cg.name, cg))
    return out
