"""Command-line entry point: ``globcat <subcommand> ...`` writes a JSON report.

Exit codes: 0 for a positive verdict, 1 for a negative verdict, 2 for input errors.
"""
import argparse
import sys
import time

from . import __version__
from .errors import GlobcatError, SizeLimitExceeded
from .fincat.funcat import DEFAULT_MAX_FUNCTORS
from .io import (
    canonical_dumps,
    load_category,
    load_complex,
    load_diagram,
    load_functor,
    load_group,
    load_simplicial_set,
    read_json,
    write_text,
)
from .orbit import DEFAULT_MAX_GROUP_ORDER

DEFAULT_MAX_DEGREE = 4


class _Run:
    """Collects inputs, size caps and the verdict for one invocation."""

    def __init__(self, args):
        self.args = args
        self.inputs = {}
        self.timings = {}

    def caps(self):
        a = self.args
        return {"max_functors": a.max_functors, "max_degree": a.max_degree, "max_group_order": a.max_group_order}

    def timed(self, label, fn, *xs, **kw):
        t = time.perf_counter()
        out = fn(*xs, **kw)
        self.timings[label] = round(time.perf_counter() - t, 6)
        return out

    def category(self, spec):
        C, h = load_category(spec)
        self.inputs[spec] = h
        return C

    def group(self, spec):
        G, h = load_group(spec)
        if G.order > self.args.max_group_order:
            raise SizeLimitExceeded(f"group order {G.order}", self.args.max_group_order)
        self.inputs[spec] = h
        return G

    def functor(self, spec):
        F, h = load_functor(spec)
        self.inputs[spec] = h
        return F

    def sset(self, spec):
        X, h = load_simplicial_set(spec)
        self.inputs[spec] = h
        return X

    def report(self, ok, result):
        rep = {
            "command": self.args.command,
            "version": __version__,
            "inputs": self.inputs,
            "caps": self.caps(),
            "verdict": "positive" if ok else "negative",
            "result": result,
        }
        if self.args.timings:
            rep["timings"] = self.timings
        return (0 if ok else 1), rep


# -- subcommands -------------------------------------------------------------------------------

def cmd_validate(run):
    a = run.args
    data, h = read_json(a.file)
    run.inputs[a.file] = h
    kind = a.kind
    if kind == "auto":
        kind = "monoid" if "mult" in data else "category"
    if kind == "monoid":
        from .fincat.algebra import FinGroup, monoid_from_dict

        M = monoid_from_dict(data)
        return run.report(True, {"kind": "group" if isinstance(M, FinGroup) else "monoid", "order": M.order})
    from .fincat.category import validate_category

    C = validate_category(data)
    return run.report(True, {"kind": "category", "objects": C.n_objects, "morphisms": C.n_morphisms, "canonical": C.to_dict()})


def cmd_funcat(run):
    from .fincat.funcat import functor_category

    a = run.args
    I, C = run.category(a.I), run.category(a.C)
    F = run.timed("functor_category", functor_category, I, C, a.max_functors)
    out = {"objects": F.n_objects, "morphisms": F.n_morphisms, "functors": list(F.objects)}
    if a.full:
        out["category"] = F.to_dict()
    return run.report(True, out)


def cmd_nerve(run):
    from .simplicial import nerve

    a = run.args
    C = run.category(a.C)
    d = min(a.degree, a.max_degree)
    N = run.timed("nerve", nerve, C, d)
    return run.report(
        True,
        {"bound": N.bound, "skeletal": N.skeletal, "counts": N.counts(), "nondegenerate": N.nondegenerate_counts()},
    )


def cmd_homology(run):
    from .homology import homology
    from .simplicial import nerve

    a = run.args
    k = min(a.degree, a.max_degree)
    if a.sset:
        X = run.sset(a.target)
    else:
        X = run.timed("nerve", nerve, run.category(a.target), k + 1)
    H = run.timed("homology", homology, X, k)
    return run.report(True, H.to_dict())


def cmd_dwyer_check(run):
    from .dwyer import check_dwyer

    cert = run.timed("check_dwyer", check_dwyer, run.functor(run.args.functor))
    return run.report(bool(cert), cert.to_dict())


def _pushout(run):
    from .dwyer import check_dwyer, dwyer_pushout

    i, k = run.functor(run.args.i), run.functor(run.args.k)
    cert = check_dwyer(i)
    if not cert:
        return None, cert, k
    return run.timed("pushout", dwyer_pushout, cert, k), cert, k


def cmd_dwyer_pushout(run):
    p, cert, _ = _pushout(run)
    if p is None:
        return run.report(False, {"dwyer": cert.to_dict()})
    out = p.to_dict()
    if run.args.universal:
        from .dwyer import verify_universal_property

        E = run.category(run.args.universal)
        rep = verify_universal_property(p, E, run.args.max_functors)
        out["universal_property"] = rep.to_dict()
        return run.report(bool(rep), out)
    return run.report(True, out)


def cmd_fun_preserve(run):
    from .dwyer import check_dwyer, fun_preservation

    a = run.args
    I = run.category(a.I)
    i, k = run.functor(a.i), run.functor(a.k)
    cert = check_dwyer(i)
    if not cert:
        return run.report(False, {"dwyer": cert.to_dict()})
    v = run.timed("fun_preservation", fun_preservation, I, cert, k, a.allow_non_strongly_connected, a.max_functors)
    return run.report(bool(v), v.to_dict())


def cmd_orbit_hom(run):
    from .orbit import structure_report

    a = run.args
    K, G = run.group(a.K), run.group(a.G)
    rep = run.timed("structure_report", structure_report, K, G, True, a.max_group_order)
    return run.report(rep.ok, rep.to_dict())


def cmd_global_nerve(run):
    from .orbit import global_nerve_value

    a = run.args
    C, G = run.category(a.C), run.group(a.G)
    Ks = [run.group(k) for k in a.restrict]
    v = run.timed("global_nerve_value", global_nerve_value, C, G, min(a.degree, a.max_degree), Ks, a.max_functors)
    return run.report(
        True,
        {
            "functor_category": {"objects": v.functor_category.n_objects, "morphisms": v.functor_category.n_morphisms},
            "nondegenerate": v.value.nondegenerate_counts(),
            "restrictions": len(v.restrictions),
            "conjugations": len(v.conjugations),
        },
    )


def cmd_cell(run):
    from .orbit import generating_cell

    a = run.args
    cell, cert = run.timed("generating_cell", generating_cell, a.n, run.group(a.G))
    return run.report(
        bool(cert),
        {
            "domain": {"objects": cell.domain.n_objects, "morphisms": cell.domain.n_morphisms},
            "codomain": {"objects": cell.codomain.n_objects, "morphisms": cell.codomain.n_morphisms},
            "dwyer": cert.to_dict(),
        },
    )


def cmd_gamma_cell(run):
    from .fincat.structure import is_poset
    from .orbit import gamma_cell

    a = run.args
    C = run.timed("gamma_cell", gamma_cell, run.sset(a.A), run.category(a.J))
    return run.report(True, {"objects": C.n_objects, "morphisms": C.n_morphisms, "is_poset": is_poset(C)})


def cmd_cog_validate(run):
    cg, h = load_complex(run.args.file)
    run.inputs[run.args.file] = h
    return run.report(True, {"elements": cg.P.n_objects, "simple": cg.is_simple(), "complex": cg.to_dict()})


def cmd_cog_assemble(run):
    from .cgroups import associated_category, check_conditions

    cg, h = load_complex(run.args.file)
    run.inputs[run.args.file] = h
    C = associated_category(cg)
    rep = check_conditions(C)
    return run.report(bool(rep), {"category": C.to_dict(), "conditions": rep.to_dict()})


def cmd_cog_reconstruct(run):
    from .cgroups import check_conditions, reconstruct_complex
    from .fincat.category import opposite_category

    a = run.args
    C = run.category(a.C)
    if a.variant == "opposite":
        rep = check_conditions(C, "opposite")
        C = opposite_category(C)
    else:
        rep = check_conditions(C, "plain")
    if not rep:
        return run.report(False, {"conditions": rep.to_dict()})
    choices = None
    if a.choices:
        data, h = read_json(a.choices)
        run.inputs[a.choices] = h
        choices = {}
        for key, mor in data.items():
            x, y = key.split("<=")
            choices[(C.obj_index[x], C.obj_index[y])] = C.mor_index[mor]
        for x in range(C.n_objects):
            choices.setdefault((x, x), int(C.identity[x]))
    cg, kappa = run.timed("reconstruct", reconstruct_complex, C, choices)
    return run.report(
        kappa.is_isomorphism(),
        {"conditions": rep.to_dict(), "complex": cg.to_dict(), "kappa_isomorphism": kappa.is_isomorphism()},
    )


def cmd_grothendieck(run):
    from .cgroups import fun_grothendieck_comparison, grothendieck

    a = run.args
    D, h = load_diagram(a.file)
    run.inputs[a.file] = h
    G = run.timed("grothendieck", grothendieck, D)
    out = {"objects": G.n_objects, "morphisms": G.n_morphisms, "hom_counts": G.hom_counts().tolist()}
    if a.compare:
        I = run.category(a.compare)
        cmp = run.timed("comparison", fun_grothendieck_comparison, I, D, a.max_functors)
        out["comparison"] = cmp.to_dict()
        return run.report(bool(cmp), out)
    if a.full:
        out["category"] = G.to_dict()
    return run.report(True, out)


def cmd_example(run):
    from .corpus import fiedorowicz_category, horn_square, named_category

    a = run.args
    if a.name == "fiedorowicz":
        from .homology import homology
        from .simplicial import nerve

        C = fiedorowicz_category()
        H = run.timed("homology", homology, nerve(C, 4), 3)
        ok = H.groups() == ["Z", "0", "Z", "0"]
        return run.report(ok, {"category": C.name, "homology": H.to_dict(), "expected": ["Z", "0", "Z", "0"]})
    from .dwyer import fun_preservation

    _, cert, k = horn_square()
    bad = fun_preservation(named_category("p[1]"), cert, k, allow_non_strongly_connected=True)
    good = fun_preservation(named_category("BC2"), cert, k)
    return run.report(
        (not bad) and bool(good),
        {"I=p[1]": bad.to_dict(), "I=BC2": good.to_dict(), "expected": {"I=p[1]": False, "I=BC2": True}},
    )


COMMANDS = {
    "validate": cmd_validate,
    "funcat": cmd_funcat,
    "nerve": cmd_nerve,
    "homology": cmd_homology,
    "dwyer-check": cmd_dwyer_check,
    "dwyer-pushout": cmd_dwyer_pushout,
    "fun-preserve": cmd_fun_preserve,
    "orbit-hom": cmd_orbit_hom,
    "global-nerve": cmd_global_nerve,
    "cell": cmd_cell,
    "gamma-cell": cmd_gamma_cell,
    "cog-validate": cmd_cog_validate,
    "cog-assemble": cmd_cog_assemble,
    "cog-reconstruct": cmd_cog_reconstruct,
    "grothendieck": cmd_grothendieck,
    "example": cmd_example,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--max-functors", type=int, default=DEFAULT_MAX_FUNCTORS)
    common.add_argument("--max-degree", type=int, default=DEFAULT_MAX_DEGREE)
    common.add_argument("--max-group-order", type=int, default=DEFAULT_MAX_GROUP_ORDER)
    common.add_argument("--timings", action="store_true", help="include wall-clock timings (reports are then not byte-stable)")

    p = argparse.ArgumentParser(prog="globcat", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="validate a category or monoid file")
    s.add_argument("file")
    s.add_argument("--kind", choices=["auto", "category", "monoid"], default="auto")

    s = sub.add_parser("funcat", parents=[common], help="enumerate Fun(I, C)")
    s.add_argument("I")
    s.add_argument("C")
    s.add_argument("--full", action="store_true")

    s = sub.add_parser("nerve", parents=[common], help="truncated nerve of a category")
    s.add_argument("C")
    s.add_argument("--degree", type=int, default=3)

    s = sub.add_parser("homology", parents=[common], help="integral homology of a nerve or simplicial set")
    s.add_argument("target")
    s.add_argument("--degree", type=int, default=3)
    s.add_argument("--sset", action="store_true", help="target is a simplicial set")

    s = sub.add_parser("dwyer-check", parents=[common], help="certify a functor as a Dwyer map")
    s.add_argument("functor")

    s = sub.add_parser("dwyer-pushout", parents=[common], help="pushout along a Dwyer map")
    s.add_argument("i")
    s.add_argument("k")
    s.add_argument("--universal", metavar="E", help="also check the universal property against E")

    s = sub.add_parser("fun-preserve", parents=[common], help="does Fun(I, -) preserve the Dwyer pushout?")
    s.add_argument("I")
    s.add_argument("i")
    s.add_argument("k")
    s.add_argument("--allow-non-strongly-connected", action="store_true")

    s = sub.add_parser("orbit-hom", parents=[common], help="structure report for the groupoid of homomorphisms K -> G")
    s.add_argument("K")
    s.add_argument("G")

    s = sub.add_parser("global-nerve", parents=[common], help="value of the global nerve of C at G")
    s.add_argument("C")
    s.add_argument("G")
    s.add_argument("--degree", type=int, default=2)
    s.add_argument("--restrict", nargs="*", default=[], metavar="K")

    s = sub.add_parser("cell", parents=[common], help="generating cell c(Sd^2 dDelta[n]) x BG -> c(Sd^2 Delta[n]) x BG")
    s.add_argument("n", type=int)
    s.add_argument("G")

    s = sub.add_parser("gamma-cell", parents=[common], help="c(Sd^2 A) x J")
    s.add_argument("A")
    s.add_argument("J")

    s = sub.add_parser("cog-validate", parents=[common], help="validate a complex of groups")
    s.add_argument("file")

    s = sub.add_parser("cog-assemble", parents=[common], help="associated category of a complex of groups")
    s.add_argument("file")

    s = sub.add_parser("cog-reconstruct", parents=[common], help="complex of groups from a category")
    s.add_argument("C")
    s.add_argument("--variant", choices=["plain", "opposite"], default="plain")
    s.add_argument("--choices", help='JSON {"x<=y": morphism id}')

    s = sub.add_parser("grothendieck", parents=[common], help="Grothendieck construction of a strict diagram")
    s.add_argument("file")
    s.add_argument("--compare", metavar="I", help="also build K int Fun(I,F) -> Fun(I, K int F)")
    s.add_argument("--full", action="store_true")

    s = sub.add_parser("example", parents=[common], help="worked examples, recomputed on every run")
    s.add_argument("name", choices=["fiedorowicz", "horn-counterexample"])
    return p


def run(argv=None):
    """Parse ``argv``, execute, and return ``(exit code, report dict or None)``."""
    args = build_parser().parse_args(argv)
    r = _Run(args)
    try:
        code, rep = COMMANDS[args.command](r)
    except GlobcatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code, rep = 2, {"command": args.command, "verdict": "input-error", "error": type(exc).__name__, "message": str(exc)}
    text = canonical_dumps(rep)
    if args.out:
        write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return code, rep


def main(argv=None):
    try:
        code, _ = run(argv)
    except SystemExit as exc:  # argparse usage errors
        return 2 if exc.code not in (0, None) else 0
    return code


if __name__ == "__main__":
    sys.exit(main())
