"""JSON input and output: canonical dumps, content hashes and loaders for every file format."""
import hashlib
import json
import re
from pathlib import Path

from .errors import GlobcatError
from .fincat.algebra import FinGroup, monoid_from_dict
from .fincat.category import make_functor, validate_category


def canonical_dumps(obj):
    """Deterministic JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, default=_default) + "\n"


def _default(obj):
    import numpy as np

    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def content_hash(text):
    return hashlib.sha256(text.encode("utf-8") if isinstance(text, str) else text).hexdigest()


def read_json(path):
    """``(data, sha256 of the bytes)``; malformed files raise :class:`GlobcatError`."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise GlobcatError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(raw), content_hash(raw)
    except json.JSONDecodeError as exc:
        raise GlobcatError(f"{path} is not valid JSON: {exc}") from None


def _is_file(spec):
    return Path(spec).is_file()


def load_category(spec):
    """A category from a JSON file or a builtin name (see :func:`globcat.corpus.named_category`).

    Returns ``(category, provenance)`` where provenance is the file hash or ``"builtin:<name>"``.
    """
    from .corpus import named_category

    if isinstance(spec, dict):
        return validate_category(spec), "inline"
    if _is_file(spec):
        data, h = read_json(spec)
        return validate_category(data), h
    C = named_category(spec)
    if C is None:
        raise GlobcatError(f"{spec!r} is neither a file nor a builtin category name")
    return C, f"builtin:{spec}"


def load_group(spec):
    from .corpus import named_group

    if _is_file(spec):
        data, h = read_json(spec)
        G = monoid_from_dict(data, name=Path(spec).stem)
        if not isinstance(G, FinGroup):
            raise GlobcatError(f"{spec} describes a monoid that is not a group")
        return G, h
    G = named_group(spec)
    if G is None:
        raise GlobcatError(f"{spec!r} is neither a file nor a builtin group name")
    return G, f"builtin:{spec}"


def load_functor(spec):
    """A functor file ``{"domain", "codomain", "object_map", "morphism_map"}``; the
    endpoints may be inline categories or builtin names."""
    data, h = read_json(spec)
    try:
        A = load_category(data["domain"])[0]
        B = load_category(data["codomain"])[0]
        return make_functor(A, B, data["object_map"], data.get("morphism_map", {})), h
    except KeyError as exc:
        raise GlobcatError(f"functor file is missing {exc.args[0]!r}") from None


def load_simplicial_set(spec):
    """A simplicial set file, or ``Delta[n]``, ``dDelta[n]``, ``Horn[n,k]`` (bound ``n + 1``)."""
    from .simplicial import boundary, horn, simplicial_set_from_dict, standard_simplex

    if _is_file(spec):
        data, h = read_json(spec)
        return simplicial_set_from_dict(data), h
    m = re.fullmatch(r"Delta\[(\d+)\]", spec)
    if m:
        return standard_simplex(int(m.group(1))), f"builtin:{spec}"
    m = re.fullmatch(r"dDelta\[(\d+)\]", spec)
    if m:
        n = int(m.group(1))
        return boundary(n)[0], f"builtin:{spec}"
    m = re.fullmatch(r"Horn\[(\d+),(\d+)\]", spec)
    if m:
        return horn(int(m.group(1)), int(m.group(2)))[0], f"builtin:{spec}"
    raise GlobcatError(f"{spec!r} is neither a file nor a builtin simplicial set name")


def load_complex(spec):
    from .cgroups import complex_from_dict

    data, h = read_json(spec)
    return complex_from_dict(data), h


def diagram_from_dict(data):
    """A strict diagram ``{"base": cat, "categories": {k: cat}, "functors": {f: functor}}``.

    Functors are given as ``{"object_map", "morphism_map"}``; their endpoints
    are read off the base category.
    """
    from .cgroups import CatDiagram

    try:
        K = load_category(data["base"])[0]
        cats = [load_category(data["categories"][k])[0] for k in K.objects]
        fun = []
        for f in range(K.n_morphisms):
            name = K.morphisms[f]
            A, B = cats[K.src[f]], cats[K.tgt[f]]
            if name in data.get("functors", {}):
                d = data["functors"][name]
                fun.append(make_functor(A, B, d["object_map"], d.get("morphism_map", {})))
            elif K.is_identity(f):
                fun.append(make_functor(A, A, {o: o for o in A.objects}, {m: m for m in A.morphisms}))
            else:
                raise GlobcatError(f"no functor for base morphism {name!r}")
    except KeyError as exc:
        raise GlobcatError(f"diagram description is missing {exc.args[0]!r}") from None
    return CatDiagram(K, cats, fun)


def load_diagram(spec):
    data, h = read_json(spec)
    return diagram_from_dict(data), h


def write_text(path, text):
    Path(path).write_text(text, encoding="utf-8")
