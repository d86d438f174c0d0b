"""Dwyer maps: certificates, the explicit pushout along them, and preservation by ``Fun(I, -)``.

A Dwyer map ``i: A -> B`` is a fully faithful, injective-on-objects sieve
inclusion such that ``A`` has a right adjoint inside some cosieve ``W``.  The
right adjoint always restricts to the cosieve ``Z`` generated by ``A`` (the
comma categories ``(A | z)`` are the same in ``W`` and in ``Z``), so the search
runs on ``Z`` only and the certificate records ``W = Z``.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import GlobcatError, NotStronglyConnected
from .fincat.category import (
    FinCategory,
    FinFunctor,
    NatTransformation,
    full_subcategory,
    identity_functor,
    product_category,
    product_functor,
)
from .fincat.funcat import DEFAULT_MAX_FUNCTORS, enumerate_functors, functor_category, postcompose
from .fincat.structure import first_missing_pair, is_strongly_connected


# -- certificates -------------------------------------------------------------------

@dataclass
class DwyerFailure:
    """The first obstruction found; falsy so it can stand in for a certificate in tests."""

    reason: str
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return False

    def to_dict(self):
        return {"dwyer": False, "reason": self.reason, "detail": self.detail}


@dataclass
class DwyerCertificate:
    """Checkable witness that ``inclusion`` is a Dwyer map.

    ``W`` is the full subcategory of the codomain on ``W_objects`` (the
    cosieve generated by the image), ``W_inclusion: W -> B``,
    ``A_in_W: A -> W``, ``r: W -> A`` with ``r A_in_W = Id_A`` and
    ``counit: A_in_W r => Id_W`` which is the identity on ``A``.
    """

    inclusion: FinFunctor
    sieve_record: dict
    W_objects: tuple
    W: FinCategory
    W_inclusion: FinFunctor
    A_in_W: FinFunctor
    r: FinFunctor
    counit: NatTransformation

    def __bool__(self):
        return True

    @property
    def A(self):
        return self.inclusion.domain

    @property
    def B(self):
        return self.inclusion.codomain

    def to_dict(self):
        W, A = self.W, self.A
        return {
            "dwyer": True,
            "sieve": self.sieve_record,
            "W": list(self.W_objects),
            "r": {
                "objects": {W.objects[z]: A.objects[a] for z, a in enumerate(self.r.obj_map.tolist())},
                "morphisms": {W.morphisms[f]: A.morphisms[u] for f, u in enumerate(self.r.mor_map.tolist())},
            },
            "counit": {W.objects[z]: W.morphisms[e] for z, e in enumerate(self.counit.components.tolist())},
        }


def _b_to_w(cert):
    """Arrays translating codomain object/morphism indices into ``W`` indices (-1 outside)."""
    B = cert.B
    wo = -np.ones(B.n_objects, dtype=np.int64)
    wo[cert.W_inclusion.obj_map] = np.arange(cert.W.n_objects)
    wm = -np.ones(B.n_morphisms, dtype=np.int64)
    wm[cert.W_inclusion.mor_map] = np.arange(cert.W.n_morphisms)
    return wo, wm


def _inclusion_checks(i):
    A, B = i.domain, i.codomain
    if not i.is_injective_on_objects():
        return DwyerFailure("NotInjectiveOnObjects", {})
    counts = B.hom_counts()[np.ix_(i.obj_map, i.obj_map)]
    if len(np.unique(i.mor_map)) != A.n_morphisms:
        return DwyerFailure("NotFaithful", {})
    bad = np.argwhere(counts != A.hom_counts())
    if bad.size:
        x, y = bad[0]
        return DwyerFailure("NotFull", {"pair": [A.objects[x], A.objects[y]]})
    in_a = np.zeros(B.n_objects, dtype=bool)
    in_a[i.obj_map] = True
    leaks = np.nonzero(in_a[B.tgt] & ~in_a[B.src])[0]
    if leaks.size:
        f = leaks[0]
        return DwyerFailure("NotSieve", {"morphism": B.morphisms[f], "source": B.objects[B.src[f]], "target": B.objects[B.tgt[f]]})
    return in_a


def _adjunction_bijective(A, W, A_in_W, r, eps):
    """``A(a, r z) -> W(A_in_W a, z)``, ``u -> eps_z o A_in_W(u)`` is bijective for all ``a, z``."""
    for z in range(W.n_objects):
        rz = r.obj_map[z]
        for a in range(A.n_objects):
            us = A.hom(a, rz)
            images = W.comp[eps[z], A_in_W.mor_map[us]] if len(us) else np.zeros(0, np.int64)
            target = W.hom(A_in_W.obj_map[a], z)
            if len(images) != len(target) or not np.array_equal(np.sort(images), np.sort(target)):
                return (A.objects[a], W.objects[z])
    return None


def check_dwyer(i):
    """Certificate for a Dwyer map, or a :class:`DwyerFailure` naming the first obstruction."""
    A, B = i.domain, i.codomain
    in_a = _inclusion_checks(i)
    if isinstance(in_a, DwyerFailure):
        return in_a
    in_z = in_a.copy()
    in_z[B.tgt[in_a[B.src]]] = True
    z_ids = [B.objects[b] for b in range(B.n_objects) if in_z[b]]
    W, W_incl = full_subcategory(B, np.nonzero(in_z)[0], name=f"Z({A.name or 'A'})")
    wo = -np.ones(B.n_objects, dtype=np.int64)
    wo[W_incl.obj_map] = np.arange(W.n_objects)
    wm = -np.ones(B.n_morphisms, dtype=np.int64)
    wm[W_incl.mor_map] = np.arange(W.n_morphisms)
    A_in_W = FinFunctor(A, W, wo[i.obj_map], wm[i.mor_map])
    a_of = -np.ones(W.n_objects, dtype=np.int64)
    a_of[A_in_W.obj_map] = np.arange(A.n_objects)
    r_obj = np.zeros(W.n_objects, dtype=np.int64)
    eps = np.zeros(W.n_objects, dtype=np.int64)
    for z in range(W.n_objects):
        if a_of[z] >= 0:
            r_obj[z] = a_of[z]
            eps[z] = W.identity[z]
            continue
        found = False
        for a in range(A.n_objects):
            for f in W.hom(A_in_W.obj_map[a], z).tolist():
                ok = True
                for a2 in range(A.n_objects):
                    images = W.comp[f, A_in_W.mor_map[A.hom(a2, a)]]
                    target = W.hom(A_in_W.obj_map[a2], z)
                    if len(images) != len(target) or not np.array_equal(np.sort(images), np.sort(target)):
                        ok = False
                        break
                if ok:
                    r_obj[z], eps[z], found = a, f, True
                    break
            if found:
                break
        if not found:
            return DwyerFailure("NoRightAdjoint", {"object": W.objects[z]})
    r_mor = np.zeros(W.n_morphisms, dtype=np.int64)
    for beta in range(W.n_morphisms):
        z, z2 = W.src[beta], W.tgt[beta]
        us = A.hom(r_obj[z], r_obj[z2])
        want = W.comp[beta, eps[z]]
        hit = us[W.comp[eps[z2], A_in_W.mor_map[us]] == want]
        r_mor[beta] = hit[0]
    r = FinFunctor(W, A, r_obj, r_mor)
    counit = NatTransformation(r.then(A_in_W), identity_functor(W), eps)
    sieve_record = {
        "image": [B.objects[b] for b in i.obj_map.tolist()],
        "morphisms_into_image_checked": int(in_a[B.tgt].sum()),
        "cosieve_generated": z_ids,
    }
    cert = DwyerCertificate(i, sieve_record, tuple(z_ids), W, W_incl, A_in_W, r, counit)
    ok, reason = verify_certificate(cert)
    if not ok:  # pragma: no cover - the construction above satisfies every check
        return DwyerFailure("CertificateRejected", {"reason": reason})
    return cert


def verify_certificate(cert):
    """Re-verify every clause of a certificate from scratch; returns ``(ok, reason)``."""
    try:
        i, W, r, eps = cert.inclusion, cert.W, cert.r, cert.counit
        A, B = i.domain, i.codomain
        i.validate()
        res = _inclusion_checks(i)
        if isinstance(res, DwyerFailure):
            return False, res.reason
        in_a = res
        cert.W_inclusion.validate()
        cert.A_in_W.validate()
        r.validate()
        eps.validate()
        if not np.array_equal(cert.W_inclusion.obj_map[cert.A_in_W.obj_map], i.obj_map):
            return False, "A does not sit in W compatibly with the inclusion"
        if not np.array_equal(cert.W_inclusion.mor_map[cert.A_in_W.mor_map], i.mor_map):
            return False, "A does not sit in W compatibly with the inclusion"
        in_w = np.zeros(B.n_objects, dtype=bool)
        in_w[cert.W_inclusion.obj_map] = True
        if not np.all(in_w[in_a]):
            return False, "W does not contain A"
        if np.any(in_w[B.src] & ~in_w[B.tgt]):
            return False, "W is not a cosieve"
        if not cert.W_inclusion.is_injective_on_objects():
            return False, "W inclusion is not injective on objects"
        counts = B.hom_counts()[np.ix_(cert.W_inclusion.obj_map, cert.W_inclusion.obj_map)]
        if not np.array_equal(counts, W.hom_counts()):
            return False, "W is not full"
        if cert.A_in_W.then(r) != identity_functor(A):
            return False, "r is not the identity on A"
        if not np.array_equal(eps.components[cert.A_in_W.obj_map], W.identity[cert.A_in_W.obj_map]):
            return False, "counit is not the identity on A"
        if not np.array_equal(r.mor_map[eps.components], A.identity[r.obj_map]):
            return False, "triangle identity r(eps) = id fails"
        bad = _adjunction_bijective(A, W, cert.A_in_W, r, eps.components)
        if bad is not None:
            return False, f"adjunction bijection fails at {bad}"
    except GlobcatError as exc:
        return False, str(exc)
    return True, None


# -- certificates for Fun(I, i) and i x I ---------------------------------------------------

def induced_dwyer(cert, I, FA=None, FB=None, max_functors=DEFAULT_MAX_FUNCTORS):
    """Certificate for ``Fun(I, i): Fun(I, A) -> Fun(I, B)`` built from ``Fun(I, r)`` and the counit.

    The cosieve is normalized to the one generated by ``Fun(I, A)``, which
    sits inside ``Fun(I, Z)``; ``r`` and the counit act componentwise.
    """
    A, B = cert.A, cert.B
    FA = FA if FA is not None else functor_category(I, A, max_functors)
    FB = FB if FB is not None else functor_category(I, B, max_functors)
    Fi = postcompose(FA, FB, cert.inclusion)
    in_a = np.zeros(FB.n_objects, dtype=bool)
    in_a[Fi.obj_map] = True
    in_z = in_a.copy()
    in_z[FB.tgt[in_a[FB.src]]] = True
    z_ids = [FB.objects[g] for g in range(FB.n_objects) if in_z[g]]
    W2, W2_incl = full_subcategory(FB, np.nonzero(in_z)[0], name=f"Z(Fun({I.name},{A.name}))")
    wo, wm = _b_to_w(cert)
    wo2 = -np.ones(FB.n_objects, dtype=np.int64)
    wo2[W2_incl.obj_map] = np.arange(W2.n_objects)
    wm2 = -np.ones(FB.n_morphisms, dtype=np.int64)
    wm2[W2_incl.mor_map] = np.arange(W2.n_morphisms)
    A_in_W2 = FinFunctor(FA, W2, wo2[Fi.obj_map], wm2[Fi.mor_map])
    Gs = W2_incl.obj_map
    g_mor = FB.mor_maps[Gs]  # rows: B morphisms, landing in Z
    if np.any(wm[g_mor] < 0):
        raise GlobcatError("a functor in the generated cosieve leaves Z")
    rG = cert.r.mor_map[wm[g_mor]]
    r_obj = FA.functor_indices(rG) if len(Gs) else np.zeros(0, np.int64)
    nats = W2_incl.mor_map
    comps = FB.components[nats]
    r_comps = cert.r.mor_map[wm[comps]] if len(nats) else np.zeros((0, I.n_objects), np.int64)
    r_mor = FA.nat_indices(r_obj[W2.src], r_obj[W2.tgt], r_comps) if len(nats) else np.zeros(0, np.int64)
    r2 = FinFunctor(W2, FA, r_obj, r_mor)
    eps_B = cert.W_inclusion.mor_map[cert.counit.components]  # counit components as B morphisms
    g_obj = FB.obj_maps[Gs]
    eps_comps = eps_B[wo[g_obj]] if len(Gs) else np.zeros((0, I.n_objects), np.int64)
    eps_idx = FB.nat_indices(Fi.obj_map[r_obj], Gs, eps_comps) if len(Gs) else np.zeros(0, np.int64)
    counit2 = NatTransformation(r2.then(A_in_W2), identity_functor(W2), wm2[eps_idx])
    record = {
        "image": [FB.objects[g] for g in Fi.obj_map.tolist()],
        "morphisms_into_image_checked": int(in_a[FB.tgt].sum()),
        "cosieve_generated": z_ids,
    }
    new = DwyerCertificate(Fi, record, tuple(z_ids), W2, W2_incl, A_in_W2, r2, counit2)
    ok, reason = verify_certificate(new)
    if not ok:
        raise GlobcatError(f"induced certificate failed verification: {reason}")
    return new


def product_dwyer(cert, I):
    """Certificate for ``i x I: A x I -> B x I`` with ``W x I``, ``r x Id`` and ``counit x id``."""
    ident = identity_functor(I)
    i2 = product_functor(cert.inclusion, ident)
    B2 = i2.codomain
    W2 = product_category(cert.W, I)
    W2_incl = product_functor(cert.W_inclusion, ident)
    A_in_W2 = product_functor(cert.A_in_W, ident)
    r2 = product_functor(cert.r, ident)
    nI = I.n_morphisms
    eps = cert.counit.components[:, None] * nI + I.identity[None, :]
    counit2 = NatTransformation(r2.then(A_in_W2), identity_functor(W2), eps.reshape(-1))
    record = {"image": [B2.objects[b] for b in i2.obj_map.tolist()], "product_with": I.name}
    new = DwyerCertificate(i2, record, W2.objects, W2, W2_incl, A_in_W2, r2, counit2)
    ok, reason = verify_certificate(new)
    if not ok:
        raise GlobcatError(f"product certificate failed verification: {reason}")
    return new


# -- the pushout -----------------------------------------------------------------------

@dataclass
class PushoutResult:
    """``D`` with ``h: B -> D`` and ``j: C -> D``.

    ``kind[m]`` is ``"c"``, ``"v"`` or ``"m"`` (mixed ``C -> V`` morphism);
    ``base[m]`` is the underlying ``C`` morphism (kinds c, m) or ``B`` morphism
    (kind v); ``mixed_target[m]`` is the ``B`` object of a mixed morphism.
    """

    D: FinCategory
    h: FinFunctor
    j: FinFunctor
    c_objects: tuple
    v_objects: tuple
    kind: tuple
    base: np.ndarray
    mixed_target: np.ndarray
    cert: DwyerCertificate
    k: FinFunctor

    def to_dict(self):
        return {
            "D": self.D.to_dict(),
            "c_objects": list(self.c_objects),
            "v_objects": list(self.v_objects),
            "h": self.h.to_dict()["morphism_map"],
            "j": self.j.to_dict()["morphism_map"],
        }


def dwyer_pushout(cert, k):
    """The pushout of ``B <- A -> C`` along a certified Dwyer map, by explicit hom-set formulas."""
    i, A, B, C = cert.inclusion, cert.A, cert.B, k.codomain
    if k.domain != A:
        raise GlobcatError("k must start at the domain of the Dwyer map")
    wo, wm = _b_to_w(cert)
    in_a = np.zeros(B.n_objects, dtype=bool)
    in_a[i.obj_map] = True
    a_of = -np.ones(B.n_objects, dtype=np.int64)
    a_of[i.obj_map] = np.arange(A.n_objects)
    V = [b for b in range(B.n_objects) if not in_a[b]]
    kr_obj = {}  # z (B index in V and Z) -> k(r(z)) in C
    for b in V:
        if wo[b] >= 0:
            kr_obj[b] = int(k.obj_map[cert.r.obj_map[wo[b]]])

    objects = [f"c:{x}" for x in C.objects] + [f"v:{B.objects[b]}" for b in V]
    nC = C.n_objects
    obj_of_v = {b: nC + t for t, b in enumerate(V)}
    mids, src, tgt, kind, base, mtarget = [], [], [], [], [], []
    for f in range(C.n_morphisms):
        mids.append(f"c:{C.morphisms[f]}")
        src.append(C.src[f])
        tgt.append(C.tgt[f])
        kind.append("c")
        base.append(f)
        mtarget.append(-1)
    mixed_index = {}
    for z in V:
        if z not in kr_obj:
            continue
        for f in np.nonzero(C.tgt == kr_obj[z])[0].tolist():
            mixed_index[(f, z)] = len(mids)
            mids.append(f"m:{C.morphisms[f]}>{B.objects[z]}")
            src.append(C.src[f])
            tgt.append(obj_of_v[z])
            kind.append("m")
            base.append(f)
            mtarget.append(z)
    v_index = {}
    v_set = set(V)
    for g in range(B.n_morphisms):
        if B.src[g] in v_set and B.tgt[g] in v_set:
            v_index[g] = len(mids)
            mids.append(f"v:{B.morphisms[g]}")
            src.append(obj_of_v[B.src[g]])
            tgt.append(obj_of_v[B.tgt[g]])
            kind.append("v")
            base.append(g)
            mtarget.append(-1)
    M = len(mids)
    src = np.array(src, dtype=np.int64)
    tgt = np.array(tgt, dtype=np.int64)
    base = np.array(base, dtype=np.int64)
    mtarget = np.array(mtarget, dtype=np.int64)
    identity = np.concatenate([C.identity, np.array([v_index[B.identity[b]] for b in V], dtype=np.int64)])

    def kr_mor(beta):  # beta: B morphism between objects of Z -> C morphism k(r(beta))
        return int(k.mor_map[cert.r.mor_map[wm[beta]]])

    comp = -np.ones((M, M), dtype=np.int64)
    for f in range(M):
        for g in np.nonzero(src == tgt[f])[0].tolist():
            kf, kg = kind[f], kind[g]
            if kf == "c" and kg == "c":
                comp[g, f] = int(C.comp[base[g], base[f]])
            elif kf == "c" and kg == "m":
                comp[g, f] = mixed_index[(int(C.comp[base[g], base[f]]), int(mtarget[g]))]
            elif kf == "m" and kg == "v":
                beta = int(base[g])
                comp[g, f] = mixed_index[(int(C.comp[kr_mor(beta), base[f]]), int(B.tgt[beta]))]
            elif kf == "v" and kg == "v":
                comp[g, f] = v_index[int(B.comp[base[g], base[f]])]
            else:  # pragma: no cover - excluded by the object layout
                raise GlobcatError("unexpected composable pair in the pushout")
    D = FinCategory(objects, mids, src, tgt, identity, comp, name=f"{B.name}+{C.name}")

    j = FinFunctor(C, D, np.arange(nC), np.arange(C.n_morphisms))
    h_obj = np.array([k.obj_map[a_of[b]] if in_a[b] else obj_of_v[b] for b in range(B.n_objects)], dtype=np.int64)
    h_mor = np.zeros(B.n_morphisms, dtype=np.int64)
    for f in range(B.n_morphisms):
        b, b2 = B.src[f], B.tgt[f]
        if in_a[b] and in_a[b2]:
            h_mor[f] = kr_mor(f)
        elif in_a[b]:
            h_mor[f] = mixed_index[(kr_mor(f), int(b2))]
        else:
            h_mor[f] = v_index[f]
    h = FinFunctor(B, D, h_obj, h_mor)
    if i.then(h) != k.then(j):
        raise GlobcatError("pushout square does not commute")
    res = PushoutResult(D, h, j, tuple(objects[:nC]), tuple(objects[nC:]), tuple(kind), base, mtarget, cert, k)
    check_factorization(res)
    return res


def check_factorization(p):
    """Verify ``f = h(eps_z) o j(f)`` for every mixed morphism ``f: c -> z``."""
    cert, D = p.cert, p.D
    wo, _ = _b_to_w(cert)
    eps_B = cert.W_inclusion.mor_map[cert.counit.components]
    for m in range(D.n_morphisms):
        if p.kind[m] != "m":
            continue
        z = int(p.mixed_target[m])
        jf = p.j.mor_map[p.base[m]]
        if D.comp[p.h.mor_map[eps_B[wo[z]]], jf] != m:
            raise GlobcatError(f"factorization fails at {D.morphisms[m]!r}")
    return True


def mediator(p, phi, psi, check=True):
    """The functor ``D -> E`` forced by a cocone ``(phi: B -> E, psi: C -> E)``."""
    cert, D = p.cert, p.D
    E = phi.codomain
    wo, _ = _b_to_w(cert)
    eps_B = cert.W_inclusion.mor_map[cert.counit.components]
    v_b = [cert.B.obj_index[o[2:]] for o in p.v_objects]
    obj = np.concatenate([psi.obj_map, phi.obj_map[np.array(v_b, dtype=np.int64)]]) if v_b else psi.obj_map.copy()
    mor = np.zeros(D.n_morphisms, dtype=np.int64)
    for m in range(D.n_morphisms):
        kd = p.kind[m]
        if kd == "c":
            mor[m] = psi.mor_map[p.base[m]]
        elif kd == "v":
            mor[m] = phi.mor_map[p.base[m]]
        else:
            z = int(p.mixed_target[m])
            mor[m] = E.comp[phi.mor_map[eps_B[wo[z]]], psi.mor_map[p.base[m]]]
    return FinFunctor(D, E, obj, mor, check=check)


@dataclass
class UniversalPropertyReport:
    holds: bool
    cocones: int
    functors_from_D: int
    failures: list = field(default_factory=list)

    def __bool__(self):
        return self.holds

    def to_dict(self):
        return {"holds": self.holds, "cocones": self.cocones, "functors_from_D": self.functors_from_D, "failures": self.failures}


def verify_universal_property(p, E, limit=DEFAULT_MAX_FUNCTORS):
    """Check the pushout property of ``p`` against ``E`` by exhaustive cocone enumeration.

    For every cocone the forced mediator must be a functor restricting
    correctly; independently, restriction along ``(h, j)`` must be a bijection
    from all functors ``D -> E`` onto the cocones.
    """
    i, k = p.cert.inclusion, p.k
    B, C, D = i.codomain, k.codomain, p.D
    Bo, Bm = enumerate_functors(B, E, limit)
    Co, Cm = enumerate_functors(C, E, limit)
    failures = []
    # cocones: pairs agreeing on A
    key_b = {}
    for t in range(len(Bm)):
        key_b.setdefault((Bo[t][i.obj_map].tobytes(), Bm[t][i.mor_map].tobytes()), []).append(t)
    cocones = set()
    for s in range(len(Cm)):
        key = (Co[s][k.obj_map].tobytes(), Cm[s][k.mor_map].tobytes())
        for t in key_b.get(key, []):
            cocones.add((t, s))
            phi = FinFunctor(B, E, Bo[t], Bm[t], check=False)
            psi = FinFunctor(C, E, Co[s], Cm[s], check=False)
            try:
                kappa = mediator(p, phi, psi)
            except GlobcatError as exc:
                failures.append({"cocone": [t, s], "error": str(exc)})
                continue
            if p.h.then(kappa) != phi or p.j.then(kappa) != psi:
                failures.append({"cocone": [t, s], "error": "mediator does not restrict to the cocone"})
    Do, Dm = enumerate_functors(D, E, limit)
    index_b = {(Bo[t].tobytes(), Bm[t].tobytes()): t for t in range(len(Bm))}
    index_c = {(Co[s].tobytes(), Cm[s].tobytes()): s for s in range(len(Cm))}
    seen = set()
    for u in range(len(Dm)):
        t = index_b[(Do[u][p.h.obj_map].tobytes(), Dm[u][p.h.mor_map].tobytes())]
        s = index_c[(Do[u][p.j.obj_map].tobytes(), Dm[u][p.j.mor_map].tobytes())]
        if (t, s) in seen:
            failures.append({"cocone": [t, s], "error": "two functors out of D restrict to the same cocone"})
        seen.add((t, s))
    if seen != cocones:
        failures.append({"error": f"{len(cocones - seen)} cocones have no functor out of D"})
    return UniversalPropertyReport(not failures, len(cocones), len(Dm), failures)


# -- Fun(I, -) and pushouts ------------------------------------------------------------

@dataclass
class PreservationVerdict:
    """Outcome of :func:`fun_preservation`; truthy iff the comparison is an isomorphism."""

    isomorphism: bool
    comparison: FinFunctor
    detail: dict

    def __bool__(self):
        return self.isomorphism

    def to_dict(self):
        return {"isomorphism": self.isomorphism, **self.detail}


def fun_preservation(I, cert, k, allow_non_strongly_connected=False, max_functors=DEFAULT_MAX_FUNCTORS):
    """Compare the pushout of ``Fun(I, B) <- Fun(I, A) -> Fun(I, C)`` with ``Fun(I, D)``.

    The pushout is built with :func:`dwyer_pushout` from the induced
    certificate; the comparison is its mediator for the cocone
    ``(Fun(I, h), Fun(I, j))``.  Also checks that every functor ``I -> D``
    lands in ``C`` or in ``V`` and the mixed-hom identity
    ``Fun(I,D)(jF, hG) = Fun(I,C)(F, k r G)``.
    """
    if not is_strongly_connected(I) and not allow_non_strongly_connected:
        x, y = first_missing_pair(I)
        raise NotStronglyConnected(x, y)
    p = dwyer_pushout(cert, k)
    A, B, C, D = cert.A, cert.B, k.codomain, p.D
    FA = functor_category(I, A, max_functors)
    FB = functor_category(I, B, max_functors)
    FC = functor_category(I, C, max_functors)
    FD = functor_category(I, D, max_functors)
    cert2 = induced_dwyer(cert, I, FA, FB)
    Fk = postcompose(FA, FC, k)
    p2 = dwyer_pushout(cert2, Fk)
    Fh = postcompose(FB, FD, p.h)
    Fj = postcompose(FC, FD, p.j)
    phi = mediator(p2, Fh, Fj)
    iso = phi.is_isomorphism()

    is_c = np.zeros(D.n_objects, dtype=bool)
    is_c[: C.n_objects] = True
    split = [bool(np.all(is_c[row]) or np.all(~is_c[row])) for row in FD.obj_maps]
    dichotomy = all(split)
    mixed_ok = True
    mixed_pairs = 0
    if dichotomy:
        mixed_ok, mixed_pairs = _mixed_hom_identity(p, FC, FD)
    hit = np.zeros(FD.n_objects, dtype=bool)
    hit[phi.obj_map] = True
    detail = {
        "I": I.name,
        "pushout_objects": p2.D.n_objects,
        "pushout_morphisms": p2.D.n_morphisms,
        "fun_D_objects": FD.n_objects,
        "fun_D_morphisms": FD.n_morphisms,
        "objects_missed": [FD.objects[x] for x in np.nonzero(~hit)[0][:5].tolist()],
        "dichotomy": dichotomy,
        "mixed_hom_identity": mixed_ok,
        "mixed_pairs_checked": mixed_pairs,
    }
    return PreservationVerdict(bool(iso and (not is_strongly_connected(I) or (dichotomy and mixed_ok))), phi, detail)


def _mixed_hom_identity(p, FC, FD):
    """Compare ``Fun(I,D)(jF, hG)`` with ``Fun(I,C)(F, k r G)`` component by component."""
    C, cert = FC.C, p.cert
    wo, wm = _b_to_w(cert)
    nC = C.n_objects
    # C-valued and V-valued functors I -> D
    c_rows = [g for g in range(FD.n_objects) if np.all(FD.obj_maps[g] < nC)]
    v_rows = [g for g in range(FD.n_objects) if np.all(FD.obj_maps[g] >= nC)]
    checked = 0
    for F in c_rows:
        Fc = FD.mor_maps[F]  # D morphisms of kind c: base gives C morphisms
        F_in_C = FC.index_of_functor(p.base[Fc])
        for G in v_rows:
            Gb = p.base[FD.mor_maps[G]]  # B morphisms
            if np.any(wm[Gb] < 0):
                if len(FD.hom(F, G)):
                    return False, checked
                continue
            krG = p.k.mor_map[cert.r.mor_map[wm[Gb]]]
            target = FC.index_of_functor(krG)
            lhs = sorted(tuple(p.base[FD.components[t]].tolist()) for t in FD.hom(F, G).tolist())
            rhs = sorted(tuple(FC.components[t].tolist()) for t in FC.hom(F_in_C, target).tolist())
            checked += 1
            if lhs != rhs:
                return False, checked
    return True, checked


def pushout_homology_check(cert, k, k_max, family):
    """For each ``I`` in ``family``, the verdict for ``Fun(I, h): Fun(I, B) -> Fun(I, D)``."""
    from .homology import compare

    p = dwyer_pushout(cert, k)
    out = {}
    for I in family:
        FB = functor_category(I, cert.B)
        FD = functor_category(I, p.D)
        out[I.name] = compare(postcompose(FB, FD, p.h), k_max)
    return out


def nerve_pushout_comparison(p, d):
    """The canonical map ``N(B) u_{N(A)} N(C) -> N(D)`` of simplicial sets, truncated at ``d``."""
    from .simplicial import copairing, nerve, nerve_map, sset_pushout

    i, k = p.cert.inclusion, p.k
    NA, NB, NC, ND = nerve(i.domain, d), nerve(i.codomain, d), nerve(k.codomain, d), nerve(p.D, d)
    P, jB, jC = sset_pushout(nerve_map(i, NA, NB), nerve_map(k, NA, NC))
    return copairing(P, jB, jC, nerve_map(p.h, NB, ND), nerve_map(p.j, NC, ND))
