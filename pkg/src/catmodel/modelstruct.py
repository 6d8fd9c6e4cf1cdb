"""The model-structure engine: class predicates, constructive lifting,
mapping cylinder and path object factorizations, tensor/cotensor with
groupoids, mapping spaces.

Everything dispatches on the flavor of its arguments: table functors
(:class:`~catmodel.markedcat.CatFunctor`) or enriched functors
(:class:`~catmodel.preaddcat.AddFunctor`).  Factorizations re-verify their
own output before returning.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Union

from .abgrp import AbHom, FinAbGroup, direct_sum_with_maps, solve_left, vstack
from .markedcat import (
    CatFunctor,
    FinMarkedCat,
    FunctorCategory,
    NatTransf,
    fun_plus,
    is_weak_equivalence,
    ma,
    product,
    subgroupoid_closure,
)
from .preaddcat import (
    AddFunctor,
    FinPreAddCat,
    PMor,
    PreAddFunCat,
    TensorPreAdd,
    fun_plus_groupoid,
    is_weak_equivalence_add,
    marked_closure,
    tensor_preadd,
)
from .presentations import DEFAULT_CAP, SizeLimit
from .simplicial import TruncSSet, nerve
from .verdict import Verdict

__all__ = [
    "Morphism",
    "LiftSquare",
    "Factorization",
    "NoLift",
    "is_cofibration",
    "is_fibration",
    "is_weq",
    "is_trivial_fibration",
    "is_trivial_cofibration",
    "solve_lift",
    "exhaustive_lift_search",
    "factor_cof_trivfib",
    "factor_trivcof_fib",
    "sharp",
    "sharp_counit",
    "cotensor",
    "mapping_space",
    "marked_groupoid",
    "product_family",
    "product_preadd",
    "terminal_preadd",
    "rlp_generating",
    "has_rlp_I",
]

Morphism = Union[CatFunctor, AddFunctor]


def _is_cat(f: Morphism) -> bool:
    return isinstance(f, CatFunctor)


# ---------------------------------------------------------------------------
# class predicates


def is_cofibration(f: Morphism) -> bool:
    """Injective on objects."""
    return len(set(f.obj_map)) == len(f.obj_map)


def is_weq(f: Morphism) -> bool:
    if _is_cat(f):
        return is_weak_equivalence(f).ok
    res = is_weak_equivalence_add(f)
    if res.verdict is Verdict.INCONCLUSIVE:
        raise SizeLimit("weak equivalence undecided at bound")
    return bool(res)


def is_fibration(f: Morphism) -> bool:
    """Marked isofibration: every marked iso out of an image object lifts."""
    if _is_cat(f):
        C, D = f.dom, f.cod
        for c in C.objects():
            for u in D.morphisms():
                if u not in D.marked or D.src[u] != f.obj_map[c]:
                    continue
                if not any(
                    f.mor_map[v] == u
                    for v in C.marked
                    if C.src[v] == c
                ):
                    return False
        return True
    C, D = f.dom, f.cod
    for c in C.objects():
        for (s, t), ms in D.marked.items():
            if s != f.obj_map[c]:
                continue
            for u in ms:
                if not any(
                    f.on_mor(v).elt == u.elt and f.obj_map[v.tgt] == t
                    for (vs, vt), vms in C.marked.items()
                    if vs == c
                    for v in vms
                ):
                    return False
    return True


def is_trivial_fibration(f: Morphism) -> bool:
    """A weak equivalence that is surjective on objects."""
    surj = set(f.obj_map) == set(range(_n_objects(f.cod)))
    return surj and is_weq(f)


def is_trivial_cofibration(f: Morphism) -> bool:
    return is_cofibration(f) and is_weq(f)


def _n_objects(c) -> int:
    return c.n_objects


# ---------------------------------------------------------------------------
# lifting


@dataclass
class LiftSquare:
    """i: A -> B (left), f: C -> D (right), top: A -> C, bottom: B -> D."""

    i: Morphism
    f: Morphism
    top: Morphism
    bottom: Morphism

    def validate(self) -> list[str]:
        errs = []
        if self.top.then(self.f) != self.i.then(self.bottom):
            errs.append("square does not commute")
        return errs


@dataclass
class NoLift:
    reason: str
    obstruction: Optional[object] = None

    def __bool__(self):
        return False


def solve_lift(sq: LiftSquare, cap: int = DEFAULT_CAP):
    """A lift B -> C making both triangles commute, or :class:`NoLift`.

    Uses the constructive arguments when the square is (trivial cof, fib)
    or (cof, trivial fib); otherwise falls back to exhaustive search over
    functors (table flavor only).  Every returned lift is re-verified.
    """
    errs = sq.validate()
    if errs:
        raise ValueError(errs[0])
    lift = None
    if is_cofibration(sq.i) and is_weq(sq.i) and is_fibration(sq.f):
        lift = _lift_trivcof_fib(sq)
    if lift is None and is_cofibration(sq.i) and is_trivial_fibration(sq.f):
        lift = _lift_cof_trivfib(sq)
    if lift is None:
        if not _is_cat(sq.i):
            return NoLift("no constructive case applies; enriched exhaustive search unsupported")
        lift = exhaustive_lift_search(sq)
        if isinstance(lift, NoLift):
            return lift
    if lift is None:
        return NoLift("constructive lift failed")
    if sq.i.then(lift) != sq.top or lift.then(sq.f) != sq.bottom:
        return NoLift("constructed lift failed verification")
    return lift


def _marked_lift_cat(f: CatFunctor, c: int, u: int) -> Optional[int]:
    C, D = f.dom, f.cod
    for v in sorted(C.marked):
        if C.src[v] == c and f.mor_map[v] == u:
            return v
    return None


def _lift_trivcof_fib(sq: LiftSquare):
    """The conjugation construction for a trivial cofibration against a
    fibration."""
    if _is_cat(sq.i):
        return _lift_trivcof_fib_cat(sq)
    return _lift_trivcof_fib_preadd(sq)


def _lift_trivcof_fib_cat(sq: LiftSquare):
    i, f, alpha, beta = sq.i, sq.f, sq.top, sq.bottom
    A, B = i.dom, i.cod
    C, D = f.dom, f.cod
    w = is_weak_equivalence(i)
    if not w.ok:
        return None
    g = w.inverse
    # retraction j with j i = id and marked u : i j -> id_B, u i = id
    section = {i.obj_map[a]: a for a in A.objects()}
    j_obj = []
    u = []
    for b in B.objects():
        if b in section:
            j_obj.append(section[b])
            u.append(B.identity[b])
        else:
            j_obj.append(g.obj_map[b])
            u.append(B.inverse(w.u[b]))  # w.u[b] : b -> i(g(b)); invert
    # hom bijections of i
    hom_inv: dict[tuple[int, int], dict[int, int]] = {}
    for a in A.objects():
        for a2 in A.objects():
            hom_inv[(a, a2)] = {
                i.mor_map[m]: m for m in A.morphisms()
                if A.src[m] == a and A.tgt[m] == a2
            }
    j_mor = []
    for phi in B.morphisms():
        b, b2 = B.src[phi], B.tgt[phi]
        conj = B.comp[B.inverse(u[b2])][B.comp[phi][u[b]]]
        j_mor.append(hom_inv[(j_obj[b], j_obj[b2])][conj])
    j = CatFunctor(B, A, tuple(j_obj), tuple(j_mor))
    if j.validate():
        return None
    # lift objects through the fibration
    v = []
    ell_obj = []
    for b in B.objects():
        ub = u[b]
        beta_u = beta.mor_map[ub]
        c = alpha.obj_map[j_obj[b]]
        if D.is_identity(beta_u):
            vb = C.identity[c]
        else:
            vb = _marked_lift_cat(f, c, beta_u)
            if vb is None:
                return None
        v.append(vb)
        ell_obj.append(C.tgt[vb])
    ell_mor = []
    for phi in B.morphisms():
        b, b2 = B.src[phi], B.tgt[phi]
        m = C.comp[v[b2]][C.comp[alpha.mor_map[j_mor[phi]]][C.inverse(v[b])]]
        ell_mor.append(m)
    ell = CatFunctor(B, C, tuple(ell_obj), tuple(ell_mor))
    if ell.validate():
        return None
    return ell


def _lift_trivcof_fib_preadd(sq: LiftSquare):
    i, f, alpha, beta = sq.i, sq.f, sq.top, sq.bottom
    A, B = i.dom, i.cod
    C, D = f.dom, f.cod
    w = is_weak_equivalence_add(i)
    if w.verdict is not Verdict.TRUE:
        return None
    g = w.inverse
    section = {i.obj_map[a]: a for a in A.objects()}
    j_obj = []
    u: list[PMor] = []
    for b in B.objects():
        if b in section:
            j_obj.append(section[b])
            u.append(B.id_mor(b))
        else:
            j_obj.append(g.obj_map[b])
            u.append(B.inverse_of(w.u[b]))
    j_hom = []
    for b in B.objects():
        row = []
        for b2 in B.objects():
            # phi -> u[b2]^{-1} . phi . u[b] landing in hom(i j b, i j b2)
            ub = u[b]  # i(j b) -> b
            ub2_inv = B.inverse_of(u[b2])  # b2 -> i(j b2)
            conj = B.rmul_hom(ub, b2).then(B.lmul_hom(ub2_inv, i.obj_map[j_obj[b]]))
            i_inv = i.hom_maps[j_obj[b]][j_obj[b2]].inverse()
            row.append(conj.then(i_inv))
        j_hom.append(tuple(row))
    j = AddFunctor(B, A, tuple(j_obj), tuple(j_hom))
    v: list[PMor] = []
    ell_obj = []
    for b in B.objects():
        ub = u[b]
        beta_u = beta.on_mor(ub)
        c = alpha.obj_map[j_obj[b]]
        if beta_u.elt == D.id_mor(beta_u.src).elt and beta_u.src == beta_u.tgt:
            vb = C.id_mor(c)
        else:
            vb = None
            for (vs, vt), vms in C.marked.items():
                if vs != c:
                    continue
                for cand in vms:
                    fc = f.on_mor(cand)
                    if fc.elt == beta_u.elt and fc.tgt == beta_u.tgt:
                        vb = cand
                        break
                if vb is not None:
                    break
            if vb is None:
                return None
        v.append(vb)
        ell_obj.append(vb.tgt)
    ell_hom = []
    for b in B.objects():
        row = []
        for b2 in B.objects():
            vb_inv = C.inverse_of(v[b])
            inner = j_hom[b][b2].then(alpha.hom_maps[j_obj[b]][j_obj[b2]])
            conj = inner.then(
                C.rmul_hom(vb_inv, alpha.obj_map[j_obj[b2]]).then(
                    C.lmul_hom(v[b2], ell_obj[b])
                )
            )
            row.append(conj)
        ell_hom.append(tuple(row))
    ell = AddFunctor(B, C, tuple(ell_obj), tuple(ell_hom))
    if ell.validate():
        return None
    return ell


def _lift_cof_trivfib(sq: LiftSquare):
    """The fully-faithful transport construction for a cofibration against
    a trivial fibration."""
    i, f, alpha, beta = sq.i, sq.f, sq.top, sq.bottom
    A, B = i.dom, i.cod
    C, D = f.dom, f.cod
    section = {i.obj_map[a]: a for a in A.objects()}
    ell_obj = []
    for b in range(B.n_objects):
        if b in section:
            ell_obj.append(alpha.obj_map[section[b]])
        else:
            cands = [c for c in range(C.n_objects) if f.obj_map[c] == beta.obj_map[b]]
            if not cands:
                return None
            ell_obj.append(cands[0])
    if _is_cat(i):
        hom_inv: dict[tuple[int, int], dict[int, int]] = {}
        for b in B.objects():
            for b2 in B.objects():
                c, c2 = ell_obj[b], ell_obj[b2]
                table = {}
                for m in C.morphisms():
                    if C.src[m] == c and C.tgt[m] == c2:
                        if f.mor_map[m] in table:
                            return None  # not faithful here
                        table[f.mor_map[m]] = m
                hom_inv[(b, b2)] = table
        ell_mor = []
        for phi in B.morphisms():
            b, b2 = B.src[phi], B.tgt[phi]
            tb = hom_inv[(b, b2)]
            if beta.mor_map[phi] not in tb:
                return None
            ell_mor.append(tb[beta.mor_map[phi]])
        ell = CatFunctor(B, C, tuple(ell_obj), tuple(ell_mor))
        if ell.validate():
            return None
        return ell
    ell_hom = []
    for b in B.objects():
        row = []
        for b2 in B.objects():
            c, c2 = ell_obj[b], ell_obj[b2]
            fh = AbHom(
                C.hom(c, c2), D.hom(f.obj_map[c], f.obj_map[c2]),
                f.hom_maps[c][c2].matrix,
            )
            if not fh.is_iso():
                return None
            row.append(beta.hom_maps[b][b2].then(fh.inverse()))
        ell_hom.append(tuple(row))
    ell = AddFunctor(B, C, tuple(ell_obj), tuple(ell_hom))
    if ell.validate():
        return None
    return ell


def exhaustive_lift_search(sq: LiftSquare):
    """Deterministic backtracking over all candidate lifts (table flavor).

    Returns the first lift in lexicographic object-map then morphism-map
    order, or :class:`NoLift` with the obstructing object or morphism."""
    i, f, alpha, beta = sq.i, sq.f, sq.top, sq.bottom
    A, B = i.dom, i.cod
    C, D = f.dom, f.cod
    forced_obj: dict[int, int] = {}
    for a in A.objects():
        forced_obj[i.obj_map[a]] = alpha.obj_map[a]
    obj_pools = []
    for b in B.objects():
        if b in forced_obj:
            pool = [forced_obj[b]]
            if f.obj_map[forced_obj[b]] != beta.obj_map[b]:
                return NoLift("top and bottom disagree on forced object", b)
        else:
            pool = [c for c in C.objects() if f.obj_map[c] == beta.obj_map[b]]
        if not pool:
            return NoLift("no candidate image for object", b)
        obj_pools.append(pool)
    forced_mor: dict[int, int] = {}
    for m in A.morphisms():
        forced_mor[i.mor_map[m]] = alpha.mor_map[m]
    for obj_map in itertools.product(*obj_pools):
        mor_pools = []
        ok = True
        for phi in B.morphisms():
            b, b2 = B.src[phi], B.tgt[phi]
            if phi in forced_mor:
                cand = [forced_mor[phi]]
                if (
                    C.src[forced_mor[phi]] != obj_map[b]
                    or C.tgt[forced_mor[phi]] != obj_map[b2]
                    or f.mor_map[forced_mor[phi]] != beta.mor_map[phi]
                ):
                    ok = False
                    break
            else:
                cand = [
                    m
                    for m in C.morphisms()
                    if C.src[m] == obj_map[b]
                    and C.tgt[m] == obj_map[b2]
                    and f.mor_map[m] == beta.mor_map[phi]
                    and (phi not in B.marked or m in C.marked)
                ]
            if not cand:
                ok = False
                break
            mor_pools.append(cand)
        if not ok:
            continue
        for mor_map in itertools.product(*mor_pools):
            ell = CatFunctor(B, C, tuple(obj_map), tuple(mor_map))
            if ell.validate():
                continue
            if i.then(ell) == alpha and ell.then(f) == beta:
                return ell
    return NoLift("exhaustive search found no lift")


# ---------------------------------------------------------------------------
# factorizations


@dataclass
class Factorization:
    mid: object
    left: Morphism
    right: Morphism
    kind: str  # "cof+trivfib" or "trivcof+fib"

    def composite(self) -> Morphism:
        return self.left.then(self.right)


def factor_cof_trivfib(a: Morphism) -> Factorization:
    """Mapping-cylinder factorization: a cofibration followed by a trivial
    fibration, through the collage of a."""
    if _is_cat(a):
        fac = _cylinder_cat(a)
    else:
        fac = _cylinder_preadd(a)
    assert fac.composite() == a, "cylinder factorization does not compose"
    assert is_cofibration(fac.left), "cylinder left leg is not a cofibration"
    assert is_trivial_fibration(fac.right), "cylinder right leg is not a trivial fibration"
    return fac


def _cylinder_cat(a: CatFunctor) -> Factorization:
    A, B = a.dom, a.cod
    nA = A.n_objects

    def abar(x):
        return a.obj_map[x] if x < nA else x - nA

    n = nA + B.n_objects
    mors = []
    index = {}
    for x in range(n):
        for y in range(n):
            for m in B.morphisms():
                if B.src[m] == abar(x) and B.tgt[m] == abar(y):
                    index[(x, y, m)] = len(mors)
                    mors.append((x, y, m))
    src = tuple(m[0] for m in mors)
    tgt = tuple(m[1] for m in mors)
    identity = tuple(index[(x, x, B.identity[abar(x)])] for x in range(n))
    comp = [[None] * len(mors) for _ in range(len(mors))]
    for gi, (y2, z, m2) in enumerate(mors):
        for fi, (x, y, m1) in enumerate(mors):
            if y2 == y:
                comp[gi][fi] = index[(x, z, B.comp[m2][m1])]
    seed = set()
    z_cat = FinMarkedCat(
        n, src, tgt, identity, tuple(tuple(r) for r in comp),
        frozenset(identity),
    )
    for m in A.marked:
        seed.add(index[(A.src[m], A.tgt[m], a.mor_map[m])])
    for m in B.marked:
        seed.add(index[(nA + B.src[m], nA + B.tgt[m], m)])
    for x in range(nA):
        seed.add(index[(x, nA + a.obj_map[x], B.identity[a.obj_map[x]])])
    marked = subgroupoid_closure(z_cat, seed)
    z_cat = z_cat.with_marking(marked)
    left = CatFunctor(
        A, z_cat,
        tuple(range(nA)),
        tuple(index[(A.src[m], A.tgt[m], a.mor_map[m])] for m in A.morphisms()),
    )
    right = CatFunctor(
        z_cat, B,
        tuple(abar(x) for x in range(n)),
        tuple(m[2] for m in mors),
    )
    return Factorization(z_cat, left, right, "cof+trivfib")


def _cylinder_preadd(a: AddFunctor) -> Factorization:
    A, B = a.dom, a.cod
    nA = A.n_objects
    n = nA + B.n_objects

    def abar(x):
        return a.obj_map[x] if x < nA else x - nA

    hom = [[B.hom(abar(x), abar(y)) for y in range(n)] for x in range(n)]
    comp = {}
    for x in range(n):
        for y in range(n):
            for z in range(n):
                key = (abar(x), abar(y), abar(z))
                if key in B.comp_table:
                    comp[(x, y, z)] = B.comp_table[key]
    identity = [B.identity[abar(x)] for x in range(n)]
    z_cat = FinPreAddCat(n, hom, comp, identity)
    seed = []
    for m in A.all_marked():
        seed.append(PMor(m.src, m.tgt, a.on_mor(m).elt))
    for m in B.all_marked():
        seed.append(PMor(nA + m.src, nA + m.tgt, m.elt))
    for x in range(nA):
        seed.append(PMor(x, nA + a.obj_map[x], B.identity[a.obj_map[x]]))
    z_cat = z_cat.with_marking(marked_closure(z_cat, seed))
    left = AddFunctor(
        A, z_cat,
        tuple(range(nA)),
        tuple(
            tuple(
                AbHom(A.hom(x, y), z_cat.hom(x, y), a.hom_maps[x][y].matrix)
                for y in A.objects()
            )
            for x in A.objects()
        ),
    )
    right = AddFunctor(
        z_cat, B,
        tuple(abar(x) for x in range(n)),
        tuple(
            tuple(AbHom.identity(B.hom(abar(x), abar(y))) for y in range(n))
            for x in range(n)
        ),
    )
    return Factorization(z_cat, left, right, "cof+trivfib")


def factor_trivcof_fib(a: Morphism) -> Factorization:
    """Path-object factorization: a trivial cofibration followed by a
    fibration, through marked-iso triples (x, y, w : a(x) -> y)."""
    if _is_cat(a):
        fac = _path_cat(a)
    else:
        fac = _path_preadd(a)
    assert fac.composite() == a, "path factorization does not compose"
    assert is_trivial_cofibration(fac.left), "path left leg is not a trivial cofibration"
    assert is_fibration(fac.right), "path right leg is not a fibration"
    return fac


def _path_cat(a: CatFunctor) -> Factorization:
    A, B = a.dom, a.cod
    objs = []
    for x in A.objects():
        for w in sorted(B.marked):
            if B.src[w] == a.obj_map[x]:
                objs.append((x, B.tgt[w], w))
    oidx = {o: k for k, o in enumerate(objs)}
    mors = []
    index = {}
    for o1 in objs:
        for o2 in objs:
            x, y, w = o1
            x2, y2, w2 = o2
            for phi in A.morphisms():
                if A.src[phi] != x or A.tgt[phi] != x2:
                    continue
                for psi in B.morphisms():
                    if B.src[psi] != y or B.tgt[psi] != y2:
                        continue
                    if B.comp[w2][a.mor_map[phi]] != B.comp[psi][w]:
                        continue
                    index[(o1, o2, phi, psi)] = len(mors)
                    mors.append((o1, o2, phi, psi))
    src = tuple(oidx[m[0]] for m in mors)
    tgt = tuple(oidx[m[1]] for m in mors)
    identity = tuple(
        index[(o, o, A.identity[o[0]], B.identity[o[1]])] for o in objs
    )
    comp = [[None] * len(mors) for _ in range(len(mors))]
    for gi, (og1, og2, phi2, psi2) in enumerate(mors):
        for fi, (of1, of2, phi1, psi1) in enumerate(mors):
            if of2 == og1:
                comp[gi][fi] = index[
                    (of1, og2, A.comp[phi2][phi1], B.comp[psi2][psi1])
                ]
    marked = frozenset(
        k for k, (o1, o2, phi, psi) in enumerate(mors)
        if phi in A.marked and psi in B.marked
    )
    p_cat = FinMarkedCat(
        len(objs), src, tgt, identity, tuple(tuple(r) for r in comp), marked
    )
    i = CatFunctor(
        A, p_cat,
        tuple(oidx[(x, a.obj_map[x], B.identity[a.obj_map[x]])] for x in A.objects()),
        tuple(
            index[
                (
                    (A.src[m], a.obj_map[A.src[m]], B.identity[a.obj_map[A.src[m]]]),
                    (A.tgt[m], a.obj_map[A.tgt[m]], B.identity[a.obj_map[A.tgt[m]]]),
                    m,
                    a.mor_map[m],
                )
            ]
            for m in A.morphisms()
        ),
    )
    p = CatFunctor(
        p_cat, B,
        tuple(o[1] for o in objs),
        tuple(m[3] for m in mors),
    )
    return Factorization(p_cat, i, p, "trivcof+fib")


def _path_preadd(a: AddFunctor) -> Factorization:
    A, B = a.dom, a.cod
    objs = []
    for x in A.objects():
        for (s, t), ms in sorted(B.marked.items()):
            if s != a.obj_map[x]:
                continue
            for w in ms:
                objs.append((x, t, w))
    oidx = {(o[0], o[1], o[2].key()): k for k, o in enumerate(objs)}
    n = len(objs)
    bookkeeping = {}
    groups = [[None] * n for _ in range(n)]
    for k1, (x, y, w) in enumerate(objs):
        for k2, (x2, y2, w2) in enumerate(objs):
            ha = A.hom(x, x2)
            hb = B.hom(y, y2)
            D, injs, projs = direct_sum_with_maps([ha, hb])
            # constraint: w2 . a(phi) - psi . w = 0 in hom(a x, y2)
            lm = a.hom_maps[x][x2].then(B.lmul_hom(w2, a.obj_map[x]))
            rm = B.rmul_hom(w, y2)
            constraint = projs[0].then(lm) - projs[1].then(rm)
            ker, incl = constraint.kernel()
            bookkeeping[(k1, k2)] = (D, injs, projs, incl)
            groups[k1][k2] = ker
    from .preaddcat import _express_in_kernel

    comp = {}
    for k1 in range(n):
        for k2 in range(n):
            for k3 in range(n):
                k12, k23, k13 = groups[k1][k2], groups[k2][k3], groups[k1][k3]
                if k12.n == 0 or k23.n == 0:
                    continue
                _, _, projs12, incl12 = bookkeeping[(k1, k2)]
                _, _, projs23, incl23 = bookkeeping[(k2, k3)]
                table = []
                for j in range(k23.n):
                    tot_j = incl23(k23.generator(j))
                    phi_j = projs23[0](tot_j)
                    psi_j = projs23[1](tot_j)
                    row = []
                    for i in range(k12.n):
                        tot_i = incl12(k12.generator(i))
                        phi_i = projs12[0](tot_i)
                        psi_i = projs12[1](tot_i)
                        phic = A.compose(
                            PMor(objs[k2][0], objs[k3][0], phi_j),
                            PMor(objs[k1][0], objs[k2][0], phi_i),
                        ).elt
                        psic = B.compose(
                            PMor(objs[k2][1], objs[k3][1], psi_j),
                            PMor(objs[k1][1], objs[k2][1], psi_i),
                        ).elt
                        row.append(
                            tuple(
                                _express_in_kernel(bookkeeping[(k1, k3)], [phic, psic])
                            )
                        )
                    table.append(tuple(row))
                comp[(k1, k2, k3)] = tuple(table)
    identity = []
    for k, (x, y, w) in enumerate(objs):
        coords = _express_in_kernel(
            bookkeeping[(k, k)], [A.identity[x], B.identity[y]]
        )
        identity.append(groups[k][k].element(coords))
    p_cat = FinPreAddCat(n, groups, comp, identity)
    marked = []
    for k1, (x, y, w) in enumerate(objs):
        for k2, (x2, y2, w2) in enumerate(objs):
            for phi in A.marked_mors(x, x2):
                for psi in B.marked_mors(y, y2):
                    coords = _express_in_kernel(
                        bookkeeping[(k1, k2)], [phi.elt, psi.elt], allow_fail=True
                    )
                    if coords is not None:
                        marked.append(PMor(k1, k2, groups[k1][k2].element(coords)))
    p_cat = p_cat.with_marking(marked)
    i_obj = tuple(
        oidx[(x, a.obj_map[x], B.id_mor(a.obj_map[x]).key())] for x in A.objects()
    )
    i_hom = []
    for x in A.objects():
        row = []
        for x2 in A.objects():
            k1, k2 = i_obj[x], i_obj[x2]
            rows = []
            for gen in A.hom(x, x2).generators():
                img = a.hom_maps[x][x2](gen)
                rows.append(
                    _express_in_kernel(bookkeeping[(k1, k2)], [gen, img])
                )
            row.append(AbHom(A.hom(x, x2), groups[k1][k2], rows))
        i_hom.append(tuple(row))
    i = AddFunctor(A, p_cat, i_obj, tuple(i_hom))
    p_obj = tuple(o[1] for o in objs)
    p_hom = []
    for k1 in range(n):
        row = []
        for k2 in range(n):
            _, _, projs, incl = bookkeeping[(k1, k2)]
            row.append(incl.then(projs[1]))
        p_hom.append(tuple(row))
    p = AddFunctor(p_cat, B, p_obj, tuple(p_hom))
    return Factorization(p_cat, i, p, "trivcof+fib")


# ---------------------------------------------------------------------------
# tensor and cotensor with groupoids


def sharp(A, G: FinMarkedCat, cap: int = DEFAULT_CAP):
    """Tensor with a finite groupoid: product in table flavors, enriched
    tensor with the linearized groupoid in pre-additive flavors."""
    if isinstance(A, FinMarkedCat):
        P, pA, pB = product(A, ma(G))
        return P
    from .preaddcat import lin_Z

    return tensor_preadd(A, lin_Z(ma(G)), cap).cat


def sharp_with_structure(A, G: FinMarkedCat, cap: int = DEFAULT_CAP):
    """Like :func:`sharp` but returning the pairing helpers."""
    if isinstance(A, FinMarkedCat):
        return product(A, ma(G))
    from .preaddcat import lin_Z

    return tensor_preadd(A, lin_Z(ma(G)), cap)


def sharp_counit(A, G: FinMarkedCat, cap: int = DEFAULT_CAP):
    """The projection A sharp G -> A collapsing the groupoid coordinate."""
    if isinstance(A, FinMarkedCat):
        P, pA, pB = product(A, ma(G))
        return P, pA
    t = sharp_with_structure(A, G, cap)
    nB = t.right.n_objects
    obj_map = tuple(a for a in A.objects() for _ in range(nB))
    hom_maps = []
    for o1 in t.cat.objects():
        row = []
        a1, g1 = divmod(o1, nB)
        for o2 in t.cat.objects():
            a2, g2 = divmod(o2, nB)
            hsrc = t.cat.hom(o1, o2)
            htgt = A.hom(a1, a2)
            rows = []
            nright = t.right.hom(g1, g2).n
            for i in range(A.hom(a1, a2).n):
                for j in range(nright):
                    rows.append(
                        tuple(
                            1 if k == i else 0 for k in range(htgt.n)
                        )
                    )
            hom_maps_entry = AbHom(hsrc, htgt, rows)
            row.append(hom_maps_entry)
        hom_maps.append(tuple(row))
    return t.cat, AddFunctor(t.cat, A, obj_map, tuple(hom_maps))


def cotensor(G: FinMarkedCat, B, cap: int = DEFAULT_CAP):
    """Fun+(Q(G), B): marked-valued functor category out of a groupoid."""
    if isinstance(B, FinMarkedCat):
        return fun_plus(ma(G), B, cap)
    return fun_plus_groupoid(G, B, cap)


# ---------------------------------------------------------------------------
# mapping spaces


def marked_groupoid(c: FinMarkedCat) -> FinMarkedCat:
    """The wide subgroupoid of marked isomorphisms as its own category."""
    kept = sorted(c.marked)
    re = {m: k for k, m in enumerate(kept)}
    comp = [[None] * len(kept) for _ in range(len(kept))]
    for g in kept:
        for f in kept:
            if c.src[g] == c.tgt[f]:
                comp[re[g]][re[f]] = re[c.comp[g][f]]
    return FinMarkedCat(
        c.n_objects,
        tuple(c.src[m] for m in kept),
        tuple(c.tgt[m] for m in kept),
        tuple(re[c.identity[o]] for o in c.objects()),
        tuple(tuple(r) for r in comp),
        frozenset(range(len(kept))),
    )


def preadd_marked_groupoid(c: FinPreAddCat) -> FinMarkedCat:
    """The finite marked subgroupoid of a pre-additive category, as tables."""
    mors = sorted(c.all_marked(), key=lambda m: m.key())
    re = {m.key(): k for k, m in enumerate(mors)}
    comp = [[None] * len(mors) for _ in range(len(mors))]
    for gi, g in enumerate(mors):
        for fi, f in enumerate(mors):
            if g.src == f.tgt:
                comp[gi][fi] = re[c.compose(g, f).key()]
    identity = tuple(re[c.id_mor(a).key()] for a in c.objects())
    return FinMarkedCat(
        c.n_objects,
        tuple(m.src for m in mors),
        tuple(m.tgt for m in mors),
        identity,
        tuple(tuple(r) for r in comp),
        frozenset(range(len(mors))),
    )


def mapping_space(A, B, max_level: int = 2, cap: int = DEFAULT_CAP) -> TruncSSet:
    """Nerve of the marked-iso groupoid of Fun+(A, B), up to level 2.

    For pre-additive domains this requires an enumerable functor category;
    use :func:`cotensor` for Q(groupoid)-shaped domains.
    """
    if isinstance(A, FinMarkedCat) and isinstance(B, FinMarkedCat):
        fc = fun_plus(A, B, cap)
        return nerve(marked_groupoid(fc.cat), max_level)
    raise SizeLimit(
        "generic mapping spaces out of pre-additive domains are not "
        "enumerable; cotensor covers the groupoid-shaped cases"
    )


def mapping_space_from_groupoid(G: FinMarkedCat, B, max_level: int = 2,
                                cap: int = DEFAULT_CAP) -> TruncSSet:
    fc = cotensor(G, B, cap)
    if isinstance(B, FinMarkedCat):
        return nerve(marked_groupoid(fc.cat), max_level)
    return nerve(preadd_marked_groupoid(fc.cat), max_level)


# ---------------------------------------------------------------------------
# products


def terminal_preadd() -> FinPreAddCat:
    from .classifiers import zero_classifier

    return zero_classifier()


def product_preadd(A: FinPreAddCat, B: FinPreAddCat) -> tuple[FinPreAddCat, AddFunctor, AddFunctor]:
    """Binary product: hom groups are direct sums, marking is pointwise."""
    nB = B.n_objects

    def obj(a, b):
        return a * nB + b

    n = A.n_objects * nB
    books = {}
    groups = [[None] * n for _ in range(n)]
    for a1 in A.objects():
        for b1 in B.objects():
            for a2 in A.objects():
                for b2 in B.objects():
                    D, injs, projs = direct_sum_with_maps(
                        [A.hom(a1, a2), B.hom(b1, b2)]
                    )
                    books[(obj(a1, b1), obj(a2, b2))] = (injs, projs)
                    groups[obj(a1, b1)][obj(a2, b2)] = D
    comp = {}
    for a1, b1, a2, b2, a3, b3 in itertools.product(
        A.objects(), B.objects(), A.objects(), B.objects(), A.objects(), B.objects()
    ):
        o1, o2, o3 = obj(a1, b1), obj(a2, b2), obj(a3, b3)
        g12, g23, g13 = groups[o1][o2], groups[o2][o3], groups[o1][o3]
        if g12.n == 0 or g23.n == 0:
            continue
        injs12, projs12 = books[(o1, o2)]
        injs23, projs23 = books[(o2, o3)]
        injs13, _ = books[(o1, o3)]
        table = []
        for j in range(g23.n):
            gj = g23.generator(j)
            row = []
            for i in range(g12.n):
                fi = g12.generator(i)
                ca = A.compose_coords(
                    a1, a2, a3, projs23[0](gj).coords, projs12[0](fi).coords
                )
                cb = B.compose_coords(
                    b1, b2, b3, projs23[1](gj).coords, projs12[1](fi).coords
                )
                total = injs13[0](A.hom(a1, a3).element(ca)) + injs13[1](
                    B.hom(b1, b3).element(cb)
                )
                row.append(total.coords)
            table.append(tuple(row))
        comp[(o1, o2, o3)] = tuple(table)
    identity = []
    for a in A.objects():
        for b in B.objects():
            injs, _ = books[(obj(a, b), obj(a, b))]
            identity.append(injs[0](A.identity[a]) + injs[1](B.identity[b]))
    marked = []
    for ma_ in A.all_marked():
        for mb in B.all_marked():
            o1, o2 = obj(ma_.src, mb.src), obj(ma_.tgt, mb.tgt)
            injs, _ = books[(o1, o2)]
            marked.append(PMor(o1, o2, injs[0](ma_.elt) + injs[1](mb.elt)))
    P = FinPreAddCat(n, groups, comp, identity, marked)
    projA = AddFunctor(
        P, A,
        tuple(a for a in A.objects() for _ in B.objects()),
        tuple(
            tuple(
                books[(o1, o2)][1][0]
                for o2 in range(n)
            )
            for o1 in range(n)
        ),
    )
    projB = AddFunctor(
        P, B,
        tuple(b for _ in A.objects() for b in B.objects()),
        tuple(
            tuple(books[(o1, o2)][1][1] for o2 in range(n))
            for o1 in range(n)
        ),
    )
    return P, projA, projB


def product_family(cats: list, flavor_preadd: bool = False):
    """Finite product with pointwise marking; empty product is terminal."""
    if not cats:
        if flavor_preadd:
            return terminal_preadd(), []
        from .markedcat import discrete

        return discrete(1), []
    if isinstance(cats[0], FinMarkedCat):
        acc = cats[0]
        projs = [CatFunctor.identity(acc)]
        for nxt in cats[1:]:
            acc2, pa, pb = product(acc, nxt)
            projs = [pa.then(p) for p in projs] + [pb]
            acc = acc2
        return acc, projs
    acc = cats[0]
    projs = [AddFunctor.identity(acc)]
    for nxt in cats[1:]:
        acc2, pa, pb = product_preadd(acc, nxt)
        projs = [pa.then(p) for p in projs] + [pb]
        acc = acc2
    return acc, projs


# ---------------------------------------------------------------------------
# lifting against the generating set


def rlp_generating(name: str, f: Morphism) -> bool:
    """Right lifting property against a named generating cofibration.

    U: surjective on objects.  V/W: full/faithful.  V+/W+: full/faithful on
    marked isomorphisms.  J: marked isofibration."""
    if name == "U":
        return set(f.obj_map) == set(range(_n_objects(f.cod)))
    if name == "J":
        return is_fibration(f)
    if _is_cat(f):
        C, D = f.dom, f.cod
        if name in ("V", "V+"):
            for c in C.objects():
                for c2 in C.objects():
                    want = [
                        m
                        for m in D.morphisms()
                        if D.src[m] == f.obj_map[c] and D.tgt[m] == f.obj_map[c2]
                        and (name == "V" or m in D.marked)
                    ]
                    have = {
                        f.mor_map[m]
                        for m in C.morphisms()
                        if C.src[m] == c and C.tgt[m] == c2
                        and (name == "V" or m in C.marked)
                    }
                    if any(m not in have for m in want):
                        return False
            return True
        if name in ("W", "W+"):
            for m1 in C.morphisms():
                for m2 in C.morphisms():
                    if (
                        C.src[m1] == C.src[m2]
                        and C.tgt[m1] == C.tgt[m2]
                        and m1 != m2
                        and f.mor_map[m1] == f.mor_map[m2]
                        and (name == "W" or (m1 in C.marked and m2 in C.marked))
                    ):
                        return False
            return True
        raise ValueError(f"unknown generating morphism {name}")
    C, D = f.dom, f.cod
    if name == "V":
        return all(
            f.hom_maps[c][c2].is_surjective()
            for c in C.objects()
            for c2 in C.objects()
        )
    if name == "W":
        return all(
            f.hom_maps[c][c2].is_injective()
            for c in C.objects()
            for c2 in C.objects()
        )
    if name == "V+":
        for c in C.objects():
            for c2 in C.objects():
                want = {
                    m.key()
                    for m in D.marked_mors(f.obj_map[c], f.obj_map[c2])
                }
                have = {f.on_mor(m).key() for m in C.marked_mors(c, c2)}
                if any(k not in have for k in want):
                    return False
        return True
    if name == "W+":
        for (s, t), ms in C.marked.items():
            imgs = {}
            for m in ms:
                k = f.on_mor(m).key()
                if k in imgs and imgs[k] != m.elt.canonical():
                    return False
                imgs[k] = m.elt.canonical()
        return True
    raise ValueError(f"unknown generating morphism {name}")


def has_rlp_I(f: Morphism, marked_flavor: bool = True) -> bool:
    names = ["U", "V", "W"] + (["V+", "W+"] if marked_flavor else []) + ["J"]
    return all(rlp_generating(n, f) for n in names)
