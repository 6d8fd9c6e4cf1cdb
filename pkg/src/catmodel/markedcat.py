"""Finite marked categories: tables, functors, transformations, (co)limits.

A marked category is a finite category with a distinguished wide subgroupoid
of marked isomorphisms.  Everything is table-based: objects and morphisms
are indices, composition is a partial table ``comp[g][f]`` defined when
``src(g) == tgt(f)``.  Presented input only enters through
:func:`free_marked_category`, which enumerates with a cap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .presentations import (
    DEFAULT_CAP,
    EnumeratedCategory,
    Presentation,
    SizeLimit,
    enumerate_presentation,
)

__all__ = [
    "FinMarkedCat",
    "CatFunctor",
    "NatTransf",
    "MarkedGraph",
    "Diagram",
    "SizeLimit",
    "mi",
    "ma",
    "forget_marking_to_ma",
    "fun_plus",
    "FunctorCategory",
    "is_weak_equivalence",
    "WeqResult",
    "free_marked_category",
    "disjoint_union",
    "product",
    "limit",
    "colimit",
    "pushout",
    "span_index",
    "discrete",
    "from_tables",
    "from_enumeration",
    "subgroupoid_closure",
    "cat_to_json",
    "cat_from_json",
    "functor_to_json",
    "functor_from_json",
]


@dataclass(frozen=True)
class FinMarkedCat:
    """A finite category with composition tables and a marking."""

    n_objects: int
    src: tuple[int, ...]
    tgt: tuple[int, ...]
    identity: tuple[int, ...]
    comp: tuple[tuple[Optional[int], ...], ...]
    marked: frozenset[int]

    # -- basic access

    @property
    def n_morphisms(self) -> int:
        return len(self.src)

    def objects(self) -> range:
        return range(self.n_objects)

    def morphisms(self) -> range:
        return range(self.n_morphisms)

    def compose(self, g: int, f: int) -> int:
        """``g after f``; raises on non-composable input."""
        out = self.comp[g][f]
        if out is None:
            raise ValueError(f"morphisms {g} after {f} are not composable")
        return out

    def hom(self, a: int, b: int) -> tuple[int, ...]:
        return tuple(
            m for m in self.morphisms() if self.src[m] == a and self.tgt[m] == b
        )

    def is_identity(self, m: int) -> bool:
        return self.identity[self.src[m]] == m

    def inverse(self, m: int) -> Optional[int]:
        a, b = self.src[m], self.tgt[m]
        for w in self.hom(b, a):
            if (
                self.comp[w][m] == self.identity[a]
                and self.comp[m][w] == self.identity[b]
            ):
                return w
        return None

    def isos(self) -> tuple[int, ...]:
        return _isos(self)

    def marked_isos(self, a: int, b: int) -> tuple[int, ...]:
        return tuple(m for m in self.hom(a, b) if m in self.marked)

    def with_marking(self, marked: Iterable[int]) -> "FinMarkedCat":
        return FinMarkedCat(
            self.n_objects, self.src, self.tgt, self.identity, self.comp,
            frozenset(marked),
        )

    # -- validation

    def validate(self) -> list[str]:
        """Report every violated invariant; empty iff valid."""
        errs: list[str] = []
        n, nm = self.n_objects, self.n_morphisms
        if len(self.identity) != n:
            errs.append("identity table has wrong length")
            return errs
        if not (len(self.tgt) == nm and len(self.comp) == nm):
            errs.append("morphism tables have inconsistent lengths")
            return errs
        for o in range(n):
            i = self.identity[o]
            if not (0 <= i < nm and self.src[i] == o and self.tgt[i] == o):
                errs.append(f"identity of object {o} is not an endomorphism")
        for g in range(nm):
            for f in range(nm):
                c = self.comp[g][f]
                defined = self.src[g] == self.tgt[f]
                if defined and c is None:
                    errs.append(f"missing composite {g} after {f}")
                if not defined and c is not None:
                    errs.append(f"composite {g} after {f} should be undefined")
                if c is not None and defined:
                    if self.src[c] != self.src[f] or self.tgt[c] != self.tgt[g]:
                        errs.append(f"composite {g} after {f} has wrong ends")
        # identity laws
        for m in range(nm):
            if self.comp[m][self.identity[self.src[m]]] != m:
                errs.append(f"right identity law fails at morphism {m}")
            if self.comp[self.identity[self.tgt[m]]][m] != m:
                errs.append(f"left identity law fails at morphism {m}")
        # associativity on all composable triples
        for f in range(nm):
            for g in range(nm):
                if self.src[g] != self.tgt[f]:
                    continue
                for h in range(nm):
                    if self.src[h] != self.tgt[g]:
                        continue
                    gf, hg = self.comp[g][f], self.comp[h][g]
                    if gf is None or hg is None:
                        continue  # already reported as missing
                    left = self.comp[h][gf]
                    right = self.comp[hg][f]
                    if left != right:
                        errs.append(f"associativity fails at triple ({h},{g},{f})")
        # marking: wide subgroupoid of isomorphisms
        for o in range(n):
            if self.identity[o] not in self.marked:
                errs.append(f"identity of object {o} is not marked")
        for m in self.marked:
            inv = self.inverse(m)
            if inv is None:
                errs.append(f"marked morphism {m} has no inverse")
            elif inv not in self.marked:
                errs.append(f"inverse of marked morphism {m} is not marked")
        for g in self.marked:
            for f in self.marked:
                if self.src[g] == self.tgt[f] and self.comp[g][f] not in self.marked:
                    errs.append(f"marked set not closed under {g} after {f}")
        return errs

    def __repr__(self):
        return (
            f"FinMarkedCat(objects={self.n_objects}, morphisms={self.n_morphisms},"
            f" marked={len(self.marked)})"
        )


@lru_cache(maxsize=None)
def _isos(cat: FinMarkedCat) -> tuple[int, ...]:
    return tuple(m for m in cat.morphisms() if cat.inverse(m) is not None)


# ---------------------------------------------------------------------------
# small constructors


def discrete(n: int) -> FinMarkedCat:
    return FinMarkedCat(
        n_objects=n,
        src=tuple(range(n)),
        tgt=tuple(range(n)),
        identity=tuple(range(n)),
        comp=tuple(
            tuple(i if i == j else None for j in range(n)) for i in range(n)
        ),
        marked=frozenset(range(n)),
    )


def from_tables(n_objects, src, tgt, identity, comp, marked) -> FinMarkedCat:
    return FinMarkedCat(
        n_objects,
        tuple(src),
        tuple(tgt),
        tuple(identity),
        tuple(tuple(row) for row in comp),
        frozenset(marked),
    )


def from_enumeration(enum: EnumeratedCategory, marked: Iterable[int]) -> FinMarkedCat:
    return FinMarkedCat(
        enum.n_objects,
        enum.src,
        enum.tgt,
        enum.identity,
        enum.comp,
        frozenset(marked),
    )


def mi(cat: FinMarkedCat) -> FinMarkedCat:
    """Mark exactly the identities."""
    return cat.with_marking(set(cat.identity))


def ma(cat: FinMarkedCat) -> FinMarkedCat:
    """Mark the full underlying groupoid (all invertibles, by table search)."""
    return cat.with_marking(_isos(cat))


def forget_marking_to_ma(cat: FinMarkedCat) -> FinMarkedCat:
    """Unmarked-flavor semantics: work with the maximal marking."""
    return ma(cat)


def subgroupoid_closure(cat: FinMarkedCat, seed: Iterable[int]) -> frozenset[int]:
    """Smallest wide subgroupoid containing the seed morphisms.

    The seed must consist of isomorphisms; inverses are added, then the set
    is closed under composition.
    """
    out = set(cat.identity)
    for m in seed:
        inv = cat.inverse(m)
        if inv is None:
            raise ValueError(f"seed morphism {m} is not invertible")
        out.add(m)
        out.add(inv)
    changed = True
    while changed:
        changed = False
        for g in list(out):
            for f in list(out):
                if cat.src[g] == cat.tgt[f]:
                    c = cat.comp[g][f]
                    if c not in out:
                        out.add(c)
                        changed = True
    return frozenset(out)


# ---------------------------------------------------------------------------
# functors and transformations


@dataclass(frozen=True)
class CatFunctor:
    dom: FinMarkedCat
    cod: FinMarkedCat
    obj_map: tuple[int, ...]
    mor_map: tuple[int, ...]

    @staticmethod
    def identity(cat: FinMarkedCat) -> "CatFunctor":
        return CatFunctor(
            cat, cat, tuple(cat.objects()), tuple(cat.morphisms())
        )

    def on_obj(self, o: int) -> int:
        return self.obj_map[o]

    def on_mor(self, m: int) -> int:
        return self.mor_map[m]

    def then(self, other: "CatFunctor") -> "CatFunctor":
        if self.cod != other.dom:
            raise ValueError("functors not composable")
        return CatFunctor(
            self.dom,
            other.cod,
            tuple(other.obj_map[o] for o in self.obj_map),
            tuple(other.mor_map[m] for m in self.mor_map),
        )

    def validate(self) -> list[str]:
        errs = []
        A, B = self.dom, self.cod
        if len(self.obj_map) != A.n_objects or len(self.mor_map) != A.n_morphisms:
            return ["functor maps have wrong lengths"]
        for m in A.morphisms():
            fm = self.mor_map[m]
            if B.src[fm] != self.obj_map[A.src[m]] or B.tgt[fm] != self.obj_map[A.tgt[m]]:
                errs.append(f"morphism {m} image has wrong ends")
        for o in A.objects():
            if self.mor_map[A.identity[o]] != B.identity[self.obj_map[o]]:
                errs.append(f"identity of {o} not preserved")
        for g in A.morphisms():
            for f in A.morphisms():
                if A.src[g] == A.tgt[f]:
                    if self.mor_map[A.comp[g][f]] != B.comp[self.mor_map[g]][self.mor_map[f]]:
                        errs.append(f"composition not preserved at ({g},{f})")
        for m in A.marked:
            if self.mor_map[m] not in B.marked:
                errs.append(f"marked morphism {m} not sent to marked")
        return errs

    def is_injective_on_objects(self) -> bool:
        return len(set(self.obj_map)) == len(self.obj_map)

    def is_surjective_on_objects(self) -> bool:
        return set(self.obj_map) == set(self.cod.objects())


@dataclass(frozen=True)
class NatTransf:
    source: CatFunctor
    target: CatFunctor
    components: tuple[int, ...]

    def is_natural(self) -> bool:
        F, G = self.source, self.target
        A, B = F.dom, F.cod
        for m in A.morphisms():
            a, a2 = A.src[m], A.tgt[m]
            left = B.comp[G.mor_map[m]][self.components[a]]
            right = B.comp[self.components[a2]][F.mor_map[m]]
            if left != right:
                return False
        return True

    def is_marked(self) -> bool:
        return all(c in self.source.cod.marked for c in self.components)


# ---------------------------------------------------------------------------
# functor category


@dataclass
class FunctorCategory:
    """Fun+(A, B) with its marked transformation groupoid, plus bookkeeping."""

    cat: FinMarkedCat
    functors: list[CatFunctor]
    transformations: list[tuple[int, int, tuple[int, ...]]]  # (F idx, G idx, comps)


def _enumerate_functors(A: FinMarkedCat, B: FinMarkedCat, cap: int) -> list[CatFunctor]:
    """All marking-preserving functors A -> B, by backtracking."""
    out: list[CatFunctor] = []
    morder = sorted(
        (m for m in A.morphisms() if not A.is_identity(m)),
    )

    def assign_morphisms(obj_map):
        mor_map: dict[int, int] = {}
        for o in A.objects():
            mor_map[A.identity[o]] = B.identity[obj_map[o]]

        def consistent(m, bm):
            for m2, bm2 in mor_map.items():
                if A.src[m2] == A.tgt[m]:
                    c = A.comp[m2][m]
                    bc = B.comp[bm2][bm]
                    if c in mor_map and mor_map[c] != bc:
                        return False
                    if c == m and bc != bm:
                        return False
                if A.src[m] == A.tgt[m2]:
                    c = A.comp[m][m2]
                    bc = B.comp[bm][bm2]
                    if c in mor_map and mor_map[c] != bc:
                        return False
                    if c == m and bc != bm:
                        return False
            if A.src[m] == A.tgt[m]:
                c = A.comp[m][m]
                bc = B.comp[bm][bm]
                if c in mor_map and mor_map[c] != bc:
                    return False
                if c == m and bc != bm:
                    return False
            return True

        def rec(k):
            if k == len(morder):
                F = CatFunctor(
                    A,
                    B,
                    tuple(obj_map),
                    tuple(mor_map[m] for m in A.morphisms()),
                )
                if not F.validate():
                    out.append(F)
                    if len(out) > cap:
                        raise SizeLimit(f"more than {cap} functors")
                return
            m = morder[k]
            if m in mor_map:
                rec(k + 1)
                return
            a, b = obj_map[A.src[m]], obj_map[A.tgt[m]]
            candidates = B.hom(a, b)
            if m in A.marked:
                candidates = tuple(c for c in candidates if c in B.marked)
            for bm in candidates:
                if consistent(m, bm):
                    mor_map[m] = bm
                    rec(k + 1)
                    del mor_map[m]

        rec(0)

    for obj_map in itertools.product(range(B.n_objects), repeat=A.n_objects):
        assign_morphisms(list(obj_map))
    return out


def _natural_transformations(F: CatFunctor, G: CatFunctor) -> list[tuple[int, ...]]:
    A, B = F.dom, F.cod
    pools = [B.hom(F.obj_map[a], G.obj_map[a]) for a in A.objects()]
    out = []
    for comps in itertools.product(*pools):
        t = NatTransf(F, G, comps)
        if t.is_natural():
            out.append(comps)
    return out


def fun_plus(A: FinMarkedCat, B: FinMarkedCat, cap: int = DEFAULT_CAP) -> FunctorCategory:
    """The marked functor category: functors preserving marking, all natural
    transformations, with the pointwise-marked ones marked."""
    functors = _enumerate_functors(A, B, cap)
    transfs: list[tuple[int, int, tuple[int, ...]]] = []
    for i, F in enumerate(functors):
        for j, G in enumerate(functors):
            for comps in _natural_transformations(F, G):
                transfs.append((i, j, comps))
                if len(transfs) > cap:
                    raise SizeLimit(f"more than {cap} transformations")
    index = {t: k for k, t in enumerate(transfs)}
    identity = []
    for i, F in enumerate(functors):
        comps = tuple(B.identity[F.obj_map[a]] for a in A.objects())
        identity.append(index[(i, i, comps)])
    comp: list[list[Optional[int]]] = [
        [None] * len(transfs) for _ in range(len(transfs))
    ]
    for gi, (g1, g2, gc) in enumerate(transfs):
        for fi, (f1, f2, fc) in enumerate(transfs):
            if g1 != f2:
                continue
            comps = tuple(
                B.comp[gc[a]][fc[a]] for a in A.objects()
            )
            comp[gi][fi] = index[(f1, g2, comps)]
    marked = frozenset(
        k
        for k, (i, j, comps) in enumerate(transfs)
        if all(c in B.marked for c in comps)
        and NatTransf(functors[i], functors[j], comps).is_marked()
        and all(B.inverse(c) is not None for c in comps)
    )
    cat = FinMarkedCat(
        n_objects=len(functors),
        src=tuple(t[0] for t in transfs),
        tgt=tuple(t[1] for t in transfs),
        identity=tuple(identity),
        comp=tuple(tuple(r) for r in comp),
        marked=marked,
    )
    return FunctorCategory(cat, functors, transfs)


# ---------------------------------------------------------------------------
# weak equivalences


@dataclass
class WeqResult:
    ok: bool
    reason: Optional[str] = None
    inverse: Optional[CatFunctor] = None
    u: Optional[tuple[int, ...]] = None  # id_B -> F o g, marked components
    v: Optional[tuple[int, ...]] = None  # id_A -> g o F, marked components

    def __bool__(self):
        return self.ok


def is_weak_equivalence(F: CatFunctor) -> WeqResult:
    """Decide invertibility up to marked isomorphism, with an explicit witness.

    True iff the underlying functor is an equivalence and the restriction to
    marked subgroupoids is one; on success the inverse ``g`` and the marked
    transformations ``u: id -> F g`` and ``v: id -> g F`` (with
    ``F(v_a) = u_{F(a)}``) are returned and verified.
    """
    A, B = F.dom, F.cod
    # fully faithful, and bijective on marked subsets
    hom_inv: dict[tuple[int, int], dict[int, int]] = {}
    for a in A.objects():
        for a2 in A.objects():
            dom_hom = A.hom(a, a2)
            img = {}
            for m in dom_hom:
                fm = F.mor_map[m]
                if fm in img:
                    return WeqResult(False, reason=f"not faithful on hom({a},{a2})")
                img[fm] = m
            cod_hom = B.hom(F.obj_map[a], F.obj_map[a2])
            for bm in cod_hom:
                if bm not in img:
                    return WeqResult(False, reason=f"not full on hom({a},{a2})")
            marked_img = {F.mor_map[m] for m in dom_hom if m in A.marked}
            marked_cod = {bm for bm in cod_hom if bm in B.marked}
            if marked_img != marked_cod:
                return WeqResult(
                    False, reason=f"marked homs not bijective on ({a},{a2})"
                )
            hom_inv[(a, a2)] = img
    # essential surjectivity through marked isomorphisms
    u_pick: dict[int, tuple[int, int]] = {}
    for b in B.objects():
        found = None
        for a in A.objects():
            for m in B.hom(b, F.obj_map[a]):
                if m in B.marked:
                    found = (a, m)
                    break
            if found:
                break
        if found is None:
            ok_plain = any(
                B.inverse(m) is not None
                for a in A.objects()
                for m in B.hom(b, F.obj_map[a])
            )
            reason = (
                f"object {b} not isomorphic to any image"
                if not ok_plain
                else f"object {b} not marked-isomorphic to any image"
            )
            return WeqResult(False, reason=reason)
        u_pick[b] = found
    # build the inverse functor
    obj_map = tuple(u_pick[b][0] for b in B.objects())
    u = tuple(u_pick[b][1] for b in B.objects())
    mor_map = []
    for phi in B.morphisms():
        b, b2 = B.src[phi], B.tgt[phi]
        ub_inv = B.inverse(u[b])
        conj = B.comp[u[b2]][B.comp[phi][ub_inv]]
        mor_map.append(hom_inv[(obj_map[b], obj_map[b2])][conj])
    g = CatFunctor(B, A, obj_map, tuple(mor_map))
    errs = g.validate()
    if errs:
        return WeqResult(False, reason="inverse construction failed: " + errs[0])
    v = tuple(
        hom_inv[(a, obj_map[F.obj_map[a]])][u[F.obj_map[a]]] for a in A.objects()
    )
    # u : id_B -> g then F  (components b -> F(g(b)))
    ok_u = NatTransf(CatFunctor.identity(B), g.then(F), u)
    if not ok_u.is_natural() or not ok_u.is_marked():
        return WeqResult(False, reason="u transformation failed verification")
    ok_v = NatTransf(CatFunctor.identity(A), F.then(g), v)
    if not ok_v.is_natural() or not all(m in A.marked for m in v):
        return WeqResult(False, reason="v transformation failed verification")
    for a in A.objects():
        if F.mor_map[v[a]] != u[F.obj_map[a]]:
            return WeqResult(False, reason="F(v_a) = u_{F(a)} failed")
    return WeqResult(True, inverse=g, u=u, v=v)


# ---------------------------------------------------------------------------
# free categories on marked graphs


@dataclass(frozen=True)
class MarkedGraph:
    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    marked_edges: frozenset[int] = frozenset()


def free_marked_category(graph: MarkedGraph, cap: int = DEFAULT_CAP) -> FinMarkedCat:
    """Free category on the graph with marked edges formally inverted.

    The marking of the result is the subgroupoid generated by the inverted
    edges.  Raises :class:`SizeLimit` when the localization is infinite.
    """
    pres = Presentation(
        graph.n_vertices,
        [tuple(e) for e in graph.edges],
        invertible=set(graph.marked_edges),
    )
    enum = enumerate_presentation(pres, cap)
    cat = from_enumeration(enum, enum.identity)
    seed = [enum.generator_class[e] for e in graph.marked_edges]
    seed += [enum.inverse_generator_class[e] for e in graph.marked_edges]
    return cat.with_marking(subgroupoid_closure(cat, seed))


# ---------------------------------------------------------------------------
# coproducts, products


def disjoint_union(cats: Sequence[FinMarkedCat]) -> tuple[FinMarkedCat, list[CatFunctor]]:
    n_obj = sum(c.n_objects for c in cats)
    src: list[int] = []
    tgt: list[int] = []
    marked: set[int] = set()
    obj_off = []
    mor_off = []
    o = m = 0
    for c in cats:
        obj_off.append(o)
        mor_off.append(m)
        src.extend(s + o for s in c.src)
        tgt.extend(t + o for t in c.tgt)
        marked.update(x + m for x in c.marked)
        o += c.n_objects
        m += c.n_morphisms
    identity = []
    for k, c in enumerate(cats):
        identity.extend(i + mor_off[k] for i in c.identity)
    nm = len(src)
    comp: list[list[Optional[int]]] = [[None] * nm for _ in range(nm)]
    for k, c in enumerate(cats):
        off = mor_off[k]
        for g in c.morphisms():
            for f in c.morphisms():
                if c.comp[g][f] is not None:
                    comp[g + off][f + off] = c.comp[g][f] + off
    total = FinMarkedCat(
        n_obj, tuple(src), tuple(tgt), tuple(identity),
        tuple(tuple(r) for r in comp), frozenset(marked),
    )
    injections = [
        CatFunctor(
            c,
            total,
            tuple(i + obj_off[k] for i in c.objects()),
            tuple(i + mor_off[k] for i in c.morphisms()),
        )
        for k, c in enumerate(cats)
    ]
    return total, injections


def product(A: FinMarkedCat, B: FinMarkedCat) -> tuple[FinMarkedCat, CatFunctor, CatFunctor]:
    """Binary product with the pointwise marking."""
    nB, mB = B.n_objects, B.n_morphisms

    def oidx(a, b):
        return a * nB + b

    def midx(f, g):
        return f * mB + g

    src = []
    tgt = []
    for f in A.morphisms():
        for g in B.morphisms():
            src.append(oidx(A.src[f], B.src[g]))
            tgt.append(oidx(A.tgt[f], B.tgt[g]))
    identity = tuple(
        midx(A.identity[a], B.identity[b])
        for a in A.objects()
        for b in B.objects()
    )
    nm = len(src)
    comp: list[list[Optional[int]]] = [[None] * nm for _ in range(nm)]
    for f1 in A.morphisms():
        for g1 in B.morphisms():
            for f2 in A.morphisms():
                for g2 in B.morphisms():
                    if A.src[f1] == A.tgt[f2] and B.src[g1] == B.tgt[g2]:
                        comp[midx(f1, g1)][midx(f2, g2)] = midx(
                            A.comp[f1][f2], B.comp[g1][g2]
                        )
    marked = frozenset(
        midx(f, g) for f in A.marked for g in B.marked
    )
    P = FinMarkedCat(
        A.n_objects * nB, tuple(src), tuple(tgt), identity,
        tuple(tuple(r) for r in comp), marked,
    )
    pA = CatFunctor(
        P, A,
        tuple(a for a in A.objects() for _ in B.objects()),
        tuple(f for f in A.morphisms() for _ in B.morphisms()),
    )
    pB = CatFunctor(
        P, B,
        tuple(b for _ in A.objects() for b in B.objects()),
        tuple(g for _ in A.morphisms() for g in B.morphisms()),
    )
    return P, pA, pB


# ---------------------------------------------------------------------------
# diagrams, limits, colimits


@dataclass
class Diagram:
    """A functor from a finite index category into marked categories."""

    index: FinMarkedCat
    values: tuple[FinMarkedCat, ...]
    arrows: tuple[CatFunctor, ...]  # one per index morphism

    def validate(self) -> list[str]:
        errs = []
        I = self.index
        if len(self.values) != I.n_objects or len(self.arrows) != I.n_morphisms:
            return ["diagram tables have wrong lengths"]
        for m in I.morphisms():
            F = self.arrows[m]
            if F.dom != self.values[I.src[m]] or F.cod != self.values[I.tgt[m]]:
                errs.append(f"arrow {m} has wrong ends")
        for o in I.objects():
            idf = self.arrows[I.identity[o]]
            if idf != CatFunctor.identity(self.values[o]):
                errs.append(f"identity arrow at {o} is not the identity functor")
        for g in I.morphisms():
            for f in I.morphisms():
                if I.src[g] == I.tgt[f]:
                    if self.arrows[I.comp[g][f]] != self.arrows[f].then(self.arrows[g]):
                        errs.append(f"diagram not functorial at ({g},{f})")
        return errs


def limit(D: Diagram) -> tuple[FinMarkedCat, list[CatFunctor]]:
    """Limit of the underlying categories, marking the pointwise-marked isos."""
    I = D.index
    obj_families = []
    for combo in itertools.product(*(c.objects() for c in D.values)):
        if all(
            D.arrows[m].obj_map[combo[I.src[m]]] == combo[I.tgt[m]]
            for m in I.morphisms()
        ):
            obj_families.append(combo)
    oidx = {f: k for k, f in enumerate(obj_families)}
    mor_families = []
    for combo in itertools.product(*(c.morphisms() for c in D.values)):
        srcs = tuple(D.values[i].src[combo[i]] for i in range(len(combo)))
        tgts = tuple(D.values[i].tgt[combo[i]] for i in range(len(combo)))
        if srcs not in oidx or tgts not in oidx:
            continue
        if all(
            D.arrows[m].mor_map[combo[I.src[m]]] == combo[I.tgt[m]]
            for m in I.morphisms()
        ):
            mor_families.append((combo, oidx[srcs], oidx[tgts]))
    midx = {fam: k for k, (fam, _, _) in enumerate(mor_families)}
    src = tuple(s for _, s, _ in mor_families)
    tgt = tuple(t for _, _, t in mor_families)
    identity = tuple(
        midx[tuple(D.values[i].identity[fam[i]] for i in range(len(fam)))]
        for fam in obj_families
    )
    nm = len(mor_families)
    comp: list[list[Optional[int]]] = [[None] * nm for _ in range(nm)]
    for gi, (gfam, gs, gt) in enumerate(mor_families):
        for fi, (ffam, fs, ft) in enumerate(mor_families):
            if gs != ft:
                continue
            cfam = tuple(
                D.values[i].comp[gfam[i]][ffam[i]] for i in range(len(gfam))
            )
            comp[gi][fi] = midx[cfam]
    marked = frozenset(
        k
        for k, (fam, _, _) in enumerate(mor_families)
        if all(fam[i] in D.values[i].marked for i in range(len(fam)))
    )
    L = FinMarkedCat(
        len(obj_families), src, tgt, identity,
        tuple(tuple(r) for r in comp), marked,
    )
    projections = [
        CatFunctor(
            L,
            D.values[i],
            tuple(fam[i] for fam in obj_families),
            tuple(fam[i] for fam, _, _ in mor_families),
        )
        for i in I.objects()
    ]
    return L, projections


def colimit(D: Diagram, cap: int = DEFAULT_CAP) -> tuple[FinMarkedCat, list[CatFunctor]]:
    """Colimit with the marking generated by the images of marked isos.

    Computed by presenting the quotient (object and morphism identifications
    along the diagram arrows, composition relations from the pieces) and
    enumerating it; raises :class:`SizeLimit` past the cap.
    """
    I = D.index
    # union-find over disjoint objects and morphisms
    obj_items = [(i, x) for i in I.objects() for x in D.values[i].objects()]
    mor_items = [(i, m) for i in I.objects() for m in D.values[i].morphisms()]
    opos = {it: k for k, it in enumerate(obj_items)}
    mpos = {it: k for k, it in enumerate(mor_items)}

    oparent = list(range(len(obj_items)))
    mparent = list(range(len(mor_items)))

    def find(parent, x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(parent, a, b):
        ra, rb = find(parent, a), find(parent, b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for m in I.morphisms():
        i, j = I.src[m], I.tgt[m]
        F = D.arrows[m]
        for x in D.values[i].objects():
            union(oparent, opos[(i, x)], opos[(j, F.obj_map[x])])
        for f in D.values[i].morphisms():
            union(mparent, mpos[(i, f)], mpos[(j, F.mor_map[f])])

    obj_reps = sorted({find(oparent, k) for k in range(len(obj_items))})
    obj_class = {k: obj_reps.index(find(oparent, k)) for k in range(len(obj_items))}
    mor_reps = sorted({find(mparent, k) for k in range(len(mor_items))})
    mor_class = {k: mor_reps.index(find(mparent, k)) for k in range(len(mor_items))}

    def oc(i, x):
        return obj_class[opos[(i, x)]]

    def mc(i, m):
        return mor_class[mpos[(i, m)]]

    gens = []
    for rep in mor_reps:
        i, m = mor_items[rep]
        gens.append((oc(i, D.values[i].src[m]), oc(i, D.values[i].tgt[m])))
    pres = Presentation(len(obj_reps), gens)
    for i in I.objects():
        C = D.values[i]
        for x in C.objects():
            pres.add_relation(oc(i, x), (mc(i, C.identity[x]),), ())
        for g in C.morphisms():
            for f in C.morphisms():
                if C.src[g] == C.tgt[f]:
                    pres.add_relation(
                        oc(i, C.src[f]),
                        (mc(i, f), mc(i, g)),
                        (mc(i, C.comp[g][f]),),
                    )
    enum = enumerate_presentation(pres, cap)
    cat = from_enumeration(enum, enum.identity)
    seed = set()
    for i in I.objects():
        for m in D.values[i].marked:
            seed.add(enum.generator_class[mc(i, m)])
    marked = subgroupoid_closure(cat, seed)
    result = cat.with_marking(marked)
    cocone = [
        CatFunctor(
            D.values[i],
            result,
            tuple(oc(i, x) for x in D.values[i].objects()),
            tuple(enum.generator_class[mc(i, m)] for m in D.values[i].morphisms()),
        )
        for i in I.objects()
    ]
    return result, cocone


def span_index() -> FinMarkedCat:
    """The index category  1 <- 0 -> 2  for pushouts."""
    # objects 0,1,2; morphisms: ids + l:0->1 + r:0->2
    src = (0, 1, 2, 0, 0)
    tgt = (0, 1, 2, 1, 2)
    identity = (0, 1, 2)
    nm = 5
    comp: list[list[Optional[int]]] = [[None] * nm for _ in range(nm)]
    for g in range(nm):
        for f in range(nm):
            if src[g] == tgt[f]:
                if g in (0, 1, 2):
                    comp[g][f] = f
                elif f in (0, 1, 2):
                    comp[g][f] = g
    return FinMarkedCat(3, src, tgt, identity, tuple(tuple(r) for r in comp), frozenset({0, 1, 2}))


def pushout(
    f: CatFunctor, g: CatFunctor, cap: int = DEFAULT_CAP
) -> tuple[FinMarkedCat, CatFunctor, CatFunctor]:
    """Pushout of  cod(f) <-f- dom -g-> cod(g); returns the two cocone legs."""
    if f.dom != g.dom:
        raise ValueError("pushout legs must share their domain")
    D = Diagram(
        index=span_index(),
        values=(f.dom, f.cod, g.cod),
        arrows=(
            CatFunctor.identity(f.dom),
            CatFunctor.identity(f.cod),
            CatFunctor.identity(g.cod),
            f,
            g,
        ),
    )
    P, cocone = colimit(D, cap)
    return P, cocone[1], cocone[2]


# ---------------------------------------------------------------------------
# JSON


def cat_to_json(c: FinMarkedCat) -> dict:
    return {
        "objects": c.n_objects,
        "morphisms": [{"src": c.src[m], "tgt": c.tgt[m]} for m in c.morphisms()],
        "identity": list(c.identity),
        "comp": [[c.comp[g][f] for f in c.morphisms()] for g in c.morphisms()],
        "marked": sorted(c.marked),
    }


def cat_from_json(obj: dict) -> FinMarkedCat:
    mor = obj["morphisms"]
    return FinMarkedCat(
        n_objects=obj["objects"],
        src=tuple(m["src"] for m in mor),
        tgt=tuple(m["tgt"] for m in mor),
        identity=tuple(obj["identity"]),
        comp=tuple(tuple(row) for row in obj["comp"]),
        marked=frozenset(obj["marked"]),
    )


def functor_to_json(F: CatFunctor) -> dict:
    return {
        "domain": cat_to_json(F.dom),
        "codomain": cat_to_json(F.cod),
        "object_map": list(F.obj_map),
        "morphism_map": list(F.mor_map),
    }


def functor_from_json(obj: dict) -> CatFunctor:
    return CatFunctor(
        cat_from_json(obj["domain"]),
        cat_from_json(obj["codomain"]),
        tuple(obj["object_map"]),
        tuple(obj["morphism_map"]),
    )
