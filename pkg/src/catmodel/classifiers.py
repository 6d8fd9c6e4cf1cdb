"""Named small objects and generating morphisms, in all four flavors.

Flavors are ``cat``, ``cat+``, ``preadd``, ``preadd+``.  Unmarked flavors
are represented by their maximal marking (a full embedding); the marked
flavors carry the markings the generating sets require.

The biproduct classifier ``S`` is stored with hom groups frozen from a
normal-form enumeration; :func:`derive_implied_relations` re-derives the
implied relations from the three defining ones inside a bounded word module,
so nothing about ``S`` is stipulated beyond its presentation.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Optional, Union

from .abgrp import AbHom, FinAbGroup, lattice_member
from .markedcat import (
    CatFunctor,
    FinMarkedCat,
    MarkedGraph,
    discrete,
    disjoint_union,
    free_marked_category,
    ma,
    mi,
    pushout,
)
from .preaddcat import AddFunctor, FinPreAddCat, PMor, lin_Z
from .presentations import SizeLimit

__all__ = [
    "ClassifierKind",
    "Flavor",
    "build",
    "generating_sets",
    "GeneratingMorphism",
    "locality_maps",
    "empty_cat",
    "empty_preadd",
    "two_points_preadd",
    "s_classifier",
    "e_classifier",
    "zero_classifier",
    "derive_implied_relations",
    "presented_hom_forms",
    "lin_functor",
    "disjoint_union_preadd",
]


class Flavor(str, enum.Enum):
    CAT = "cat"
    CAT_PLUS = "cat+"
    PREADD = "preadd"
    PREADD_PLUS = "preadd+"

    @property
    def is_marked(self) -> bool:
        return self in (Flavor.CAT_PLUS, Flavor.PREADD_PLUS)

    @property
    def is_preadd(self) -> bool:
        return self in (Flavor.PREADD, Flavor.PREADD_PLUS)


class ClassifierKind(str, enum.Enum):
    DELTA0 = "delta0"
    DELTA1 = "delta1"
    I = "I"
    I_PLUS = "I+"
    S = "S"
    ZERO = "zero"
    E = "E"
    P = "P"
    P_PLUS = "P+"


# ---------------------------------------------------------------------------
# table-level building blocks


def empty_cat() -> FinMarkedCat:
    return FinMarkedCat(0, (), (), (), (), frozenset())


def _delta1_cat() -> FinMarkedCat:
    return free_marked_category(MarkedGraph(2, ((0, 1),)))


def _iso_cat() -> FinMarkedCat:
    return free_marked_category(MarkedGraph(2, ((0, 1),), frozenset({0})))


def _p_cat() -> FinMarkedCat:
    d1 = _delta1_cat()
    two, _ = disjoint_union([discrete(1), discrete(1)])
    v = CatFunctor(two, d1, (0, 1), (d1.identity[0], d1.identity[1]))
    P, _, _ = pushout(v, v)
    return P


def empty_preadd() -> FinPreAddCat:
    return FinPreAddCat(0, [], {}, [])


def zero_classifier() -> FinPreAddCat:
    """One object whose identity is the zero morphism (trivial End group)."""
    end = FinAbGroup(0)
    c = FinPreAddCat(1, [[end]], {}, [end.zero()])
    return c.with_marking([c.id_mor(0)])


def e_classifier() -> FinPreAddCat:
    """One object, endomorphisms Z{1, e} with e squared equal to e."""
    end = FinAbGroup(2)
    comp = {
        (0, 0, 0): (
            ((1, 0), (0, 1)),  # 1 . 1 = 1 ; 1 . e = e
            ((0, 1), (0, 1)),  # e . 1 = e ; e . e = e
        )
    }
    c = FinPreAddCat(1, [[end]], comp, [end.element((1, 0))])
    return c.with_marking([c.id_mor(0)])


def s_classifier() -> FinPreAddCat:
    """The biproduct classifier: objects 1, 2, S with maps i1, i2, p1, p2.

    Hom groups are frozen golden data (End(S) has basis {i1 p1, i2 p2} with
    the identity their sum); :func:`presented_hom_forms` recomputes them from
    the presentation.
    """
    z = FinAbGroup(1)
    zero = FinAbGroup(0)
    end_s = FinAbGroup(2)  # basis e1 = i1 p1, e2 = i2 p2
    hom = [
        [z, zero, z],  # 1->1 (id), 1->2, 1->S (i1)
        [zero, z, z],  # 2->1, 2->2 (id), 2->S (i2)
        [z, z, end_s],  # S->1 (p1), S->2 (p2), S->S
    ]
    comp = {
        (0, 0, 0): (((1,),),),
        (1, 1, 1): (((1,),),),
        (0, 0, 2): (((1,),),),  # i1 . id1
        (1, 1, 2): (((1,),),),  # i2 . id2
        (2, 0, 0): (((1,),),),  # id1 . p1
        (2, 1, 1): (((1,),),),  # id2 . p2
        (0, 2, 0): (((1,),),),  # p1 . i1 = id1
        (0, 2, 1): (((0,),),),  # p2 . i1 = 0 (derived)
        (1, 2, 0): (((0,),),),  # p1 . i2 = 0 (derived)
        (1, 2, 1): (((1,),),),  # p2 . i2 = id2
        (0, 2, 2): (((1,),), ((0,),)),  # e1 . i1 = i1 ; e2 . i1 = 0
        (1, 2, 2): (((0,),), ((1,),)),  # e1 . i2 = 0 ; e2 . i2 = i2
        (2, 2, 0): (((1,), (0,)),),  # p1 . e1 = p1 ; p1 . e2 = 0
        (2, 2, 1): (((0,), (1,)),),  # p2 . e1 = 0 ; p2 . e2 = p2
        (2, 0, 2): (((1, 0),),),  # i1 . p1 = e1
        (2, 1, 2): (((0, 1),),),  # i2 . p2 = e2
        (2, 2, 2): (
            ((1, 0), (0, 0)),  # e1 . e1 = e1 ; e1 . e2 = 0
            ((0, 0), (0, 1)),  # e2 . e1 = 0 ; e2 . e2 = e2
        ),
    }
    ident = [z.element((1,)), z.element((1,)), end_s.element((1, 1))]
    c = FinPreAddCat(3, hom, comp, ident)
    return c.with_marking([c.id_mor(a) for a in c.objects()])


def two_points_preadd() -> FinPreAddCat:
    """Two objects with End = Z each and no maps between them."""
    z = FinAbGroup(1)
    zero = FinAbGroup(0)
    hom = [[z, zero], [zero, z]]
    comp = {(0, 0, 0): (((1,),),), (1, 1, 1): (((1,),),)}
    c = FinPreAddCat(2, hom, comp, [z.element((1,)), z.element((1,))])
    return c.with_marking([c.id_mor(0), c.id_mor(1)])


# ---------------------------------------------------------------------------
# build


def build(kind: ClassifierKind, flavor: Flavor) -> Union[FinMarkedCat, FinPreAddCat]:
    """The named classifier in the requested flavor.

    ``P+`` is honestly infinite (gluing two marked iso classifiers along
    both endpoints frees up an infinite vertex group), so building it raises
    SizeLimit; its fold map exists formally in :func:`generating_sets`.
    """
    kind = ClassifierKind(kind)
    flavor = Flavor(flavor)
    if kind in (ClassifierKind.S, ClassifierKind.ZERO, ClassifierKind.E):
        if not flavor.is_preadd:
            raise ValueError(f"{kind.value} exists only in pre-additive flavors")
        base = {
            ClassifierKind.S: s_classifier,
            ClassifierKind.ZERO: zero_classifier,
            ClassifierKind.E: e_classifier,
        }[kind]()
        return base
    if kind is ClassifierKind.P_PLUS:
        raise SizeLimit(
            "P+ is an infinite category (free vertex group); "
            "its fold map W+ is available formally in generating_sets"
        )
    cat_version = {
        ClassifierKind.DELTA0: discrete(1),
        ClassifierKind.DELTA1: mi(_delta1_cat()),
        ClassifierKind.I: mi(_iso_cat()),
        ClassifierKind.I_PLUS: ma(_iso_cat()),
        ClassifierKind.P: mi(_p_cat()),
    }[kind]
    if not flavor.is_marked:
        cat_version = ma(cat_version)
    if flavor.is_preadd:
        return lin_Z(cat_version)
    return cat_version


# ---------------------------------------------------------------------------
# functor linearization and pre-additive coproducts


def lin_functor(F: CatFunctor, lin_dom: FinPreAddCat, lin_cod: FinPreAddCat) -> AddFunctor:
    """Linearize a table functor between linearized categories."""
    A, B = F.dom, F.cod
    hom_maps = []
    for a in A.objects():
        row = []
        for b in A.objects():
            dom_basis = A.hom(a, b)
            cod_basis = B.hom(F.obj_map[a], F.obj_map[b])
            pos = {m: k for k, m in enumerate(cod_basis)}
            rows = [
                [1 if pos[F.mor_map[m]] == k else 0 for k in range(len(cod_basis))]
                for m in dom_basis
            ]
            row.append(
                AbHom(
                    lin_dom.hom(a, b),
                    lin_cod.hom(F.obj_map[a], F.obj_map[b]),
                    rows,
                )
            )
        hom_maps.append(tuple(row))
    return AddFunctor(lin_dom, lin_cod, F.obj_map, tuple(hom_maps))


def disjoint_union_preadd(cats: list[FinPreAddCat]) -> tuple[FinPreAddCat, list[AddFunctor]]:
    """Coproduct: hom groups between different pieces are trivial."""
    n = sum(c.n_objects for c in cats)
    offsets = []
    o = 0
    for c in cats:
        offsets.append(o)
        o += c.n_objects
    zero = FinAbGroup(0)
    hom = [[zero] * n for _ in range(n)]
    comp = {}
    ident: list = [None] * n
    marked = []
    for k, c in enumerate(cats):
        off = offsets[k]
        for a in c.objects():
            ident[off + a] = c.identity[a]
            for b in c.objects():
                hom[off + a][off + b] = c.hom(a, b)
        for (a, b, d), table in c.comp_table.items():
            comp[(off + a, off + b, off + d)] = table
        for m in c.all_marked():
            marked.append(PMor(off + m.src, off + m.tgt, m.elt))
    total = FinPreAddCat(n, hom, comp, ident, marked)
    injections = []
    for k, c in enumerate(cats):
        off = offsets[k]
        hom_maps = tuple(
            tuple(AbHom.identity(c.hom(a, b)) for b in c.objects())
            for a in c.objects()
        )
        injections.append(
            AddFunctor(
                c, total, tuple(off + a for a in c.objects()),
                tuple(
                    tuple(
                        AbHom(c.hom(a, b), total.hom(off + a, off + b),
                              [[1 if i == j else 0 for j in range(c.hom(a, b).n)]
                               for i in range(c.hom(a, b).n)])
                        for b in c.objects()
                    )
                    for a in c.objects()
                ),
            )
        )
    return total, injections


# ---------------------------------------------------------------------------
# generating sets


@dataclass
class GeneratingMorphism:
    """A generating (trivial) cofibration, materialized when finite.

    For W+ in marked flavors the domain is infinite; the morphism is kept
    formal (``functor is None``) together with its object-level data, which
    is all that cofibrancy and lifting checks consume.
    """

    name: str
    functor: Optional[Union[CatFunctor, AddFunctor]]
    object_injective: bool = True

    def is_cofibration(self) -> bool:
        if self.functor is None:
            return self.object_injective
        if isinstance(self.functor, CatFunctor):
            return self.functor.is_injective_on_objects()
        return self.functor.is_injective_on_objects()


def generating_sets(flavor: Flavor) -> tuple[list[GeneratingMorphism], list[GeneratingMorphism]]:
    """The generating cofibrations I and trivial cofibrations J."""
    flavor = Flavor(flavor)
    d0 = build(ClassifierKind.DELTA0, flavor)
    d1 = build(ClassifierKind.DELTA1, flavor)
    iso = build(ClassifierKind.I_PLUS if flavor.is_marked else ClassifierKind.I, flavor)
    p = build(ClassifierKind.P, flavor)

    if flavor.is_preadd:
        d0c = build(ClassifierKind.DELTA0, Flavor.CAT_PLUS if flavor.is_marked else Flavor.CAT)
        emp = empty_preadd()
        two, _ = disjoint_union_preadd([d0, d0])
    else:
        emp = empty_cat()
        two, _ = disjoint_union([d0, d0])

    def cat_j():
        return CatFunctor(d0, iso, (0,), (iso.identity[0],))

    def preadd_j():
        cat_iso = build(
            ClassifierKind.I_PLUS if flavor.is_marked else ClassifierKind.I,
            Flavor.CAT_PLUS if flavor.is_marked else Flavor.CAT,
        )
        catd0 = discrete(1) if flavor.is_marked else ma(discrete(1))
        return lin_functor(
            CatFunctor(catd0, cat_iso, (0,), (cat_iso.identity[0],)), d0, iso
        )

    if flavor.is_preadd:
        j = GeneratingMorphism("J", preadd_j())
        u = GeneratingMorphism("U", AddFunctor(emp, d0, (), ()))
        two_cat, _ = disjoint_union([discrete(1), discrete(1)])
        catd1 = build(
            ClassifierKind.DELTA1,
            Flavor.CAT_PLUS if flavor.is_marked else Flavor.CAT,
        )
        v_cat = CatFunctor(
            ma(two_cat) if not flavor.is_marked else two_cat,
            catd1,
            (0, 1),
            (catd1.identity[0], catd1.identity[1]),
        )
        v = GeneratingMorphism("V", lin_functor(v_cat, two, d1))
        cat_p = build(
            ClassifierKind.P, Flavor.CAT_PLUS if flavor.is_marked else Flavor.CAT
        )
        fold_cat = _fold_functor(cat_p, catd1)
        w = GeneratingMorphism("W", lin_functor(fold_cat, p, d1))
        out = [u, v, w]
        if flavor.is_marked:
            cat_iso = build(ClassifierKind.I_PLUS, Flavor.CAT_PLUS)
            vp_cat = CatFunctor(
                two_cat, cat_iso, (0, 1), (cat_iso.identity[0], cat_iso.identity[1])
            )
            out.append(GeneratingMorphism("V+", lin_functor(vp_cat, two, iso)))
            out.append(GeneratingMorphism("W+", None))
        return (out + [j], [j])

    j = GeneratingMorphism("J", cat_j())
    u = GeneratingMorphism("U", CatFunctor(emp, d0, (), ()))
    v = GeneratingMorphism(
        "V", CatFunctor(two, d1, (0, 1), (d1.identity[0], d1.identity[1]))
    )
    w = GeneratingMorphism("W", _fold_functor(p, d1))
    out = [u, v, w]
    if flavor.is_marked:
        vp = GeneratingMorphism(
            "V+", CatFunctor(two, iso, (0, 1), (iso.identity[0], iso.identity[1]))
        )
        out.append(vp)
        out.append(GeneratingMorphism("W+", None))
    return (out + [j], [j])


def _fold_functor(p: FinMarkedCat, d1: FinMarkedCat) -> CatFunctor:
    """The fold P -> Delta1 sending both parallel arrows to the arrow."""
    arrow = next(m for m in d1.morphisms() if not d1.is_identity(m))
    src_obj = d1.src[arrow]
    tgt_obj = d1.tgt[arrow]
    nonid = [m for m in p.morphisms() if not p.is_identity(m)]
    psrc = p.src[nonid[0]]
    ptgt = p.tgt[nonid[0]]
    obj_map = tuple(
        src_obj if o == psrc else tgt_obj for o in p.objects()
    )
    mor_map = tuple(
        arrow if m in nonid else d1.identity[obj_map[p.src[m]]]
        for m in p.morphisms()
    )
    return CatFunctor(p, d1, obj_map, mor_map)


# ---------------------------------------------------------------------------
# locality maps


def locality_maps(flavor: Flavor) -> tuple[AddFunctor, AddFunctor, AddFunctor]:
    """The maps u: E -> S, v: initial -> zero classifier, w: two points -> S."""
    flavor = Flavor(flavor)
    if not flavor.is_preadd:
        raise ValueError("locality maps live in pre-additive flavors")
    s = s_classifier()
    e = e_classifier()
    zc = zero_classifier()
    emp = empty_preadd()
    two = two_points_preadd()
    # u sends * to S and e to i1 p1
    u = AddFunctor(
        e, s, (2,),
        ((AbHom(e.hom(0, 0), s.hom(2, 2), [[1, 1], [1, 0]]),),),
    )
    v = AddFunctor(emp, zc, (), ())
    z = FinAbGroup(1)
    w = AddFunctor(
        two, s, (0, 1),
        (
            (
                AbHom(two.hom(0, 0), s.hom(0, 0), [[1]]),
                AbHom(two.hom(0, 1), s.hom(0, 1), []),
            ),
            (
                AbHom(two.hom(1, 0), s.hom(1, 0), []),
                AbHom(two.hom(1, 1), s.hom(1, 1), [[1]]),
            ),
        ),
    )
    return u, v, w


# ---------------------------------------------------------------------------
# bounded derivation of the implied relations of S


_S_GENS = {
    # name: (src, tgt)
    "i1": (0, 2),
    "i2": (1, 2),
    "p1": (2, 0),
    "p2": (2, 1),
}


def _s_words(src: int, tgt: int, max_len: int):
    """Composable generator words (applied left to right) from src to tgt."""
    names = sorted(_S_GENS)
    out = []

    def rec(word, at):
        if len(word) <= max_len and at == tgt and (word or src == tgt):
            out.append(tuple(word))
        if len(word) == max_len:
            return
        for g in names:
            s, t = _S_GENS[g]
            if s == at:
                rec(word + [g], t)

    if src == tgt:
        out.append(())
    rec([], src)
    seen = []
    for w in out:
        if w not in seen:
            seen.append(w)
    return seen


def _relation_instances(src: int, tgt: int, max_len: int):
    """Formal-sum instances u . r . v of the three defining relations,
    expressed over the word basis of hom(src, tgt)."""
    rels = [
        # (anchor src, anchor tgt, formal sum as {word: coeff})
        (0, 0, {("i1", "p1"): 1, (): -1}),
        (1, 1, {("i2", "p2"): 1, (): -1}),
        (2, 2, {("p1", "i1"): 1, ("p2", "i2"): 1, (): -1}),
    ]
    instances = []
    for rsrc, rtgt, combo in rels:
        rlen = max(len(w) for w in combo)
        for u in _s_words(src, rsrc, max_len):
            for v in _s_words(rtgt, tgt, max_len):
                if len(u) + rlen + len(v) > max_len:
                    continue
                inst = {}
                for w, c in combo.items():
                    word = u + w + v
                    inst[word] = inst.get(word, 0) + c
                instances.append(inst)
    return instances


def presented_hom_forms(max_len: int = 4) -> dict[tuple[int, int], tuple]:
    """Canonical forms of the hom groups of S computed from the presentation
    (free abelian groups on bounded words modulo relation instances)."""
    out = {}
    for src in range(3):
        for tgt in range(3):
            words = _s_words(src, tgt, max_len)
            idx = {w: k for k, w in enumerate(words)}
            rows = []
            for inst in _relation_instances(src, tgt, max_len):
                row = [0] * len(words)
                ok = True
                for w, c in inst.items():
                    if w not in idx:
                        ok = False
                        break
                    row[idx[w]] += c
                if ok:
                    rows.append(row)
            out[(src, tgt)] = FinAbGroup(len(words), rows).canonical_form()
    return out


def derive_implied_relations(max_len: int = 4) -> dict[str, bool]:
    """Derive p2 i1 = 0 and p1 i2 = 0 from the three defining relations.

    Membership of the cross words in the integer span of bounded relation
    instances is decided exactly by lattice membership.
    """
    out = {}
    for name, (src, tgt), word in (
        ("p2_i1", (0, 1), ("i1", "p2")),
        ("p1_i2", (1, 0), ("i2", "p1")),
    ):
        words = _s_words(src, tgt, max_len)
        idx = {w: k for k, w in enumerate(words)}
        rows = []
        for inst in _relation_instances(src, tgt, max_len):
            row = [0] * len(words)
            ok = True
            for w, c in inst.items():
                if w not in idx:
                    ok = False
                    break
                row[idx[w]] += c
            if ok:
                rows.append(tuple(row))
        target = [0] * len(words)
        target[idx[word]] = 1
        out[name] = lattice_member(tuple(target), tuple(rows))
    return out
