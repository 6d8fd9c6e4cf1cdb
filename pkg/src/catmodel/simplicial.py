"""Two-truncated simplicial sets, nerves of groupoids, fundamental groupoids.

Only dimensions 0..2 are stored.  Mapping spaces in this library are nerves
of groupoids, which are 2-coskeletal, so nothing above dimension 2 ever
carries information; the fundamental groupoid likewise only depends on the
2-skeleton.

Face convention: ``d_i`` omits vertex ``i``.  An edge with vertices
``(v0, v1)`` represents ``v0 -> v1`` and has ``d0 = v1`` (target),
``d1 = v0`` (source).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .markedcat import FinMarkedCat, ma
from .presentations import DEFAULT_CAP, Presentation, SizeLimit, enumerate_presentation

__all__ = [
    "TruncSSet",
    "SSetMap",
    "nerve",
    "fundamental_groupoid",
    "sset_point",
    "sset_delta1",
    "sset_boundary_delta1",
    "sset_circle",
    "simplicial_maps",
    "sset_to_json",
    "sset_from_json",
]


@dataclass(frozen=True)
class TruncSSet:
    """Simplices in dimensions 0..2 with face and degeneracy index maps.

    ``faces1[e] = (d0, d1)`` are vertices; ``faces2[t] = (d0, d1, d2)`` are
    edges.  ``deg0[v]`` is the degenerate edge on a vertex; ``deg1[e]`` is
    the pair ``(s0 e, s1 e)`` of degenerate triangles on an edge.
    """

    n0: int
    faces1: tuple[tuple[int, int], ...]
    faces2: tuple[tuple[int, int, int], ...]
    deg0: tuple[int, ...]
    deg1: tuple[tuple[int, int], ...]

    @property
    def n1(self) -> int:
        return len(self.faces1)

    @property
    def n2(self) -> int:
        return len(self.faces2)

    def counts(self) -> tuple[int, int, int]:
        return (self.n0, self.n1, self.n2)

    def edge_src(self, e: int) -> int:
        return self.faces1[e][1]

    def edge_tgt(self, e: int) -> int:
        return self.faces1[e][0]

    def validate(self) -> list[str]:
        """Check the simplicial identities expressible in the truncation."""
        errs = []
        if len(self.deg0) != self.n0 or len(self.deg1) != self.n1:
            return ["degeneracy tables have wrong lengths"]
        for v in range(self.n0):
            e = self.deg0[v]
            if self.faces1[e] != (v, v):
                errs.append(f"deg0({v}) is not a loop at {v}")
        for e in range(self.n1):
            d0, d1 = self.faces1[e]
            s0e, s1e = self.deg1[e]
            if self.faces2[s0e] != (e, e, self.deg0[d1]):
                errs.append(f"faces of s0 on edge {e} are wrong")
            if self.faces2[s1e] != (self.deg0[d0], e, e):
                errs.append(f"faces of s1 on edge {e} are wrong")
        for v in range(self.n0):
            e = self.deg0[v]
            if self.deg1[e][0] != self.deg1[e][1]:
                errs.append(f"s0 s0 != s1 s0 at vertex {v}")
        for t in range(self.n2):
            d0, d1, d2 = self.faces2[t]
            # triangle vertices (v0, v1, v2): d0 = (v1,v2), d1 = (v0,v2), d2 = (v0,v1)
            if self.faces1[d0][0] != self.faces1[d1][0]:
                errs.append(f"dd identity (v2) fails at triangle {t}")
            if self.faces1[d0][1] != self.faces1[d2][0]:
                errs.append(f"dd identity (v1) fails at triangle {t}")
            if self.faces1[d1][1] != self.faces1[d2][1]:
                errs.append(f"dd identity (v0) fails at triangle {t}")
        return errs


# ---------------------------------------------------------------------------
# standard complexes


def sset_point() -> TruncSSet:
    return TruncSSet(1, ((0, 0),), ((0, 0, 0),), (0,), ((0, 0),))


def sset_delta1() -> TruncSSet:
    # vertices 0,1; edges: 0 = deg(0), 1 = deg(1), 2 = the arrow 0 -> 1
    faces1 = ((0, 0), (1, 1), (1, 0))
    faces2 = (
        (0, 0, 0),  # s0 s0 at 0
        (1, 1, 1),  # s0 s0 at 1
        (2, 2, 0),  # s0(arrow): d2 degenerate at the source
        (1, 2, 2),  # s1(arrow): d0 degenerate at the target
    )
    return TruncSSet(2, faces1, faces2, (0, 1), ((0, 0), (1, 1), (2, 3)))


def sset_boundary_delta1() -> TruncSSet:
    faces1 = ((0, 0), (1, 1))
    faces2 = ((0, 0, 0), (1, 1, 1))
    return TruncSSet(2, faces1, faces2, (0, 1), ((0, 0), (1, 1)))


def sset_circle() -> TruncSSet:
    """One vertex with a nondegenerate loop: the fundamental group is Z."""
    faces1 = ((0, 0), (0, 0))  # 0 = deg(v), 1 = loop
    faces2 = (
        (0, 0, 0),  # s0 s0 at v
        (1, 1, 0),  # s0(loop)
        (0, 1, 1),  # s1(loop)
    )
    return TruncSSet(1, faces1, faces2, (0,), ((0, 0), (1, 2)))


# ---------------------------------------------------------------------------
# nerve


def nerve(groupoid: FinMarkedCat, max_level: int = 2) -> TruncSSet:
    """Nerve of a finite groupoid (any finite category is accepted).

    Level 0: objects; level 1: morphisms; level 2: composable pairs, with
    identities as degeneracies.
    """
    c = groupoid
    faces1 = tuple((c.tgt[m], c.src[m]) for m in c.morphisms())
    pairs = [
        (f, g)
        for f in c.morphisms()
        for g in c.morphisms()
        if c.tgt[f] == c.src[g]
    ]
    pidx = {p: k for k, p in enumerate(pairs)}
    faces2 = tuple((g, c.comp[g][f], f) for (f, g) in pairs)
    deg0 = tuple(c.identity[o] for o in c.objects())
    deg1 = tuple(
        (pidx[(c.identity[c.src[e]], e)], pidx[(e, c.identity[c.tgt[e]])])
        for e in c.morphisms()
    )
    full = TruncSSet(c.n_objects, faces1, faces2, deg0, deg1)
    if max_level >= 2:
        return full
    if max_level == 1:
        return TruncSSet(full.n0, full.faces1, (), full.deg0, ())
    return TruncSSet(full.n0, (), (), (), ())


# ---------------------------------------------------------------------------
# fundamental groupoid


def fundamental_groupoid(k: TruncSSet, cap: int = DEFAULT_CAP) -> FinMarkedCat:
    """Path category on the 1-simplices modulo the 2-simplex relations, with
    every edge formally inverted; enumerated to closure.

    Raises :class:`SizeLimit` when the groupoid is infinite or exceeds the
    cap (for example on a circle).
    """
    errs = k.validate()
    if errs:
        raise ValueError("ill-formed simplicial set: " + errs[0])
    pres = Presentation(
        k.n0,
        [(k.edge_src(e), k.edge_tgt(e)) for e in range(k.n1)],
        invertible=set(range(k.n1)),
    )
    for v in range(k.n0):
        pres.add_relation(v, (k.deg0[v],), ())
    for t in range(k.n2):
        d0, d1, d2 = k.faces2[t]
        # path d2 then d0 equals d1, anchored at the source of d2
        pres.add_relation(k.edge_src(d2), (d2, d0), (d1,))
    enum = enumerate_presentation(pres, cap)
    cat = FinMarkedCat(
        enum.n_objects, enum.src, enum.tgt, enum.identity, enum.comp,
        frozenset(enum.identity),
    )
    return ma(cat)


# ---------------------------------------------------------------------------
# simplicial maps (used by the adjunction checks)


@dataclass(frozen=True)
class SSetMap:
    dom: TruncSSet
    cod: TruncSSet
    level0: tuple[int, ...]
    level1: tuple[int, ...]
    level2: tuple[int, ...]

    def validate(self) -> list[str]:
        errs = []
        K, L = self.dom, self.cod
        for e in range(K.n1):
            d0, d1 = K.faces1[e]
            if L.faces1[self.level1[e]] != (self.level0[d0], self.level0[d1]):
                errs.append(f"faces of edge {e} not preserved")
        for v in range(K.n0):
            if self.level1[K.deg0[v]] != L.deg0[self.level0[v]]:
                errs.append(f"degeneracy of vertex {v} not preserved")
        for t in range(K.n2):
            img = tuple(self.level1[d] for d in K.faces2[t])
            if L.faces2[self.level2[t]] != img:
                errs.append(f"faces of triangle {t} not preserved")
        for e in range(K.n1):
            s0e, s1e = K.deg1[e]
            ls = L.deg1[self.level1[e]]
            if self.level2[s0e] != ls[0] or self.level2[s1e] != ls[1]:
                errs.append(f"degeneracies of edge {e} not preserved")
        return errs


def simplicial_maps(K: TruncSSet, L: TruncSSet, cap: int = DEFAULT_CAP) -> list[SSetMap]:
    """All simplicial maps K -> L, by levelwise backtracking."""
    out: list[SSetMap] = []
    tri_index: dict[tuple[int, int, int], list[int]] = {}
    for t in range(L.n2):
        tri_index.setdefault(L.faces2[t], []).append(t)
    for l0 in itertools.product(range(L.n0), repeat=K.n0):
        pools1 = []
        ok = True
        for e in range(K.n1):
            d0, d1 = K.faces1[e]
            cands = [f for f in range(L.n1) if L.faces1[f] == (l0[d0], l0[d1])]
            if not cands:
                ok = False
                break
            pools1.append(cands)
        if not ok:
            continue
        for l1 in itertools.product(*pools1):
            if any(l1[K.deg0[v]] != L.deg0[l0[v]] for v in range(K.n0)):
                continue
            pools2 = []
            ok2 = True
            for t in range(K.n2):
                img = tuple(l1[d] for d in K.faces2[t])
                cands = tri_index.get(img, [])
                if not cands:
                    ok2 = False
                    break
                pools2.append(cands)
            if not ok2:
                continue
            for l2 in itertools.product(*pools2):
                cand = SSetMap(K, L, l0, l1, l2)
                if not cand.validate():
                    out.append(cand)
                    if len(out) > cap:
                        raise SizeLimit(f"more than {cap} simplicial maps")
    return out


# ---------------------------------------------------------------------------
# JSON


def sset_to_json(k: TruncSSet) -> dict:
    return {
        "vertices": k.n0,
        "edges": [list(f) for f in k.faces1],
        "triangles": [list(f) for f in k.faces2],
        "deg0": list(k.deg0),
        "deg1": [list(d) for d in k.deg1],
    }


def sset_from_json(obj: dict) -> TruncSSet:
    return TruncSSet(
        obj["vertices"],
        tuple(tuple(f) for f in obj["edges"]),
        tuple(tuple(f) for f in obj["triangles"]),
        tuple(obj["deg0"]),
        tuple(tuple(d) for d in obj["deg1"]),
    )
