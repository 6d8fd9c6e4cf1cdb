"""Finite enumeration of categories given by generators and relations.

The enumerator is a transition-table closure in the style of coset
enumeration: elements are classes of composable generator words, rows give
the right action of generators, and relations force coincidences which
cascade through the table.  If the presented category is finite the
procedure terminates with the full composition table; otherwise the class
count exceeds the cap and :class:`SizeLimit` is raised.

Words are composition paths read left to right: ``(g1, g2)`` means
"apply g1, then g2".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

DEFAULT_CAP = 10_000


class SizeLimit(RuntimeError):
    """Enumeration exceeded its cap (the presented structure may be infinite)."""


@dataclass
class Presentation:
    n_objects: int
    generators: list[tuple[int, int]]  # (src, tgt) per generator
    relations: list[tuple[int, tuple[int, ...], tuple[int, ...]]] = field(
        default_factory=list
    )  # (anchor object, word1, word2), both words are paths from the anchor
    invertible: set[int] = field(default_factory=set)

    def add_relation(self, anchor: int, w1: Sequence[int], w2: Sequence[int]):
        self.relations.append((anchor, tuple(w1), tuple(w2)))


@dataclass
class EnumeratedCategory:
    n_objects: int
    n_morphisms: int
    src: tuple[int, ...]
    tgt: tuple[int, ...]
    identity: tuple[int, ...]
    comp: tuple[tuple[Optional[int], ...], ...]  # comp[g][f] = g after f
    generator_class: list[int]  # generator id -> morphism id
    inverse_generator_class: dict[int, int]  # for invertible generators


class _Table:
    def __init__(self, pres: Presentation, cap: int):
        self.pres = pres
        self.cap = cap
        # effective generator list: originals plus formal inverses
        self.gen_src: list[int] = []
        self.gen_tgt: list[int] = []
        for s, t in pres.generators:
            self.gen_src.append(s)
            self.gen_tgt.append(t)
        self.inv_of: dict[int, int] = {}
        for g in sorted(pres.invertible):
            gid = len(self.gen_src)
            self.gen_src.append(pres.generators[g][1])
            self.gen_tgt.append(pres.generators[g][0])
            self.inv_of[g] = gid
        self.n_gens = len(self.gen_src)

        self.parent: list[int] = []
        self.csrc: list[int] = []
        self.ctgt: list[int] = []
        self.rows: list[dict[int, int]] = []
        self.pending: list[tuple[int, int]] = []

        self.id_class = [self._new_class(o, o) for o in range(pres.n_objects)]

        self.rel_words: list[tuple[int, tuple[int, ...], tuple[int, ...]]] = []
        for anchor, w1, w2 in pres.relations:
            self.rel_words.append((anchor, w1, w2))
        # unit relations for formal inverses
        for g, gi in self.inv_of.items():
            s, t = pres.generators[g]
            self.rel_words.append((s, (g, gi), ()))
            self.rel_words.append((t, (gi, g), ()))

    # -- union-find

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def _new_class(self, s: int, t: int) -> int:
        if len(self.parent) >= self.cap:
            raise SizeLimit(
                f"presentation enumeration exceeded cap of {self.cap} classes"
            )
        idx = len(self.parent)
        self.parent.append(idx)
        self.csrc.append(s)
        self.ctgt.append(t)
        self.rows.append({})
        return idx

    def _union(self, a: int, b: int):
        self.pending.append((a, b))
        while self.pending:
            x, y = self.pending.pop()
            x, y = self.find(x), self.find(y)
            if x == y:
                continue
            if y < x:
                x, y = y, x
            # merge y into x
            self.parent[y] = x
            for g, t in self.rows[y].items():
                if g in self.rows[x]:
                    self.pending.append((self.rows[x][g], t))
                else:
                    self.rows[x][g] = t

    # -- right action

    def act(self, cls: int, gen: int, define: bool = True) -> Optional[int]:
        cls = self.find(cls)
        if self.gen_src[gen] != self.ctgt[cls]:
            raise ValueError("non-composable extension")
        got = self.rows[cls].get(gen)
        if got is not None:
            return self.find(got)
        if not define:
            return None
        new = self._new_class(self.csrc[cls], self.gen_tgt[gen])
        self.rows[self.find(cls)][gen] = new
        return new

    def trace(self, cls: int, word: tuple[int, ...], define: bool = True) -> Optional[int]:
        cur = cls
        for g in word:
            cur = self.act(cur, g, define)
            if cur is None:
                return None
        return self.find(cur)

    # -- main loop

    def run(self):
        while True:
            changed = False
            i = 0
            while i < len(self.parent):
                if self.find(i) != i:
                    i += 1
                    continue
                # enforce relations anchored at tgt(i)
                for anchor, w1, w2 in self.rel_words:
                    if self.ctgt[self.find(i)] != anchor:
                        continue
                    a = self.trace(i, w1)
                    b = self.trace(i, w2)
                    if self.find(a) != self.find(b):
                        self._union(a, b)
                        changed = True
                # complete the row
                cls = self.find(i)
                if cls == i:
                    for g in range(self.n_gens):
                        if self.gen_src[g] == self.ctgt[i]:
                            if g not in self.rows[i]:
                                self.act(i, g)
                                changed = True
                i += 1
            if not changed:
                break

    def build(self) -> EnumeratedCategory:
        live = sorted({self.find(i) for i in range(len(self.parent))})
        index = {c: k for k, c in enumerate(live)}
        n = len(live)
        src = tuple(self.csrc[c] for c in live)
        tgt = tuple(self.ctgt[c] for c in live)
        identity = tuple(index[self.find(self.id_class[o])] for o in range(self.pres.n_objects))
        # comp[g][f]: f then g; walk g's defining word from f.
        # recover a defining word per class by BFS over rows
        word_of: dict[int, tuple[int, ...]] = {}
        from collections import deque

        dq = deque()
        for o in range(self.pres.n_objects):
            c = self.find(self.id_class[o])
            if c not in word_of:
                word_of[c] = ()
                dq.append(c)
        while dq:
            c = dq.popleft()
            for g, t in sorted(self.rows[c].items()):
                t = self.find(t)
                if t not in word_of:
                    word_of[t] = word_of[c] + (g,)
                    dq.append(t)
        comp: list[list[Optional[int]]] = [[None] * n for _ in range(n)]
        for fi, fc in enumerate(live):
            for gi, gc in enumerate(live):
                if src[gi] != tgt[fi]:
                    continue
                res = self.trace(fc, word_of[gc], define=False)
                if res is None:
                    raise AssertionError("incomplete table after closure")
                comp[gi][fi] = index[self.find(res)]
        generator_class = []
        for g in range(len(self.pres.generators)):
            s = self.pres.generators[g][0]
            c = self.trace(self.id_class[s], (g,), define=False)
            generator_class.append(index[self.find(c)])
        inverse_generator_class = {}
        for g, gi in self.inv_of.items():
            s = self.gen_src[gi]
            c = self.trace(self.id_class[s], (gi,), define=False)
            inverse_generator_class[g] = index[self.find(c)]
        return EnumeratedCategory(
            n_objects=self.pres.n_objects,
            n_morphisms=n,
            src=src,
            tgt=tgt,
            identity=identity,
            comp=tuple(tuple(row) for row in comp),
            generator_class=generator_class,
            inverse_generator_class=inverse_generator_class,
        )


def enumerate_presentation(pres: Presentation, cap: int = DEFAULT_CAP) -> EnumeratedCategory:
    """Close the presentation into explicit composition tables.

    Raises :class:`SizeLimit` if more than ``cap`` word classes appear.
    """
    table = _Table(pres, cap)
    table.run()
    return table.build()
