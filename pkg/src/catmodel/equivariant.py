"""Finite group actions on categories: transport groupoid, coinvariants,
cofibrant and fibrant replacement, strict (co)limits over the acting group,
the invariants category of cocycle pairs, and orbit-value formulas.

Actions are strict: a homomorphism from the group into automorphisms of the
category.  Cocycle components are drawn from the stored finite marked sets,
which keeps every enumeration exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Union

from .abgrp import AbHom, FinAbGroup, direct_sum_with_maps
from .markedcat import (
    CatFunctor,
    Diagram,
    FinMarkedCat,
    colimit,
    ma,
)
from .modelstruct import is_weq, sharp_counit, sharp_with_structure
from .preaddcat import (
    AddFunctor,
    FinPreAddCat,
    PMor,
    PreAddFunCat,
    _express_in_kernel,
    fun_plus_groupoid,
)
from .presentations import DEFAULT_CAP, SizeLimit
from .verdict import Verdict

__all__ = [
    "FinGroup",
    "NotASubgroup",
    "cyclic_group",
    "product_group",
    "bg_groupoid",
    "transport_groupoid",
    "GAction",
    "trivial_action",
    "coinvariants",
    "cofibrant_replacement",
    "strict_colim_bg",
    "strict_lim_bg",
    "invariants_hat",
    "InvariantsHat",
    "coinvariants_chain_check",
    "fibrant_replacement",
    "FibrantReplacement",
    "psi_check",
    "orbit_value_J",
    "orbit_value_C",
    "restrict_action",
]


class NotASubgroup(ValueError):
    pass


@dataclass(frozen=True)
class FinGroup:
    """Elements 0..n-1 with a multiplication table; index 0 need not be the
    unit, which is found and cached from the table."""

    table: tuple[tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return len(self.table)

    def mult(self, a: int, b: int) -> int:
        return self.table[a][b]

    def unit(self) -> int:
        for e in range(self.order):
            if all(
                self.mult(e, x) == x and self.mult(x, e) == x
                for x in range(self.order)
            ):
                return e
        raise ValueError("no unit element")

    def inverse(self, a: int) -> int:
        e = self.unit()
        for b in range(self.order):
            if self.mult(a, b) == e and self.mult(b, a) == e:
                return b
        raise ValueError("no inverse")

    def validate(self) -> list[str]:
        errs = []
        n = self.order
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if self.mult(self.mult(a, b), c) != self.mult(a, self.mult(b, c)):
                        errs.append(f"associativity fails at ({a},{b},{c})")
        try:
            e = self.unit()
        except ValueError:
            errs.append("no unit")
            return errs
        for a in range(n):
            try:
                self.inverse(a)
            except ValueError:
                errs.append(f"no inverse for {a}")
        return errs

    def elements(self) -> range:
        return range(self.order)

    def subgroup(self, members: list[int]) -> "FinGroup":
        """The subgroup on the listed elements; raises NotASubgroup."""
        members = sorted(set(members))
        pos = {g: i for i, g in enumerate(members)}
        if self.unit() not in pos:
            raise NotASubgroup("unit not in the subset")
        table = []
        for a in members:
            row = []
            for b in members:
                c = self.mult(a, b)
                if c not in pos:
                    raise NotASubgroup(f"{a}*{b} leaves the subset")
                row.append(pos[c])
            table.append(tuple(row))
        for a in members:
            if self.inverse(a) not in pos:
                raise NotASubgroup(f"inverse of {a} leaves the subset")
        return FinGroup(tuple(table))


def cyclic_group(n: int) -> FinGroup:
    return FinGroup(tuple(tuple((a + b) % n for b in range(n)) for a in range(n)))


def product_group(g: FinGroup, h: FinGroup) -> FinGroup:
    n, m = g.order, h.order

    def idx(a, b):
        return a * m + b

    table = [[0] * (n * m) for _ in range(n * m)]
    for a1 in range(n):
        for b1 in range(m):
            for a2 in range(n):
                for b2 in range(m):
                    table[idx(a1, b1)][idx(a2, b2)] = idx(
                        g.mult(a1, a2), h.mult(b1, b2)
                    )
    return FinGroup(tuple(tuple(r) for r in table))


# ---------------------------------------------------------------------------
# groupoids from groups


def bg_groupoid(g: FinGroup) -> FinMarkedCat:
    """One object with the group as automorphisms (all marked)."""
    n = g.order
    comp = [[g.mult(m2, m1) for m1 in range(n)] for m2 in range(n)]
    return FinMarkedCat(
        1,
        (0,) * n,
        (0,) * n,
        (g.unit(),),
        tuple(tuple(r) for r in comp),
        frozenset(range(n)),
    )


def transport_groupoid(g: FinGroup) -> tuple[FinMarkedCat, list[CatFunctor]]:
    """The codiscrete groupoid on the elements, with the left-multiplication
    action; returns the groupoid and one automorphism per element."""
    n = g.order

    def midx(a, b):
        return a * n + b

    src = tuple(a for a in range(n) for _ in range(n))
    tgt = tuple(b for _ in range(n) for b in range(n))
    identity = tuple(midx(a, a) for a in range(n))
    nm = n * n
    comp = [[None] * nm for _ in range(nm)]
    for a in range(n):
        for b in range(n):
            for c in range(n):
                comp[midx(b, c)][midx(a, b)] = midx(a, c)
    cat = FinMarkedCat(
        n, src, tgt, identity, tuple(tuple(r) for r in comp),
        frozenset(range(nm)),
    )
    action = [
        CatFunctor(
            cat,
            cat,
            tuple(g.mult(k, a) for a in range(n)),
            tuple(
                midx(g.mult(k, a), g.mult(k, b))
                for a in range(n)
                for b in range(n)
            ),
        )
        for k in range(n)
    ]
    return cat, action


# ---------------------------------------------------------------------------
# actions


Base = Union[FinMarkedCat, FinPreAddCat]
Auto = Union[CatFunctor, AddFunctor]


@dataclass
class GAction:
    base: Base
    group: FinGroup
    action: tuple[Auto, ...]  # one automorphism per group element

    @property
    def is_preadd(self) -> bool:
        return isinstance(self.base, FinPreAddCat)

    def validate(self) -> list[str]:
        errs = []
        g = self.group
        errs.extend(g.validate())
        if len(self.action) != g.order:
            return errs + ["one automorphism required per element"]
        for k, F in enumerate(self.action):
            sub = F.validate()
            if sub:
                errs.append(f"action of {k} is not a functor: {sub[0]}")
        e = g.unit()
        ide = (
            AddFunctor.identity(self.base)
            if self.is_preadd
            else CatFunctor.identity(self.base)
        )
        if self.action[e] != ide:
            errs.append("unit does not act as the identity")
        for a in g.elements():
            for b in g.elements():
                # left action: (ab) . x = a . (b . x)
                if self.action[b].then(self.action[a]) != self.action[g.mult(a, b)]:
                    errs.append(f"action is not a homomorphism at ({a},{b})")
        return errs


def trivial_action(base: Base, group: FinGroup) -> GAction:
    ide = (
        AddFunctor.identity(base)
        if isinstance(base, FinPreAddCat)
        else CatFunctor.identity(base)
    )
    return GAction(base, group, tuple(ide for _ in group.elements()))


def restrict_action(x: GAction, members: list[int]) -> GAction:
    sub = x.group.subgroup(members)
    ordered = sorted(set(members))
    return GAction(x.base, sub, tuple(x.action[g] for g in ordered))


# ---------------------------------------------------------------------------
# coinvariants and cofibrant replacement


def coinvariants(a: Base, g: FinGroup, cap: int = DEFAULT_CAP) -> Base:
    """The strict model of homotopy orbits for the trivial action:
    tensor (or product) with the one-object groupoid of the group."""
    from .modelstruct import sharp

    return sharp(a, bg_groupoid(g), cap)


def _tensor_add_functor(t_src, t_tgt, f: AddFunctor, g: AddFunctor) -> AddFunctor:
    """f (x) g on tensor categories, via Kronecker hom matrices."""
    A, B = t_src.left, t_src.right
    nB = B.n_objects
    obj_map = []
    for o in range(t_src.cat.n_objects):
        a, b = divmod(o, nB)
        obj_map.append(t_tgt.obj(f.obj_map[a], g.obj_map[b]))
    hom_maps = []
    for o1 in range(t_src.cat.n_objects):
        a1, b1 = divmod(o1, nB)
        row = []
        for o2 in range(t_src.cat.n_objects):
            a2, b2 = divmod(o2, nB)
            src_grp = t_src.cat.hom(o1, o2)
            tgt_grp = t_tgt.cat.hom(obj_map[o1], obj_map[o2])
            fa = f.hom_maps[a1][a2].matrix
            gb = g.hom_maps[b1][b2].matrix
            nb_src = B.hom(b1, b2).n
            nb_tgt = t_tgt.right.hom(g.obj_map[b1], g.obj_map[b2]).n
            rows = []
            for i in range(A.hom(a1, a2).n):
                for j in range(nb_src):
                    vec = [0] * tgt_grp.n
                    for i2, fv in enumerate(fa[i]):
                        if fv == 0:
                            continue
                        for j2, gv in enumerate(gb[j]):
                            if gv:
                                vec[i2 * nb_tgt + j2] += fv * gv
                    rows.append(tuple(vec))
            row.append(AbHom(src_grp, tgt_grp, rows))
        hom_maps.append(tuple(row))
    return AddFunctor(t_src.cat, t_tgt.cat, tuple(obj_map), tuple(hom_maps))


def _product_cat_functor(A, G1, F: CatFunctor, H: CatFunctor, P1, P2) -> CatFunctor:
    nb1, mb1 = G1.n_objects, G1.n_morphisms
    cod_g = H.cod
    nb2, mb2 = cod_g.n_objects, cod_g.n_morphisms
    obj_map = tuple(
        F.obj_map[o // nb1] * nb2 + H.obj_map[o % nb1] for o in range(P1.n_objects)
    )
    mor_map = tuple(
        F.mor_map[m // mb1] * mb2 + H.mor_map[m % mb1]
        for m in range(P1.n_morphisms)
    )
    return CatFunctor(P1, P2, obj_map, mor_map)


@dataclass
class CofibrantReplacement:
    replaced: GAction
    comparison: Auto  # X sharp transport -> X, a non-equivariant weq
    sharp_structure: object


def cofibrant_replacement(x: GAction, cap: int = DEFAULT_CAP) -> CofibrantReplacement:
    """Tensor with the transport groupoid, diagonal action; the comparison
    map to the base is verified to be a (non-equivariant) weak equivalence."""
    tg, tg_action = transport_groupoid(x.group)
    if x.is_preadd:
        t = sharp_with_structure(x.base, tg, cap)
        _, counit = sharp_counit(x.base, tg, cap)
        from .preaddcat import lin_Z
        from .classifiers import lin_functor

        lin_tg = lin_Z(ma(tg))
        action = []
        for k in x.group.elements():
            lk = lin_functor(tg_action[k], lin_tg, lin_tg)
            action.append(_tensor_add_functor(t, t, x.action[k], lk))
        replaced = GAction(t.cat, x.group, tuple(action))
        comp = counit
    else:
        from .markedcat import product

        P, pA, pB = product(x.base, ma(tg))
        action = []
        for k in x.group.elements():
            action.append(
                _product_cat_functor(x.base, ma(tg), x.action[k], tg_action[k], P, P)
            )
        replaced = GAction(P, x.group, tuple(action))
        comp = pA
        t = (P, pA, pB)
    errs = replaced.validate()
    if errs:
        raise AssertionError("cofibrant replacement is not an action: " + errs[0])
    if not is_weq(comp):
        raise AssertionError("comparison map is not a weak equivalence")
    return CofibrantReplacement(replaced, comp, t)


# ---------------------------------------------------------------------------
# strict colimits and limits over the acting group


def strict_colim_bg(x: GAction, cap: int = DEFAULT_CAP):
    """Coequalizer of the action with the colimit marking rule.

    Table flavor: fully generic (word enumeration).  Enriched flavor:
    supported for trivial actions and actions free on objects (the orbit
    category); other enriched quotients raise SizeLimit."""
    if not x.is_preadd:
        index = bg_groupoid(x.group)
        diag = Diagram(
            index=index,
            values=(x.base,),
            arrows=tuple(x.action[m] for m in range(index.n_morphisms)),
        )
        errs = diag.validate()
        if errs:
            raise ValueError(errs[0])
        out, cocone = colimit(diag, cap)
        return out, cocone[0]
    if all(
        x.action[k] == AddFunctor.identity(x.base) for k in x.group.elements()
    ):
        return x.base, AddFunctor.identity(x.base)
    return _colim_free_preadd(x)


def _orbits(x: GAction) -> tuple[list[int], dict[int, int], dict[int, int]]:
    """Object orbits: representatives, orbit index and aligning element."""
    seen: dict[int, tuple[int, int]] = {}
    reps = []
    for a in range(x.base.n_objects):
        if a in seen:
            continue
        rep_idx = len(reps)
        reps.append(a)
        for k in x.group.elements():
            b = x.action[k].obj_map[a]
            if b not in seen:
                seen[b] = (rep_idx, k)  # b = k . rep
    orbit_of = {a: seen[a][0] for a in range(x.base.n_objects)}
    mover = {a: seen[a][1] for a in range(x.base.n_objects)}
    return reps, orbit_of, mover


def _colim_free_preadd(x: GAction):
    base, g = x.base, x.group
    reps, orbit_of, mover = _orbits(x)
    # freeness on objects
    for a in range(base.n_objects):
        stab = [k for k in g.elements() if x.action[k].obj_map[a] == a]
        if len(stab) != 1:
            raise SizeLimit(
                "enriched quotient by a non-free, non-trivial action is not supported"
            )
    n = len(reps)
    books = {}
    groups = [[None] * n for _ in range(n)]
    summand_objs = {}
    for i, r in enumerate(reps):
        for j, s in enumerate(reps):
            targets = sorted({x.action[k].obj_map[s] for k in g.elements()})
            summand_objs[(i, j)] = targets
            comps = [base.hom(r, t) for t in targets]
            D, injs, projs = direct_sum_with_maps(comps)
            groups[i][j] = D
            books[(i, j)] = (injs, projs, targets)
    comp = {}
    for i in range(n):
        for j in range(n):
            for l in range(n):
                gij, gjl, gil = groups[i][j], groups[j][l], groups[i][l]
                if gij.n == 0 or gjl.n == 0:
                    continue
                injs_ij, projs_ij, tg_ij = books[(i, j)]
                injs_jl, projs_jl, tg_jl = books[(j, l)]
                injs_il, _, tg_il = books[(i, l)]
                table = []
                for jj in range(gjl.n):
                    gen_j = gjl.generator(jj)
                    row = []
                    for ii in range(gij.n):
                        gen_i = gij.generator(ii)
                        total = gil.zero()
                        for b_idx, y in enumerate(tg_ij):
                            phi = projs_ij[b_idx](gen_i)  # rep_i -> y
                            if all(c == 0 for c in phi.coords):
                                continue
                            # align: unique u with u . rep_j = y
                            u = mover[y]
                            for c_idx, z in enumerate(tg_jl):
                                psi = projs_jl[c_idx](gen_j)  # rep_j -> z
                                if all(c == 0 for c in psi.coords):
                                    continue
                                uz = x.action[u].obj_map[z]
                                upsi = x.action[u].hom_maps[reps[j]][z](psi)
                                cc = base.compose(
                                    PMor(y, uz, upsi), PMor(reps[i], y, phi)
                                )
                                total = total + injs_il[tg_il.index(uz)](cc.elt)
                        row.append(total.coords)
                    table.append(tuple(row))
                comp[(i, j, l)] = tuple(table)
    identity = []
    for i, r in enumerate(reps):
        injs, _, targets = books[(i, i)]
        identity.append(injs[targets.index(r)](base.identity[r]))
    cat = FinPreAddCat(n, groups, comp, identity)
    marked = []
    for m in base.all_marked():
        i = orbit_of[m.src]
        v = g.inverse(mover[m.src])  # v . src = rep_i
        vm = PMor(
            reps[i],
            x.action[v].obj_map[m.tgt],
            x.action[v].hom_maps[m.src][m.tgt](m.elt),
        )
        j = orbit_of[vm.tgt]
        injs, _, targets = books[(i, j)]
        marked.append(PMor(i, j, injs[targets.index(vm.tgt)](vm.elt)))
    cat = cat.with_marking(marked)
    # quotient functor
    obj_map = tuple(orbit_of[a] for a in range(base.n_objects))
    hom_maps = []
    for a in range(base.n_objects):
        row = []
        for b in range(base.n_objects):
            i, j = orbit_of[a], orbit_of[b]
            v = g.inverse(mover[a])
            vb = x.action[v].obj_map[b]
            injs, _, targets = books[(i, j)]
            act = x.action[v].hom_maps[a][b]
            row.append(act.then(injs[targets.index(vb)]))
        hom_maps.append(tuple(row))
    q = AddFunctor(base, cat, obj_map, tuple(hom_maps))
    return cat, q


def strict_lim_bg(x: GAction):
    """The strictly fixed subcategory, with the limit marking rule."""
    if not x.is_preadd:
        base, g = x.base, x.group
        fixed_obj = [
            a
            for a in base.objects()
            if all(x.action[k].obj_map[a] == a for k in g.elements())
        ]
        fixed_mor = [
            m
            for m in base.morphisms()
            if base.src[m] in fixed_obj
            and base.tgt[m] in fixed_obj
            and all(x.action[k].mor_map[m] == m for k in g.elements())
        ]
        oidx = {a: i for i, a in enumerate(fixed_obj)}
        midx = {m: i for i, m in enumerate(fixed_mor)}
        comp = [[None] * len(fixed_mor) for _ in fixed_mor]
        for gi, gm in enumerate(fixed_mor):
            for fi, fm in enumerate(fixed_mor):
                if base.src[gm] == base.tgt[fm]:
                    comp[gi][fi] = midx[base.comp[gm][fm]]
        sub = FinMarkedCat(
            len(fixed_obj),
            tuple(oidx[base.src[m]] for m in fixed_mor),
            tuple(oidx[base.tgt[m]] for m in fixed_mor),
            tuple(midx[base.identity[a]] for a in fixed_obj),
            tuple(tuple(r) for r in comp),
            frozenset(midx[m] for m in fixed_mor if m in base.marked),
        )
        incl = CatFunctor(
            sub, base, tuple(fixed_obj), tuple(fixed_mor)
        )
        return sub, incl
    base, g = x.base, x.group
    fixed_obj = [
        a
        for a in base.objects()
        if all(x.action[k].obj_map[a] == a for k in g.elements())
    ]
    n = len(fixed_obj)
    books = {}
    groups = [[None] * n for _ in range(n)]
    for i, a in enumerate(fixed_obj):
        for j, b in enumerate(fixed_obj):
            h = base.hom(a, b)
            stacked = None
            total_grp, eq_injs, _ = direct_sum_with_maps(
                [h for _ in g.elements()]
            )
            for k in g.elements():
                diff = AbHom.identity(h) - x.action[k].hom_maps[a][b]
                blk = diff.then(eq_injs[k])
                stacked = blk if stacked is None else stacked + blk
            ker, incl = stacked.kernel()
            groups[i][j] = ker
            books[(i, j)] = incl
    comp = {}
    for i in range(n):
        for j in range(n):
            for l in range(n):
                gij, gjl, gil = groups[i][j], groups[j][l], groups[i][l]
                if gij.n == 0 or gjl.n == 0:
                    continue
                table = []
                for jj in range(gjl.n):
                    psi = books[(j, l)](gjl.generator(jj))
                    row = []
                    for ii in range(gij.n):
                        phi = books[(i, j)](gij.generator(ii))
                        cc = base.compose(
                            PMor(fixed_obj[j], fixed_obj[l], psi),
                            PMor(fixed_obj[i], fixed_obj[j], phi),
                        )
                        from .completions import _express_via

                        row.append(tuple(_express_via(books[(i, l)], cc.elt.coords)))
                    table.append(tuple(row))
                comp[(i, j, l)] = tuple(table)
    from .completions import _express_via

    identity = []
    for i, a in enumerate(fixed_obj):
        identity.append(
            groups[i][i].element(_express_via(books[(i, i)], base.identity[a].coords))
        )
    cat = FinPreAddCat(n, groups, comp, identity)
    marked = []
    for m in base.all_marked():
        if m.src in fixed_obj and m.tgt in fixed_obj:
            if all(
                x.action[k].hom_maps[m.src][m.tgt](m.elt) == m.elt
                for k in x.group.elements()
            ):
                i, j = fixed_obj.index(m.src), fixed_obj.index(m.tgt)
                sol = _express_via(books[(i, j)], m.elt.coords)
                if sol is not None:
                    marked.append(PMor(i, j, groups[i][j].element(sol)))
    cat = cat.with_marking(marked)
    incl_hom = []
    for i, a in enumerate(fixed_obj):
        row = []
        for j, b in enumerate(fixed_obj):
            row.append(books[(i, j)])
        incl_hom.append(tuple(row))
    incl = AddFunctor(cat, base, tuple(fixed_obj), tuple(incl_hom))
    return cat, incl


# ---------------------------------------------------------------------------
# invariants: cocycle pairs


@dataclass
class InvariantsHat:
    cat: FinPreAddCat
    objects: list[tuple[int, tuple[PMor, ...]]]  # (base object, rho per element)
    books: dict


def invariants_hat(x: GAction) -> InvariantsHat:
    """Objects are pairs (A, rho) with rho(g): A -> g(A) marked satisfying
    the cocycle rule; morphisms are the equivariant elements."""
    base, g = x.base, x.group
    e = g.unit()
    objects: list[tuple[int, tuple[PMor, ...]]] = []
    for a in base.objects():
        pools = []
        feasible = True
        for k in g.elements():
            if k == e:
                pools.append([base.id_mor(a)])
                continue
            cands = list(base.marked_mors(a, x.action[k].obj_map[a]))
            if not cands:
                feasible = False
                break
            pools.append(cands)
        if not feasible:
            continue
        for combo in itertools.product(*pools):
            rho = {k: combo[k] for k in g.elements()}
            ok = True
            for k in g.elements():
                for h in g.elements():
                    lhs = base.compose(
                        PMor(
                            x.action[k].obj_map[a],
                            x.action[k].obj_map[rho[h].tgt],
                            x.action[k].hom_maps[a][rho[h].tgt](rho[h].elt),
                        ),
                        rho[k],
                    )
                    if lhs != rho[g.mult(h, k)]:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                objects.append((a, tuple(combo)))
    n = len(objects)
    books = {}
    groups = [[None] * n for _ in range(n)]
    for i, (a, rho) in enumerate(objects):
        for j, (a2, rho2) in enumerate(objects):
            h = base.hom(a, a2)
            stacked = None
            eq_groups = [
                base.hom(a, x.action[k].obj_map[a2]) for k in g.elements()
            ]
            _, eq_injs, _ = direct_sum_with_maps(eq_groups)
            for k in g.elements():
                act = x.action[k].hom_maps[a][a2]
                left = act.then(
                    base.rmul_hom(rho[k], x.action[k].obj_map[a2])
                )
                right = base.lmul_hom(rho2[k], a)
                blk = (left - right).then(eq_injs[k])
                stacked = blk if stacked is None else stacked + blk
            ker, incl = stacked.kernel()
            groups[i][j] = ker
            books[(i, j)] = incl
    from .completions import _express_via

    comp = {}
    for i in range(n):
        for j in range(n):
            for l in range(n):
                gij, gjl = groups[i][j], groups[j][l]
                if gij.n == 0 or gjl.n == 0:
                    continue
                table = []
                for jj in range(gjl.n):
                    psi = books[(j, l)](gjl.generator(jj))
                    row = []
                    for ii in range(gij.n):
                        phi = books[(i, j)](gij.generator(ii))
                        cc = base.compose(
                            PMor(objects[j][0], objects[l][0], psi),
                            PMor(objects[i][0], objects[j][0], phi),
                        )
                        row.append(tuple(_express_via(books[(i, l)], cc.elt.coords)))
                    table.append(tuple(row))
                comp[(i, j, l)] = tuple(table)
    identity = []
    for i, (a, rho) in enumerate(objects):
        identity.append(
            groups[i][i].element(_express_via(books[(i, i)], base.identity[a].coords))
        )
    cat = FinPreAddCat(n, groups, comp, identity)
    marked = []
    for i, (a, rho) in enumerate(objects):
        for j, (a2, rho2) in enumerate(objects):
            for m in base.marked_mors(a, a2):
                sol = _express_via(books[(i, j)], m.elt.coords)
                if sol is not None:
                    marked.append(PMor(i, j, groups[i][j].element(sol)))
    return InvariantsHat(cat.with_marking(marked), objects, books)


# ---------------------------------------------------------------------------
# fibrant replacement


@dataclass
class FibrantReplacement:
    fun_cat: PreAddFunCat
    action: GAction
    unit: AddFunctor  # X -> R(X), a non-equivariant weak equivalence


def fibrant_replacement(x: GAction, cap: int = DEFAULT_CAP) -> FibrantReplacement:
    """Fun+(Q(transport groupoid), X) with the conjugation action."""
    base, g = x.base, x.group
    tg, _ = transport_groupoid(g)
    fc = fun_plus_groupoid(tg, base, cap)
    n = g.order

    def midx(a, b):
        return a * n + b

    fkey = {
        _pfunctor_key(F): i for i, F in enumerate(fc.functors)
    }
    action = []
    for k in g.elements():
        kinv = g.inverse(k)
        obj_map = []
        for F in fc.functors:
            new_obj = tuple(
                x.action[k].obj_map[F.obj_map[g.mult(kinv, h)]] for h in range(n)
            )
            new_mors = []
            for a in range(n):
                for b in range(n):
                    m = F.mor_elts[midx(g.mult(kinv, a), g.mult(kinv, b))]
                    new_mors.append(
                        PMor(
                            x.action[k].obj_map[m.src],
                            x.action[k].obj_map[m.tgt],
                            x.action[k].hom_maps[m.src][m.tgt](m.elt),
                        )
                    )
            key = (new_obj, tuple(m.key() for m in new_mors))
            obj_map.append(fkey[key])
        hom_maps = []
        for i, Fi in enumerate(fc.functors):
            row = []
            for j, Fj in enumerate(fc.functors):
                src_grp = fc.cat.hom(i, j)
                tgt_grp = fc.cat.hom(obj_map[i], obj_map[j])
                rows = []
                for gen in range(src_grp.n):
                    comps = fc.components(i, j, PMor(i, j, src_grp.generator(gen)))
                    new_comps = [None] * n
                    for h in range(n):
                        c = comps[g.mult(kinv, h)]
                        m = PMor(
                            Fi.obj_map[g.mult(kinv, h)],
                            Fj.obj_map[g.mult(kinv, h)],
                            c,
                        )
                        new_comps[h] = x.action[k].hom_maps[m.src][m.tgt](m.elt)
                    coords = _express_in_kernel(
                        fc.component_sum[(obj_map[i], obj_map[j])], new_comps
                    )
                    rows.append(coords)
                row.append(AbHom(src_grp, tgt_grp, rows))
            hom_maps.append(tuple(row))
        action.append(AddFunctor(fc.cat, fc.cat, tuple(obj_map), tuple(hom_maps)))
    r_action = GAction(fc.cat, g, tuple(action))
    errs = r_action.validate()
    if errs:
        raise AssertionError("fibrant replacement action invalid: " + errs[0])
    # unit: constant functors
    unit_obj = []
    for a in base.objects():
        key = (
            tuple(a for _ in range(n)),
            tuple(PMor(a, a, base.identity[a]).key() for _ in range(n * n)),
        )
        unit_obj.append(fkey[key])
    unit_hom = []
    for a in base.objects():
        row = []
        for b in base.objects():
            src_grp = base.hom(a, b)
            tgt_grp = fc.cat.hom(unit_obj[a], unit_obj[b])
            rows = []
            for gen in src_grp.generators():
                comps = [gen for _ in range(n)]
                rows.append(
                    _express_in_kernel(
                        fc.component_sum[(unit_obj[a], unit_obj[b])], comps
                    )
                )
            row.append(AbHom(src_grp, tgt_grp, rows))
        unit_hom.append(tuple(row))
    unit = AddFunctor(base, fc.cat, tuple(unit_obj), tuple(unit_hom))
    from .preaddcat import is_weak_equivalence_add

    if is_weak_equivalence_add(unit).verdict is not Verdict.TRUE:
        raise AssertionError("fibrant replacement unit is not a weak equivalence")
    return FibrantReplacement(fc, r_action, unit)


def _pfunctor_key(F) -> tuple:
    return (tuple(F.obj_map), tuple(m.key() for m in F.mor_elts))


# ---------------------------------------------------------------------------
# the comparison isomorphism


def psi_check(x: GAction, cap: int = DEFAULT_CAP) -> bool:
    """Construct the comparison from the strict limit of the fibrant
    replacement to the invariants category and verify it is an isomorphism
    of marked pre-additive categories."""
    base, g = x.base, x.group
    e = g.unit()
    n = g.order
    fr = fibrant_replacement(x, cap)
    lim_cat, incl = strict_lim_bg(fr.action)
    inv = invariants_hat(x)

    def midx(a, b):
        return a * n + b

    # objects: fixed functors phi -> (phi(e), (phi(e -> g))_g)
    inv_index = {}
    for i, (a, rho) in enumerate(inv.objects):
        inv_index[(a, tuple(m.key() for m in rho))] = i
    obj_map = []
    for o in range(lim_cat.n_objects):
        fidx = incl.obj_map[o]
        F = fr.fun_cat.functors[fidx]
        a = F.obj_map[e]
        rho = tuple(F.mor_elts[midx(e, k)] for k in g.elements())
        key = (a, tuple(m.key() for m in rho))
        if key not in inv_index:
            return False
        obj_map.append(inv_index[key])
    if sorted(obj_map) != list(range(inv.cat.n_objects)):
        return False
    # morphisms: hom-group isomorphisms via the e-component
    for o1 in range(lim_cat.n_objects):
        for o2 in range(lim_cat.n_objects):
            src_grp = lim_cat.hom(o1, o2)
            i1, i2 = obj_map[o1], obj_map[o2]
            tgt_grp = inv.cat.hom(i1, i2)
            f1, f2 = incl.obj_map[o1], incl.obj_map[o2]
            rows = []
            ok = True
            from .completions import _express_via

            for gen in range(src_grp.n):
                rcoords = incl.hom_maps[o1][o2](src_grp.generator(gen))
                comps = fr.fun_cat.components(
                    f1, f2, PMor(f1, f2, rcoords)
                )
                a_e = comps[e]
                sol = _express_via(inv.books[(i1, i2)], a_e.coords)
                if sol is None:
                    ok = False
                    break
                rows.append(sol)
            if not ok:
                return False
            h = AbHom(src_grp, tgt_grp, rows)
            if not h.is_iso():
                return False
            # marking preserved both ways
            src_marked = {
                tuple(h(m.elt).canonical())
                for m in lim_cat.marked_mors(o1, o2)
            }
            tgt_marked = {
                tuple(m.elt.canonical()) for m in inv.cat.marked_mors(i1, i2)
            }
            if src_marked != tgt_marked:
                return False
    return True


def coinvariants_chain_check(a: FinPreAddCat, g: FinGroup, cap: int = DEFAULT_CAP) -> bool:
    """Verify strict_colim_bg(cofibrant_replacement(constant a)) is
    isomorphic to coinvariants(a, g), by constructing the comparison functor
    summand-by-summand and checking it is an isomorphism of marked
    pre-additive categories."""
    x = trivial_action(a, g)
    cr = cofibrant_replacement(x, cap)
    colim, q = strict_colim_bg(cr.replaced)
    coin = coinvariants(a, g, cap)
    n = g.order
    if colim.n_objects != a.n_objects or coin.n_objects != a.n_objects:
        return False
    reps, orbit_of, mover = _orbits(cr.replaced)

    def try_twist(twist) -> bool:
        obj_map = []
        for i, r in enumerate(reps):
            obj_map.append(r // n)
        hom_maps = []
        for i, r in enumerate(reps):
            ai = r // n
            row = []
            for j, s in enumerate(reps):
                aj = s // n
                src_grp = colim.hom(i, j)
                tgt_grp = coin.hom(ai, aj)
                na = a.hom(ai, aj).n
                rows = [None] * src_grp.n
                # colim generator (target block (aj, h), tensor gen iA)
                for h in range(n):
                    for iA in range(na):
                        vec = [0] * tgt_grp.n
                        vec[iA * n + twist(h)] = 1
                        rows[h * na + iA] = tuple(vec)
                row.append(AbHom(src_grp, tgt_grp, rows))
            hom_maps.append(tuple(row))
        F = AddFunctor(colim, coin, tuple(obj_map), tuple(hom_maps))
        if F.validate():
            return False
        for i in range(colim.n_objects):
            for j in range(colim.n_objects):
                if not F.hom_maps[i][j].is_iso():
                    return False
        src_marked = {
            (F.obj_map[m.src], F.obj_map[m.tgt], F.on_mor(m).elt.canonical())
            for m in colim.all_marked()
        }
        tgt_marked = {
            (m.src, m.tgt, m.elt.canonical()) for m in coin.all_marked()
        }
        return src_marked == tgt_marked

    return try_twist(lambda h: h) or try_twist(lambda h: g.inverse(h))


# ---------------------------------------------------------------------------
# orbit values


def orbit_value_J(a: Base, g: FinGroup, members: list[int], cap: int = DEFAULT_CAP) -> Base:
    """The coinvariants value at the orbit of the listed subgroup."""
    h = g.subgroup(members)
    return coinvariants(a, h, cap)


def orbit_value_C(x: GAction, members: list[int]) -> InvariantsHat:
    """The invariants value at the orbit of the listed subgroup."""
    return invariants_hat(restrict_action(x, members))
