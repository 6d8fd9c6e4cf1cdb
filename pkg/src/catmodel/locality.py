"""Structural additivity and idempotent-completeness checks, cross-validated
against simplicial locality at levels 0..2.

All bounded searches are three-valued: FALSE only comes with a certificate
(canonical-form obstructions on hom groups, or exhaustive refutation of the
bilinear splitting system modulo a small integer); otherwise exhausting the
bound yields INCONCLUSIVE.  Witnesses are canonical: the first found in a
deterministic search order, one per tested pair or idempotent.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .abgrp import AbElement, FinAbGroup, direct_sum, solve_left, vec_mat, vstack
from .preaddcat import FinPreAddCat, PMor
from .verdict import Verdict

__all__ = [
    "BiproductWitness",
    "SplitWitness",
    "LocalityReport",
    "check_zero",
    "find_biproduct",
    "find_splitting",
    "check_binary_sums",
    "check_marked_sum_closure",
    "check_idempotent_complete",
    "is_local_simplicial",
    "is_additive",
    "bounded_idempotents",
    "induced_sum_morphism",
]


@dataclass(frozen=True)
class BiproductWitness:
    a: int
    b: int
    s: int
    i1: PMor
    i2: PMor
    p1: PMor
    p2: PMor

    def verify(self, cat: FinPreAddCat) -> bool:
        if cat.compose(self.p1, self.i1) != cat.id_mor(self.a):
            return False
        if cat.compose(self.p2, self.i2) != cat.id_mor(self.b):
            return False
        total = cat.compose(self.i1, self.p1) + cat.compose(self.i2, self.p2)
        return total == cat.id_mor(self.s)


@dataclass(frozen=True)
class SplitWitness:
    obj: int
    e: PMor
    s: int
    i: PMor  # s -> obj
    p: PMor  # obj -> s

    def verify(self, cat: FinPreAddCat) -> bool:
        return (
            cat.compose(self.p, self.i) == cat.id_mor(self.s)
            and cat.compose(self.i, self.p) == self.e
        )


@dataclass
class LocalityReport:
    has_zero: Verdict = Verdict.INCONCLUSIVE
    zero_witness: Optional[int] = None
    binary_sums: Verdict = Verdict.INCONCLUSIVE
    sum_witnesses: dict = field(default_factory=dict)
    marked_sum_closure: Verdict = Verdict.INCONCLUSIVE
    idempotent_splittings: Verdict = Verdict.INCONCLUSIVE
    split_witnesses: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# zero objects (exact)


def check_zero(cat: FinPreAddCat) -> tuple[Verdict, Optional[int]]:
    """An object is a zero object iff its End group is trivial (id = 0)."""
    for a in cat.objects():
        if cat.hom(a, a).is_trivial():
            return Verdict.TRUE, a
    return Verdict.FALSE, None


def zero_objects(cat: FinPreAddCat) -> list[int]:
    return [a for a in cat.objects() if cat.hom(a, a).is_trivial()]


# ---------------------------------------------------------------------------
# binary sums


def _sum_form_refuted(cat: FinPreAddCat, a: int, b: int, s: int) -> bool:
    """Certificate that s cannot be a biproduct of a and b: some probe hom
    group has the wrong canonical form."""
    for x in cat.objects():
        want = direct_sum([cat.hom(x, a), cat.hom(x, b)]).canonical_form()
        if cat.hom(x, s).canonical_form() != want:
            return True
        want = direct_sum([cat.hom(a, x), cat.hom(b, x)]).canonical_form()
        if cat.hom(s, x).canonical_form() != want:
            return True
    return False


def _solve_linear_for(cat, src_grp: FinAbGroup, equations) -> Optional[tuple[int, ...]]:
    """One integer solution x of a stack of affine equations.

    ``equations`` is a list of (matrix_rows, target_group, target_coords)
    with one row per generator of ``src_grp``.
    """
    if src_grp.n == 0:
        for rows, tgt_grp, tgt in equations:
            if not tgt_grp.is_zero(tuple(-t for t in tgt)):
                return None
        return ()
    cols = []
    rel_rows = []
    target = []
    offset = 0
    total_cols = sum(tgt_grp.n for _, tgt_grp, _ in equations)
    stacked = [[0] * total_cols for _ in range(src_grp.n)]
    for rows, tgt_grp, tgt in equations:
        for i in range(src_grp.n):
            for j in range(tgt_grp.n):
                stacked[i][offset + j] = rows[i][j]
        target.extend(tgt)
        offset += tgt_grp.n
    offset = 0
    for rows, tgt_grp, _ in equations:
        for r in tgt_grp.relations:
            row = [0] * total_cols
            row[offset : offset + tgt_grp.n] = list(r)
            rel_rows.append(row)
        offset += tgt_grp.n
    a = vstack(
        tuple(tuple(r) for r in stacked),
        tuple(tuple(r) for r in rel_rows),
    )
    z = solve_left(a, tuple(target))
    if z is None:
        return None
    return z[: src_grp.n]


def find_biproduct(
    cat: FinPreAddCat, a: int, b: int, bound: int
) -> tuple[Verdict, Optional[BiproductWitness]]:
    """Search a biproduct witness for (a, b) within the coefficient bound.

    FALSE only when every candidate object is refuted by hom-group canonical
    forms; INCONCLUSIVE when the bound is exhausted otherwise."""
    candidates = [
        s for s in cat.objects() if not _sum_form_refuted(cat, a, b, s)
    ]
    if not candidates:
        return Verdict.FALSE, None
    for s in candidates:
        hom_as = cat.hom(a, s)
        hom_sa = cat.hom(s, a)
        hom_bs = cat.hom(b, s)
        id_a, id_b, id_s = cat.id_mor(a), cat.id_mor(b), cat.id_mor(s)
        for i1_elt in hom_as.bounded_elements(bound):
            i1 = PMor(a, s, i1_elt)
            # p1 . i1 = id_a : affine in p1
            rows_p1 = [
                cat.compose_coords(a, s, a, g.coords, i1_elt.coords)
                for g in hom_sa.generators()
            ]
            base = _solve_linear_for(
                cat, hom_sa, [(rows_p1, cat.hom(a, a), id_a.elt.coords)]
            )
            if base is None:
                continue
            # enumerate the affine lattice of p1 solutions within bound
            from .abgrp import kernel_basis

            ker = kernel_basis(
                vstack(
                    tuple(tuple(r) for r in rows_p1), cat.hom(a, a).relations
                )
            )
            ker = tuple(row[: hom_sa.n] for row in ker)
            seen = set()
            for combo in _bounded_combinations(len(ker), 1):
                p1_coords = list(base)
                for c, row in zip(combo, ker):
                    for k in range(hom_sa.n):
                        p1_coords[k] += c * row[k]
                p1can = hom_sa.canonical_coords(p1_coords)
                if p1can in seen:
                    continue
                seen.add(p1can)
                if any(abs(x) > max(bound, 1) for x in p1_coords):
                    continue
                p1 = PMor(s, a, hom_sa.element(p1_coords))
                if cat.compose(p1, i1) != id_a:
                    continue
                e2 = id_s - cat.compose(i1, p1)
                for i2_elt in hom_bs.bounded_elements(bound):
                    i2 = PMor(b, s, i2_elt)
                    if cat.compose(PMor(s, s, e2.elt), i2) != i2:
                        continue
                    hom_sb = cat.hom(s, b)
                    rows_pi = [
                        cat.compose_coords(b, s, b, g.coords, i2_elt.coords)
                        for g in hom_sb.generators()
                    ]
                    rows_ip = [
                        cat.compose_coords(s, b, s, i2_elt.coords, g.coords)
                        for g in hom_sb.generators()
                    ]
                    p2_coords = _solve_linear_for(
                        cat,
                        hom_sb,
                        [
                            (rows_pi, cat.hom(b, b), id_b.elt.coords),
                            (rows_ip, cat.hom(s, s), e2.elt.coords),
                        ],
                    )
                    if p2_coords is None:
                        continue
                    p2 = PMor(s, b, hom_sb.element(p2_coords))
                    w = BiproductWitness(a, b, s, i1, i2, p1, p2)
                    if w.verify(cat):
                        return Verdict.TRUE, w
    return Verdict.INCONCLUSIVE, None


def _bounded_combinations(n: int, bound: int):
    if n == 0:
        yield ()
        return
    for combo in itertools.product(range(-bound, bound + 1), repeat=n):
        yield combo


def check_binary_sums(
    cat: FinPreAddCat, coeff_bound: int = 3, pairs: Optional[Sequence[tuple[int, int]]] = None
) -> tuple[Verdict, dict]:
    """Search biproduct witnesses for every tested pair of objects.

    ``pairs`` defaults to all unordered pairs; rank-truncated categories may
    pass the representable pairs instead."""
    if pairs is None:
        pairs = [
            (a, b) for a in cat.objects() for b in cat.objects() if a <= b
        ]
    witnesses: dict = {}
    verdict = Verdict.TRUE
    for a, b in pairs:
        v, w = find_biproduct(cat, a, b, coeff_bound)
        witnesses[(a, b)] = w if v else v
        if v is Verdict.FALSE:
            verdict = Verdict.FALSE
        elif v is Verdict.INCONCLUSIVE and verdict is not Verdict.FALSE:
            verdict = Verdict.INCONCLUSIVE
    return verdict, witnesses


def induced_sum_morphism(
    cat: FinPreAddCat,
    w_src: BiproductWitness,
    w_tgt: BiproductWitness,
    f: PMor,
    g: PMor,
) -> PMor:
    """f + g on chosen sum representatives: i1' f p1 + i2' g p2."""
    part1 = cat.compose(w_tgt.i1, cat.compose(f, w_src.p1))
    part2 = cat.compose(w_tgt.i2, cat.compose(g, w_src.p2))
    return part1 + part2


def check_marked_sum_closure(
    cat: FinPreAddCat, witnesses: dict
) -> tuple[Verdict, Optional[tuple]]:
    """Closure of the marking under witnessed sums.

    For every two marked morphisms and every witnessed source/target sum of
    their endpoints, the induced sum must be marked."""
    wmap = {
        k: w for k, w in witnesses.items() if isinstance(w, BiproductWitness)
    }
    for f in cat.all_marked():
        for g in cat.all_marked():
            src_w = wmap.get((f.src, g.src)) or wmap.get((g.src, f.src))
            tgt_w = wmap.get((f.tgt, g.tgt)) or wmap.get((g.tgt, f.tgt))
            if src_w is None or tgt_w is None:
                continue
            if (src_w.a, src_w.b) != (f.src, g.src):
                f2, g2 = g, f
            else:
                f2, g2 = f, g
            if (tgt_w.a, tgt_w.b) != (f2.tgt, g2.tgt):
                continue
            total = induced_sum_morphism(cat, src_w, tgt_w, f2, g2)
            if not cat.is_marked(total):
                return Verdict.FALSE, (f, g, src_w.s, tgt_w.s)
    return Verdict.TRUE, None


# ---------------------------------------------------------------------------
# idempotents


def bounded_idempotents(
    cat: FinPreAddCat, a: int, bound: int, enum_cap: int = 200_000
) -> tuple[Verdict, list[PMor]]:
    """Idempotents of End(a) with bounded coefficients, closed under
    complement; INCONCLUSIVE flag when the enumeration is infeasible."""
    end = cat.hom(a, a)
    if end.n > 0 and (2 * bound + 1) ** end.n > enum_cap:
        return Verdict.INCONCLUSIVE, []
    out = {}
    ida = cat.id_mor(a)
    for elt in end.bounded_elements(bound):
        m = PMor(a, a, elt)
        if cat.compose(m, m) == m:
            out[m.key()] = m
            comp = ida - m
            out[comp.key()] = comp
    return Verdict.TRUE, sorted(out.values(), key=lambda m: m.key())


def _summand_refuted(inner: FinAbGroup, outer: FinAbGroup) -> bool:
    """Certificate that ``inner`` is not a direct summand of ``outer``."""
    if inner.free_rank() > outer.free_rank():
        return True
    return not _multiset_contained(
        _elementary_divisors(inner), _elementary_divisors(outer)
    )


def _elementary_divisors(g: FinAbGroup) -> list[int]:
    out = []
    for d in g.invariant_factors():
        n = d
        p = 2
        while p * p <= n:
            if n % p == 0:
                q = 1
                while n % p == 0:
                    n //= p
                    q *= p
                out.append(q)
            p += 1
        if n > 1:
            out.append(n)
    return sorted(out)


def _multiset_contained(small: list[int], big: list[int]) -> bool:
    pool = list(big)
    for x in small:
        if x in pool:
            pool.remove(x)
        else:
            return False
    return True


def _mod_n_split_refuted(cat: FinPreAddCat, a: int, e: PMor, n_mod: int, cap: int = 100_000) -> bool:
    """Exhaustively refute a splitting of e through any object, mod n."""
    for s in cat.objects():
        hom_sa = cat.hom(s, a)
        hom_as = cat.hom(a, s)
        if (n_mod ** hom_sa.n) * (n_mod ** hom_as.n) > cap:
            return False  # cannot certify
        found = False
        for i_coords in itertools.product(range(n_mod), repeat=hom_sa.n):
            for p_coords in itertools.product(range(n_mod), repeat=hom_as.n):
                pi = cat.compose_coords(s, a, s, p_coords, i_coords)
                ip = cat.compose_coords(a, s, a, i_coords, p_coords)
                id_s = cat.id_mor(s).elt
                ok1 = _zero_mod(cat.hom(s, s), tuple(x - y for x, y in zip(pi, id_s.coords)), n_mod)
                ok2 = _zero_mod(cat.hom(a, a), tuple(x - y for x, y in zip(ip, e.elt.coords)), n_mod)
                if ok1 and ok2:
                    found = True
                    break
            if found:
                break
        if found:
            return False
    return True


def _zero_mod(group: FinAbGroup, coords, n_mod: int) -> bool:
    """Whether the element is in the subgroup generated by relations and n."""
    rows = list(group.relations) + [
        tuple(n_mod if i == j else 0 for j in range(group.n))
        for i in range(group.n)
    ]
    return solve_left(tuple(rows), tuple(coords)) is not None


def find_splitting(
    cat: FinPreAddCat, a: int, e: PMor, bound: int
) -> tuple[Verdict, Optional[SplitWitness]]:
    """Split an idempotent e on a through some object within the bound."""
    refuted_all = True
    for s in cat.objects():
        # necessary: hom(x,s) must embed as a summand of hom(x,a)
        refuted = any(
            _summand_refuted(cat.hom(x, s), cat.hom(x, a)) for x in cat.objects()
        ) or any(
            _summand_refuted(cat.hom(s, x), cat.hom(a, x)) for x in cat.objects()
        )
        if refuted:
            continue
        refuted_all = False
        hom_sa = cat.hom(s, a)
        hom_as = cat.hom(a, s)
        for i_elt in hom_sa.bounded_elements(bound):
            i = PMor(s, a, i_elt)
            if cat.compose(e, i) != i:
                continue
            rows_pi = [
                cat.compose_coords(s, a, s, g.coords, i_elt.coords)
                for g in hom_as.generators()
            ]
            rows_ip = [
                cat.compose_coords(a, s, a, i_elt.coords, g.coords)
                for g in hom_as.generators()
            ]
            p_coords = _solve_linear_for(
                cat,
                hom_as,
                [
                    (rows_pi, cat.hom(s, s), cat.id_mor(s).elt.coords),
                    (rows_ip, cat.hom(a, a), e.elt.coords),
                ],
            )
            if p_coords is None:
                continue
            w = SplitWitness(a, e, s, i, PMor(a, s, hom_as.element(p_coords)))
            if w.verify(cat):
                return Verdict.TRUE, w
    if refuted_all:
        return Verdict.FALSE, None
    for n_mod in (2, 3):
        if _mod_n_split_refuted(cat, a, e, n_mod):
            return Verdict.FALSE, None
    return Verdict.INCONCLUSIVE, None


def check_idempotent_complete(
    cat: FinPreAddCat, coeff_bound: int = 3
) -> tuple[Verdict, dict]:
    """Every bounded idempotent splits; the marked refinement transports
    splittings along marked isomorphisms."""
    witnesses: dict = {}
    verdict = Verdict.TRUE
    idem_by_obj: dict[int, list[PMor]] = {}
    for a in cat.objects():
        v, idems = bounded_idempotents(cat, a, coeff_bound)
        if v is Verdict.INCONCLUSIVE:
            return Verdict.INCONCLUSIVE, witnesses
        idem_by_obj[a] = idems
        for e in idems:
            sv, w = find_splitting(cat, a, e, coeff_bound)
            witnesses[(a, e.elt.canonical())] = w if sv else sv
            if sv is Verdict.FALSE:
                verdict = Verdict.FALSE
            elif sv is Verdict.INCONCLUSIVE and verdict is not Verdict.FALSE:
                verdict = Verdict.INCONCLUSIVE
    if verdict is not Verdict.TRUE:
        return verdict, witnesses
    # marked refinement
    for f in cat.all_marked():
        f_inv = cat.inverse_of(f)
        for e in idem_by_obj[f.src]:
            e_prime = cat.compose(cat.compose(f, e), f_inv)
            w = witnesses.get((f.src, e.elt.canonical()))
            wp = witnesses.get((f.tgt, e_prime.elt.canonical()))
            if not isinstance(w, SplitWitness):
                continue
            if not isinstance(wp, SplitWitness):
                sv, wp = find_splitting(cat, f.tgt, e_prime, coeff_bound)
                if not isinstance(wp, SplitWitness):
                    return Verdict.INCONCLUSIVE, witnesses
                witnesses[(f.tgt, e_prime.elt.canonical())] = wp
            induced = cat.compose(wp.p, cat.compose(f, w.i))
            if not cat.is_marked(induced):
                return Verdict.FALSE, witnesses
    return verdict, witnesses


# ---------------------------------------------------------------------------
# simplicial locality


def is_local_simplicial(
    cat: FinPreAddCat, m: str, coeff_bound: int = 3
) -> Verdict:
    """Filler existence at simplicial levels 0..2 for the named map.

    ``m`` is one of ``u`` (idempotent classifier into the biproduct
    classifier), ``v`` (initial into the zero classifier), ``w`` (two points
    into the biproduct classifier)."""
    if m == "v":
        return _local_v(cat)
    if m == "w":
        return _local_w(cat, coeff_bound)
    if m == "u":
        return _local_u(cat, coeff_bound)
    raise ValueError("map must be one of u, v, w")


def _local_v(cat: FinPreAddCat) -> Verdict:
    zeros = zero_objects(cat)
    if not zeros:
        return Verdict.FALSE
    # n = 1: the unique map between zero objects must be marked
    for z in zeros:
        for z2 in zeros:
            if not cat.is_marked(cat.zero_mor(z, z2)):
                return Verdict.FALSE
    # n = 2: composites of unique maps agree (they do; verified)
    for z in zeros:
        for z2 in zeros:
            for z3 in zeros:
                lhs = cat.compose(cat.zero_mor(z2, z3), cat.zero_mor(z, z2))
                if lhs != cat.zero_mor(z, z3):
                    return Verdict.FALSE
    return Verdict.TRUE


def _local_w(cat: FinPreAddCat, bound: int) -> Verdict:
    verdict, witnesses = check_binary_sums(cat, bound)
    if verdict is not Verdict.TRUE:
        return verdict
    wmap = {k: w for k, w in witnesses.items() if isinstance(w, BiproductWitness)}
    # n = 1: induced map on witnessed sums of marked feet must be marked
    for (a, b), w in wmap.items():
        for (a2, b2), w2 in wmap.items():
            for f in cat.marked_mors(a, a2):
                for g in cat.marked_mors(b, b2):
                    tot = induced_sum_morphism(cat, w, w2, f, g)
                    if not cat.is_marked(tot):
                        return Verdict.FALSE
    # n = 2: coherence of induced maps under composition of feet
    for (a, b), w in wmap.items():
        for (a2, b2), w2 in wmap.items():
            for (a3, b3), w3 in wmap.items():
                for f in cat.marked_mors(a, a2):
                    for g in cat.marked_mors(b, b2):
                        for f2 in cat.marked_mors(a2, a3):
                            for g2 in cat.marked_mors(b2, b3):
                                lhs = induced_sum_morphism(
                                    cat, w, w3, cat.compose(f2, f), cat.compose(g2, g)
                                )
                                rhs = cat.compose(
                                    induced_sum_morphism(cat, w2, w3, f2, g2),
                                    induced_sum_morphism(cat, w, w2, f, g),
                                )
                                if lhs != rhs:
                                    return Verdict.FALSE
    return Verdict.TRUE


def _local_u(cat: FinPreAddCat, bound: int) -> Verdict:
    verdict, witnesses = check_idempotent_complete(cat, bound)
    if verdict is not Verdict.TRUE:
        return verdict
    # n = 1 fillers: marked conjugation edges lift to the splittings; this is
    # the marked refinement already enforced by check_idempotent_complete,
    # recomputed here through the witness data
    for f in cat.all_marked():
        f_inv = cat.inverse_of(f)
        for (a, ecan), w in list(witnesses.items()):
            if a != f.src or not isinstance(w, SplitWitness):
                continue
            e_prime = cat.compose(cat.compose(f, w.e), f_inv)
            wp = witnesses.get((f.tgt, e_prime.elt.canonical()))
            if not isinstance(wp, SplitWitness):
                return Verdict.INCONCLUSIVE
            induced = cat.compose(wp.p, cat.compose(f, w.i))
            if not cat.is_marked(induced):
                return Verdict.FALSE
            # n = 2: the induced edges compose coherently
            for g in cat.all_marked():
                if g.src != f.tgt:
                    continue
                g_inv = cat.inverse_of(g)
                e_pp = cat.compose(cat.compose(g, e_prime), g_inv)
                wpp = witnesses.get((g.tgt, e_pp.elt.canonical()))
                if not isinstance(wpp, SplitWitness):
                    return Verdict.INCONCLUSIVE
                left = cat.compose(wpp.p, cat.compose(cat.compose(g, f), w.i))
                step1 = cat.compose(wp.p, cat.compose(f, w.i))
                step2 = cat.compose(wpp.p, cat.compose(g, wp.i))
                if left != cat.compose(step2, step1):
                    return Verdict.FALSE
    return Verdict.TRUE


# ---------------------------------------------------------------------------
# aggregate


def is_additive(
    cat: FinPreAddCat,
    coeff_bound: int = 3,
    pairs: Optional[Sequence[tuple[int, int]]] = None,
    marked: bool = True,
) -> tuple[Verdict, LocalityReport]:
    report = LocalityReport()
    report.has_zero, report.zero_witness = check_zero(cat)
    report.binary_sums, report.sum_witnesses = check_binary_sums(
        cat, coeff_bound, pairs
    )
    verdict = report.has_zero.both_and(report.binary_sums)
    if marked:
        if report.binary_sums is Verdict.TRUE:
            report.marked_sum_closure, _ = check_marked_sum_closure(
                cat, report.sum_witnesses
            )
        else:
            report.marked_sum_closure = report.binary_sums
        verdict = verdict.both_and(report.marked_sum_closure)
    return verdict, report
