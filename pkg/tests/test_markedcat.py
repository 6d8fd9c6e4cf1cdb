import itertools

import pytest

from catmodel.markedcat import (
    CatFunctor,
    Diagram,
    FinMarkedCat,
    MarkedGraph,
    NatTransf,
    SizeLimit,
    colimit,
    disjoint_union,
    discrete,
    free_marked_category,
    fun_plus,
    is_weak_equivalence,
    limit,
    ma,
    mi,
    product,
    pushout,
    cat_from_json,
    cat_to_json,
    span_index,
)

DELTA0 = discrete(1)
DELTA1 = free_marked_category(MarkedGraph(2, ((0, 1),)))
IPLUS = free_marked_category(MarkedGraph(2, ((0, 1),), frozenset({0})))
I_MI = mi(IPLUS)


def brute_force_functors(A, B):
    """Oracle: filter every raw (object map, morphism map) by validation."""
    out = []
    for om in itertools.product(range(B.n_objects), repeat=A.n_objects):
        for mm in itertools.product(range(B.n_morphisms), repeat=A.n_morphisms):
            F = CatFunctor(A, B, om, mm)
            if not F.validate():
                out.append(F)
    return out


class TestValidate:
    def test_point_valid(self):
        assert DELTA0.validate() == []

    def test_delta1_and_iplus_valid(self):
        assert DELTA1.validate() == []
        assert IPLUS.validate() == []

    def test_marked_without_inverse(self):
        broken = DELTA1.with_marking(set(DELTA1.identity) | {2})
        # morphism 2 is the non-invertible arrow
        errs = broken.validate()
        assert any("no inverse" in e for e in errs)

    def test_corrupted_associativity_reports_triple(self):
        chain = free_marked_category(MarkedGraph(3, ((0, 1), (1, 2))))
        # find the composite cell g after f and corrupt it to an identity
        comp = [list(row) for row in chain.comp]
        f = next(
            m
            for m in chain.morphisms()
            if not chain.is_identity(m) and chain.src[m] == 0 and chain.tgt[m] == 1
        )
        g = next(
            m
            for m in chain.morphisms()
            if not chain.is_identity(m) and chain.src[m] == 1 and chain.tgt[m] == 2
        )
        h = chain.comp[g][f]
        comp[g][f] = chain.comp[g][chain.identity[1]]  # wrong but well-typed? no: ends
        bad = FinMarkedCat(
            chain.n_objects, chain.src, chain.tgt, chain.identity,
            tuple(tuple(r) for r in comp), chain.marked,
        )
        errs = bad.validate()
        assert errs != []

    def test_missing_composite_detected(self):
        comp = [list(row) for row in DELTA1.comp]
        comp[2][DELTA1.identity[0]] = None
        bad = FinMarkedCat(
            DELTA1.n_objects, DELTA1.src, DELTA1.tgt, DELTA1.identity,
            tuple(tuple(r) for r in comp), DELTA1.marked,
        )
        assert any("missing composite" in e for e in bad.validate())


class TestMiMa:
    def test_mi_marks_identities_only(self):
        c = mi(IPLUS)
        assert c.marked == frozenset(c.identity)

    def test_ma_of_iso_classifier_marks_everything(self):
        c = ma(IPLUS)
        assert c.marked == frozenset(c.morphisms())

    def test_ma_delta1_marks_identities_only(self):
        # the non-identity arrow is not invertible
        c = ma(DELTA1)
        assert c.marked == frozenset(DELTA1.identity)

    def test_ma_idempotent(self):
        for c in (DELTA1, IPLUS, I_MI):
            assert ma(ma(c)).marked == ma(c).marked


class TestFunPlus:
    def test_object_classifier(self):
        for B in (DELTA1, IPLUS):
            fc = fun_plus(DELTA0, B)
            assert len(fc.functors) == B.n_objects
            assert fc.cat.n_morphisms == B.n_morphisms
            assert len(fc.cat.marked) == len(B.marked)

    def test_iplus_endofunctors(self):
        fc = fun_plus(IPLUS, IPLUS)
        assert len(fc.functors) == 4
        # the marked groupoid is codiscrete: one marked transformation per
        # ordered pair of functors
        assert fc.cat.n_morphisms == 16
        assert len(fc.cat.marked) == 16
        assert fc.cat.validate() == []

    def test_mi_iplus_endofunctors_marked_thin(self):
        fc = fun_plus(I_MI, I_MI)
        # only identity components are marked, so marked transfs are identities
        assert len(fc.cat.marked) == len(fc.functors)

    def test_delta1_to_point(self):
        fc = fun_plus(DELTA1, DELTA0)
        assert len(fc.functors) == 1
        assert fc.cat.n_morphisms == 1

    def test_agrees_with_brute_force(self):
        for A, B in [(DELTA1, DELTA1), (IPLUS, DELTA1), (DELTA1, IPLUS)]:
            fast = fun_plus(A, B)
            slow = brute_force_functors(A, B)
            assert len(fast.functors) == len(slow)


class TestWeakEquivalence:
    def test_identity_weq(self):
        for c in (DELTA0, DELTA1, IPLUS, I_MI):
            assert is_weak_equivalence(CatFunctor.identity(c)).ok

    def test_point_into_iso_classifier(self):
        F = CatFunctor(DELTA0, IPLUS, (0,), (IPLUS.identity[0],))
        r = is_weak_equivalence(F)
        assert r.ok
        # witness truly inverts up to marked isomorphism
        g = r.inverse
        assert g.validate() == []
        assert NatTransf(CatFunctor.identity(IPLUS), g.then(F), r.u).is_natural()

    def test_vplus_not_weq(self):
        two, _ = disjoint_union([DELTA0, DELTA0])
        V = CatFunctor(two, IPLUS, (0, 1), (IPLUS.identity[0], IPLUS.identity[1]))
        r = is_weak_equivalence(V)
        assert not r.ok

    def test_mi_iso_inclusion_not_weq(self):
        # 0 -> mi(I): the iso exists but is not marked, so not a marked weq
        F = CatFunctor(DELTA0, I_MI, (0,), (I_MI.identity[0],))
        assert not is_weak_equivalence(F).ok

    def test_two_out_of_three(self):
        # corpus of composable pairs among small categories
        cats = [DELTA0, IPLUS, I_MI, DELTA1]
        functors = []
        for A in cats:
            for B in cats:
                if A.n_objects * B.n_objects <= 8:
                    functors.extend(fun_plus(A, B).functors)
        pairs = [
            (f, g)
            for f in functors
            for g in functors
            if f.cod == g.dom
        ]
        assert pairs
        for f, g in pairs:
            wf = is_weak_equivalence(f).ok
            wg = is_weak_equivalence(g).ok
            wgf = is_weak_equivalence(f.then(g)).ok
            if wf and wg:
                assert wgf
            if wf and wgf:
                assert wg
            if wg and wgf:
                assert wf

    def test_retract_closure_of_weqs(self):
        # A=Delta0 is a retract of A'=I+ ; f : Delta0 -> Delta0 retract of f'=collapse
        i = CatFunctor(DELTA0, IPLUS, (0,), (IPLUS.identity[0],))
        p = fun_plus(IPLUS, DELTA0).functors[0]
        assert i.then(p) == CatFunctor.identity(DELTA0)
        fprime = p  # I+ -> Delta0, a weak equivalence
        assert is_weak_equivalence(fprime).ok
        f = i.then(fprime).then(CatFunctor.identity(DELTA0))
        assert is_weak_equivalence(f).ok


class TestFreeMarkedCategory:
    def test_point(self):
        c = free_marked_category(MarkedGraph(1, ()))
        assert c.n_objects == 1 and c.n_morphisms == 1

    def test_arrow_gives_delta1(self):
        c = free_marked_category(MarkedGraph(2, ((0, 1),)))
        assert c.n_morphisms == 3
        assert c.marked == frozenset(c.identity)

    def test_marked_arrow_gives_iso_classifier(self):
        c = free_marked_category(MarkedGraph(2, ((0, 1),), frozenset({0})))
        assert c.n_morphisms == 4
        assert c.marked == frozenset(c.morphisms())

    def test_marked_loop_hits_cap(self):
        with pytest.raises(SizeLimit):
            free_marked_category(MarkedGraph(1, ((0, 0),), frozenset({0})), cap=100)


def constant_diagram_over(index, value):
    return Diagram(
        index=index,
        values=tuple(value for _ in index.objects()),
        arrows=tuple(CatFunctor.identity(value) for _ in index.morphisms()),
    )


class TestLimitsColimits:
    def test_empty_colimit_is_initial(self):
        empty_index = discrete(0)
        D = Diagram(empty_index, (), ())
        C, cocone = colimit(D)
        assert C.n_objects == 0 and C.n_morphisms == 0

    def test_pushout_parallel_pair(self):
        two, _ = disjoint_union([DELTA0, DELTA0])
        V = CatFunctor(two, DELTA1, (0, 1), (DELTA1.identity[0], DELTA1.identity[1]))
        P, l1, l2 = pushout(V, V)
        assert P.n_objects == 2
        assert P.n_morphisms == 4  # two identities and two parallel arrows
        assert P.validate() == []
        nonid = [m for m in P.morphisms() if not P.is_identity(m)]
        assert len(nonid) == 2
        assert {P.src[m] for m in nonid} == {P.src[nonid[0]]}

    def test_product_marking_componentwise(self):
        P, pA, pB = product(IPLUS, I_MI)
        assert P.n_objects == 4
        assert P.validate() == []
        for m in P.marked:
            assert pA.mor_map[m] in IPLUS.marked
            assert pB.mor_map[m] in I_MI.marked
        # marked isos are exactly pairs (marked, identity-marked)
        expected = sum(
            1
            for f in IPLUS.marked
            for g in I_MI.marked
        )
        assert len(P.marked) == expected

    def test_limit_universal_property(self):
        # limit over the discrete two-point index = binary product
        idx = discrete(2)
        D = Diagram(idx, (IPLUS, DELTA1), (CatFunctor.identity(IPLUS), CatFunctor.identity(DELTA1)))
        L, projs = limit(D)
        assert L.validate() == []
        for T in (DELTA0, DELTA1):
            cones = [
                (f1, f2)
                for f1 in fun_plus(T, IPLUS).functors
                for f2 in fun_plus(T, DELTA1).functors
            ]
            mediators = fun_plus(T, L).functors
            assert len(cones) == len(mediators)
            for F in mediators:
                legs = tuple(F.then(p) for p in projs)
                assert (legs[0], legs[1]) in [
                    (c[0], c[1]) for c in cones
                ]

    def test_colimit_universal_property(self):
        # coproduct case: cocones from the pieces = functors out of the colimit
        idx = discrete(2)
        D = Diagram(idx, (DELTA1, DELTA0), (CatFunctor.identity(DELTA1), CatFunctor.identity(DELTA0)))
        C, cocone = colimit(D)
        assert C.validate() == []
        for T in (DELTA1, IPLUS):
            cocones = [
                (f1, f2)
                for f1 in fun_plus(DELTA1, T).functors
                for f2 in fun_plus(DELTA0, T).functors
            ]
            outs = fun_plus(C, T).functors
            assert len(cocones) == len(outs)
            for F in outs:
                legs = tuple(l.then(F) for l in cocone)
                assert (legs[0], legs[1]) in cocones

    def test_pushout_universal_property(self):
        two, _ = disjoint_union([DELTA0, DELTA0])
        V = CatFunctor(two, DELTA1, (0, 1), (DELTA1.identity[0], DELTA1.identity[1]))
        P, l1, l2 = pushout(V, V)
        for T in (DELTA1,):
            pairs = [
                (f1, f2)
                for f1 in fun_plus(DELTA1, T).functors
                for f2 in fun_plus(DELTA1, T).functors
                if V.then(f1) == V.then(f2)
            ]
            outs = fun_plus(P, T).functors
            assert len(outs) == len(pairs)

    def test_colimit_of_marked_pieces_generates_marking(self):
        # gluing two marked-iso classifiers along one endpoint: a zig-zag of
        # marked isos composes into marked isos
        one = discrete(1)
        i0 = CatFunctor(one, IPLUS, (0,), (IPLUS.identity[0],))
        i1 = CatFunctor(one, IPLUS, (1,), (IPLUS.identity[1],))
        P, l1, l2 = pushout(i1, i0)
        assert P.validate() == []
        assert P.n_objects == 3
        # the glued category is the codiscrete groupoid on 3 objects
        assert P.n_morphisms == 9
        assert len(P.marked) == 9


class TestJson:
    def test_roundtrip_preserves_indices(self):
        for c in (DELTA1, IPLUS, I_MI):
            assert cat_from_json(cat_to_json(c)) == c
