import pytest

from catmodel.abgrp import FinAbGroup
from catmodel.classifiers import (
    e_classifier,
    s_classifier,
    two_points_preadd,
    zero_classifier,
)
from catmodel.completions import mat_completion, ring_cat, ring_of_integers, ring_zmod
from catmodel.locality import (
    BiproductWitness,
    check_binary_sums,
    check_idempotent_complete,
    check_marked_sum_closure,
    check_zero,
    find_biproduct,
    find_splitting,
    induced_sum_morphism,
    is_additive,
    is_local_simplicial,
)
from catmodel.preaddcat import FinPreAddCat, PMor
from catmodel.verdict import Verdict

RING_Z = ring_cat(ring_of_integers())
S = s_classifier()
E = e_classifier()
ZC = zero_classifier()


def zero_category(n):
    """n objects, every hom group trivial: everything is a zero object."""
    zero = FinAbGroup(0)
    hom = [[zero] * n for _ in range(n)]
    ident = [zero.zero() for _ in range(n)]
    c = FinPreAddCat(n, hom, {}, ident)
    return c.with_marking(
        [PMor(a, b, zero.zero()) for a in range(n) for b in range(n)]
    )


def banach_style_fixture():
    """Two marked automorphism classes whose witnessed block sum is unmarked.

    Objects: V (rank one) and W = V + V; all homs are matrix blocks over Z.
    Marking: +-1 on V but only +-identity on W, so diag(1, -1) is unmarked.
    """
    z = FinAbGroup(1)
    z2 = FinAbGroup(2)
    z4 = FinAbGroup(4)
    hom = [[z, z2], [z2, z4]]

    def unit(n, k):
        return tuple(1 if i == k else 0 for i in range(n))

    # basis: hom(0,1) = {f0, f1} component inclusions, hom(1,0) = {g0, g1}
    # component projections, hom(1,1) = matrix units w_kl = f_k g_l in the
    # order (w00, w01, w10, w11); comp[(a,b,c)][outer j][inner i].
    comp = {
        (0, 0, 0): (((1,),),),
        # f_j . e = f_j
        (0, 0, 1): ((unit(2, 0),), (unit(2, 1),)),
        # g_j . f_i = delta_ji
        (0, 1, 0): ((unit(1, 0), (0,)), ((0,), unit(1, 0))),
        # w_kl . f_i = delta_li f_k
        (0, 1, 1): (
            (unit(2, 0), (0, 0)),
            ((0, 0), unit(2, 0)),
            (unit(2, 1), (0, 0)),
            ((0, 0), unit(2, 1)),
        ),
        # e . g_i = g_i
        (1, 0, 0): ((unit(2, 0), unit(2, 1)),),
        # f_j . g_i = w_ji
        (1, 0, 1): (
            (unit(4, 0), unit(4, 1)),
            (unit(4, 2), unit(4, 3)),
        ),
        # g_j . w_kl = delta_jk g_l
        (1, 1, 0): (
            (unit(2, 0), unit(2, 1), (0, 0), (0, 0)),
            ((0, 0), (0, 0), unit(2, 0), unit(2, 1)),
        ),
        # w_kl . w_mn = delta_lm w_kn
        (1, 1, 1): (
            (unit(4, 0), unit(4, 1), (0,) * 4, (0,) * 4),
            ((0,) * 4, (0,) * 4, unit(4, 0), unit(4, 1)),
            (unit(4, 2), unit(4, 3), (0,) * 4, (0,) * 4),
            ((0,) * 4, (0,) * 4, unit(4, 2), unit(4, 3)),
        ),
    }
    ident = [z.element((1,)), z4.element((1, 0, 0, 1))]
    cat = FinPreAddCat(2, hom, comp, ident)
    plus = cat.id_mor(0)
    minus = PMor(0, 0, z.element((-1,)))
    idw = cat.id_mor(1)
    minw = PMor(1, 1, z4.element((-1, 0, 0, -1)))
    return cat.with_marking([plus, minus, idw, minw])


class TestCheckZero:
    def test_zero_classifier(self):
        v, w = check_zero(ZC)
        assert v is Verdict.TRUE and w == 0

    def test_s_has_no_zero(self):
        assert check_zero(S)[0] is Verdict.FALSE

    def test_mat_empty_tuple(self):
        m = mat_completion(RING_Z, 2)
        v, w = check_zero(m.cat)
        assert v is Verdict.TRUE and m.objects[w] == ()


class TestBinarySums:
    def test_s_classifier_pair(self):
        v, w = find_biproduct(S, 0, 1, 3)
        assert v is Verdict.TRUE
        assert w.s == 2
        assert w.verify(S)

    def test_mat_rank_one_pair(self):
        m = mat_completion(RING_Z, 2)
        one = m.objects.index((0,))
        v, w = find_biproduct(m.cat, one, one, 1)
        assert v is Verdict.TRUE
        assert m.objects[w.s] == (0, 0)
        assert w.verify(m.cat)

    def test_ring_z_refuted(self):
        v, w = check_binary_sums(RING_Z, 3)
        assert v is Verdict.FALSE

    def test_truncated_mat_full_pairs_fail(self):
        m = mat_completion(RING_Z, 2)
        top = m.objects.index((0, 0))
        v, _ = find_biproduct(m.cat, top, top, 1)
        assert v is Verdict.FALSE  # rank 4 is not representable: certified

    def test_representable_pairs_pass(self):
        m = mat_completion(RING_Z, 2)
        pairs = [
            (i, j)
            for i, t in enumerate(m.objects)
            for j, u in enumerate(m.objects)
            if i <= j and len(t) + len(u) <= 2
        ]
        v, wit = check_binary_sums(m.cat, 1, pairs)
        assert v is Verdict.TRUE
        for w in wit.values():
            assert isinstance(w, BiproductWitness)


class TestMarkedSumClosure:
    def test_mi_mat_closure_holds(self):
        m = mat_completion(RING_Z, 2)
        pairs = [
            (i, j)
            for i, t in enumerate(m.objects)
            for j, u in enumerate(m.objects)
            if i <= j and len(t) + len(u) <= 2
        ]
        _, wit = check_binary_sums(m.cat, 1, pairs)
        v, _ = check_marked_sum_closure(m.cat, wit)
        assert v is Verdict.TRUE

    def test_banach_style_fixture_fails(self):
        cat = banach_style_fixture()
        assert cat.validate() == []
        _, wit = check_binary_sums(cat, 1, [(0, 0)])
        assert isinstance(wit[(0, 0)], BiproductWitness)
        v, offender = check_marked_sum_closure(cat, wit)
        assert v is Verdict.FALSE
        # diag(1, -1) is the offending block sum
        f, g, _, _ = offender
        assert {f.elt.canonical(), g.elt.canonical()} == {(1,), (-1,)}

    def test_zero_category_closure(self):
        c = zero_category(2)
        _, wit = check_binary_sums(c, 1)
        v, _ = check_marked_sum_closure(c, wit)
        assert v is Verdict.TRUE


class TestIdempotentCompleteness:
    def test_karoubi_ring_true(self):
        from catmodel.completions import karoubi

        k = karoubi(RING_Z)
        assert check_idempotent_complete(k.cat)[0] is Verdict.TRUE

    def test_e_classifier_false(self):
        assert check_idempotent_complete(E)[0] is Verdict.FALSE

    def test_mat_z2_splits_bounded_idempotents(self):
        m = mat_completion(RING_Z, 2)
        # idempotent diag(1,0) on the rank-two object splits through rank one
        top = m.objects.index((0, 0))
        e = m.cat.mor(top, top, (1, 0, 0, 0))
        assert m.cat.compose(e, e) == e
        v, w = find_splitting(m.cat, top, e, 1)
        assert v is Verdict.TRUE
        assert m.objects[w.s] == (0,)

    def test_ring_z6_nontrivial_idempotents_fail(self):
        r6 = ring_cat(ring_zmod(6))
        v, wit = check_idempotent_complete(r6, 4)
        assert v is Verdict.FALSE

    def test_zmod6_karoubi_completes(self):
        from catmodel.completions import karoubi

        k = karoubi(ring_cat(ring_zmod(6)), 4)
        assert check_idempotent_complete(k.cat, 4)[0] is Verdict.TRUE


class TestSimplicialLocality:
    def test_v_zero_classifier(self):
        assert is_local_simplicial(ZC, "v") is Verdict.TRUE

    def test_v_s_classifier_false(self):
        assert is_local_simplicial(S, "v") is Verdict.FALSE

    def test_w_ring_false(self):
        assert is_local_simplicial(RING_Z, "w") is Verdict.FALSE

    def test_w_zero_category_true(self):
        assert is_local_simplicial(zero_category(2), "w") is Verdict.TRUE

    def test_u_e_classifier_false(self):
        assert is_local_simplicial(E, "u") is Verdict.FALSE

    def test_u_karoubi_true(self):
        from catmodel.completions import karoubi

        k = karoubi(RING_Z)
        assert is_local_simplicial(k.cat, "u") is Verdict.TRUE

    def test_multiple_unmarked_zeros_not_v_local(self):
        # two zero objects, only identities marked: the connecting zero map
        # is unmarked, so the marked zero-object space is disconnected
        zero = FinAbGroup(0)
        c = FinPreAddCat(
            2, [[zero, zero], [zero, zero]], {}, [zero.zero(), zero.zero()]
        ).with_marking(
            [PMor(0, 0, zero.zero()), PMor(1, 1, zero.zero())]
        )
        assert c.validate() == []
        assert check_zero(c)[0] is Verdict.TRUE
        assert is_local_simplicial(c, "v") is Verdict.FALSE


class TestOracleAgreement:
    @pytest.mark.parametrize(
        "cat",
        [RING_Z, S, E, ZC, zero_category(2), zero_category(1), ring_cat(ring_zmod(4))],
        ids=["ringZ", "S", "E", "zc", "zeros2", "zeros1", "ringZ4"],
    )
    def test_structural_equals_simplicial(self, cat):
        structural, report = is_additive(cat, 3)
        v_loc = is_local_simplicial(cat, "v")
        w_loc = is_local_simplicial(cat, "w")
        simplicial = v_loc.both_and(w_loc)
        if structural.decided and simplicial.decided:
            assert bool(structural) == bool(simplicial)

    @pytest.mark.parametrize(
        "cat",
        [RING_Z, E, ZC, zero_category(2), ring_cat(ring_zmod(6))],
        ids=["ringZ", "E", "zc", "zeros2", "ringZ6"],
    )
    def test_idempotent_oracle(self, cat):
        structural, _ = check_idempotent_complete(cat, 4)
        simplicial = is_local_simplicial(cat, "u", 4)
        if structural.decided and simplicial.decided:
            assert bool(structural) == bool(simplicial)
