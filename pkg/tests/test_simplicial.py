import pytest

from catmodel.markedcat import CatFunctor, MarkedGraph, free_marked_category, fun_plus
from catmodel.presentations import SizeLimit
from catmodel.simplicial import (
    fundamental_groupoid,
    nerve,
    simplicial_maps,
    sset_boundary_delta1,
    sset_circle,
    sset_delta1,
    sset_from_json,
    sset_point,
    sset_to_json,
)

POINT_GROUPOID = free_marked_category(MarkedGraph(1, ()))
I_GROUPOID = free_marked_category(MarkedGraph(2, ((0, 1),), frozenset({0})))
C2 = free_marked_category(MarkedGraph(1, ()))  # placeholder, rebuilt below


def cyclic_groupoid(n):
    """One-object groupoid with cyclic vertex group, built from tables."""
    from catmodel.presentations import Presentation, enumerate_presentation
    from catmodel.markedcat import FinMarkedCat, ma

    p = Presentation(1, [(0, 0)])
    p.add_relation(0, tuple([0] * n), ())
    e = enumerate_presentation(p)
    cat = FinMarkedCat(1, e.src, e.tgt, e.identity, e.comp, frozenset(e.identity))
    return ma(cat)


class TestStandardComplexes:
    @pytest.mark.parametrize(
        "k", [sset_point(), sset_delta1(), sset_boundary_delta1(), sset_circle()]
    )
    def test_simplicial_identities(self, k):
        assert k.validate() == []

    def test_json_roundtrip(self):
        k = sset_delta1()
        assert sset_from_json(sset_to_json(k)) == k


class TestNerve:
    def test_point(self):
        k = nerve(POINT_GROUPOID)
        assert k.counts() == (1, 1, 1)
        assert k.validate() == []

    def test_contractible_two_object_groupoid_counts(self):
        k = nerve(I_GROUPOID)
        assert k.counts() == (2, 4, 8)
        assert k.validate() == []

    def test_respects_disjoint_union(self):
        from catmodel.markedcat import disjoint_union

        u, _ = disjoint_union([POINT_GROUPOID, I_GROUPOID])
        k = nerve(u)
        kp, ki = nerve(POINT_GROUPOID), nerve(I_GROUPOID)
        assert k.counts() == tuple(
            a + b for a, b in zip(kp.counts(), ki.counts())
        )

    def test_cyclic_group_counts(self):
        k = nerve(cyclic_groupoid(3))
        assert k.counts() == (1, 3, 9)
        assert k.validate() == []


class TestFundamentalGroupoid:
    def test_point(self):
        g = fundamental_groupoid(sset_point())
        assert g.n_objects == 1 and g.n_morphisms == 1

    def test_delta1_gives_contractible_pair(self):
        g = fundamental_groupoid(sset_delta1())
        assert g.n_objects == 2
        assert g.n_morphisms == 4  # word enumeration halts: 2 ids + iso pair
        assert g.validate() == []
        assert len(g.marked) == 4

    def test_boundary_delta1_discrete(self):
        g = fundamental_groupoid(sset_boundary_delta1())
        assert g.n_objects == 2 and g.n_morphisms == 2

    def test_circle_raises_size_limit(self):
        with pytest.raises(SizeLimit):
            fundamental_groupoid(sset_circle(), cap=200)


class TestAdjunction:
    @pytest.mark.parametrize(
        "K",
        [sset_point(), sset_delta1(), sset_boundary_delta1()],
        ids=["point", "delta1", "boundary"],
    )
    @pytest.mark.parametrize(
        "H",
        [POINT_GROUPOID, I_GROUPOID, cyclic_groupoid(2), cyclic_groupoid(3)],
        ids=["pt", "iso", "c2", "c3"],
    )
    def test_groupoid_maps_biject_with_simplicial_maps(self, K, H):
        pi = fundamental_groupoid(K)
        functors = fun_plus(pi, H).functors
        smaps = simplicial_maps(K, nerve(H))
        assert len(functors) == len(smaps)

    def test_unit_counit_shape(self):
        # nerve then fundamental groupoid recovers a groupoid up to iso:
        # counts agree for a skeletal example
        g = cyclic_groupoid(2)
        back = fundamental_groupoid(nerve(g))
        assert back.n_objects == g.n_objects
        assert back.n_morphisms == g.n_morphisms
