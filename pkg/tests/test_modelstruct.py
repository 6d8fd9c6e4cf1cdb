import itertools

import pytest

from catmodel.abgrp import FinAbGroup
from catmodel.classifiers import ClassifierKind, Flavor, build, generating_sets, lin_functor
from catmodel.markedcat import (
    CatFunctor,
    FinMarkedCat,
    MarkedGraph,
    discrete,
    disjoint_union,
    free_marked_category,
    fun_plus,
    ma,
    mi,
    product,
    pushout,
)
from catmodel.modelstruct import (
    LiftSquare,
    NoLift,
    cotensor,
    exhaustive_lift_search,
    factor_cof_trivfib,
    factor_trivcof_fib,
    has_rlp_I,
    is_cofibration,
    is_fibration,
    is_trivial_cofibration,
    is_trivial_fibration,
    is_weq,
    mapping_space,
    mapping_space_from_groupoid,
    product_family,
    rlp_generating,
    sharp,
    solve_lift,
)
from catmodel.preaddcat import AddFunctor, FinPreAddCat, PMor
from catmodel.simplicial import fundamental_groupoid, sset_boundary_delta1, sset_delta1

D0 = build(ClassifierKind.DELTA0, Flavor.CAT_PLUS)
D1 = build(ClassifierKind.DELTA1, Flavor.CAT_PLUS)
IP = build(ClassifierKind.I_PLUS, Flavor.CAT_PLUS)
I_MI = build(ClassifierKind.I, Flavor.CAT_PLUS)
TWO, _ = disjoint_union([D0, D0])

J_MAP = CatFunctor(D0, IP, (0,), (IP.identity[0],))
VPLUS = CatFunctor(TWO, IP, (0, 1), (IP.identity[0], IP.identity[1]))
FOLD = CatFunctor(TWO, D0, (0, 0), (D0.identity[0], D0.identity[0]))
COLLAPSE = fun_plus(IP, D0).functors[0]


def small_corpus():
    """A handful of small marked categories for closure properties."""
    c2 = _cyclic(2)
    return [D0, D1, IP, I_MI, TWO, c2, product(IP, I_MI)[0]]


def _cyclic(n):
    from catmodel.presentations import Presentation, enumerate_presentation

    p = Presentation(1, [(0, 0)])
    p.add_relation(0, tuple([0] * n), ())
    e = enumerate_presentation(p)
    return ma(FinMarkedCat(1, e.src, e.tgt, e.identity, e.comp, frozenset(e.identity)))


class TestPredicates:
    def test_identity_everything(self):
        f = CatFunctor.identity(IP)
        assert is_cofibration(f) and is_fibration(f)
        assert is_weq(f) and is_trivial_fibration(f) and is_trivial_cofibration(f)

    def test_fold_not_cofibration(self):
        assert not is_cofibration(FOLD)

    def test_vplus_is_cofibration(self):
        assert is_cofibration(VPLUS)
        assert not is_weq(VPLUS)

    def test_maps_to_point_are_fibrations(self):
        for c in small_corpus():
            for F in fun_plus(c, D0).functors:
                assert is_fibration(F)

    def test_j_map_not_fibration(self):
        assert not is_fibration(J_MAP)

    def test_projection_is_fibration(self):
        P, pA, pB = product(IP, IP)
        assert is_fibration(pA) and is_fibration(pB)

    def test_collapse_trivial_fibration(self):
        assert is_trivial_fibration(COLLAPSE)

    def test_j_map_not_trivial_fibration(self):
        assert is_weq(J_MAP)
        assert not is_trivial_fibration(J_MAP)


class TestLifting:
    def test_identity_square_lift_is_top(self):
        f = COLLAPSE
        sq = LiftSquare(
            i=CatFunctor.identity(IP), f=f, top=CatFunctor.identity(IP), bottom=f
        )
        lift = solve_lift(sq)
        assert not isinstance(lift, NoLift)
        assert lift == CatFunctor.identity(IP)

    def test_trivcof_fib_case(self):
        # i = J map (trivial cofibration), f = projection I+ x I+ -> I+
        P, pA, pB = product(IP, IP)
        top = CatFunctor(D0, P, (0,), (P.identity[0],))
        bottom = CatFunctor.identity(IP)
        sq = LiftSquare(i=J_MAP, f=pB, top=top, bottom=bottom)
        assert sq.validate() == []
        lift = solve_lift(sq)
        assert not isinstance(lift, NoLift)

    def test_cof_trivfib_case(self):
        # i = V+ (cofibration), f = I+ -> Delta0 (trivial fibration)
        top = CatFunctor(TWO, IP, (0, 1), (IP.identity[0], IP.identity[1]))
        bottom = fun_plus(IP, D0).functors[0]
        sq = LiftSquare(i=VPLUS, f=COLLAPSE, top=top, bottom=bottom)
        assert sq.validate() == []
        lift = solve_lift(sq)
        assert not isinstance(lift, NoLift)

    def test_no_lift_with_certificate(self):
        # square requiring a lift I+ -> Delta0 + Delta0 hitting both objects
        i = CatFunctor(TWO, IP, (0, 1), (IP.identity[0], IP.identity[1]))
        f = CatFunctor(TWO, D0, (0, 0), (D0.identity[0], D0.identity[0]))
        top = CatFunctor(TWO, TWO, (0, 1), (TWO.identity[0], TWO.identity[1]))
        bottom = fun_plus(IP, D0).functors[0]
        sq = LiftSquare(i=i, f=f, top=top, bottom=bottom)
        assert sq.validate() == []
        res = solve_lift(sq)
        assert isinstance(res, NoLift)

    def test_solver_agrees_with_exhaustive_search(self):
        cats = [D0, D1, IP, TWO]
        functors = []
        for A in cats:
            for B in cats:
                functors.extend(fun_plus(A, B).functors)
        squares = 0
        for i in functors:
            if not is_cofibration(i):
                continue
            for f in functors:
                for top in fun_plus(i.dom, f.dom).functors:
                    for bottom in fun_plus(i.cod, f.cod).functors:
                        sq = LiftSquare(i=i, f=f, top=top, bottom=bottom)
                        if sq.validate():
                            continue
                        squares += 1
                        fast = solve_lift(sq)
                        slow = exhaustive_lift_search(sq)
                        assert isinstance(fast, NoLift) == isinstance(slow, NoLift)
        assert squares >= 30


class TestFibrationCharacterization:
    def test_j_square_characterizes_fibrations(self):
        cats = [D0, IP, I_MI, TWO, product(IP, I_MI)[0]]
        checked = 0
        for A in cats:
            for B in cats:
                for f in fun_plus(A, B).functors:
                    expected = is_fibration(f)
                    # f has RLP against J iff every J-shaped square lifts
                    got = True
                    for top in fun_plus(D0, A).functors:
                        for bottom in fun_plus(IP, B).functors:
                            sq = LiftSquare(i=J_MAP, f=f, top=top, bottom=bottom)
                            if sq.validate():
                                continue
                            if isinstance(exhaustive_lift_search(sq), NoLift):
                                got = False
                    assert expected == got
                    checked += 1
        assert checked >= 20


class TestFactorizations:
    @pytest.mark.parametrize(
        "a",
        [
            CatFunctor.identity(D0),
            FOLD,
            J_MAP,
            VPLUS,
            CatFunctor(TWO, D1, (0, 1), (D1.identity[0], D1.identity[1])),
        ],
        ids=["id", "fold", "J", "V+", "V"],
    )
    def test_both_factorizations_verify(self, a):
        fac = factor_cof_trivfib(a)
        assert fac.composite() == a
        assert is_cofibration(fac.left)
        assert is_trivial_fibration(fac.right)
        fac2 = factor_trivcof_fib(a)
        assert fac2.composite() == a
        assert is_trivial_cofibration(fac2.left)
        assert is_fibration(fac2.right)

    def test_identity_cylinder_is_interval(self):
        fac = factor_cof_trivfib(CatFunctor.identity(D0))
        assert fac.mid.n_objects == 2
        # the cylinder of a point is the contractible marked pair
        assert len(fac.mid.marked) == fac.mid.n_morphisms == 4


class TestClosureProperties:
    def test_pushout_of_trivial_cofibration(self):
        # push J: Delta0 -> I+ out along Delta0 -> Delta1 (object 0)
        to_d1 = CatFunctor(D0, D1, (0,), (D1.identity[0],))
        P, leg1, leg2 = pushout(J_MAP, to_d1)
        # leg from Delta1 is the cobase change of J: a trivial cofibration
        assert is_trivial_cofibration(leg2)

    def test_pullback_of_trivial_fibration(self):
        # pull I+ -> Delta0 back along Delta1 -> Delta0: projection
        P, pA, pB = product(D1, IP)
        assert is_trivial_fibration(pA)

    def test_retract_closure(self):
        i = CatFunctor(D0, IP, (0,), (IP.identity[0],))
        p = COLLAPSE
        assert i.then(p) == CatFunctor.identity(D0)
        for cls in (is_cofibration, is_fibration, is_weq):
            if cls(CatFunctor.identity(IP)):
                assert cls(CatFunctor.identity(D0))

    @pytest.mark.parametrize(
        "iname", ["boundary_to_delta1", "vertex_to_delta1"]
    )
    @pytest.mark.parametrize("aname", ["J", "V", "V+"])
    def test_pushout_product(self, iname, aname):
        pi_delta1 = fundamental_groupoid(sset_delta1())
        if iname == "boundary_to_delta1":
            pi_x = fundamental_groupoid(sset_boundary_delta1())
            incl = CatFunctor(
                pi_x, pi_delta1, (0, 1),
                (pi_delta1.identity[0], pi_delta1.identity[1]),
            )
            i_weq = False
        else:
            pi_x = discrete(1)
            incl = CatFunctor(pi_x, pi_delta1, (0,), (pi_delta1.identity[0],))
            i_weq = True
        a = {
            "J": J_MAP,
            "V": CatFunctor(TWO, D1, (0, 1), (D1.identity[0], D1.identity[1])),
            "V+": VPLUS,
        }[aname]
        a_weq = aname == "J"
        A, B = a.dom, a.cod
        a_sharp_x = _sharp_functor(a, pi_x)
        incl_a = _groupoid_functor_sharp(A, incl)
        incl_b = _groupoid_functor_sharp(B, incl)
        if aname == "V+" and iname == "boundary_to_delta1":
            # gluing two marked-iso classifiers along both ends frees an
            # infinite vertex group; the finite workbench must refuse
            from catmodel.presentations import SizeLimit

            with pytest.raises(SizeLimit):
                pushout(incl_a, a_sharp_x, cap=2000)
            return
        P, leg_ay, leg_bx = pushout(incl_a, a_sharp_x)
        a_sharp_y = _sharp_functor(a, pi_delta1)
        med = _mediating(P, leg_ay, leg_bx, a_sharp_y, incl_b)
        assert is_cofibration(med)
        if a_weq or i_weq:
            assert is_weq(med)


def _sharp_functor(a: CatFunctor, G) -> CatFunctor:
    """a # G : dom(a) x G -> cod(a) x G on product tables."""
    P1, p1A, p1G = product(a.dom, ma(G))
    P2, p2A, p2G = product(a.cod, ma(G))
    mb = ma(G).n_morphisms
    nb = ma(G).n_objects
    obj_map = tuple(
        a.obj_map[o // nb] * nb + (o % nb) for o in range(P1.n_objects)
    )
    mor_map = tuple(
        a.mor_map[m // mb] * mb + (m % mb) for m in range(P1.n_morphisms)
    )
    return CatFunctor(P1, P2, obj_map, mor_map)


def _groupoid_functor_sharp(A: FinMarkedCat, g: CatFunctor) -> CatFunctor:
    """A # g : A x dom(g) -> A x cod(g)."""
    P1, _, _ = product(A, ma(g.dom))
    P2, _, _ = product(A, ma(g.cod))
    nb1, mb1 = ma(g.dom).n_objects, ma(g.dom).n_morphisms
    nb2, mb2 = ma(g.cod).n_objects, ma(g.cod).n_morphisms
    obj_map = tuple(
        (o // nb1) * nb2 + g.obj_map[o % nb1] for o in range(P1.n_objects)
    )
    mor_map = tuple(
        (m // mb1) * mb2 + g.mor_map[m % mb1] for m in range(P1.n_morphisms)
    )
    return CatFunctor(P1, P2, obj_map, mor_map)


def _mediating(P, leg_ay, leg_bx, a_sharp_y, incl_b):
    """The comparison map out of the pushout, defined by its cocone."""
    # P was built as pushout of incl_a : A#X -> A#Y  and  a#X : A#X -> B#X.
    # The mediating functor to B#Y restricts to a#Y on A#Y and to B#incl on B#X.
    target = a_sharp_y.cod
    obj_map = [None] * P.n_objects
    mor_map = [None] * P.n_morphisms
    for o in leg_ay.dom.objects():
        obj_map[leg_ay.obj_map[o]] = a_sharp_y.obj_map[o]
    for o in leg_bx.dom.objects():
        obj_map[leg_bx.obj_map[o]] = incl_b.obj_map[o]
    for m in leg_ay.dom.morphisms():
        mor_map[leg_ay.mor_map[m]] = a_sharp_y.mor_map[m]
    for m in leg_bx.dom.morphisms():
        mor_map[leg_bx.mor_map[m]] = incl_b.mor_map[m]
    # fill composites by functoriality
    changed = True
    while changed and any(m is None for m in mor_map):
        changed = False
        for g in P.morphisms():
            for f in P.morphisms():
                if P.src[g] == P.tgt[f]:
                    c = P.comp[g][f]
                    if mor_map[c] is None and mor_map[g] is not None and mor_map[f] is not None:
                        mor_map[c] = target.comp[mor_map[g]][mor_map[f]]
                        changed = True
    F = CatFunctor(P, target, tuple(obj_map), tuple(mor_map))
    assert F.validate() == []
    return F


class TestGeneratingSetRLP:
    def test_trivial_fibrations_have_rlp_i(self):
        cats = [D0, IP, I_MI, TWO]
        count = 0
        for A in cats:
            for B in cats:
                for f in fun_plus(A, B).functors:
                    lhs = is_trivial_fibration(f)
                    rhs = has_rlp_I(f, marked_flavor=True)
                    assert lhs == rhs, (A, B, f.obj_map)
                    count += 1
        assert count >= 20

    def test_every_generator_is_cofibration(self):
        for fl in Flavor:
            I, J = generating_sets(fl)
            assert all(g.is_cofibration() for g in I)

    def test_j_members_are_trivial_cofibrations(self):
        for fl in (Flavor.CAT_PLUS, Flavor.CAT):
            I, J = generating_sets(fl)
            for g in J:
                assert is_trivial_cofibration(g.functor)


class TestMappingSpaces:
    def test_point_into_interval_counts(self):
        m = mapping_space(D0, IP)
        assert m.counts() == (2, 4, 8)

    def test_identity_vertex_present(self):
        m = mapping_space(IP, IP)
        assert m.n0 == 4  # endofunctors

    def test_terminal_target(self):
        m = mapping_space(IP, D0)
        assert m.counts() == (1, 1, 1)

    def test_preadd_groupoid_mapping_space(self):
        from catmodel.preaddcat import lin_Z

        LIp = lin_Z(IP)
        m = mapping_space_from_groupoid(discrete(1), LIp)
        assert m.counts() == (2, 4, 8)


class TestProducts:
    def test_empty_product_terminal(self):
        t, _ = product_family([])
        assert t.n_objects == 1 and t.n_morphisms == 1

    def test_product_of_weqs_is_weq(self):
        f = COLLAPSE
        P1, projs1 = product_family([IP, IP])
        # (f x f) as a functor between products
        P2, projs2 = product_family([D0, D0])
        nb1 = IP.n_objects
        mb1 = IP.n_morphisms
        obj_map = tuple(
            f.obj_map[o // nb1] * D0.n_objects + f.obj_map[o % nb1]
            for o in range(P1.n_objects)
        )
        mor_map = tuple(
            f.mor_map[m // mb1] * D0.n_morphisms + f.mor_map[m % mb1]
            for m in range(P1.n_morphisms)
        )
        ff = CatFunctor(P1, P2, obj_map, mor_map)
        assert ff.validate() == []
        assert is_weq(ff)

    def test_projections_are_fibrations(self):
        P, projs = product_family([IP, I_MI, D1])
        for p in projs:
            assert is_fibration(p)
