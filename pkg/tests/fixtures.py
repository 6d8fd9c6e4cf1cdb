"""Shared acceptance/test fixtures built by hand."""

from catmodel.abgrp import FinAbGroup
from catmodel.preaddcat import FinPreAddCat, PMor


def zero_category(n: int) -> FinPreAddCat:
    """n objects, every hom group trivial: everything is a zero object."""
    zero = FinAbGroup(0)
    hom = [[zero] * n for _ in range(n)]
    c = FinPreAddCat(n, hom, {}, [zero.zero()] * n)
    return c.with_marking(
        [PMor(a, b, zero.zero()) for a in range(n) for b in range(n)]
    )


def banach_style_fixture() -> FinPreAddCat:
    """A marked pre-additive category failing marked-sum closure.

    Objects V and W = V + V; marking: +-1 on V but only +-identity on W,
    so the witnessed block sum diag(1, -1) of two marked automorphisms is
    unmarked (the finite stand-in for isometries versus norm equivalence).
    """
    z = FinAbGroup(1)
    z2 = FinAbGroup(2)
    z4 = FinAbGroup(4)
    hom = [[z, z2], [z2, z4]]

    def unit(n, k):
        return tuple(1 if i == k else 0 for i in range(n))

    comp = {
        (0, 0, 0): (((1,),),),
        (0, 0, 1): ((unit(2, 0),), (unit(2, 1),)),
        (0, 1, 0): ((unit(1, 0), (0,)), ((0,), unit(1, 0))),
        (0, 1, 1): (
            (unit(2, 0), (0, 0)),
            ((0, 0), unit(2, 0)),
            (unit(2, 1), (0, 0)),
            ((0, 0), unit(2, 1)),
        ),
        (1, 0, 0): ((unit(2, 0), unit(2, 1)),),
        (1, 0, 1): (
            (unit(4, 0), unit(4, 1)),
            (unit(4, 2), unit(4, 3)),
        ),
        (1, 1, 0): (
            (unit(2, 0), unit(2, 1), (0, 0), (0, 0)),
            ((0, 0), (0, 0), unit(2, 0), unit(2, 1)),
        ),
        (1, 1, 1): (
            (unit(4, 0), unit(4, 1), (0,) * 4, (0,) * 4),
            ((0,) * 4, (0,) * 4, unit(4, 0), unit(4, 1)),
            (unit(4, 2), unit(4, 3), (0,) * 4, (0,) * 4),
            ((0,) * 4, (0,) * 4, unit(4, 2), unit(4, 3)),
        ),
    }
    ident = [z.element((1,)), z4.element((1, 0, 0, 1))]
    cat = FinPreAddCat(2, hom, comp, ident)
    return cat.with_marking(
        [
            cat.id_mor(0),
            PMor(0, 0, z.element((-1,))),
            cat.id_mor(1),
            PMor(1, 1, z4.element((-1, 0, 0, -1))),
        ]
    )
