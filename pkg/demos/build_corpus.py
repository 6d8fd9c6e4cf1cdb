"""Regenerate the shipped corpus.

Each fixture is built by the library's constructors and serialized to JSON;
the expected verdicts in the manifest are written down here by hand, from
the arithmetic of the fixtures (rank counts, unit groups, idempotents), so
the corpus cross-checks the implementation instead of echoing it.

Run from the repository root:  python demos/build_corpus.py
"""

import json
import pathlib

from catmodel.abgrp import FinAbGroup
from catmodel.classifiers import (
    ClassifierKind,
    Flavor,
    build,
    disjoint_union_preadd,
    e_classifier,
    s_classifier,
    two_points_preadd,
    zero_classifier,
)
from catmodel.completions import karoubi, mat_completion, ring_cat, ring_of_integers, ring_zmod
from catmodel.equivariant import coinvariants, cyclic_group, product_group
from catmodel.markedcat import cat_to_json
from catmodel.preaddcat import FinPreAddCat, PMor, lin_Z, preadd_to_json, tensor_preadd

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


def zero_category(n):
    zero = FinAbGroup(0)
    hom = [[zero] * n for _ in range(n)]
    c = FinPreAddCat(n, hom, {}, [zero.zero()] * n)
    return c.with_marking(
        [PMor(a, b, zero.zero()) for a in range(n) for b in range(n)]
    )


def main():
    CORPUS.mkdir(exist_ok=True)
    entries = []

    def put(name, payload, checks, bound=3):
        path = f"{name}.json"
        with open(CORPUS / path, "w") as fh:
            json.dump(payload, fh, sort_keys=True, indent=1)
            fh.write("\n")
        entry = {"name": name, "payload": path, "checks": checks}
        if bound != 3:
            entry["bound"] = bound
        entries.append(entry)

    def put_preadd(name, cat, v, w, u, bound=3):
        checks = {"validate": "pass"}
        if v is not None:
            checks["locality.v"] = v
        if w is not None:
            checks["locality.w"] = w
        if u is not None:
            checks["locality.u"] = u
        put(name, preadd_to_json(cat), checks, bound)

    def put_cat(name, cat):
        put(name, cat_to_json(cat), {"validate": "pass"})

    # rings: no zero object, no sums, and 0 never splits without a zero object
    put_preadd("ring_z_mi", ring_cat(ring_of_integers()), "false", "false", "false")
    put_preadd("ring_z_ma", ring_cat(ring_of_integers(), "ma"), "false", "false", "false")
    put_preadd("ring_z4_ma", ring_cat(ring_zmod(4), "ma"), "false", "false", "false")
    # Z/6 has the nontrivial idempotents 3 and 4; they cannot split through
    # the single object (units would be forced), so u is false
    put_preadd("ring_z6_mi", ring_cat(ring_zmod(6)), "false", "false", "false", bound=4)

    # classifiers
    put_preadd("s_classifier", s_classifier(), "false", "false", "false")
    put_preadd("e_classifier", e_classifier(), "false", "false", "false")
    put_preadd("zero_classifier", zero_classifier(), "true", "true", "true")
    put_preadd("two_points", two_points_preadd(), "false", "false", "false")
    # adding a zero object makes the biproduct classifier idempotent
    # complete: End(S) = Z x Z has exactly the idempotents 0, e1, e2, id,
    # and they split through z, 1, 2, S respectively
    put_preadd(
        "s_with_zero",
        disjoint_union_preadd([s_classifier(), zero_classifier()])[0],
        "true",
        "false",
        "true",
    )

    # zero categories: everything is a zero object, every check passes
    put_preadd("zeros_1", zero_category(1), "true", "true", "true")
    put_preadd("zeros_2", zero_category(2), "true", "true", "true")
    put_preadd("zeros_3", zero_category(3), "true", "true", "true")

    # matrix completions: zero object present, but the top rank cannot be
    # doubled inside the truncation, so w is certified false; integer (and
    # field) idempotent matrices split, so u is true
    put_preadd("mat_z_1", mat_completion(ring_cat(ring_of_integers()), 1).cat, "true", "false", "true")
    put_preadd("mat_z_2", mat_completion(ring_cat(ring_of_integers()), 2).cat, "true", "false", "true", bound=2)
    put_preadd("mat_f2_2", mat_completion(ring_cat(ring_zmod(2)), 2).cat, "true", "false", "true", bound=1)

    # Karoubi envelopes: idempotent complete by construction
    put_preadd("karoubi_z", karoubi(ring_cat(ring_of_integers())).cat, "true", "false", "true")
    put_preadd("karoubi_e", karoubi(e_classifier()).cat, "true", "false", "true")
    put_preadd("karoubi_z6", karoubi(ring_cat(ring_zmod(6)), 4).cat, "true", "false", "true", bound=4)

    # group rings (coinvariants of rings)
    put_preadd("group_ring_z_c2", coinvariants(ring_cat(ring_of_integers()), cyclic_group(2)), "false", "false", "false")
    put_preadd("group_ring_z_c3", coinvariants(ring_cat(ring_of_integers()), cyclic_group(3)), "false", "false", "false")
    put_preadd(
        "group_ring_z_v4",
        coinvariants(ring_cat(ring_of_integers()), product_group(cyclic_group(2), cyclic_group(2))),
        "false",
        "false",
        None,  # idempotent enumeration over Z^4 at bound 3 is heavy; skipped
    )

    # linearizations and tensors: free hom groups, no zero object
    ip = build(ClassifierKind.I_PLUS, Flavor.PREADD_PLUS)
    put_preadd("lin_iplus", ip, "false", "false", "false")
    put_preadd("lin_delta1", build(ClassifierKind.DELTA1, Flavor.PREADD_PLUS), "false", "false", "false")
    put_preadd("tensor_iplus_squared", tensor_preadd(ip, ip).cat, "false", "false", None)

    # table-flavor fixtures: validation only
    put_cat("cat_delta0", build(ClassifierKind.DELTA0, Flavor.CAT_PLUS))
    put_cat("cat_delta1", build(ClassifierKind.DELTA1, Flavor.CAT_PLUS))
    put_cat("cat_i", build(ClassifierKind.I, Flavor.CAT_PLUS))
    put_cat("cat_iplus", build(ClassifierKind.I_PLUS, Flavor.CAT_PLUS))
    put_cat("cat_p", build(ClassifierKind.P, Flavor.CAT_PLUS))
    from catmodel.equivariant import bg_groupoid, transport_groupoid

    put_cat("cat_bc2", bg_groupoid(cyclic_group(2)))
    put_cat("cat_bc3", bg_groupoid(cyclic_group(3)))
    put_cat("cat_transport_c2", transport_groupoid(cyclic_group(2))[0])

    with open(CORPUS / "manifest.json", "w") as fh:
        json.dump({"entries": entries}, fh, sort_keys=True, indent=1)
        fh.write("\n")
    print(f"wrote {len(entries)} fixtures to {CORPUS}")


if __name__ == "__main__":
    main()
