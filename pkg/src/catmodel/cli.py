"""Command-line front end: JSON input, deterministic reports, exit codes.

Exit codes: 0 pass/true, 1 fail/false, 2 inconclusive, 3 input error.
The environment variable CATMODEL_CAP overrides the enumeration cap.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import abgrp, classifiers, completions, equivariant, locality, markedcat
from . import modelstruct, preaddcat, simplicial
from .presentations import DEFAULT_CAP, SizeLimit
from .verdict import Verdict

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_INCONCLUSIVE = 2
EXIT_INPUT = 3


def _cap(args) -> int:
    if getattr(args, "cap", None):
        return args.cap
    env = os.environ.get("CATMODEL_CAP")
    return int(env) if env else DEFAULT_CAP


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _load(path: str):
    with open(path) as fh:
        return json.load(fh)


def _is_preadd_payload(obj: dict) -> bool:
    return "hom" in obj


def _load_category(obj: dict):
    if _is_preadd_payload(obj):
        return preaddcat.preadd_from_json(obj)
    return markedcat.cat_from_json(obj)


def _load_functor(obj: dict):
    if _is_preadd_payload(obj.get("domain", {})):
        return preaddcat.functor_add_from_json(obj)
    return markedcat.functor_from_json(obj)


def _verdict_exit(v) -> int:
    if isinstance(v, Verdict):
        return {
            Verdict.TRUE: EXIT_TRUE,
            Verdict.FALSE: EXIT_FALSE,
            Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
        }[v]
    return EXIT_TRUE if v else EXIT_FALSE


# ---------------------------------------------------------------------------
# subcommands


def cmd_classifier(args) -> int:
    try:
        kind = classifiers.ClassifierKind(args.kind)
        flavor = classifiers.Flavor(args.flavor)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        cat = classifiers.build(kind, flavor)
    except SizeLimit as exc:
        print(f"size limit: {exc}")
        return EXIT_INCONCLUSIVE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.json:
        if isinstance(cat, preaddcat.FinPreAddCat):
            print(_dump(preaddcat.preadd_to_json(cat)))
        else:
            print(_dump(markedcat.cat_to_json(cat)))
    else:
        if isinstance(cat, preaddcat.FinPreAddCat):
            print(
                f"{kind.value} [{flavor.value}]: {cat.n_objects} objects, "
                f"{len(cat.all_marked())} marked elements"
            )
        else:
            print(
                f"{kind.value} [{flavor.value}]: {cat.n_objects} objects, "
                f"{cat.n_morphisms} morphisms, {len(cat.marked)} marked"
            )
    return EXIT_TRUE


def cmd_validate(args) -> int:
    try:
        payload = _load(args.path)
        cat = _load_category(payload)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    errs = cat.validate()
    for e in sorted(errs):
        print(f"violation: {e}")
    print("valid" if not errs else f"invalid ({len(errs)} violations)")
    return EXIT_TRUE if not errs else EXIT_FALSE


def cmd_check(args) -> int:
    try:
        payload = _load(args.path)
        f = _load_functor(payload)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        if args.kind == "cof":
            out = modelstruct.is_cofibration(f)
        elif args.kind == "fib":
            out = modelstruct.is_fibration(f)
        elif args.kind == "weq":
            out = modelstruct.is_weq(f)
        else:
            out = modelstruct.is_trivial_fibration(f)
    except SizeLimit as exc:
        print(f"inconclusive: {exc}")
        return EXIT_INCONCLUSIVE
    print(f"{args.kind}: {'true' if out else 'false'}")
    return EXIT_TRUE if out else EXIT_FALSE


def cmd_lift(args) -> int:
    try:
        payload = _load(args.path)
        sq = modelstruct.LiftSquare(
            i=_load_functor(payload["i"]),
            f=_load_functor(payload["f"]),
            top=_load_functor(payload["top"]),
            bottom=_load_functor(payload["bottom"]),
        )
        errs = sq.validate()
        if errs:
            print(f"error: {errs[0]}", file=sys.stderr)
            return EXIT_INPUT
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = modelstruct.solve_lift(sq, cap=_cap(args))
    if isinstance(out, modelstruct.NoLift):
        print(f"no lift: {out.reason}")
        return EXIT_FALSE
    if args.json:
        if isinstance(out, preaddcat.AddFunctor):
            print(_dump(preaddcat.functor_add_to_json(out)))
        else:
            print(_dump(markedcat.functor_to_json(out)))
    else:
        print(f"lift found: objects -> {list(out.obj_map)}")
    return EXIT_TRUE


def cmd_factor(args) -> int:
    try:
        payload = _load(args.path)
        f = _load_functor(payload)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        if args.kind == "cyl":
            fac = modelstruct.factor_cof_trivfib(f)
        else:
            fac = modelstruct.factor_trivcof_fib(f)
    except SizeLimit as exc:
        print(f"inconclusive: {exc}")
        return EXIT_INCONCLUSIVE
    mid = fac.mid
    n = mid.n_objects
    print(f"factorization {fac.kind}: middle has {n} objects")
    return EXIT_TRUE


def cmd_map_space(args) -> int:
    try:
        a = _load_category(_load(args.a))
        b = _load_category(_load(args.b))
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        k = modelstruct.mapping_space(a, b, max_level=args.level, cap=_cap(args))
    except SizeLimit as exc:
        print(f"inconclusive: {exc}")
        return EXIT_INCONCLUSIVE
    counts = k.counts()
    if args.json:
        print(_dump(simplicial.sset_to_json(k)))
    else:
        print(f"levels: {counts[0]} {counts[1]} {counts[2]}")
    return EXIT_TRUE


def cmd_locality(args) -> int:
    try:
        cat = preaddcat.preadd_from_json(_load(args.path))
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    verdicts = []
    if args.mode in ("structural", "both"):
        if args.map == "v":
            v, _ = locality.check_zero(cat)
        elif args.map == "w":
            v, report = locality.is_additive(cat, args.bound)
            v = report.binary_sums.both_and(report.marked_sum_closure)
        else:
            v, _ = locality.check_idempotent_complete(cat, args.bound)
        verdicts.append(("structural", v))
    if args.mode in ("simplicial", "both"):
        v = locality.is_local_simplicial(cat, args.map, args.bound)
        verdicts.append(("simplicial", v))
    for name, v in verdicts:
        print(f"{name}: {v.value}")
    final = verdicts[0][1]
    for _, v in verdicts[1:]:
        final = final.both_and(v)
    return _verdict_exit(final)


def cmd_complete(args) -> int:
    try:
        cat = preaddcat.preadd_from_json(_load(args.path))
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.kind == "mat":
        out = completions.mat_completion(cat, args.maxrank)
        result = out.cat
        print(f"mat completion: {result.n_objects} objects")
        code = EXIT_TRUE
    else:
        out = completions.karoubi(cat, args.bound)
        result = out.cat
        print(
            f"karoubi envelope: {result.n_objects} objects"
            + ("" if out.complete is Verdict.TRUE else " (idempotent list inconclusive)")
        )
        code = EXIT_TRUE if out.complete is Verdict.TRUE else EXIT_INCONCLUSIVE
    if args.json:
        print(_dump(preaddcat.preadd_to_json(result)))
    return code


def _load_group(path: str) -> equivariant.FinGroup:
    obj = _load(path)
    return equivariant.FinGroup(tuple(tuple(r) for r in obj["table"]))


def _load_action(path: str) -> equivariant.GAction:
    obj = _load(path)
    base = preaddcat.preadd_from_json(obj["base"])
    group = equivariant.FinGroup(tuple(tuple(r) for r in obj["group"]["table"]))
    action = []
    for spec in obj["action"]:
        obj_map = tuple(spec["object_map"])
        hom_maps = tuple(
            tuple(
                abgrp.AbHom(
                    base.hom(a, b),
                    base.hom(obj_map[a], obj_map[b]),
                    spec["hom_maps"][a][b],
                )
                for b in base.objects()
            )
            for a in base.objects()
        )
        action.append(preaddcat.AddFunctor(base, base, obj_map, hom_maps))
    return equivariant.GAction(base, group, tuple(action))


def cmd_equivariant(args) -> int:
    try:
        if args.kind in ("coinv", "orbitJ"):
            base = preaddcat.preadd_from_json(_load(args.path))
            group = _load_group(args.group)
        else:
            x = _load_action(args.path)
            errs = x.validate()
            if errs:
                print(f"error: {errs[0]}", file=sys.stderr)
                return EXIT_INPUT
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        if args.kind == "coinv":
            out = equivariant.coinvariants(base, group, _cap(args))
            print(f"coinvariants: {out.n_objects} objects")
            if args.json:
                print(_dump(preaddcat.preadd_to_json(out)))
            return EXIT_TRUE
        if args.kind == "orbitJ":
            members = json.loads(args.subgroup) if args.subgroup else list(group.elements())
            out = equivariant.orbit_value_J(base, group, members, _cap(args))
            print(f"orbit value (coinvariants at the orbit): {out.n_objects} objects")
            if args.json:
                print(_dump(preaddcat.preadd_to_json(out)))
            return EXIT_TRUE
        if args.kind == "inv":
            inv = equivariant.invariants_hat(x)
            print(f"invariants: {inv.cat.n_objects} objects")
            if args.json:
                print(_dump(preaddcat.preadd_to_json(inv.cat)))
            return EXIT_TRUE
        if args.kind == "orbitC":
            members = json.loads(args.subgroup) if args.subgroup else list(x.group.elements())
            inv = equivariant.orbit_value_C(x, members)
            print(f"orbit value (invariants at the orbit): {inv.cat.n_objects} objects")
            return EXIT_TRUE
        ok = equivariant.psi_check(x, _cap(args))
        print(f"psi isomorphism: {'true' if ok else 'false'}")
        return EXIT_TRUE if ok else EXIT_FALSE
    except equivariant.NotASubgroup as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SizeLimit as exc:
        print(f"inconclusive: {exc}")
        return EXIT_INCONCLUSIVE


def cmd_corpus(args) -> int:
    import pathlib

    try:
        manifest = _load(args.path)
        root = pathlib.Path(args.path).parent
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    failures = 0
    rows = []
    for entry in manifest["entries"]:
        name = entry["name"]
        try:
            payload = _load(str(root / entry["payload"]))
            cat = _load_category(payload)
        except Exception as exc:
            print(f"error loading {name}: {exc}", file=sys.stderr)
            return EXIT_INPUT
        for check, expected in sorted(entry.get("checks", {}).items()):
            got = _run_check(cat, check, entry)
            ok = got == expected
            if not ok:
                failures += 1
            rows.append((name, check, expected, got, "ok" if ok else "MISMATCH"))
    width = max((len(r[0]) for r in rows), default=4)
    for name, check, expected, got, status in rows:
        print(f"{name:<{width}}  {check:<14} expected={expected:<13} got={got:<13} {status}")
    print(f"{len(rows)} checks, {failures} mismatches")
    return EXIT_TRUE if failures == 0 else EXIT_FALSE


def _run_check(cat, check: str, entry) -> str:
    if check == "validate":
        return "pass" if cat.validate() == [] else "fail"
    if check.startswith("locality."):
        m = check.split(".", 1)[1]
        bound = entry.get("bound", 3)
        return locality.is_local_simplicial(cat, m, bound).value
    if check == "zero":
        return locality.check_zero(cat)[0].value
    if check == "objects":
        return str(cat.n_objects)
    raise ValueError(f"unknown check {check}")


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="catmodel",
        description="finite marked categories and their model-structure constructions",
    )
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classifier", help="build a named classifier")
    c.add_argument("kind", choices=[k.value for k in classifiers.ClassifierKind])
    c.add_argument("--flavor", default="cat+", choices=[f.value for f in classifiers.Flavor])
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_classifier)

    c = sub.add_parser("validate", help="validate a category payload")
    c.add_argument("path")
    c.set_defaults(func=cmd_validate)

    c = sub.add_parser("check", help="test a model-structure class predicate")
    c.add_argument("kind", choices=["cof", "fib", "weq", "trivfib"])
    c.add_argument("path")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("lift", help="solve a lifting square")
    c.add_argument("path")
    c.add_argument("--cap", type=int)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_lift)

    c = sub.add_parser("factor", help="factor a morphism")
    c.add_argument("kind", choices=["cyl", "path"])
    c.add_argument("path")
    c.set_defaults(func=cmd_factor)

    c = sub.add_parser("map-space", help="mapping space of two categories")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--level", type=int, default=2)
    c.add_argument("--cap", type=int)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_map_space)

    c = sub.add_parser("locality", help="additivity / idempotent completeness")
    c.add_argument("path")
    c.add_argument("--map", required=True, choices=["u", "v", "w"])
    c.add_argument("--bound", type=int, default=3)
    c.add_argument("--mode", default="both", choices=["structural", "simplicial", "both"])
    c.set_defaults(func=cmd_locality)

    c = sub.add_parser("complete", help="matrix or Karoubi completion")
    c.add_argument("kind", choices=["mat", "karoubi"])
    c.add_argument("path")
    c.add_argument("--maxrank", type=int, default=3)
    c.add_argument("--bound", type=int, default=3)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_complete)

    c = sub.add_parser("equivariant", help="group actions: (co)invariants")
    c.add_argument("kind", choices=["coinv", "inv", "psi", "orbitJ", "orbitC"])
    c.add_argument("path")
    c.add_argument("--group", help="group JSON (for coinv/orbitJ)")
    c.add_argument("--subgroup", help="JSON list of element indices")
    c.add_argument("--cap", type=int)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_equivariant)

    c = sub.add_parser("corpus", help="run a corpus manifest")
    c.add_argument("path")
    c.set_defaults(func=cmd_corpus)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
