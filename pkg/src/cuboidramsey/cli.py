"""Command-line interface.

Exit codes: 0 success / claim holds, 1 claim fails (report printed),
2 usage or input error, 3 budget refusal.  JSON goes to stdout; errors are
reported on stderr as ``{"error": CODE, "message": ...}``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Any, Sequence

from . import serialize as ser
from .colouring import (GuardExceeded, Target, arrow_check, certificate_problems,
                        sibling_clash)
from .extraction import (CertificateError, NoMonochromaticCopy, PreconditionError,
                         Starvation, build_C, extract_rainbow_box, lemma2_pipeline,
                         lemma3_params, lemma3_params_sound, lemma4_params, plan_C,
                         refine_proper_trees, theorem1_params)
from .geometry import (BudgetExceeded, build_tree_simplex, cuboid_distance_profile,
                       decompose_cuboid, product, regular_simplex,
                       verify_distance_invariants)
from .harness import TRIALS, oracle_exhaustive_arrow, oracle_exhaustive_mr, run_trials
from .trees import TreeShape

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
BUDGET_ENV = "CUBOIDRAMSEY_BUDGET"


class InputError(Exception):
    pass


def _default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return 10**6
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{BUDGET_ENV}={raw!r} is not an integer")


def _rationals(text: str) -> list[Fraction]:
    try:
        return [Fraction(x) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated rationals, got {text!r}")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational, got {text!r}")


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _read_json(path: str) -> Any:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}")


def _emit(obj: Any) -> None:
    sys.stdout.write(ser.dumps(obj) + "\n")


# -- subcommands ------------------------------------------------------------

def cmd_build(args: argparse.Namespace) -> int:
    if args.what == "tree-simplex":
        if args.parents is not None:
            tree = TreeShape.from_parents([-1] + args.parents)
        elif args.arity is not None and args.height is not None:
            tree = TreeShape.complete(args.arity, args.height)
        else:
            raise InputError("tree-simplex needs --arity and --height, or --parents")
        c = build_tree_simplex(tree, args.a2, args.b2, budget=args.budget)
    elif args.what == "simplex":
        c = regular_simplex(args.k, args.d2)
    elif args.what == "product":
        if not args.files:
            raise InputError("product needs configuration files")
        c = product([ser.config_from_json(_read_json(f)) for f in args.files], budget=args.budget)
    else:
        c = build_C(args.a2, args.b2, args.mprime, budget=args.budget)
    _emit(ser.config_to_json(c, with_float=args.float))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    if args.what == "distances":
        c = ser.config_from_json(_read_json(args.config))
        report = verify_distance_invariants(c)
        _emit({"ok": report.ok, "sibling_pairs": report.sibling_pairs,
               "ancestor_pairs": report.ancestor_pairs, "private_axes": report.private_axes,
               "violations": [{"kind": v.kind, "pair": ser.key_to_json(v.pair),
                               "expected": str(v.expected), "actual": str(v.actual)}
                              for v in report.violations]})
        return EXIT_OK if report.ok else EXIT_FAIL
    if args.what == "certificate":
        cert = ser.certificate_from_json(_read_json(args.certificate))
        col = ser.colouring_from_json(_read_json(args.colouring))
        config = ser.config_from_json(_read_json(args.config)) if args.config else None
        problems = certificate_problems(cert, col, config)
        _emit({"ok": not problems, "kind": cert.kind, "problems": problems})
        return EXIT_OK if not problems else EXIT_FAIL
    if args.what == "sibling-proper":
        shapes = [TreeShape.complete(n, args.height) for n in args.arity]
        col = ser.colouring_from_json(_read_json(args.colouring))
        clash = sibling_clash(shapes, col)
        _emit({"ok": clash is None,
               "clash": None if clash is None else
               {"factor": clash[0].factor, "context": ser.key_to_json(clash[0].fixed),
                "vertices": [list(clash[1]), list(clash[2])]}})
        return EXIT_OK if clash is None else EXIT_FAIL
    raise InputError(f"unknown verify target {args.what}")


def cmd_decompose(args: argparse.Namespace) -> int:
    dec = decompose_cuboid(args.b2)
    out: dict[str, Any] = {"t": list(dec.t), "a2": ser.num(list(dec.a2))}
    if args.embedding:
        dims = sum(dec.t)
        out["embedding"] = [[corner[ax].to_triples() if ax in corner else []
                             for ax in range(dims)] for corner in dec.corners]
        out["profile_ok"] = cuboid_distance_profile(dec.corners, dec.b2)
    _emit(out)
    return EXIT_OK


def cmd_params(args: argparse.Namespace) -> int:
    if args.which == "lemma3":
        fn = lemma3_params_sound if args.sound else lemma3_params
        _emit({"n": ser.num(fn(args.h, args.nprime))})
    elif args.which == "lemma4":
        _emit({"m": ser.num(lemma4_params(args.mprime))})
    elif args.which == "C":
        _emit(ser.num(plan_C(args.a2, args.b2, args.mprime).as_dict()))
    else:
        _emit(ser.num(theorem1_params(args.b2, args.pair_counts or ())))
    return EXIT_OK


def cmd_extract(args: argparse.Namespace) -> int:
    col = ser.colouring_from_json(_read_json(args.colouring))
    if args.what == "lemma2":
        c = ser.config_from_json(_read_json(args.config))
        cert = lemma2_pipeline(c, col)
        _emit(ser.certificate_to_json(cert))
    elif args.what == "refine":
        shapes = [TreeShape.complete(n, args.height) for n in args.arity]
        res = refine_proper_trees(shapes, col, args.nprime)
        _emit({"subtrees": [[list(u) for u in st.vertices()] for st in res.subtrees],
               "log": res.log})
    else:
        sets = [list(range(k)) for k in args.sizes]
        _, cert = extract_rainbow_box(sets, col, args.mprime)
        _emit(ser.certificate_to_json(cert))
    return EXIT_OK


def cmd_fuzz(args: argparse.Namespace) -> int:
    if args.kind == "lemma2":
        params: dict = {"a2": args.a2, "b2": args.b2, "mode": args.mode}
    elif args.kind == "lemma3":
        params = {"h": args.height, "n": args.arity, "nprime": args.nprime}
        if args.palette:
            params["palette"] = args.palette
    else:
        params = {"sizes": args.sizes, "mprime": args.mprime}
    seeds = range(args.seed, args.seed + args.trials)
    failed = 0
    for rec in run_trials(args.kind, params, seeds, jobs=args.jobs):
        failed += rec["outcome"] == "IMPROPER"
        sys.stdout.write(ser.dumps(ser.num(rec)) + "\n")
    return EXIT_OK if not failed else EXIT_FAIL


def cmd_oracle(args: argparse.Namespace) -> int:
    c = ser.config_from_json(_read_json(args.config))
    if args.what == "mr":
        holds = oracle_exhaustive_mr(c, Target.parse(args.mono), Target.parse(args.rainbow))
    elif args.what == "arrow":
        holds = oracle_exhaustive_arrow(c, args.r, Target.parse(args.target))
        if args.cross_check:
            if arrow_check(c, args.r, Target.parse(args.target)) != holds:
                _fail("claim", "backtracking and partition oracles disagree")
                return EXIT_FAIL
    else:
        raise InputError(f"unknown oracle {args.what}")
    _emit({"holds": holds, "points": len(c)})
    return EXIT_OK if holds else EXIT_FAIL


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cuboidramsey", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument("--budget", type=int, default=None,
                        help=f"max points to materialize (default ${BUDGET_ENV} or 10^6)")

    b = sub.add_parser("build", help="build configurations")
    bsub = b.add_subparsers(dest="what", required=True)
    ts = bsub.add_parser("tree-simplex", parents=[budget])
    ts.add_argument("--arity", type=int)
    ts.add_argument("--height", type=int)
    ts.add_argument("--parents", type=_ints, help="parents of vertices 1.. (root 0 implied)")
    ts.add_argument("--a2", type=_rational, required=True)
    ts.add_argument("--b2", type=_rational, required=True)
    sx = bsub.add_parser("simplex")
    sx.add_argument("--k", type=int, required=True)
    sx.add_argument("--d2", type=_rational, required=True)
    pr = bsub.add_parser("product", parents=[budget])
    pr.add_argument("files", nargs="+")
    bc = bsub.add_parser("C", parents=[budget])
    bc.add_argument("--a2", type=_rational, required=True)
    bc.add_argument("--b2", type=_rationals, required=True)
    bc.add_argument("--mprime", type=_ints)
    for q in (ts, sx, pr, bc):
        q.add_argument("--float", action="store_true", help="add 17-digit float coordinates")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="re-check invariants and certificates")
    vsub = v.add_subparsers(dest="what", required=True)
    vd = vsub.add_parser("distances")
    vd.add_argument("config", nargs="?", default="-")
    vc = vsub.add_parser("certificate")
    vc.add_argument("--certificate", default="-")
    vc.add_argument("--colouring", required=True)
    vc.add_argument("--config")
    vs = vsub.add_parser("sibling-proper")
    vs.add_argument("--arity", type=_ints, required=True)
    vs.add_argument("--height", type=int, required=True)
    vs.add_argument("--colouring", required=True)
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("decompose", help="split a cuboid into sides at most b_min")
    d.add_argument("--b2", type=_rationals, required=True)
    d.add_argument("--embedding", action="store_true", help="also print the diagonal copy of R")
    d.set_defaults(func=cmd_decompose)

    pa = sub.add_parser("params", help="parameter calculators")
    psub = pa.add_subparsers(dest="which", required=True)
    p3 = psub.add_parser("lemma3")
    p3.add_argument("--h", type=int, required=True)
    p3.add_argument("--nprime", type=_ints, required=True)
    p3.add_argument("--sound", action="store_true", help="vertex-count bound")
    p4 = psub.add_parser("lemma4")
    p4.add_argument("--mprime", type=_ints, required=True)
    pc = psub.add_parser("C")
    pc.add_argument("--a2", type=_rational, required=True)
    pc.add_argument("--b2", type=_rationals, required=True)
    pc.add_argument("--mprime", type=_ints)
    pt = psub.add_parser("theorem1")
    pt.add_argument("--b2", type=_rationals, required=True)
    pt.add_argument("--pair-counts", type=_ints, help="a_j-pair counts of S_2, S_3, ...")
    pa.set_defaults(func=cmd_params)

    e = sub.add_parser("extract", help="turn a colouring into a certificate")
    esub = e.add_subparsers(dest="what", required=True)
    e2 = esub.add_parser("lemma2")
    e2.add_argument("--config", required=True)
    e2.add_argument("--colouring", default="-")
    er = esub.add_parser("refine")
    er.add_argument("--arity", type=_ints, required=True)
    er.add_argument("--height", type=int, required=True)
    er.add_argument("--nprime", type=_ints, required=True)
    er.add_argument("--colouring", default="-")
    eb = esub.add_parser("rainbow-box")
    eb.add_argument("--sizes", type=_ints, required=True)
    eb.add_argument("--mprime", type=_ints, required=True)
    eb.add_argument("--colouring", default="-")
    e.set_defaults(func=cmd_extract)

    f = sub.add_parser("fuzz", help="seeded randomized trials, JSONL on stdout")
    f.add_argument("kind", choices=sorted(TRIALS))
    f.add_argument("--trials", type=int, default=100)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--jobs", type=int, default=1)
    f.add_argument("--a2", type=_rational, default=Fraction(1))
    f.add_argument("--b2", type=_rationals, default=[Fraction(4)])
    f.add_argument("--mode", choices=["no-mono", "random"], default="no-mono")
    f.add_argument("--arity", type=_ints, default=[7, 3])
    f.add_argument("--height", type=int, default=2)
    f.add_argument("--nprime", type=_ints, default=[1, 1])
    f.add_argument("--palette", type=int)
    f.add_argument("--sizes", type=_ints, default=[2, 8])
    f.add_argument("--mprime", type=_ints, default=[2, 2])
    f.set_defaults(func=cmd_fuzz)

    o = sub.add_parser("oracle", help="exhaustive checks on tiny configurations")
    osub = o.add_subparsers(dest="what", required=True)
    om = osub.add_parser("mr")
    om.add_argument("--config", default="-")
    om.add_argument("--mono", required=True, help="pair:D2 | simplex:K:D2 | cuboid:B2,...")
    om.add_argument("--rainbow", required=True)
    oa = osub.add_parser("arrow")
    oa.add_argument("--config", default="-")
    oa.add_argument("--r", type=int, required=True)
    oa.add_argument("--target", required=True)
    oa.add_argument("--cross-check", action="store_true")
    o.set_defaults(func=cmd_oracle)
    return p


def _fail(code: str, message: str, **extra: Any) -> None:
    sys.stderr.write(ser.dumps({"error": code, "message": message, **extra}) + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if getattr(args, "budget", 0) is None:
            args.budget = _default_budget()
        return args.func(args)
    except BudgetExceeded as exc:
        _emit({"refused": True, "estimate": str(exc.estimate), "budget": exc.budget})
        _fail("budget", str(exc), estimate=str(exc.estimate))
        return EXIT_BUDGET
    except (InputError, ValueError, GuardExceeded, NoMonochromaticCopy, PreconditionError) as exc:
        _fail("input", str(exc))
        return EXIT_USAGE
    except (Starvation, CertificateError) as exc:
        _fail("claim", str(exc))
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
