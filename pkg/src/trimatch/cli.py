"""Command-line front end.

Subcommands: ``solve`` (exact-multiplicity matching), ``gen`` (instance
generators), ``oracle`` (brute-force existence and realizability reports),
``check`` (conjecture scans) and ``validate``.

Exit codes are a stable contract: 0 success or pass, 1 negative verdict
(oracle found nothing), 2 usage error or precondition failure, 3 a
conjecture scan reported a counterexample.  Verdict text goes to stdout and
diagnostics (including timings) to stderr, so stdout and all output files
are byte-identical across runs with identical inputs and seeds.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import conjectures, constructions, oracle, solver
from .graphcore import (
    Matching,
    TrimatchError,
    parse_instance,
    serialize_instance,
    serialize_matching,
    validate,
)

_SEP = (", ", ": ")


def _parse_ints(text: str, what: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise TrimatchError(f"{what} must be comma-separated integers, got {text!r}")
    return values


def _parse_shard(text: str) -> tuple[int, int]:
    try:
        i, m = text.split("/")
        return int(i), int(m)
    except ValueError:
        raise TrimatchError(f"shard must look like i/m, got {text!r}")


def _read_instance(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise TrimatchError(f"cannot read {path}: {exc.strerror}")
    return parse_instance(text)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cmd_solve(args) -> int:
    instance = _read_instance(args.input)
    target = _parse_ints(args.target, "--target")
    matching = solver.find_matching(instance, target)
    text = serialize_matching(matching)
    if args.out:
        _emit(text, args.out)
        print(f"matching with distribution ({args.target}) written to {args.out}")
    elif args.json:
        sys.stdout.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_gen(args) -> int:
    if args.generator == "cyclic":
        if (args.mult is None) == (args.shifts is None):
            raise TrimatchError("gen cyclic needs exactly one of --mult / --shifts")
        if args.mult is not None:
            mult = _parse_ints(args.mult, "--mult")
            shifts = constructions.choose_shifts(args.n, mult)
        else:
            shifts = constructions.ShiftVector(
                args.n, _parse_ints(args.shifts, "--shifts"))
        instance = constructions.cyclic_construction(args.n, shifts)
    elif args.generator == "k4":
        instance = constructions.k4_construction(args.n)
    elif args.generator == "latin":
        squares = conjectures.enumerate_latin_squares(args.order, reduced=True)
        instance = None
        for i, square in enumerate(squares):
            if i == args.index:
                instance = constructions.latin_to_instance(square)
                break
        if instance is None:
            raise TrimatchError(
                f"no reduced latin square of order {args.order} at index {args.index}")
    elif args.generator == "cayley":
        factors = _parse_ints(args.factors, "--factors")
        instance = constructions.latin_to_instance(
            constructions.cayley_table(factors))
    else:
        assert args.generator == "random"
        instance = constructions.random_instance(
            args.n, k=args.k, seed=args.seed, bipartite=args.bipartite)
    _emit(serialize_instance(instance), args.out)
    return 0


def _cmd_oracle(args) -> int:
    instance = _read_instance(args.input)
    target = _parse_ints(args.target, "--target") if args.target else None
    size = args.size
    if args.size_from_target:
        if target is None:
            raise TrimatchError("--size-from-target needs --target")
        size = sum(target)

    if args.report:
        if size is None:
            raise TrimatchError("--report needs --size or --size-from-target")
        report = oracle.achievable_distributions(
            instance, size, queried=target,
            override_guard=args.override_guard)
        payload_text = json.dumps(report.to_payload(), separators=_SEP) + "\n"
        if args.out:
            _emit(payload_text, args.out)
        if args.json:
            sys.stdout.write(payload_text)
        else:
            sys.stdout.write(oracle.format_report(report))
        if target is not None and not report.queried_found:
            return 1
        return 0

    if target is None:
        raise TrimatchError("oracle needs --target or --report with --size")
    found, witness = oracle.exists_exact(instance, target,
                                         override_guard=args.override_guard)
    if found:
        assert witness is not None
        text = serialize_matching(witness)
        if args.out:
            _emit(text, args.out)
        if args.json:
            sys.stdout.write(json.dumps(
                {"found": True,
                 "witness": [[e.u, e.v, e.colour] for e in witness.sorted_edges()]},
                separators=_SEP) + "\n")
        else:
            print(f"found: matching with distribution ({args.target}) exists")
        return 0
    if args.json:
        sys.stdout.write(json.dumps({"found": False}, separators=_SEP) + "\n")
    else:
        print(f"not found: no matching with distribution ({args.target})")
    return 1


def _cmd_check(args) -> int:
    shard = _parse_shard(args.shard)
    if args.conjecture == "conj3":
        verdict = conjectures.check_three_colour_split(
            args.n, simple_only=not args.multigraph, shard=shard,
            workers=args.workers, override_guard=args.override_guard)
    elif args.conjecture == "ryser":
        verdict = conjectures.check_ryser_mult(
            args.order, reduced_only=not args.all_squares, shard=shard,
            workers=args.workers, override_guard=args.override_guard)
    else:
        assert args.conjecture == "abelian"
        factors = _parse_ints(args.factors, "--factors")
        verdict = conjectures.check_abelian_hall(
            factors, shard=shard, workers=args.workers,
            override_guard=args.override_guard)

    payload_text = json.dumps(verdict.to_payload(), separators=_SEP) + "\n"
    if args.out:
        _emit(payload_text, args.out)
    if args.json:
        sys.stdout.write(payload_text)
    else:
        state = "pass" if verdict.passed else "COUNTEREXAMPLE"
        print(f"{verdict.scope} [shard {verdict.shard}]: {state}, "
              f"{verdict.cases_checked} cases")
        for inst, target in verdict.counterexamples:
            print(f"  counterexample: target {target} on "
                  f"{serialize_instance(inst).strip()}")
    print(f"elapsed {verdict.elapsed:.2f}s", file=sys.stderr)
    return 0 if verdict.passed else 3


def _cmd_validate(args) -> int:
    instance = _read_instance(args.input)
    violations = validate(instance)
    if violations:
        for line in violations:
            print(line)
        return 2
    print("ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trimatch",
        description="matchings with prescribed colour multiplicities in "
                    "matching-decomposed graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="construct an exact-multiplicity matching")
    p_solve.add_argument("--input", required=True, help="instance file")
    p_solve.add_argument("--target", required=True, help="a1,a2,a3")
    p_solve.add_argument("--out", help="matching file to write")
    p_solve.add_argument("--json", action="store_true")
    p_solve.set_defaults(func=_cmd_solve)

    p_gen = sub.add_parser("gen", help="generate instance files")
    gen_sub = p_gen.add_subparsers(dest="generator", required=True)
    g_cyc = gen_sub.add_parser("cyclic", help="residue-shift bipartite blocker")
    g_cyc.add_argument("--n", type=int, required=True)
    g_cyc.add_argument("--mult", help="multiplicities; shifts are chosen for them")
    g_cyc.add_argument("--shifts", help="explicit distinct residues")
    g_k4 = gen_sub.add_parser("k4", help="disjoint K4 blocks")
    g_k4.add_argument("--n", type=int, required=True)
    g_lat = gen_sub.add_parser("latin", help="instance of an enumerated latin square")
    g_lat.add_argument("--order", type=int, required=True)
    g_lat.add_argument("--index", type=int, default=0)
    g_cay = gen_sub.add_parser("cayley", help="abelian group addition table")
    g_cay.add_argument("--factors", required=True, help="cyclic factor orders, e.g. 2,2")
    g_rnd = gen_sub.add_parser("random", help="seeded random matchings")
    g_rnd.add_argument("--n", type=int, required=True)
    g_rnd.add_argument("--seed", type=int, default=0)
    g_rnd.add_argument("--k", type=int, default=3)
    g_rnd.add_argument("--bipartite", action="store_true")
    for g in (g_cyc, g_k4, g_lat, g_cay, g_rnd):
        g.add_argument("--out", help="instance file to write (default stdout)")
    p_gen.set_defaults(func=_cmd_gen)

    p_oracle = sub.add_parser("oracle", help="brute-force existence and reports")
    p_oracle.add_argument("--input", required=True)
    p_oracle.add_argument("--target", help="a1,...,ak")
    p_oracle.add_argument("--size", type=int, help="matching size for --report")
    p_oracle.add_argument("--size-from-target", action="store_true",
                          dest="size_from_target")
    p_oracle.add_argument("--report", action="store_true",
                          help="enumerate all achievable distributions")
    p_oracle.add_argument("--out", help="write report or witness to a file")
    p_oracle.add_argument("--json", action="store_true")
    p_oracle.add_argument("--override-guard", action="store_true",
                          dest="override_guard")
    p_oracle.set_defaults(func=_cmd_oracle)

    p_check = sub.add_parser("check", help="conjecture scans")
    check_sub = p_check.add_subparsers(dest="conjecture", required=True)
    c_three = check_sub.add_parser("conj3", help="three-colour split scan")
    c_three.add_argument("--n", type=int, required=True)
    c_three.add_argument("--multigraph", action="store_true",
                         help="exploratory multigraph mode")
    c_ryser = check_sub.add_parser("ryser", help="latin square multiplicity scan")
    c_ryser.add_argument("--order", type=int, required=True)
    c_ryser.add_argument("--all-squares", action="store_true", dest="all_squares",
                         help="scan all squares instead of reduced ones")
    c_abel = check_sub.add_parser("abelian", help="abelian addition table scan")
    c_abel.add_argument("--factors", required=True)
    for c in (c_three, c_ryser, c_abel):
        c.add_argument("--shard", default="0/1", help="process indices i mod m, as i/m")
        c.add_argument("--workers", type=int, default=1)
        c.add_argument("--out", help="verdict file to write")
        c.add_argument("--json", action="store_true")
        c.add_argument("--override-guard", action="store_true",
                       dest="override_guard")
    p_check.set_defaults(func=_cmd_check)

    p_val = sub.add_parser("validate", help="check instance invariants")
    p_val.add_argument("--input", required=True)
    p_val.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except TrimatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
