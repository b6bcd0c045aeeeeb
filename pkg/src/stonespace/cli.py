"""Command-line driver: ``stonespace <subcommand> <file.tsf> [options]``.

Exit codes: 0 success, 1 a checked property failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .core import Point, StoneSpaceError
from .dsl import Workspace, parse_file, parse_spec, run_checks

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


class InputError(StoneSpaceError):
    pass


def _load(source: str) -> Workspace:
    if os.path.exists(source):
        return parse_file(source)
    from .constructions import corpus_entry

    try:
        entry = corpus_entry(source.removesuffix(".tsf"))
    except StoneSpaceError:
        raise InputError(f"no such file or corpus entry: {source}") from None
    return parse_spec(entry.source, f"{entry.name}.tsf")


def _families(ws: Workspace, args, minimum: int = 1):
    names = args.family or [ws.default_family()]
    if len(names) < minimum:
        raise InputError(f"this command needs at least {minimum} --family options")
    return names, [ws.family(n) for n in names]


def _class(ws: Workspace, args, required: bool = False):
    if args.class_ is None:
        if required:
            raise InputError("this command needs --class")
        return None
    return ws.klass(args.class_)


def _sigma(args) -> list[str]:
    if not args.sigma:
        return []
    return [t.strip() for t in args.sigma.split(",") if t.strip()]


def cmd_closure(ws, args):
    from .closure import closed_cardinality, closure, perfect_kernel

    names, (F, *_) = _families(ws, args)
    C = closure(F)
    d = perfect_kernel(C)
    return {
        "family": names[0],
        "states": C.size,
        "cardinality": str(closed_cardinality(C)),
        "derivative_steps": d.rank,
        "kernel_empty": d.kernel_empty,
        "automaton": C.to_text(),
    }, True


def cmd_spectrum(ws, args, need_class: bool = False):
    from .spectra import spectrum_report

    names, (F, *_) = _families(ws, args)
    R = _class(ws, args, need_class)
    return spectrum_report(F, names[0], R, args.class_).to_json(), True


def cmd_least_gen(ws, args):
    from .closure import closure
    from .genset import least_generating_set

    names, (F, *_) = _families(ws, args)
    v = least_generating_set(closure(F), _class(ws, args))
    return {"family": names[0], **v.to_json()}, True


def cmd_decompose(ws, args):
    from .closure import closure
    from .family import family_cardinality
    from .genset import decompose, decomposition_report

    names, (F, *_) = _families(ws, args)
    R = _class(ws, args)
    C = closure(F)
    t0, t1 = decompose(C, R)
    report = decomposition_report(C, R)
    return {
        "family": names[0],
        "t0": {"cardinality": str(family_cardinality(t0)), "sample": [str(p) for p in t0.points(8)]},
        "t1": {"cardinality": str(family_cardinality(t1)), "sample": [str(p) for p in t1.points(8)]},
        "checks": report,
    }, all(report.values())


def cmd_check_disjoint(ws, args):
    from .constructions import disjointness_witness

    names, fams = _families(ws, args, minimum=2)
    pairs = []
    for i in range(len(fams)):
        for j in range(i + 1, len(fams)):
            pos = disjointness_witness(fams[i], fams[j], _sigma(args))
            pairs.append({"pair": [names[i], names[j]], "disjoint": pos is None, "witness_position": pos})
    return {"sigma": _sigma(args), "disjoint": all(p["disjoint"] for p in pairs), "pairs": pairs}, True


def cmd_union(ws, args):
    from .genset import union_least_gen_criterion

    names, fams = _families(ws, args, minimum=2)
    rep = union_least_gen_criterion(fams, _sigma(args))
    return {"families": names, "sigma": _sigma(args), **rep.to_json()}, True


def cmd_additivity(ws, args):
    from .spectra import additivity_check

    names, fams = _families(ws, args, minimum=2)
    rep = additivity_check(fams, _sigma(args))
    return {"families": names, "sigma": _sigma(args), **rep.to_json()}, True


def cmd_oracle(ws, args):
    from .closure import closure
    from .oracle import OracleConfig, oracle_closure_member

    if not args.point:
        raise InputError("oracle needs --point STEM|CYCLE")
    names, (F, *_) = _families(ws, args)
    p = Point.parse(args.point)
    cfg = OracleConfig(cylinder_depth_bound=args.depth)
    engine = closure(F).contains(p)
    oracle = oracle_closure_member(F, p, cfg)
    return {"family": names[0], "point": str(p), "engine": engine, "oracle": oracle, "agree": engine == oracle}, engine == oracle


def _check_report(ws: Workspace):
    results = run_checks(ws)
    return [r.to_json() for r in results], all(r.passed for r in results)


def cmd_check(ws, args):
    checks, ok = _check_report(ws)
    return {"file": ws.filename, "checks": checks, "passed": ok}, ok


def cmd_corpus(_, args):
    from .constructions import corpus

    entries = [e for e in corpus() if not args.source or e.name == args.source.removesuffix(".tsf")]
    if args.source and not entries:
        raise InputError(f"no corpus entry named {args.source}")
    out = {}
    ok = True
    for e in entries:
        checks, passed = _check_report(e.workspace)
        out[e.name] = {"checks": checks, "passed": passed}
        ok &= passed
    return {"entries": out, "passed": ok}, ok


COMMANDS = {
    "closure": cmd_closure,
    "spectrum": cmd_spectrum,
    "relative-spectrum": lambda ws, a: cmd_spectrum(ws, a, need_class=True),
    "least-gen": cmd_least_gen,
    "decompose": cmd_decompose,
    "check-disjoint": cmd_check_disjoint,
    "union": cmd_union,
    "additivity": cmd_additivity,
    "oracle": cmd_oracle,
    "check": cmd_check,
    "corpus": cmd_corpus,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stonespace", description="Closures, spectra and generating sets of theory families.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("source", nargs="?", help="a .tsf file or the name of a corpus entry")
    parser.add_argument("--family", action="append", help="family to analyse (repeatable)")
    parser.add_argument("--class", dest="class_", help="relativizing class")
    parser.add_argument("--sigma", help="comma-separated tracks of the sub-signature")
    parser.add_argument("--json", dest="json_out", help="also write the report to this file")
    parser.add_argument("--depth", type=int, help="cylinder depth bound for the oracle")
    parser.add_argument("--point", help="point as STEM|CYCLE, for the oracle")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "corpus":
            ws = None
        elif not args.source:
            raise InputError(f"{args.command} needs a .tsf file")
        else:
            ws = _load(args.source)
        report, ok = COMMANDS[args.command](ws, args)
    except (StoneSpaceError, OSError) as exc:
        print(f"stonespace: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = json.dumps(report, indent=2, sort_keys=True)
    print(text)
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return EXIT_OK if ok else EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
