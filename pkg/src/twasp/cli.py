"""Command-line entry point: ``twasp <command> <file> [options]``."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .cnf import count_models
from .dp import count_answer_sets, enumerate_answer_sets, is_consistent
from .graphs import cnf_primal_graph, primal_graph, scc_info
from .oracle import MAX_ATOMS, SizeGuardError, brute_answer_sets, brute_models, tight_answer_sets
from .program import Program, ProgramError, classify, format_program, parse_program
from .reductions import hcf_to_tight, tight_to_cnf, witness_td_cnf, witness_td_tight
from .treedecomp import (
    TDFormatError,
    TreeDecomposition,
    bag_rule_indices,
    decompose,
    make_nice,
    read_td,
    validate_td,
    write_td,
)

EXIT_OK, EXIT_ERROR, EXIT_GUARD, EXIT_DISAGREE = 0, 1, 2, 3
EXIT_SAT, EXIT_UNSAT = 10, 20


class UsageError(Exception):
    """Bad input detected by the CLI itself; reported with exit code 1."""


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="ground program, '-' for standard input")
    common.add_argument("--td", metavar="FILE", help="use this PACE .td decomposition of the primal graph")
    common.add_argument("--emit-td", metavar="FILE", help="write the decomposition used to FILE")
    common.add_argument("--heuristic", choices=("min-fill", "min-degree"), default="min-fill")
    common.add_argument("--seed", type=int, default=0, help="tie-breaking seed for the heuristic")
    common.add_argument("--allow-reserved", action="store_true",
                        help="accept generated atom names such as __b(x,1) in the input")

    ap = argparse.ArgumentParser(prog="twasp", description="Treewidth-guided solving and compilation "
                                 "of head-cycle-free disjunctive logic programs.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="structural parameters as JSON")
    sub.add_parser("solve", parents=[common], help="decide consistency (exit 10/20)")
    sub.add_parser("count", parents=[common], help="number of answer sets")
    enum = sub.add_parser("enum", parents=[common], help="list answer sets")
    enum.add_argument("--limit", type=int, default=None)
    sub.add_parser("verify", parents=[common], help="cross-check all solving routes")

    comp = sub.add_parser("compile", help="compile to a tight program or to CNF")
    targets = comp.add_subparsers(dest="target", required=True)
    tight = targets.add_parser("tight", parents=[common])
    tight.add_argument("--no-preserve", dest="preserve", action="store_false",
                       help="drop the rules making level mappings unique")
    cnf = targets.add_parser("cnf", parents=[common])
    cnf.add_argument("--weak", action="store_true",
                     help="one-directional provability (satisfiability only)")
    return ap


def _load(args) -> Program:
    try:
        text = sys.stdin.read() if args.file == "-" else open(args.file, encoding="utf-8").read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
    return parse_program(text, allow_reserved=args.allow_reserved)


def _decomposition(args, p: Program) -> TreeDecomposition:
    g = primal_graph(p)
    if args.td:
        try:
            text = open(args.td, encoding="utf-8").read()
        except OSError as exc:
            raise UsageError(f"cannot read {args.td}: {exc.strerror}") from None
        td, nverts = read_td(text)
        if nverts != p.num_atoms:
            raise UsageError(f"{args.td} declares {nverts} vertices but the program has {p.num_atoms} atoms")
        bad = validate_td(g, td)
        if bad:
            raise UsageError(f"{args.td}: {bad}")
    else:
        td = decompose(g, args.heuristic, args.seed)
    if args.emit_td:
        with open(args.emit_td, "w", encoding="utf-8") as fh:
            fh.write(write_td(td, p.num_atoms))
    return td


def _require_hcf(p: Program):
    if not classify(p).is_hcf:
        raise UsageError("program is not head-cycle-free")


def _render(p: Program, interp) -> str:
    return "{" + ",".join(sorted(p.names[a] for a in interp)) + "}"


def cmd_analyze(args, out) -> int:
    p = _load(args)
    cls = classify(p)
    scc = scc_info(p)
    td = _decomposition(args, p)
    per_bag = bag_rule_indices(p, td)
    report = {
        "atoms": p.num_atoms,
        "rules": len(p.rules),
        "is_tight": cls.is_tight,
        "is_normal": cls.is_normal,
        "is_hcf": cls.is_hcf,
        "ell_scc": {p.names[a]: scc.ell_scc[a] for a in range(p.num_atoms)},
        "ell": scc.ell,
        "width": td.width,
        "lambda": min(td.width, scc.ell),
        "max_bag_rules": max((len(r) for r in per_bag), default=0),
    }
    if cls.is_hcf:
        tight = hcf_to_tight(p, td, scc)
        wt = witness_td_tight(p, td, tight, scc)
        f = tight_to_cnf(tight, wt)
        report["tight_atoms"] = tight.num_atoms
        report["tight_witness_width"] = wt.width
        report["cnf_vars"] = f.num_vars
        report["cnf_clauses"] = len(f.clauses)
        report["cnf_witness_width"] = witness_td_cnf(wt, tight, f).width
    json.dump(report, out, indent=2)
    out.write("\n")
    return EXIT_OK


def cmd_solve(args, out) -> int:
    p = _load(args)
    _require_hcf(p)
    ok = is_consistent(p, make_nice(_decomposition(args, p)))
    out.write("CONSISTENT\n" if ok else "INCONSISTENT\n")
    return EXIT_SAT if ok else EXIT_UNSAT


def cmd_count(args, out) -> int:
    p = _load(args)
    _require_hcf(p)
    out.write(f"{count_answer_sets(p, make_nice(_decomposition(args, p)))}\n")
    return EXIT_OK


def cmd_enum(args, out) -> int:
    p = _load(args)
    _require_hcf(p)
    if args.limit is not None and args.limit < 0:
        raise UsageError("--limit must be non-negative")
    ntd = make_nice(_decomposition(args, p))
    for k, interp in enumerate(enumerate_answer_sets(p, ntd)):
        if args.limit is not None and k >= args.limit:
            break
        out.write(_render(p, interp) + "\n")
    return EXIT_OK


def _compile_tight(args, p: Program):
    _require_hcf(p)
    td = _decomposition(args, p)
    scc = scc_info(p)
    tight = hcf_to_tight(p, td, scc, preserve=getattr(args, "preserve", True))
    return tight, witness_td_tight(p, td, tight, scc)


def cmd_compile(args, out) -> int:
    p = _load(args)
    if args.target == "tight":
        tight, _ = _compile_tight(args, p)
        out.write(format_program(tight))
        return EXIT_OK
    if classify(p).is_tight:
        f = tight_to_cnf(p, _decomposition(args, p), weak=args.weak)
    else:
        tight, wt = _compile_tight(args, p)
        f = tight_to_cnf(tight, wt, weak=args.weak)
    out.write(f.to_dimacs())
    return EXIT_OK


def cmd_verify(args, out) -> int:
    p = _load(args)
    _require_hcf(p)
    if p.num_atoms > MAX_ATOMS:
        raise SizeGuardError(f"{p.num_atoms} atoms exceed the verification limit of {MAX_ATOMS}")
    td = _decomposition(args, p)
    scc = scc_info(p)
    ntd = make_nice(td)
    results: dict[str, object] = {}

    oracle = brute_answer_sets(p)
    dp_sets = set(enumerate_answer_sets(p, ntd, scc))
    results["oracle_count"] = len(oracle)
    results["dp_count"] = count_answer_sets(p, ntd, scc)
    results["dp_enum_matches_oracle"] = dp_sets == oracle
    results["solve"] = is_consistent(p, ntd, scc)

    tight = hcf_to_tight(p, td, scc)
    wt = witness_td_tight(p, td, tight, scc)
    results["tight_is_tight"] = classify(tight).is_tight
    results["tight_witness_valid"] = validate_td(primal_graph(tight), wt) is None
    results["tight_dp_count"] = count_answer_sets(tight, make_nice(decompose(primal_graph(tight))))
    keep = [tight.index[n] for n in p.names]
    projected = [frozenset(i for i, a in enumerate(keep) if a in m) for m in tight_answer_sets(tight)]
    results["tight_projection_bijective"] = len(set(projected)) == len(projected) and set(projected) == oracle

    f = tight_to_cnf(tight, wt)
    results["cnf_witness_valid"] = validate_td(cnf_primal_graph(f), witness_td_cnf(wt, tight, f)) is None
    results["cnf_count"] = count_models(f)
    results["cnf_brute_count"] = len(brute_models(f))
    weak = tight_to_cnf(tight, wt, weak=True)
    results["cnf_weak_satisfiable"] = count_models(weak) > 0

    n = len(oracle)
    agree = (
        results["dp_count"] == n
        and results["dp_enum_matches_oracle"]
        and results["solve"] == (n > 0)
        and results["tight_is_tight"]
        and results["tight_witness_valid"]
        and results["tight_dp_count"] == n
        and results["tight_projection_bijective"]
        and results["cnf_witness_valid"]
        and results["cnf_count"] == n
        and results["cnf_brute_count"] == n
        and results["cnf_weak_satisfiable"] == (n > 0)
    )
    results["agree"] = agree
    json.dump(results, out, indent=2)
    out.write("\n")
    return EXIT_OK if agree else EXIT_DISAGREE


COMMANDS = {
    "analyze": cmd_analyze,
    "solve": cmd_solve,
    "count": cmd_count,
    "enum": cmd_enum,
    "compile": cmd_compile,
    "verify": cmd_verify,
}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    args = _parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except SizeGuardError as exc:
        print(f"twasp: size guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ProgramError, TDFormatError, UsageError) as exc:
        print(f"twasp: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
