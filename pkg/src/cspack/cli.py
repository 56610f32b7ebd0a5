"""Command-line front end.

Subcommands: gen-cnf, reduce, solve, verify, roundtrip, audit, bench.
Exit codes: 0 = done / verdicts agree, 1 = usage or I/O error,
2 = disagreement or failed verification (a correctness bug),
3 = inconclusive (solver budget exhausted).
"""

from __future__ import annotations

import argparse
import random
import sys

from . import bench, cnf, packing, reduction

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DISAGREE = 2
EXIT_INCONCLUSIVE = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; keep 2 reserved for disagreements.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _add_pad_flags(sub: argparse.ArgumentParser) -> None:
    pad = sub.add_mutually_exclusive_group()
    pad.add_argument("--pad", type=int, metavar="D", help="dull padding width (2^D padding sets)")
    pad.add_argument("--no-pad", action="store_true", help="disable padding")


def _dull_width(args: argparse.Namespace) -> int | None:
    if args.no_pad:
        return 0
    return args.pad


def cmd_gen_cnf(args: argparse.Namespace) -> int:
    if args.planted:
        rng = random.Random(args.seed)
        alpha = bench.planted_assignment(args.n, rng)
        formula = cnf.gen_random_3cnf(args.n, args.m, rng.randrange(2**62), planted=alpha)
    else:
        formula = cnf.gen_random_3cnf(args.n, args.m, args.seed)
    text = cnf.to_dimacs(formula)
    if args.output:
        _write(args.output, text)
        print(f"wrote {formula.num_vars} vars, {formula.num_clauses} clauses to {args.output}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_reduce(args: argparse.Namespace) -> int:
    formula = cnf.parse_dimacs(_read(args.input))
    report = cnf.check_sparsity(formula, density_bound=args.density)
    if not report.ok:
        print(
            f"warning: density m/n = {report.ratio:.2f} exceeds bound {args.density:g}",
            file=sys.stderr,
        )
    instance, witness = reduction.reduce_to_packing(formula, args.r, dull_width=_dull_width(args))
    layout = witness.layout
    widths = " ".join(map(str, layout.iss_widths))
    print(
        f"universe {instance.universe_size} = grid {layout.grid_size} "
        f"+ iss {layout.iss_total} (widths {widths}) + dull {layout.dull_width}"
    )
    group_sizes = " ".join(str(len(c)) for c in witness.codes)
    print(f"sets {instance.set_count} = core {witness.core_count} (per group: {group_sizes}) "
          f"+ padding {witness.pad_count}")
    _write(args.output, packing.serialize_instance(instance))
    witness_path = args.witness or args.output + ".wit"
    _write(witness_path, reduction.witness_to_text(witness))
    print(f"wrote instance to {args.output}, witness to {witness_path}")
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    instance = packing.parse_instance(_read(args.instance))
    result = packing.solve_exact(instance, budget=args.budget)
    print(f"verdict {result.verdict} nodes {result.nodes}")
    if result.verdict == "yes":
        print("packing " + " ".join(map(str, result.packing)))
        return EXIT_OK
    if result.verdict == "no":
        return EXIT_OK
    return EXIT_INCONCLUSIVE


def cmd_verify(args: argparse.Namespace) -> int:
    instance = packing.parse_instance(_read(args.instance))
    result = packing.verify_packing(instance, args.indices)
    print("valid" if result.ok else f"invalid: {result.reason}")
    return EXIT_OK if result.ok else EXIT_DISAGREE


def cmd_roundtrip(args: argparse.Namespace) -> int:
    formula = cnf.parse_dimacs(_read(args.input))
    row = bench.run_roundtrip_row(
        formula,
        args.r,
        dull_width=_dull_width(args),
        budget=args.budget,
        oracle_cap=args.oracle_cap,
        skip_oracle_over_cap=False,
    )
    print(f"packing verdict: {row.verdict} (nodes {row.solver_nodes})")
    print(f"oracle verdict:  {row.oracle_verdict}")
    if row.verdict == "budget":
        print("INCONCLUSIVE")
        return EXIT_INCONCLUSIVE
    if row.agreement == "agree":
        print("AGREE")
        return EXIT_OK
    print("DISAGREE")
    return EXIT_DISAGREE


def cmd_audit(args: argparse.Namespace) -> int:
    instance = packing.parse_instance(_read(args.instance))
    witness = reduction.witness_from_text(_read(args.witness)) if args.witness else None
    report = packing.audit_compactness(instance, witness)
    print(f"universe {report.universe_size} sets {report.set_count} r {report.r}")
    print(f"log2(sets) {report.log2_set_count:.6f}")
    print(f"ratio universe / (r^3 * log2(sets)) = {report.ratio:.6f}")
    if report.grid_width is not None:
        print(f"breakdown: grid {report.grid_width} iss {report.iss_width} dull {report.dull_width}")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    config = bench.load_sweep_config(args.config)
    try:
        rows = bench.run_sweep(config)
    except bench.SweepDisagreement as exc:
        print(f"DISAGREE: {exc}", file=sys.stderr)
        return EXIT_DISAGREE
    csv_text = bench.rows_to_csv(rows)
    if args.output:
        _write(args.output, csv_text)
        print(f"wrote {len(rows)} rows to {args.output}")
    else:
        sys.stdout.write(csv_text)
    if any(row.verdict == "budget" for row in rows):
        print("some rows are INCONCLUSIVE (budget exhausted)", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cspack", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-cnf", help="generate a random 3-CNF formula in DIMACS")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--planted", action="store_true",
                   help="plant a seed-derived satisfying assignment")
    p.add_argument("--output", help="output path (stdout when omitted)")
    p.set_defaults(func=cmd_gen_cnf)

    p = sub.add_parser("reduce", help="reduce a DIMACS CNF file to a set packing instance")
    p.add_argument("input", help="DIMACS CNF path")
    p.add_argument("--r", type=int, required=True, help="number of clause groups / packing parameter")
    _add_pad_flags(p)
    p.add_argument("--density", type=float, default=cnf.DEFAULT_DENSITY_BOUND,
                   help="advisory sparsity bound on m/n")
    p.add_argument("--output", required=True, help="instance output path")
    p.add_argument("--witness", help="witness output path (default: OUTPUT.wit)")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("solve", help="decide an instance file exactly")
    p.add_argument("instance")
    p.add_argument("--budget", type=int, default=packing.DEFAULT_NODE_BUDGET)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="verify that indices form an r-packing")
    p.add_argument("instance")
    p.add_argument("indices", type=int, nargs="+")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("roundtrip", help="reduce, solve, lift, and cross-check the SAT oracle")
    p.add_argument("input", help="DIMACS CNF path")
    p.add_argument("--r", type=int, required=True)
    _add_pad_flags(p)
    p.add_argument("--budget", type=int, default=packing.DEFAULT_NODE_BUDGET)
    p.add_argument("--oracle-cap", type=int, default=cnf.DEFAULT_ORACLE_CAP)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("audit", help="report the compactness ratio of an instance")
    p.add_argument("instance")
    p.add_argument("--witness", help="witness path for the component breakdown")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("bench", help="run a sweep from a JSON config and write CSV")
    p.add_argument("config", help="sweep config JSON path")
    p.add_argument("--output", help="CSV output path (stdout when omitted)")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"cspack: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeError as exc:
        # run_roundtrip_row raises RuntimeError only for internal correctness bugs.
        print(f"cspack: {exc}", file=sys.stderr)
        return EXIT_DISAGREE


if __name__ == "__main__":
    sys.exit(main())
