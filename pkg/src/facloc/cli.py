"""Command-line entry point: ``facloc solve | bench | frlp``.

Exit codes: 0 on success, 2 for unreadable input, 3 for invalid parameters.
"""

from __future__ import annotations

import argparse
import json
import sys

from facloc.bench import DEFAULT_SIZES, parse_sizes, rows_to_csv, rows_to_table, run_bench
from facloc.errors import ParameterError, ParseError, StructuralError
from facloc.instances import read_instance, to_native
from facloc.lp import FrlpSpec, build_frlp, export_lp_text, solve_frlp, solve_frlp_cumulative, solve_frlp_full, tight_instance
from facloc.lp.programs import FRLP_K_LIMIT
from facloc.model import Instance, Solution
from facloc.solvers import ALGORITHMS, SolverOutput
from facloc import variants

EXIT_PARSE = 2
EXIT_PARAM = 3

# shrink factors under which each algorithm's dual is feasible
CERT_GAMMA = {"greedy1": 1.861, "greedy1-star": 1.861, "greedy2": 1.61}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _fail(flag: str, message: str) -> CliError:
    return CliError(f"{flag}: {message}", EXIT_PARAM)


def _report(sol: Solution, out: SolverOutput | None, inst: Instance, args) -> list[str]:
    lines = [
        f"open: {' '.join(str(i) for i in sorted(sol.open)) or '-'}",
        f"F: {sol.facility_cost:.10g}",
        f"C: {sol.connection_cost:.10g}",
        f"P: {sol.penalty_cost:.10g}",
        f"total: {sol.total:.10g}",
    ]
    if sol.multiplicity is not None:
        lines.insert(1, "copies: " + " ".join(f"{i}x{m}" for i, m in sol.multiplicity))
    if out is not None:
        paid = float(out.cert.alpha @ inst.d)
        lines.append(f"sum_alpha: {paid:.10g}")
        if args.shares:
            shares = variants.cost_shares(out, inst)
            lines.append("shares: " + " ".join(f"{s:.10g}" for s in shares))
    return lines


def cmd_solve(args) -> int:
    try:
        inst = read_instance(args.input, args.format)
    except OSError as exc:
        raise CliError(f"--input: cannot read {args.input}: {exc.strerror}", EXIT_PARSE) from None

    out: SolverOutput | None = None
    if args.robust is not None:
        if not 0 <= args.robust < inst.n_c:
            raise _fail("--robust", f"l={args.robust} must satisfy 0 <= l < n_c={inst.n_c}")
        sol = variants.solve_robust(inst, args.robust)
    elif args.k is not None:
        if not 1 <= args.k <= inst.n_f:
            raise _fail("--k", f"k={args.k} must lie in 1..{inst.n_f}")
        sol = variants.solve_k_facility(inst, args.k)
    elif args.soft_cap is not None:
        if args.soft_cap < 1:
            raise _fail("--soft-cap", "capacity must be at least 1")
        sol = variants.solve_soft_capacitated(inst, args.soft_cap)
    elif args.fault is not None:
        if args.alg not in ("greedy1", "greedy2"):
            raise _fail("--alg", "fault tolerance runs with greedy1 or greedy2")
        if not 1 <= args.fault <= inst.n_f:
            raise _fail("--fault", f"r={args.fault} must lie in 1..{inst.n_f}")
        out = variants.solve_fault_tolerant_uniform(inst, args.fault, args.alg)
    elif args.penalties:
        if args.alg not in ("greedy1", "greedy2"):
            raise _fail("--alg", "penalties run with greedy1 or greedy2")
        out = variants.solve_with_penalties(inst, args.alg)
    else:
        out = ALGORITHMS[args.alg](inst)
    if out is not None:
        sol = out.solution
        if args.alg != "jv":
            # the greedy duals pay for the solution exactly
            paid = float(out.cert.alpha @ inst.d)
            assert abs(paid - sol.total) <= 1e-6 * max(1.0, abs(sol.total)), (paid, sol.total)

    label = "robust" if args.robust is not None else "k-facility" if args.k is not None else "soft-cap" if args.soft_cap is not None else args.alg
    print(f"algorithm: {label}")
    print("\n".join(_report(sol, out, inst, args)))
    if args.cert:
        if out is None:
            raise _fail("--cert", "this variant produces no dual certificate")
        doc = {
            "algorithm": args.alg,
            "alpha": [float(a) for a in out.cert.alpha],
            "gamma": CERT_GAMMA.get(args.alg),
            "total": sol.total,
        }
        with open(args.cert, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
    return 0


def cmd_bench(args) -> int:
    sizes = parse_sizes(args.sizes) if args.sizes else list(DEFAULT_SIZES)
    rows = run_bench(args.suite, sizes, args.trials, args.seed, workers=args.workers, edge_p=args.edge_p)
    text = rows_to_csv(rows)
    if args.csv == "-":
        sys.stdout.write(text)
        return 0
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    sys.stdout.write(rows_to_table(rows))
    return 0


def cmd_frlp(args) -> int:
    if args.kind != "tradeoff" and args.gamma_f != 1.0:
        raise _fail("--gamma-f", "only applies to --kind tradeoff")
    if args.tight and args.kind != "alg1":
        raise _fail("--tight", "tight instances are built from --kind alg1")
    spec = FrlpSpec(args.kind, args.k, args.gamma_f)

    if args.export:
        with open(args.export, "w", encoding="utf-8") as fh:
            fh.write(export_lp_text(build_frlp(spec)))
        print(f"wrote {args.export}")
    if args.k > FRLP_K_LIMIT:
        if args.export:
            return 0
        raise _fail("--k", f"k={args.k} exceeds the in-process limit {FRLP_K_LIMIT}; use --export and an external LP solver")

    if args.curve:
        try:
            gammas = [float(g) for g in args.curve.split(",")]
        except ValueError:
            raise _fail("--curve", "expected a comma-separated list of numbers") from None
        if any(g < 1 for g in gammas):
            raise _fail("--curve", "every gamma_f must be at least 1")
        print("gamma_f,gamma_c")
        for g in gammas:
            print(f"{g:g},{solve_frlp_cumulative(FrlpSpec('tradeoff', args.k, g)):.6f}")
        return 0

    print(f"z_{args.k}: {solve_frlp(spec):.6f}")
    if args.cumulative:
        print(f"max_z_{args.k}: {solve_frlp_cumulative(spec):.6f}")
    if args.tight:
        model, lp_sol = solve_frlp_full(spec)
        with open(args.tight, "w", encoding="utf-8") as fh:
            fh.write(to_native(tight_instance(model, lp_sol)))
        print(f"wrote {args.tight}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="facloc", description="Greedy facility location solvers and factor-revealing LPs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("native", "orlib"), default="native")
    p.add_argument("--alg", choices=sorted(ALGORITHMS), default="greedy2")
    variant = p.add_mutually_exclusive_group()
    variant.add_argument("--penalties", action="store_true", help="use the instance's penalties (missing means infinite)")
    variant.add_argument("--fault", type=int, metavar="R", help="connect every city to R facilities")
    variant.add_argument("--robust", type=int, metavar="L", help="leave up to L cities unserved")
    variant.add_argument("--k", type=int, metavar="K", help="open at most K facilities")
    variant.add_argument("--soft-cap", type=int, metavar="U", help="each facility copy serves at most U cities")
    p.add_argument("--shares", action="store_true", help="print each city's cost share")
    p.add_argument("--cert", metavar="PATH", help="write the dual certificate as JSON")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="mean ratio to the LP bound over seeded instances")
    p.add_argument("--suite", choices=("grid", "gnp"), default="grid")
    p.add_argument("--sizes", help="comma-separated <cities>x<facilities>, e.g. 50x20,100x20")
    p.add_argument("--trials", type=int, default=15)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--edge-p", type=float, default=0.1, help="edge probability for the gnp suite")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv", metavar="PATH", help="write CSV to PATH ('-' for stdout)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("frlp", help="solve a factor-revealing LP")
    p.add_argument("--kind", choices=("alg1", "alg2", "tradeoff"), required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--gamma-f", type=float, default=1.0)
    p.add_argument("--cumulative", action="store_true", help="also print the max over i <= k")
    p.add_argument("--export", metavar="PATH", help="write the program in LP text format")
    p.add_argument("--tight", metavar="PATH", help="write the matching tight instance (alg1)")
    p.add_argument("--curve", metavar="LIST", help="comma-separated gamma_f values; prints a tradeoff CSV")
    p.set_defaults(func=cmd_frlp)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ParseError as exc:
        print(f"error: parse failure: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ParameterError, StructuralError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
