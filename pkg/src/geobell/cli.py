"""Command-line front end.

Exit codes: 0 success, 1 usage or invalid scenario, 2 infeasible exhaustive
search (and, for ``verify``, 1 when any check fails).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import asymptotics
from .grid import build_grid, dump_tensor, quantum_norm, quantum_tensor
from .lhv import (
    ASCENT,
    AUTO,
    DEFAULT_RESTARTS,
    EXHAUSTIVE,
    EXHAUSTIVE_CAP,
    MODULUS,
    PACKED,
    REAL_PART,
    InfeasibleError,
    violation_ratio,
)
from .scenario import Scenario, ScenarioError
from .tables import TABLES, compute_table, table_csv

EXIT_USAGE = 1
EXIT_INFEASIBLE = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser():
    p = _Parser(prog="geobell", description="Geometric Bell inequalities for GHZ states of qudits.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("ratio", help="violation ratio of one finite-L scenario (JSON)")
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--d", type=int, required=True)
    r.add_argument("--l", type=_positive_int, required=True)
    r.add_argument("--strategy", choices=["real", "complex", "vector", "dichotomic"], default="real")
    r.add_argument("--state", choices=["unbiased", "biased"], default="unbiased")
    r.add_argument("--optimizer", choices=[AUTO, EXHAUSTIVE, ASCENT, PACKED], default=AUTO)
    r.add_argument("--restarts", type=_positive_int, default=DEFAULT_RESTARTS)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--cap", type=_positive_int, default=EXHAUSTIVE_CAP)
    r.add_argument("--offset-convention", choices=["half-step", "literal", "none"], default="half-step")
    r.add_argument("--complex-objective", choices=[MODULUS, REAL_PART], default=MODULUS)
    r.add_argument("--dump-tensor", metavar="PATH", help="also write the quantum tensor as text")

    t = sub.add_parser("table", help="recompute a reference table (CSV)")
    t.add_argument("--table", choices=list(TABLES), required=True)
    t.add_argument("--restarts", type=_positive_int, default=DEFAULT_RESTARTS)
    t.add_argument("--seed", type=int, default=0)

    lim = sub.add_parser("limit", help="closed-form L -> infinity values (JSON)")
    lim.add_argument("--formula", choices=["real", "complex", "biased", "norm"], required=True)
    lim.add_argument("--d", type=int, required=True)
    lim.add_argument("--n", type=int, required=True)
    lim.add_argument("--compare-l", type=_positive_int, metavar="L",
                     help="also compute the finite-L value and its relative gap")
    lim.add_argument("--restarts", type=_positive_int, default=DEFAULT_RESTARTS)

    s = sub.add_parser("surface", help="natural log of the biased-state limit ratio over (N, d) (CSV)")
    s.add_argument("--n-min", type=int, default=2)
    s.add_argument("--n-max", type=int, default=15)
    s.add_argument("--d-min", type=int, default=3)
    s.add_argument("--d-max", type=int, default=20)

    v = sub.add_parser("verify", help="run the oracle / equivalence / optimizer self-checks")
    v.add_argument("--quick", action="store_true", help="d <= 3, N <= 3 only")
    return p


def cmd_ratio(args, out):
    scenario = Scenario(args.n, args.d, args.l, args.state, args.strategy, args.offset_convention)
    report = violation_ratio(
        scenario,
        method=args.optimizer,
        restarts=args.restarts,
        seed=args.seed,
        cap=args.cap,
        complex_objective=args.complex_objective,
    )
    if args.dump_tensor:
        with open(args.dump_tensor, "w") as fh:
            dump_tensor(quantum_tensor(scenario), fh)
    out.write(report.to_json(indent=2) + "\n")
    return 0


def cmd_table(args, out):
    cells = compute_table(args.table, restarts=args.restarts, seed=args.seed)
    out.write(table_csv(args.table, cells))
    return 0


_FORMULAS = {
    "real": (asymptotics.limit_ratio_real_unbiased, "unbiased", "real"),
    "complex": (asymptotics.limit_ratio_complex, "unbiased", "complex"),
    "biased": (asymptotics.limit_ratio_biased, "biased", "dichotomic"),
    "norm": (asymptotics.continuous_quantum_norm, "unbiased", "real"),
}


def cmd_limit(args, out):
    fn, state, strategy = _FORMULAS[args.formula]
    value = fn(args.d, args.n)
    result = {"formula": args.formula, "d": args.d, "n": args.n, "value": value}
    if args.compare_l:
        scenario = Scenario(args.n, args.d, args.compare_l, state, strategy)
        if args.formula == "norm":
            # Riemann sum: unit grid weights times the cell volume
            finite = quantum_norm(scenario) * build_grid(scenario).step ** args.n
        else:
            finite = violation_ratio(scenario, restarts=args.restarts).ratio
        result.update({"l": args.compare_l, "finite_l_value": finite, "relative_gap": (finite - value) / value})
    out.write(json.dumps(result, indent=2) + "\n")
    return 0


def cmd_surface(args, out):
    if args.n_min < 2 or args.d_min < 3 or args.n_max < args.n_min or args.d_max < args.d_min:
        raise ScenarioError("surface needs 2 <= n-min <= n-max and 3 <= d-min <= d-max")
    rows = asymptotics.biased_surface(range(args.n_min, args.n_max + 1), range(args.d_min, args.d_max + 1))
    out.write("n,d,log_ratio\n")
    for n, d, val in rows:
        out.write(f"{n},{d},{val:.12f}\n")
    return 0


def cmd_verify(args, out):
    from .verify import run_all

    checks = run_all(quick=args.quick)
    for c in checks:
        out.write(f"{'PASS' if c.ok else 'FAIL'}  {c.name}  ({c.detail})\n")
    failed = sum(not c.ok for c in checks)
    out.write(f"{len(checks) - failed}/{len(checks)} checks passed\n")
    return 0 if failed == 0 else 1


COMMANDS = {
    "ratio": cmd_ratio,
    "table": cmd_table,
    "limit": cmd_limit,
    "surface": cmd_surface,
    "verify": cmd_verify,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except InfeasibleError as exc:
        print(f"geobell: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ScenarioError as exc:
        print(f"geobell: invalid scenario: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
