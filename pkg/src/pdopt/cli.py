"""``pdopt`` command line.

Exit codes: 0 converged (or feasible), 2 max_iters, 3 diverged, 4 infeasible,
1 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import consensus as cons
from . import harness
from .harness import ConfigError


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pdopt", description="Primal-dual splitting and decentralized EXTRA runs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in (("solve", "run the primal-dual iteration"),
                            ("consensus", "run PG-EXTRA on a graph"),
                            ("certify", "report parameter feasibility and rates")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("-c", "--config", required=True, help="JSON experiment config")
        p.add_argument("--trace", help="override output.trace")
        p.add_argument("--report", help="override output.report")
    p = sub.add_parser("probe", help="EXTRA amplification factor over a stepsize grid")
    p.add_argument("--graph", required=True, help="edge-list file, or 'swap'")
    p.add_argument("--alpha-grid", required=True, help="a:b:step or comma-separated values")
    p.add_argument("--W", dest="W", help="mixing matrix file (default: Metropolis weights)")
    p.add_argument("--L", type=float, default=1.0, help="Lipschitz scale of the quadratic (default 1)")
    p.add_argument("-o", "--out", help="write the CSV here instead of stdout")
    p = sub.add_parser("sweep", help="stepsize sweep of a solve or consensus config")
    p.add_argument("-c", "--config", required=True)
    grid = p.add_mutually_exclusive_group(required=True)
    grid.add_argument("--alpha-grid")
    grid.add_argument("--lam-grid")
    p.add_argument("--budget", type=int, help="iterations per grid point")
    p.add_argument("-o", "--out", help="write the CSV here instead of stdout")
    return parser


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _summary(report: harness.RunReport) -> str:
    parts = [f"status={report.status}"]
    if report.mode in ("solve", "consensus"):
        parts.append(f"iterations={report.iterations}")
        if report.final_residual is not None:
            parts.append(f"residual={report.final_residual!r}")
    cert = report.certificate
    for key in ("theta", "rho1", "rho2", "C1", "C2"):
        if cert.get(key) is not None:
            parts.append(f"{key}={cert[key]!r}")
    if report.details.get("reasons"):
        parts.append("reasons=" + "; ".join(report.details["reasons"]))
    return " ".join(parts)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "probe":
            return _probe(args)
        if args.command == "sweep":
            return _sweep(args)
        cfg = harness.load_config(args.config)
        if cfg.mode != args.command:
            raise ConfigError(f"config mode is {cfg.mode!r} but command is {args.command!r}", "mode")
        if args.trace:
            cfg.output["trace"] = str(Path(args.trace).resolve())
        if args.report:
            cfg.output["report"] = str(Path(args.report).resolve())
        report = harness.run(cfg)
    except (UsageError, ConfigError, cons.GraphError) as exc:
        print(f"pdopt: error: {exc}", file=sys.stderr)
        return harness.EXIT_USAGE
    print(_summary(report))
    return report.exit_code


def _probe(args) -> int:
    problem = {"graph": args.graph}
    if args.W:
        problem["W"] = str(Path(args.W).resolve())
    if args.graph != "swap":
        problem["graph"] = str(Path(args.graph).resolve())
    cfg = harness.ExperimentConfig("probe", problem, {"alpha_grid": args.alpha_grid, "L": args.L})
    report = harness.run(cfg)
    _emit(harness.format_csv(harness.PROBE_COLUMNS, report.details["table"]), args.out)
    return report.exit_code


def _sweep(args) -> int:
    cfg = harness.load_config(args.config)
    try:
        if args.alpha_grid:
            rows = harness.sweep_stepsize(cfg, alpha_grid=harness.parse_grid(args.alpha_grid),
                                          budget=args.budget)
        else:
            rows = harness.sweep_stepsize(cfg, lam_grid=harness.parse_grid(args.lam_grid),
                                          budget=args.budget)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(harness.format_sweep(rows), args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
