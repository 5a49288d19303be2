"""Command-line interface: run, converge, lemmas, list-examples.

Exit codes: 0 success, 1 a check or run failed, 2 usage or config errors.
Diagnostics go to standard error; results to standard output or files.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from .config import ConfigError, hypothesis_notices, parse_config
from .convergence import REF_FACTOR_DEFAULT, ConvergenceReport, convergence_study
from .fields import GridSpec
from .initial_conditions import EXAMPLES
from .io import RunWriter, write_monitor_csv
from .lemmas import lemma_suite
from .stepping import DivergenceError, run_simulation

__all__ = ["cli_main", "main", "parse_tau_spec"]

_TAU_RANGE = re.compile(r"^(?P<base>[^/]+)/2\^(?P<lo>\d+)\.\.(?P<hi>\d+)$")


def parse_tau_spec(spec: str) -> list:
    """Step-size list: either 'BASE/2^LO..HI' (BASE * 2^-k) or comma-separated."""
    spec = spec.strip()
    match = _TAU_RANGE.match(spec)
    if match:
        base = float(match.group("base"))
        lo, hi = int(match.group("lo")), int(match.group("hi"))
        if hi < lo:
            raise ValueError(f"empty exponent range in {spec!r}")
        return [base * 2.0**-k for k in range(lo, hi + 1)]
    taus = [float(part) for part in spec.split(",") if part.strip()]
    if not taus:
        raise ValueError(f"no step sizes in {spec!r}")
    return taus


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="macetd",
        description="Exponential integrators for the matrix-valued Allen-Cahn equation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one configured simulation")
    p_run.add_argument("--config", required=True, help="path to a YAML config file")
    p_run.add_argument("--output-dir", default=None, help="override the config output_dir")

    p_conv = sub.add_parser("converge", help="temporal convergence study")
    p_conv.add_argument("--scheme", required=True, choices=["etd1", "etdrk2"])
    p_conv.add_argument("--example", required=True, help="initial condition name")
    p_conv.add_argument("--grid", required=True, type=int, metavar="N", help="cells per axis")
    p_conv.add_argument("--taus", required=True, help="e.g. '0.1/2^0..5' or '0.1,0.05'")
    p_conv.add_argument("--t-end", required=True, type=float)
    p_conv.add_argument("--epsilon", type=float, default=0.01)
    p_conv.add_argument("--kappa", type=float, default=5.0)
    p_conv.add_argument("--radius", type=float, default=None, help="tube radius for example6")
    p_conv.add_argument("--ref-factor", type=int, default=REF_FACTOR_DEFAULT)
    p_conv.add_argument("--output-dir", default=".", help="where the report CSV goes")

    p_lem = sub.add_parser("lemmas", help="randomized inequality checks")
    p_lem.add_argument("--m", required=True, help="comma-separated matrix dimensions")
    p_lem.add_argument("--samples", required=True, type=int)
    p_lem.add_argument("--seed", required=True, type=int)

    sub.add_parser("list-examples", help="print the initial-condition catalog")
    return parser


def _cmd_run(args) -> int:
    path = Path(args.config)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read config {path}: {exc}", file=sys.stderr)
        return 2
    config = parse_config(text)
    for notice in hypothesis_notices(config):
        print(f"warning: {notice.message}", file=sys.stderr)
    out_dir = Path(args.output_dir or config.output_dir)
    writer = RunWriter(out_dir)
    try:
        series = run_simulation(config, snapshot_sink=writer)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    write_monitor_csv(series, out_dir / "monitor.csv")
    print(f"wrote {out_dir / 'monitor.csv'} and {len(writer.written)} snapshot file(s)")
    return 0


def _format_report(report: ConvergenceReport) -> str:
    lines = [f"{'tau':>12}  {'L2 error':>12}  {'rate':>7}  {'Linf error':>12}  {'rate':>7}"]
    for tau, l2, l2r, linf, linfr in report.rows():
        r1 = "-" if l2r is None else f"{l2r:.4f}"
        r2 = "-" if linfr is None else f"{linfr:.4f}"
        lines.append(f"{tau:>12.6g}  {l2:>12.4e}  {r1:>7}  {linf:>12.4e}  {r2:>7}")
    return "\n".join(lines)


def _report_csv(report: ConvergenceReport) -> str:
    lines = ["tau,l2_error,l2_rate,linf_error,linf_rate"]
    for tau, l2, l2r, linf, linfr in report.rows():
        lines.append(
            f"{tau:.17g},{l2:.17g},{'' if l2r is None else format(l2r, '.17g')},"
            f"{linf:.17g},{'' if linfr is None else format(linfr, '.17g')}"
        )
    return "\n".join(lines) + "\n"


def _cmd_converge(args) -> int:
    try:
        taus = parse_tau_spec(args.taus)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.example not in EXAMPLES:
        print(f"error: unknown example {args.example!r} (see list-examples)", file=sys.stderr)
        return 2
    entry = EXAMPLES[args.example]
    params = {"r": args.radius} if args.radius is not None else None
    grid = GridSpec(entry.d, args.grid)
    try:
        report = convergence_study(
            args.scheme, grid, args.example, taus, args.t_end,
            epsilon=args.epsilon, kappa=args.kappa, params=params,
            ref_factor=args.ref_factor,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(_format_report(report))
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"convergence_{report.scheme.value}_{args.example}.csv"
    csv_path.write_text(_report_csv(report), encoding="utf-8")
    print(f"wrote {csv_path}")
    if any(report.failed):
        print("error: at least one run diverged", file=sys.stderr)
        return 1
    return 0


def _cmd_lemmas(args) -> int:
    try:
        m_list = [int(part) for part in args.m.split(",") if part.strip()]
    except ValueError:
        print(f"error: bad dimension list {args.m!r}", file=sys.stderr)
        return 2
    if not m_list:
        print("error: no dimensions given", file=sys.stderr)
        return 2
    try:
        report = lemma_suite(m_list, args.samples, args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for check in report.checks:
        tag = f"m={check.m}" if check.m else "scalar"
        status = "ok" if check.passed else f"{len(check.violations)} violation(s)"
        print(
            f"{check.name:<22} {tag:<6} samples={check.samples:<8} "
            f"min slack={check.min_slack: .3e}  {status}"
        )
    if not report.passed:
        for check in report.failures:
            for violation in check.violations:
                print(f"violation in {check.name}: {violation}", file=sys.stderr)
        return 1
    return 0


def _cmd_list_examples(_args) -> int:
    width = max(len(name) for name in EXAMPLES)
    for name, entry in sorted(EXAMPLES.items()):
        params = f" (params: {entry.defaults})" if entry.defaults else ""
        print(f"{name:<{width}}  d={entry.d} m={entry.m}  {entry.description}{params}")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "converge": _cmd_converge,
    "lemmas": _cmd_lemmas,
    "list-examples": _cmd_list_examples,
}


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help and 2 for usage errors; surface both.
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())
