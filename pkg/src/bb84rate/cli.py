"""Command-line interface.

Usage examples::

    bb84rate rate --theta 90 --delta-z 0.12 --delta-x 0.12 --optimize
    bb84rate threshold --theta 45
    bb84rate sweep rate --theta 90 --from 0 --to 0.13 --step 0.001 --out r_90.table
    bb84rate sweep threshold --from 1 --to 90 --step 0.5 --format csv
    bb84rate verify --suite all --seed 42

Angles are in degrees, error rates are fractions.  Exit codes: 0 success,
1 internal error or failed verification check, 2 invalid arguments, 3 no
key extractable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Sequence

from . import __version__
from .analysis import SweepSpec, optimize_eta, sweep, thresholds
from .errors import DomainError, NoKeyError
from .keyrate import KeyRateReport, NoiseFraction, ProtocolParams, fidelity_bound, rate_bound
from .verify import SUITES, run_suite

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_NO_KEY = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _num(x: float) -> str:
    return f"{x:.9g}"


def format_table(rows: Sequence[Sequence[float]]) -> str:
    """Whitespace-separated numeric columns, no header, 9 significant digits."""
    return "".join(" ".join(_num(v) for v in row) + "\n" for row in rows)


def format_csv(columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_num(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def format_json(command: str, parameters: dict[str, Any], columns: Sequence[str],
                rows: Sequence[Sequence[Any]], seed: int | None = None, **extra: Any) -> str:
    doc = {
        "version": __version__,
        "command": command,
        "parameters": parameters,
        "seed": seed,
        "columns": list(columns),
        "data": [dict(zip(columns, row)) for row in rows],
    }
    doc.update(extra)
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(fmt: str, command: str, params: dict[str, Any], columns: Sequence[str],
            rows: Sequence[Sequence[Any]], text: str | None = None) -> str:
    if fmt == "text" and text is not None:
        return text
    if fmt == "csv":
        return format_csv(columns, rows)
    if fmt == "json":
        return format_json(command, params, columns, rows)
    return format_table(rows)


def _params(args: argparse.Namespace) -> ProtocolParams:
    if not 0.0 <= args.theta <= 90.0:
        raise UsageError(f"--theta must lie in [0, 90], got {args.theta}")
    try:
        return ProtocolParams.from_degrees(args.theta, args.delta_z, args.delta_x)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def cmd_rate(args: argparse.Namespace) -> int:
    params = _params(args)
    if args.optimize:
        report = optimize_eta(params)
    else:
        try:
            eta = NoiseFraction(args.eta)
        except DomainError as exc:
            raise UsageError(str(exc)) from exc
        report = KeyRateReport(params, rate_bound(params, eta), eta, fidelity_bound(params))
    columns = ("theta_deg", "delta_z", "delta_x", "eta", "rate", "raw_rate", "clamped", "fidelity_bound")
    row = (args.theta, params.delta_z, params.delta_x, report.eta_opt.eta,
           report.clamped_rate, report.rate, int(report.clamped), report.fidelity_bound)
    text = (
        f"rate           {_num(report.clamped_rate)}\n"
        f"raw_rate       {_num(report.rate)}\n"
        f"clamped        {'yes' if report.clamped else 'no'}\n"
        f"eta            {_num(report.eta_opt.eta)}{' (optimised)' if args.optimize else ''}\n"
        f"fidelity_bound {_num(report.fidelity_bound)}\n"
    )
    param_doc = {"theta_deg": args.theta, "delta_z": args.delta_z, "delta_x": args.delta_x,
                 "eta": None if args.optimize else args.eta, "optimize": bool(args.optimize)}
    _emit(_render(args.format, "rate", param_doc, columns, [row], text), args.out)
    return EXIT_OK


def cmd_threshold(args: argparse.Namespace) -> int:
    if not 0.0 < args.theta <= 90.0:
        raise UsageError(f"--theta must lie in (0, 90], got {args.theta}")
    res = thresholds(math.radians(args.theta))
    columns = ("theta_deg", "threshold_without_lr", "threshold_with_lr", "improvement_percent")
    row = (args.theta, res.threshold_without_lr, res.threshold_with_lr, res.improvement_percent)
    text = (
        f"theta                {_num(args.theta)} deg\n"
        f"threshold_without_lr {_num(res.threshold_without_lr)}\n"
        f"threshold_with_lr    {_num(res.threshold_with_lr)}\n"
        f"improvement          {res.improvement_percent:.2f}%\n"
    )
    _emit(_render(args.format, "threshold", {"theta_deg": args.theta}, columns, [row], text), args.out)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        if args.kind == "rate":
            if not 0.0 <= args.theta <= 90.0:
                raise UsageError(f"--theta must lie in [0, 90], got {args.theta}")
            start = 0.0 if args.start is None else args.start
            stop = 0.13 if args.stop is None else args.stop
            step = 1e-3 if args.step is None else args.step
            if start < 0.0 or stop > 0.5:
                raise UsageError("delta range must lie within [0, 0.5]")
            spec = SweepSpec("delta_symmetric", start, stop, step, theta=math.radians(args.theta),
                             optimize_eta=not args.no_optimize)
        else:
            start = 0.5 if args.start is None else args.start
            stop = 90.0 if args.stop is None else args.stop
            step = 0.5 if args.step is None else args.step
            if start < 0.0 or stop > 90.0:
                raise UsageError("theta range must lie within [0, 90]")
            spec = SweepSpec("theta", start, stop, step)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    result = sweep(spec)
    for x, why in result.failures:
        print(f"warning: omitted point {_num(x)}: {why}", file=sys.stderr)
    params = {"kind": args.kind, "from": start, "to": stop, "step": step}
    if args.kind == "rate":
        params.update(theta_deg=args.theta, optimize_eta=spec.optimize_eta)
    fmt = "table" if args.format == "text" else args.format
    text = _render(fmt, f"sweep {args.kind}", params, result.columns, result.rows)
    if fmt == "json":
        doc = json.loads(text)
        doc["omitted"] = [{"x": x, "reason": why} for x, why in result.failures]
        text = json.dumps(doc, indent=2) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    reports = run_suite(args.suite, seed=args.seed)
    ok = all(r.passed for r in reports)
    if args.format == "json":
        doc = {
            "version": __version__,
            "command": "verify",
            "parameters": {"suite": args.suite},
            "seed": args.seed,
            "passed": ok,
            "data": [r.to_dict() for r in reports],
        }
        text = json.dumps(doc, indent=2) + "\n"
    else:
        text = "".join(r.to_text() + "\n" for r in reports)
        text += f"{'ALL PASS' if ok else 'FAILURES'} ({sum(r.passed for r in reports)}/{len(reports)})\n"
    _emit(text, args.out)
    return EXIT_OK if ok else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bb84rate", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, formats: Sequence[str], default: str) -> None:
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("--out", default=None, help="write output to this file instead of stdout")

    p = sub.add_parser("rate", help="key rate at one parameter point")
    p.add_argument("--theta", type=float, required=True, help="source angle in degrees")
    p.add_argument("--delta-z", type=float, required=True)
    p.add_argument("--delta-x", type=float, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--eta", type=float, help="fixed flip fraction")
    g.add_argument("--optimize", action="store_true", help="maximise over the flip fraction")
    common(p, ("text", "table", "csv", "json"), "text")
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("threshold", help="threshold error rates with and without randomisation")
    p.add_argument("--theta", type=float, required=True, help="source angle in degrees")
    common(p, ("text", "table", "csv", "json"), "text")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("sweep", help="tabulate rate or threshold curves")
    p.add_argument("kind", choices=("rate", "threshold"))
    p.add_argument("--theta", type=float, default=90.0, help="source angle for rate sweeps (degrees)")
    p.add_argument("--from", dest="start", type=float, default=None)
    p.add_argument("--to", dest="stop", type=float, default=None)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--no-optimize", action="store_true", help="rate sweeps: omit the optimised column")
    common(p, ("table", "csv", "json"), "table")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the numerical verification suite")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--seed", type=int, default=0, help="seed for the random tightness grid")
    common(p, ("text", "json"), "text")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoKeyError as exc:
        print(f"{parser.prog}: no key: {exc}", file=sys.stderr)
        return EXIT_NO_KEY
    except OSError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        print(f"{parser.prog}: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
