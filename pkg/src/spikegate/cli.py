"""Command-line front end.

Exit codes: 0 success, 1 gate/calibration/experiment failure or runtime
error, 2 bad arguments or configuration.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from spikegate.config import Settings, load_settings
from spikegate.errors import CalibrationError, ParameterError
from spikegate.experiments import EXPERIMENTS
from spikegate.gates import PRESETS, calibrate_threshold, run_gate, run_not, truth_table
from spikegate.instrument import Trace, simulated_port
from spikegate.plotting import render_ascii, render_svg


class _Usage(Exception):
    pass


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def _bits(text: str) -> tuple[int, ...]:
    if not 1 <= len(text) <= 2 or set(text) - {"0", "1"}:
        raise argparse.ArgumentTypeError(f"bits must be one or two of 0/1, got {text!r}")
    return tuple(int(c) for c in text)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=None, help="noise generator seed (default: config or 0)")
    g.add_argument("--no-noise", action="store_true", help="disable read noise")
    g.add_argument("--config", metavar="PATH", help="INI file overriding device and gate constants")
    g.add_argument("--trace", metavar="PATH", help="write the recorded trace CSV here")
    g.add_argument("--json", action="store_true", help="machine-readable output")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="spikegate", description="Single-memristor spike logic simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    gates = sorted(PRESETS)

    p = sub.add_parser("run", parents=[common], help="run one gate evaluation")
    p.add_argument("--gate", required=True, choices=gates)
    p.add_argument("--bits", required=True, type=_bits, help="input bits, e.g. 01 (one bit for not)")
    p.add_argument("--threshold", type=float, help="decision threshold in A")
    p.add_argument("--gap-steps", type=_positive_int, default=1, help="samples between the two bits")

    p = sub.add_parser("truth-table", parents=[common], help="run every input row")
    p.add_argument("--gate", required=True, choices=gates)
    p.add_argument("--repeat", type=_positive_int, default=1)
    p.add_argument("--threshold", type=float)

    p = sub.add_parser("calibrate", parents=[common], help="place the threshold between the output classes")
    p.add_argument("--gate", required=True, choices=gates)
    p.add_argument("--trials", type=_positive_int, default=1)

    p = sub.add_parser("experiment", parents=[common], help="run a scripted experiment")
    p.add_argument("name", choices=sorted(EXPERIMENTS))
    p.add_argument("--runs", type=_positive_int, default=7, help="xor-repro repetitions")

    p = sub.add_parser("plot", parents=[common], help="render a trace CSV")
    p.add_argument("input", metavar="TRACE")
    p.add_argument("--out", metavar="SVG", help="output path (default: TRACE with .svg suffix)")
    p.add_argument("--ascii", action="store_true", help="print a terminal sparkline instead")
    p.add_argument("--threshold", type=float, help="draw +/- threshold lines (A)")
    return parser


def _settings(args) -> Settings:
    try:
        settings = load_settings(args.config)
    except (OSError, ParameterError) as exc:
        raise _Usage(f"config: {exc}") from exc
    if args.seed is not None:
        settings.seed = args.seed
    if args.no_noise:
        settings.params = settings.params.noiseless()
    threshold = getattr(args, "threshold", None)
    gate_name = getattr(args, "gate", None)
    if threshold is not None and gate_name is not None:
        try:
            settings.gates[gate_name] = settings.gates[gate_name].with_threshold(threshold)
        except ParameterError as exc:
            raise _Usage(str(exc)) from exc
    return settings


def _port(settings: Settings):
    return simulated_port(settings.params, settings.seed)


def _write_trace(args, trace: Trace) -> None:
    if args.trace:
        trace.to_csv(args.trace)


def cmd_run(args, out) -> int:
    s = _settings(args)
    gate = s.gates[args.gate]
    if args.gate == "not":
        if len(args.bits) != 1:
            raise _Usage("not takes exactly one bit")
        res = run_not(_port(s), args.bits[0], zero_hold=s.params.zero_hold, gap_steps=args.gap_steps)
    else:
        if len(args.bits) != 2:
            raise _Usage(f"{args.gate} takes exactly two bits")
        res = run_gate(_port(s), gate, *args.bits, zero_hold=s.params.zero_hold, gap_steps=args.gap_steps)
    _write_trace(args, res.trace)
    if args.json:
        json.dump(
            {
                "gate": args.gate,
                "bits": "".join(map(str, args.bits)),
                "output": res.output,
                "expected": res.expected,
                "i_read": res.i_read,
                "margin": res.margin,
                "threshold": gate.threshold,
            },
            out,
        )
        out.write("\n")
    else:
        print(res.output, file=out)
    return 0


def cmd_truth_table(args, out) -> int:
    s = _settings(args)
    gate = s.gates[args.gate]
    report = truth_table(_port(s), gate, repeats=args.repeat, zero_hold=s.params.zero_hold)
    _write_trace(args, report.trace)
    rows = [
        {
            "bits": "".join(map(str, r.bits[1:] if gate.arity == 1 else r.bits)),
            "i_read": r.i_read,
            "output": r.output,
            "expected": r.expected,
            "margin": r.margin,
            "pass": r.correct,
        }
        for r in report.results
    ]
    if args.json:
        json.dump({"gate": gate.name, "threshold": gate.threshold, "rows": rows, "correct": report.n_correct, "total": report.n_total, "pass": report.passed}, out)
        out.write("\n")
    else:
        print(f"gate={gate.name} threshold={gate.threshold:.4g} A", file=out)
        print(f"{'in':>3} {'i_read (A)':>13} {'out':>3} {'exp':>3} {'margin':>8}  result", file=out)
        for r in rows:
            print(f"{r['bits']:>3} {r['i_read']:>13.5e} {r['output']:>3} {r['expected']:>3} {r['margin']:>8.3f}  {'pass' if r['pass'] else 'FAIL'}", file=out)
        print(f"{report.n_correct}/{report.n_total} correct", file=out)
    return 0 if report.passed else 1


def cmd_calibrate(args, out) -> int:
    s = _settings(args)
    gate = s.gates[args.gate]
    try:
        cal = calibrate_threshold(_port(s), gate, trials=args.trials, zero_hold=s.params.zero_hold)
    except CalibrationError as exc:
        if args.json:
            json.dump({"gate": gate.name, "error": str(exc), "max_zero": exc.max_zero, "min_one": exc.min_one}, out)
            out.write("\n")
        else:
            print(f"calibration failed: {exc}", file=sys.stderr)
        return 1
    if args.json:
        json.dump({"gate": gate.name, "threshold": cal.threshold, "max_zero": cal.max_zero, "min_one": cal.min_one}, out)
        out.write("\n")
    else:
        print(f"threshold={cal.threshold:.6e}", file=out)
        print(f"max_zero={cal.max_zero:.6e}", file=out)
        print(f"min_one={cal.min_one:.6e}", file=out)
    return 0


def cmd_experiment(args, out) -> int:
    s = _settings(args)
    port = _port(s)
    name = args.name
    hold = s.params.zero_hold
    if name == "square-wave":
        result = EXPERIMENTS[name](port, s.params)
    elif name == "noncommutative":
        result = EXPERIMENTS[name](port, s.params, zero_hold=hold)
    elif name == "or-demo":
        result = EXPERIMENTS[name](port, s.gates["or"], zero_hold=hold)
    elif name == "xor-demo":
        result = EXPERIMENTS[name](port, s.gates["xor"], zero_hold=hold)
    else:
        result = EXPERIMENTS[name](port, runs=args.runs, gate=s.gates["xor"], zero_hold=hold)
    _write_trace(args, result.trace)
    if args.json:
        json.dump(result.to_dict(), out)
        out.write("\n")
    else:
        for line in result.report_lines():
            print(line, file=out)
    return 0 if result.ok else 1


def cmd_plot(args, out) -> int:
    try:
        trace = Trace.from_csv(args.input)
    except (OSError, ValueError) as exc:
        print(f"cannot read trace {args.input}: {exc}", file=sys.stderr)
        return 1
    if len(trace) == 0:
        print(f"trace {args.input} has no samples", file=sys.stderr)
        return 1
    if args.ascii:
        text = render_ascii(trace)
        if args.json:
            json.dump({"ascii": text}, out)
            out.write("\n")
        else:
            print(text, file=out)
        return 0
    dest = Path(args.out) if args.out else Path(args.input).with_suffix(".svg")
    dest.write_text(render_svg(trace, threshold=args.threshold, title=Path(args.input).name))
    if args.json:
        json.dump({"svg": str(dest), "samples": len(trace), "reads": len(trace.read_indices())}, out)
        out.write("\n")
    else:
        print(dest, file=out)
    return 0


COMMANDS = {
    "run": cmd_run,
    "truth-table": cmd_truth_table,
    "calibrate": cmd_calibrate,
    "experiment": cmd_experiment,
    "plot": cmd_plot,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except _Usage as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # device, zeroing, trace errors
        print(f"{parser.prog}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
