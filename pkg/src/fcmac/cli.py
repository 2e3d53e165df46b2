"""Command-line entry point.

Exit codes: 0 when everything passed, 1 for failed expectations or an
infeasible system, 2 for usage, parse, or validation errors. The default
seed comes from FCMAC_SEED when set.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from . import experiments, jsonio
from .feasibility import check_feasibility
from .graphs import (
    SizeCapError,
    characteristic_graph,
    conditional_chromatic_entropy,
    conditional_graph_entropy,
    min_entropy_coloring,
)
from .channels import GaussianMAC, gmac_sum_rate, mac_sum_capacity_independent
from .probability import AxisError
from .schemes import DEFAULT_SEED


def _default_seed() -> int:
    raw = os.environ.get("FCMAC_SEED")
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"error: FCMAC_SEED must be an integer, got {raw!r}")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _rows_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _result_json(result: experiments.ExperimentResult) -> dict:
    out = {
        "experiment": result.experiment_id,
        "passed": result.passed,
        "rows": [
            {"label": r.label, "value": r.value, "units": r.units,
             "expected": r.expected, "tolerance": r.tolerance,
             "reference": r.reference, "status": r.status, "note": r.note}
            for r in result.rows
        ],
        "schemes": [
            {"scheme": s.scheme_id,
             "source_entropy_bits": s.source_entropy_bits,
             "color_entropy_bits": s.color_entropy_bits,
             "channel_sum_rate_bits": s.channel_sum_rate_bits,
             "verdict": s.verdict, "margin_bits": s.margin_bits,
             "distortion_analytic": s.distortion_analytic,
             "distortion_mc": None if s.distortion_mc is None else {
                 "value": s.distortion_mc.value,
                 "halfwidth": s.distortion_mc.halfwidth,
                 "samples": s.distortion_mc.samples,
                 "seed": s.distortion_mc.seed},
             "lipschitz_alpha": s.lipschitz_alpha,
             "note": s.note}
            for s in result.schemes
        ],
    }
    if result.sweep_rows is not None:
        out["sweep"] = {"header": list(result.sweep_header),
                        "rows": [[v for v in row] for row in result.sweep_rows]}
    return out


def _experiment_csv(result: experiments.ExperimentResult) -> str:
    if result.sweep_rows is not None:
        return _rows_csv(result.sweep_header, result.sweep_rows)
    header = ("label", "value", "units", "expected", "tolerance", "reference",
              "status", "note")
    rows = [(r.label, r.value, r.units, r.expected, r.tolerance, r.reference,
             r.status, r.note) for r in result.rows]
    return _rows_csv(header, rows)


def _print_experiment(result: experiments.ExperimentResult) -> None:
    print(f"experiment: {result.experiment_id}")
    width = max(len(r.label) for r in result.rows)
    for r in result.rows:
        val = _fmt(r.value)
        line = f"  {r.label:<{width}}  {val:>14} {r.units:<5} [{r.status}]"
        if r.status == "flagged" and r.reference is not None:
            line += f" (reference {_fmt(r.reference)})"
        print(line)
    for s in result.schemes:
        bits = []
        if s.source_entropy_bits is not None:
            bits.append(f"rate {_fmt(s.source_entropy_bits)}")
        if s.color_entropy_bits is not None:
            bits.append(f"colors {_fmt(s.color_entropy_bits)}")
        if s.channel_sum_rate_bits is not None:
            bits.append(f"channel {_fmt(s.channel_sum_rate_bits)}")
        if s.verdict is not None:
            bits.append(f"{s.verdict} (margin {_fmt(s.margin_bits)})")
        if s.distortion_analytic is not None:
            bits.append(f"distortion {_fmt(s.distortion_analytic)}")
        if s.distortion_mc is not None:
            bits.append(f"mc {_fmt(s.distortion_mc.value)}±{_fmt(s.distortion_mc.halfwidth)}")
        print(f"  scheme {s.scheme_id}: " + ", ".join(bits))
    n_fail = sum(1 for r in result.rows if not r.passed)
    n_flag = sum(1 for r in result.rows if r.status == "flagged")
    verdict = "PASS" if result.passed else "FAIL"
    print(f"RESULT: {verdict} ({len(result.rows)} rows, {n_fail} failed, {n_flag} flagged)")


def _cmd_experiment(args) -> int:
    overrides = {}
    for key in ("rho", "power", "power_min", "power_max", "sigma2", "target_d"):
        val = getattr(args, key)
        if val is not None:
            overrides[key] = val
    for key in ("steps", "samples", "cells"):
        val = getattr(args, key)
        if val is not None:
            overrides[key] = val
    if args.rho_x is not None:
        overrides["rho_x"] = args.rho_x
    try:
        result = experiments.run_experiment(args.id, seed=args.seed, **overrides)
    except experiments.UnknownExperimentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TypeError as exc:
        print(f"error: unsupported override for {args.id}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _print_experiment(result)
    if args.out:
        if args.format == "json":
            jsonio.dump_json(_result_json(result), args.out)
        else:
            _write_text(args.out, _experiment_csv(result))
    return 0 if result.passed else 1


def _cmd_check(args) -> int:
    try:
        spec = jsonio.system_spec_from_json(jsonio.load_json(args.spec))
        report = check_feasibility(spec)
    except (jsonio.SpecFormatError, AxisError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    payload = jsonio.feasibility_report_to_json(report)
    if args.format == "json":
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    elif args.format == "csv":
        rows = [(r.name, r.lhs_bits, r.rhs_bits, r.margin_bits, r.verdict)
                for r in report.inequalities]
        rows.append(("distortion", report.achieved_distortion,
                     report.target_distortion,
                     report.target_distortion - report.achieved_distortion,
                     "ok" if report.distortion_ok else "exceeded"))
        text = _rows_csv(("record", "lhs_bits", "rhs_bits", "margin_bits", "verdict"),
                         rows)
    else:
        lines = []
        for r in report.inequalities:
            lines.append(f"{r.name:<9} lhs {_fmt(r.lhs_bits):>14}  rhs {_fmt(r.rhs_bits):>14}"
                         f"  margin {_fmt(r.margin_bits):>14}  {r.verdict}")
        lines.append(f"distortion achieved {_fmt(report.achieved_distortion)}"
                     f" target {_fmt(report.target_distortion)}"
                     f" -> {'ok' if report.distortion_ok else 'exceeded'}")
        text = "\n".join(lines) + "\n"
    _write_text(args.out, text)
    return 0 if report.feasible(allow_boundary=args.allow_boundary) else 1


def _numeric_label(value):
    if isinstance(value, bool):
        raise ValueError(f"label {value!r} is not numeric")
    if isinstance(value, (int, float, Fraction)):
        return value
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"label {value!r} is not numeric; threshold mode needs"
                         " numeric function values") from None


def _cmd_graph(args) -> int:
    try:
        if args.graph_cmd == "build":
            joint = jsonio.pmf_from_json(jsonio.load_json(args.joint))
            table = jsonio.function_table_from_json(jsonio.load_json(args.function))
            if args.delta is not None:
                g = characteristic_graph(
                    joint, table, delta=args.delta,
                    range_distortion=lambda a, b: abs(_numeric_label(a) - _numeric_label(b)))
            else:
                g = characteristic_graph(joint, table)
            text = json.dumps(jsonio.graph_to_json(g), indent=2, sort_keys=True) + "\n"
            _write_text(args.out, text)
            return 0
        if args.graph_cmd == "color":
            g = jsonio.graph_from_json(jsonio.load_json(args.graph))
            marginal = jsonio.pmf_from_json(jsonio.load_json(args.marginal))
            coloring, bits = min_entropy_coloring(g, marginal, args.mode)
            payload = jsonio.coloring_to_json(coloring)
            print(f"entropy_bits {_fmt(bits)} ({args.mode})")
            text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
            _write_text(args.out, text)
            return 0
        if args.graph_cmd == "entropy":
            g = jsonio.graph_from_json(jsonio.load_json(args.graph))
            if args.kind == "chromatic":
                if args.marginal is None:
                    print("error: --kind chromatic needs --marginal", file=sys.stderr)
                    return 2
                marginal = jsonio.pmf_from_json(jsonio.load_json(args.marginal))
                _, bits = min_entropy_coloring(g, marginal, "exact")
                payload = {"kind": "chromatic", "bits": bits}
            else:
                if args.joint is None:
                    print(f"error: --kind {args.kind} needs --joint", file=sys.stderr)
                    return 2
                joint = jsonio.pmf_from_json(jsonio.load_json(args.joint))
                if args.kind == "conditional-chromatic":
                    bits = conditional_chromatic_entropy(g, joint, args.n)
                    payload = {"kind": "conditional-chromatic", "n": args.n, "bits": bits}
                else:
                    res = conditional_graph_entropy(g, joint)
                    payload = {"kind": "conditional-graph", "bits": res.value,
                               "upper_bound_bits": res.upper_bound,
                               "converged": res.converged}
            print(json.dumps(payload, indent=2, sort_keys=True))
            return 0
    except (jsonio.SpecFormatError, AxisError, SizeCapError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


def _cmd_channel(args) -> int:
    try:
        if args.channel_cmd == "capacity":
            mac = jsonio.mac_from_json(jsonio.load_json(args.mac))
            res = mac_sum_capacity_independent(mac)
            payload = {"sum_capacity_bits": res.bits,
                       "input1": [float(p) for p in res.input1],
                       "input2": [float(p) for p in res.input2]}
        else:
            mac = GaussianMAC(args.power, args.noise_var)
            payload = {"sum_rate_bits": gmac_sum_rate(mac, args.rho)}
    except (jsonio.SpecFormatError, AxisError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fcmac",
        description="Workbench for distributed computation of functions over"
                    " multiple access channels")
    sub = parser.add_subparsers(dest="command", required=True)

    exp = sub.add_parser("experiment", help="run a registered experiment")
    exp.add_argument("id", help=f"one of {', '.join(experiments.EXPERIMENT_IDS)}")
    exp.add_argument("--out", help="write results to this path")
    exp.add_argument("--seed", type=int, default=None)
    exp.add_argument("--format", choices=("csv", "json"), default="csv")
    exp.add_argument("--rho", type=float, default=None)
    exp.add_argument("--power", type=float, default=None)
    exp.add_argument("--power-min", dest="power_min", type=float, default=None)
    exp.add_argument("--power-max", dest="power_max", type=float, default=None)
    exp.add_argument("--steps", type=int, default=None)
    exp.add_argument("--samples", type=int, default=None)
    exp.add_argument("--rho-x", dest="rho_x", type=float, default=None)
    exp.add_argument("--cells", type=int, default=None)
    exp.add_argument("--sigma2", type=float, default=None)
    exp.add_argument("--target-d", dest="target_d", type=float, default=None)
    exp.set_defaults(func=_cmd_experiment)

    check = sub.add_parser("check", help="check a system description")
    check_sub = check.add_subparsers(dest="check_cmd", required=True)
    thm = check_sub.add_parser("theorem1", help="evaluate the rate inequalities"
                                               " and distortion for a system file")
    thm.add_argument("--spec", required=True, help="system JSON file")
    thm.add_argument("--allow-boundary", action="store_true")
    thm.add_argument("--format", choices=("text", "json", "csv"), default="text")
    thm.add_argument("--out", default=None)
    thm.set_defaults(func=_cmd_check)

    graph = sub.add_parser("graph", help="build, color, or measure graphs")
    graph_sub = graph.add_subparsers(dest="graph_cmd", required=True)
    build = graph_sub.add_parser("build", help="confusability graph from a joint and a function")
    build.add_argument("--joint", required=True)
    build.add_argument("--function", required=True)
    build.add_argument("--delta", type=float, default=None,
                       help="threshold mode: confusable when values differ by more than this")
    build.add_argument("--out", default=None)
    color = graph_sub.add_parser("color", help="minimum-entropy coloring")
    color.add_argument("--graph", required=True)
    color.add_argument("--marginal", required=True)
    color.add_argument("--mode", choices=("exact", "greedy"), default="exact")
    color.add_argument("--out", default=None)
    gent = graph_sub.add_parser("entropy", help="graph entropy quantities")
    gent.add_argument("--graph", required=True)
    gent.add_argument("--kind", choices=("chromatic", "conditional-chromatic",
                                         "conditional-graph"), default="chromatic")
    gent.add_argument("--marginal", default=None)
    gent.add_argument("--joint", default=None)
    gent.add_argument("--n", type=int, default=1)
    graph.set_defaults(func=_cmd_graph)

    chan = sub.add_parser("channel", help="channel capacities and sum rates")
    chan_sub = chan.add_subparsers(dest="channel_cmd", required=True)
    cap = chan_sub.add_parser("capacity", help="independent-input sum capacity")
    cap.add_argument("--mac", required=True, help="channel kernel JSON file")
    gm = chan_sub.add_parser("gmac", help="Gaussian sum rate at an input correlation")
    gm.add_argument("--power", type=float, required=True)
    gm.add_argument("--rho", type=float, default=0.0)
    gm.add_argument("--noise-var", dest="noise_var", type=float, default=1.0)
    chan.set_defaults(func=_cmd_channel)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is None and hasattr(args, "seed"):
        args.seed = _default_seed()
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
