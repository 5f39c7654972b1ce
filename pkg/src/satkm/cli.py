"""Command-line front end for batch analysis and report generation.

Subcommands are thin adapters over the library: every number in the
machine-readable outputs (CSV, JSON, SVG coordinates aside) is the
library's value at full precision.  Human-readable summary lines go to
stderr at 4 significant digits; data goes to stdout or to ``--out``.

Environment overrides: ``SATKM_ALPHA`` sets the default significance
level, ``SATKM_OUT_DIR`` prefixes relative ``--out`` paths, and
``SATKM_DATA_DIR`` sets the default session directory for ``serve``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import crc, dataset, planner, plot, survival
from .dataset import DataError

__all__ = ["main", "build_parser"]

INPUT_FORMATS = ("auto", "wide", "long", "grouped", "counts")
OUTPUT_FORMATS = ("csv", "json", "svg")

ENV_ALPHA = "SATKM_ALPHA"
ENV_OUT_DIR = "SATKM_OUT_DIR"
ENV_DATA_DIR = "SATKM_DATA_DIR"

DEFAULT_ALPHA = 0.05
DEFAULT_DATA_DIR = "satkm-sessions"


class CLIError(Exception):
    """Usage or data error that should abort with a diagnostic."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="satkm",
        description="Interview saturation analysis: product-limit curves, "
        "capture-recapture code counts, and sample-size planning.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_io(p: argparse.ArgumentParser, formats=("csv", "json")) -> None:
        p.add_argument("--input", required=True, help="input file path")
        p.add_argument(
            "--format",
            choices=formats,
            default="csv",
            help="output format (default: csv)",
        )
        p.add_argument("--out", help="output file (default: stdout)")

    def add_matrix_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--elicitations",
            help="elicitation list (seq,code_id) accompanying a long-format manifest",
        )
        p.add_argument(
            "--input-format",
            choices=INPUT_FORMATS,
            default="auto",
            help="input layout (default: sniff from header)",
        )

    p = sub.add_parser("describe", help="per-interview elicitation and recapture statistics")
    add_io(p)
    add_matrix_flags(p)

    p = sub.add_parser("km", help="saturation probability curve with confidence band")
    add_io(p, formats=OUTPUT_FORMATS)
    add_matrix_flags(p)
    p.add_argument("--alpha", type=float, help=f"significance level (default {DEFAULT_ALPHA})")
    p.add_argument("--seed", type=int, help="random seed (required for grouped input)")
    p.add_argument(
        "--coding",
        choices=(survival.CODING_NEW_CODE_EVENT, survival.CODING_ZERO_EVENT),
        default=survival.CODING_NEW_CODE_EVENT,
        help="which interviews count as events: ones with new codes (default) "
        "or the documented alternative, zero-new-code interviews",
    )

    p = sub.add_parser("crc", help="per-interview capture-recapture code-count estimates")
    add_io(p)
    add_matrix_flags(p)

    p = sub.add_parser("plan", help="evaluate hypothetical 0/1 interview patterns")
    add_io(p)
    p.add_argument("--alpha", type=float, help=f"significance level (default {DEFAULT_ALPHA})")
    p.add_argument(
        "--rule-k",
        type=int,
        default=3,
        help="consecutive zero-new-code interviews required by the completion rule (default 3)",
    )

    p = sub.add_parser("impute", help="expand grouped code counts into a per-interview sequence")
    add_io(p)
    p.add_argument("--seed", type=int, help="random seed for assigning codes within groups")

    p = sub.add_parser("serve", help="run the live session HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument(
        "--data-dir",
        help=f"session log directory (default ${ENV_DATA_DIR} or ./{DEFAULT_DATA_DIR})",
    )

    return parser


def _read_file(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _resolve_alpha(args: argparse.Namespace) -> float:
    if getattr(args, "alpha", None) is not None:
        return args.alpha
    raw = os.environ.get(ENV_ALPHA)
    if raw is None:
        return DEFAULT_ALPHA
    try:
        return float(raw)
    except ValueError:
        raise CLIError(f"invalid {ENV_ALPHA} value {raw!r}") from None


def _sniff_format(args: argparse.Namespace, data: bytes) -> str:
    chosen = getattr(args, "input_format", "auto")
    if chosen != "auto":
        return chosen
    text = data.decode("utf-8-sig", errors="replace")
    first = next((line for line in text.splitlines() if line.strip()), "")
    header = tuple(cell.strip() for cell in first.split(","))
    if header == dataset.GROUPED_COLUMNS:
        return "grouped"
    if header == dataset.COUNTS_COLUMNS:
        return "counts"
    if getattr(args, "elicitations", None):
        return "long"
    return "wide"


def _load_matrix(args: argparse.Namespace) -> dataset.ElicitationMatrix:
    data = _read_file(args.input)
    fmt = _sniff_format(args, data)
    if fmt in ("grouped", "counts"):
        raise CLIError(f"{fmt} input carries no code identities; this subcommand needs wide or long input")
    if fmt == "long":
        if not args.elicitations:
            raise CLIError("long input needs --elicitations")
        return dataset.parse_long(data, _read_file(args.elicitations))
    return dataset.parse_wide(data)


def _load_sequence(args: argparse.Namespace) -> dataset.InterviewSequence:
    data = _read_file(args.input)
    fmt = _sniff_format(args, data)
    if fmt == "grouped":
        if args.seed is None:
            raise CLIError("grouped input requires --seed for imputation")
        return planner.impute_grouped(dataset.parse_grouped(data), args.seed)
    if fmt == "counts":
        return dataset.parse_counts(data)
    if fmt == "long":
        if not args.elicitations:
            raise CLIError("long input needs --elicitations")
        return dataset.derive_sequence(dataset.parse_long(data, _read_file(args.elicitations)))
    return dataset.derive_sequence(dataset.parse_wide(data))


def _write_output(args: argparse.Namespace, text: str) -> None:
    if not getattr(args, "out", None):
        sys.stdout.write(text)
        return
    path = Path(args.out)
    out_dir = os.environ.get(ENV_OUT_DIR)
    if out_dir and not path.is_absolute():
        path = Path(out_dir) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _json_text(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _fmt4(value: float | int | None) -> str:
    if value is None:
        return "na"
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


def _csv_cell(value: float | int | None) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def describe_to_csv(stats: dataset.DescriptiveStats) -> str:
    lines = ["table,key,value"]
    for seq, count in enumerate(stats.marked_per_interview, start=1):
        lines.append(f"marked_per_interview,{seq},{count}")
    for seq, count in enumerate(stats.recaptured_per_interview, start=1):
        lines.append(f"recaptured_per_interview,{seq},{count}")
    for name, summary in (("marked", stats.marked), ("recaptured", stats.recaptured)):
        lines.append(f"{name},total,{summary.total}")
        lines.append(f"{name},mean,{_csv_cell(summary.mean)}")
        lines.append(f"{name},median,{_csv_cell(summary.median)}")
        lines.append(f"{name},std,{_csv_cell(summary.std)}")
    for recaptures in sorted(stats.recapture_frequency):
        lines.append(f"recapture_frequency,{recaptures},{stats.recapture_frequency[recaptures]}")
    return "\n".join(lines) + "\n"


def describe_to_json_dict(stats: dataset.DescriptiveStats) -> dict:
    def summary_dict(s: dataset.StatSummary) -> dict:
        return {"total": s.total, "mean": s.mean, "median": s.median, "std": s.std}

    return {
        "marked_per_interview": list(stats.marked_per_interview),
        "recaptured_per_interview": list(stats.recaptured_per_interview),
        "marked": summary_dict(stats.marked),
        "recaptured": summary_dict(stats.recaptured),
        "recapture_frequency": {
            str(k): stats.recapture_frequency[k] for k in sorted(stats.recapture_frequency)
        },
    }


def cmd_describe(args: argparse.Namespace) -> int:
    stats = dataset.descriptive_stats(_load_matrix(args))
    if args.format == "json":
        _write_output(args, _json_text(describe_to_json_dict(stats)))
    else:
        _write_output(args, describe_to_csv(stats))
    return 0


def cmd_km(args: argparse.Namespace) -> int:
    sequence = _load_sequence(args)
    curve = survival.km_estimate(sequence, alpha=_resolve_alpha(args), coding=args.coding)
    summary = survival.saturation_summary(curve)
    if args.format == "json":
        _write_output(args, _json_text(survival.curve_to_json_dict(curve, summary)))
    elif args.format == "svg":
        _write_output(args, plot.render_curve_svg(curve, summary))
    else:
        _write_output(args, survival.curve_to_csv(curve))
    final = curve.final
    print(
        f"interviews={len(curve.points)} events={len(curve.event_points())} "
        f"alpha={_fmt4(curve.alpha)} coding={args.coding}",
        file=sys.stderr,
    )
    print(
        f"S(J)={_fmt4(final.survival)} CI=({_fmt4(final.ci_low)}, {_fmt4(final.ci_high)})",
        file=sys.stderr,
    )
    print(
        f"zero_at={_fmt4(summary.km_zero_seq)} "
        f"extrapolated_zero={_fmt4(summary.km_extrapolated_zero)} "
        f"upper_ci_zero={_fmt4(summary.upper_ci_extrapolated_zero)}",
        file=sys.stderr,
    )
    return 0


def cmd_crc(args: argparse.Namespace) -> int:
    series = crc.per_interview_series(_load_matrix(args))
    if args.format == "json":
        _write_output(args, _json_text(crc.series_to_json_list(series)))
    else:
        _write_output(args, crc.series_to_csv(series))
    return 0


def cmd_plan(args: argparse.Namespace) -> int:
    alpha = _resolve_alpha(args)
    patterns = planner.parse_patterns(_read_file(args.input))
    rows = [planner.scenario_eval(p, alpha=alpha, rule_k=args.rule_k) for p in patterns]
    if args.format == "json":
        doc = {
            "alpha": alpha,
            "rule_k": args.rule_k,
            "scenarios": [planner.scenario_to_json_dict(r) for r in rows],
        }
        _write_output(args, _json_text(doc))
    else:
        _write_output(args, planner.scenarios_to_csv(rows))
    return 0


def cmd_impute(args: argparse.Namespace) -> int:
    if args.seed is None:
        raise CLIError("grouped imputation requires --seed")
    groups = dataset.parse_grouped(_read_file(args.input))
    sequence = planner.impute_grouped(groups, args.seed)
    if args.format == "json":
        _write_output(args, _json_text({"seed": args.seed, "new_codes": list(sequence.new_codes)}))
    else:
        _write_output(args, dataset.sequence_to_counts_csv(sequence))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    data_dir = args.data_dir or os.environ.get(ENV_DATA_DIR) or DEFAULT_DATA_DIR
    app = create_app(Path(data_dir))
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


_HANDLERS = {
    "describe": cmd_describe,
    "km": cmd_km,
    "crc": cmd_crc,
    "plan": cmd_plan,
    "impute": cmd_impute,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.subcommand](args)
    except (CLIError, DataError, ValueError) as exc:
        print(f"satkm: error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
