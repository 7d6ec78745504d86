"""Command line front end.

Subcommands: analyze (Yingram export), f0 (pitch contour CSV), compare-shift
(pairwise shift verdict), gradcheck (finite-difference verification) and
batch (manifest-driven evaluation). Exit codes: 0 success/pass, 1 evaluation
failure, 2 usage or I/O error. All randomness hangs off --seed, and output
files are written atomically (temp file + rename), so identical inputs and
flags reproduce identical bytes.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np

from .audio import WavFormatError, load_wav, resample
from .config import AnalysisConfig, load_config_file
from .evaluate import batch_report, evaluate_shift_pair, extract_pitch_contour
from .feature import (
    compute_yingram,
    write_yingram_binary,
    write_yingram_csv,
    yingram_metadata,
)
from .gradients import gradcheck_suite

__all__ = ["main"]

_CONFIG_FLAGS = {
    "sample_rate": "--sample-rate",
    "window": "--window",
    "hop": "--hop",
    "start_note": "--start-note",
    "num_channels": "--num-channels",
    "bins_per_octave": "--bins-per-octave",
    "reference_note": "--reference-note",
    "reference_hz": "--reference-hz",
    "lambda_yin": "--lambda-yin",
    "f0_threshold": "--f0-threshold",
    "voicing_cutoff": "--voicing-cutoff",
    "f_min": "--fmin",
    "f_max": "--fmax",
    "shift_tolerance": "--shift-tolerance",
    "min_overlap": "--min-overlap",
    "seed": "--seed",
}


def _config_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("analysis config")
    group.add_argument("--config", metavar="FILE", help="JSON or key=value config file")
    types = {f.name: (int if f.type == "int" else float) for f in dataclasses.fields(AnalysisConfig)}
    for name, flag in _CONFIG_FLAGS.items():
        group.add_argument(flag, dest=f"cfg_{name}", type=types[name], default=None)
    return parent


def _resolve_config(args: argparse.Namespace) -> AnalysisConfig:
    cfg = AnalysisConfig()
    if getattr(args, "config", None):
        cfg = load_config_file(args.config, cfg)
    overrides = {
        name: value
        for name in _CONFIG_FLAGS
        if (value := getattr(args, f"cfg_{name}", None)) is not None
    }
    return cfg.replace(**overrides)


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_text(text)
    os.replace(tmp, path)


def _write_json(path: Path, payload: dict) -> None:
    _atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _load_analysis_input(path: str, cfg: AnalysisConfig):
    return resample(load_wav(path), cfg.sample_rate)


def _cmd_analyze(args: argparse.Namespace) -> int:
    if not args.out and not args.binary:
        print("error: analyze needs --out and/or --binary", file=sys.stderr)
        return 2
    cfg = _resolve_config(args)
    wave = _load_analysis_input(args.input, cfg)
    matrix = compute_yingram(wave, cfg)
    meta = yingram_metadata(matrix)
    meta["config"] = cfg.to_dict()

    if args.out:
        out = Path(args.out)
        tmp = out.with_name(out.name + f".tmp{os.getpid()}")
        write_yingram_csv(matrix, tmp)
        os.replace(tmp, out)
        _write_json(Path(str(out) + ".json"), meta)
    if args.binary:
        binary = Path(args.binary)
        tmp = binary.with_name(binary.name + f".tmp{os.getpid()}")
        write_yingram_binary(matrix, tmp, write_sidecar=False)
        os.replace(tmp, binary)
        _write_json(Path(str(binary) + ".json"), meta)
    return 0


def _cmd_f0(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    wave = _load_analysis_input(args.input, cfg)
    contour = extract_pitch_contour(wave, cfg)
    lines = ["frame,time_sec,f0_hz,aperiodicity"]
    for k in range(len(contour)):
        hz = "" if np.isnan(contour.f0[k]) else f"{contour.f0[k]:.4f}"
        lines.append(
            f"{k},{contour.times[k]:.6f},{hz},{contour.aperiodicity[k]:.6f}"
        )
    out = Path(args.out)
    _atomic_write_text(out, "\n".join(lines) + "\n")
    _write_json(Path(str(out) + ".json"), {"frames": len(contour), "config": cfg.to_dict()})
    return 0


def _cmd_compare_shift(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    normal = _load_analysis_input(args.normal, cfg)
    shifted = _load_analysis_input(args.shifted, cfg)
    report = evaluate_shift_pair(normal, shifted, args.scope_shift, cfg)
    payload = report.to_dict()
    payload["config"] = cfg.to_dict()
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        _atomic_write_text(Path(args.out), text + "\n")
    else:
        print(text)
    if args.no_verdict_exit:
        return 0
    return 0 if report.passed else 1


def _cmd_gradcheck(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    if args.frames < 0:
        print("error: --frames must be non-negative", file=sys.stderr)
        return 2
    if args.frames == 0:
        print("warning: --frames 0 requested, gradcheck passes vacuously", file=sys.stderr)
    reports = gradcheck_suite(
        args.frames, cfg, eps=args.eps, probes=args.probes, tolerance=args.tolerance
    )
    all_pass = all(r.passed for r in reports)
    payload = {
        "frames": args.frames,
        "eps": args.eps,
        "tolerance": args.tolerance,
        "all_pass": all_pass,
        "max_rel_error": max((r.max_rel_error for r in reports), default=0.0),
        "reports": [r.to_dict() for r in reports],
        "config": cfg.to_dict(),
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        _atomic_write_text(Path(args.out), text + "\n")
    else:
        print(text)
    return 0 if all_pass else 1


def _cmd_batch(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    try:
        manifest = json.loads(Path(args.manifest).read_text())
    except json.JSONDecodeError as exc:
        print(f"error: malformed manifest JSON: {exc}", file=sys.stderr)
        return 2
    if not isinstance(manifest, list):
        print("error: manifest must be a JSON array", file=sys.stderr)
        return 2
    report = batch_report(manifest, cfg)
    if args.out_json:
        _write_json(Path(args.out_json), report.to_dict())
    if args.out_csv:
        _atomic_write_text(Path(args.out_csv), "\n".join(report.csv_lines()) + "\n")
    if not args.out_json and not args.out_csv:
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return 0 if report.all_passed else 1


def _build_parser() -> argparse.ArgumentParser:
    parent = _config_parent()
    parser = argparse.ArgumentParser(
        prog="yingram",
        description="Yingram pitch analysis, losses and shift evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[parent], help="export a Yingram matrix")
    p.add_argument("input", help="input WAV file")
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--binary", help="raw float32 output path (JSON sidecar alongside)")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("f0", parents=[parent], help="export a pitch contour CSV")
    p.add_argument("input", help="input WAV file")
    p.add_argument("--out", required=True, help="CSV output path")
    p.set_defaults(func=_cmd_f0)

    p = sub.add_parser(
        "compare-shift", parents=[parent], help="score a normal/shifted pair"
    )
    p.add_argument("normal", help="reference WAV file")
    p.add_argument("shifted", help="pitch-shifted WAV file")
    p.add_argument("--scope-shift", type=int, required=True, help="scope shift s")
    p.add_argument("--out", help="JSON report path (default: stdout)")
    p.add_argument(
        "--no-verdict-exit",
        action="store_true",
        help="always exit 0 instead of 1 on a failing verdict",
    )
    p.set_defaults(func=_cmd_compare_shift)

    p = sub.add_parser(
        "gradcheck", parents=[parent], help="verify analytic gradients against FD"
    )
    p.add_argument("--frames", type=int, default=50, help="number of random frames")
    p.add_argument("--eps", type=float, default=1e-5, help="finite-difference step")
    p.add_argument("--probes", type=int, default=25, help="probed samples per frame")
    p.add_argument("--tolerance", type=float, default=1e-4, help="relative tolerance")
    p.add_argument("--out", help="JSON report path (default: stdout)")
    p.set_defaults(func=_cmd_gradcheck)

    p = sub.add_parser("batch", parents=[parent], help="evaluate a manifest of pairs")
    p.add_argument("manifest", help="JSON array of {normal, shifted, scope_shift}")
    p.add_argument("--out-json", help="full JSON report path")
    p.add_argument("--out-csv", help="per-pair CSV path")
    p.set_defaults(func=_cmd_batch)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (WavFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
