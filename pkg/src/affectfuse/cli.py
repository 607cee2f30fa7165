"""Command-line entry point: ``affectfuse synth|features|evaluate|dump-model``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path

from .core import IngestionError
from .evaluation import EvalConfig, clamp_warnings, prepare, run_loocv, train_fold, write_companions
from .features import DEFAULT_ENTROPY_BINS
from .fusion import ContractError
from .io import load_manifest, write_manifest
from .lda import DEFAULT_RIDGE, DEFAULT_SHRINKAGE, TrainingError
from .selection import DEFAULT_THRESHOLD, SelectionError
from .synth import SynthConfig, generate

log = logging.getLogger("affectfuse")

LOG_LEVELS = {"warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


class _Formatter(logging.Formatter):
    def format(self, record):
        level = "WARN" if record.levelno == logging.WARNING else record.levelname
        return f"{level} {record.getMessage()}"


def _setup_logging() -> None:
    name = os.environ.get("AFFECTFUSE_LOG", "warn").lower()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_Formatter())
    root = logging.getLogger("affectfuse")
    root.handlers[:] = [handler]
    root.setLevel(LOG_LEVELS.get(name, logging.WARNING))
    root.propagate = False


def _add_pipeline_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--manifest", required=True, type=Path, help="manifest JSON listing session CSVs")
    p.add_argument("--entropy-bins", type=int, default=DEFAULT_ENTROPY_BINS)
    p.add_argument("--cutoff-emg", type=float, default=None, help="EMG low-pass cutoff in Hz (default 10)")
    p.add_argument("--cutoff-bvp", type=float, default=None, help="BVP low-pass cutoff in Hz (default 19)")
    p.add_argument("--cutoff-gsr", type=float, default=None, help="GSR low-pass cutoff in Hz (default 19)")


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--prune", action="store_true", help="correlation-prune features per training fold")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD, help="|r| pruning threshold")
    p.add_argument("--shrinkage", type=float, default=DEFAULT_SHRINKAGE)
    p.add_argument("--ridge", type=float, default=DEFAULT_RIDGE)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="affectfuse", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write seeded synthetic sessions and a manifest")
    p.add_argument("--days", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--separation", type=float, default=1.0, help="class separation; 0 removes all signal")
    p.add_argument("--fs", type=float, default=20.0, help="sampling rate in Hz")
    p.add_argument("--segment-seconds", type=float, default=180.0)
    p.add_argument("--out", type=Path, required=True, help="output directory")

    p = sub.add_parser("features", help="write the 27-column feature table as CSV")
    _add_pipeline_args(p)
    p.add_argument("--out", type=Path, required=True, help="output CSV path")

    p = sub.add_parser("evaluate", help="leave-one-session-out evaluation")
    _add_pipeline_args(p)
    _add_model_args(p)
    p.add_argument("--parallel", action="store_true", help="run folds on a thread pool")
    p.add_argument("--seed", type=int, default=None, help="recorded in the report")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")

    p = sub.add_parser("dump-model", help="fit the per-modality learners and dump them as JSON")
    _add_pipeline_args(p)
    _add_model_args(p)
    p.add_argument("--hold-out", default=None, help="session id excluded from training")
    p.add_argument("--out", type=Path, required=True, help="output JSON path")
    return parser


def _config(args) -> EvalConfig:
    return EvalConfig(
        prune=getattr(args, "prune", False),
        threshold=getattr(args, "threshold", DEFAULT_THRESHOLD),
        shrinkage=getattr(args, "shrinkage", DEFAULT_SHRINKAGE),
        ridge=getattr(args, "ridge", DEFAULT_RIDGE),
        entropy_bins=args.entropy_bins,
        cutoff_emg=args.cutoff_emg,
        cutoff_bvp=args.cutoff_bvp,
        cutoff_gsr=args.cutoff_gsr,
        parallel=getattr(args, "parallel", False),
        seed=getattr(args, "seed", None),
    )


def cmd_synth(args) -> None:
    config = SynthConfig(args.days, args.seed, args.separation, args.fs, args.segment_seconds)
    manifest = write_manifest(generate(config), args.out)
    (args.out / "synth.json").write_text(json.dumps(config.to_json(), indent=2, sort_keys=True) + "\n")
    log.info("wrote %d sessions to %s", args.days, manifest)


def cmd_features(args) -> None:
    table, _ = prepare(load_manifest(args.manifest), _config(args))
    args.out.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(args.out)
    log.info("wrote %d rows to %s", len(table), args.out)


def cmd_evaluate(args) -> None:
    config = _config(args)
    report = run_loocv(load_manifest(args.manifest), config)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "report.json").write_text(report.dumps())
    write_companions(report, args.out)
    log.info("accuracy %.4f over %d folds", report.accuracy, len(report.folds))


def cmd_dump_model(args) -> None:
    config = _config(args)
    table, bank = prepare(load_manifest(args.manifest), config)
    if args.hold_out is not None:
        if args.hold_out not in table.sessions:
            raise IngestionError(f"--hold-out {args.hold_out!r} is not a session in {args.manifest}")
        table = table.without(args.hold_out)
    model = train_fold(table, config)
    doc = {
        "config": asdict(config),
        "filters": bank.describe(),
        "warnings": clamp_warnings(bank),
        "training_sessions": table.sessions,
        **model.to_json(),
    }
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


COMMANDS = {
    "synth": cmd_synth,
    "features": cmd_features,
    "evaluate": cmd_evaluate,
    "dump-model": cmd_dump_model,
}


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (IngestionError, SelectionError, TrainingError, ContractError, ValueError, OSError) as exc:
        print(f"affectfuse {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
