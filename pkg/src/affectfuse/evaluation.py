"""Leave-one-session-out evaluation and the accuracy / TPR / FPR / MSCR suite."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .core import CHANNELS, EMOTION_IDS, N_EMOTIONS, ChannelKind, IngestionError
from .dsp import FilterBank, preprocess
from .features import DEFAULT_ENTROPY_BINS, FeatureTable, build_feature_table
from .fusion import FusedDecision, fuse
from .lda import DEFAULT_RIDGE, DEFAULT_SHRINKAGE, discriminants, fit_lda, weight_vector
from .selection import DEFAULT_THRESHOLD, FeatureMask, prune_correlated, require_every_channel


@dataclass(frozen=True)
class EvalConfig:
    prune: bool = False
    threshold: float = DEFAULT_THRESHOLD
    shrinkage: float = DEFAULT_SHRINKAGE
    ridge: float = DEFAULT_RIDGE
    entropy_bins: int = DEFAULT_ENTROPY_BINS
    cutoff_emg: float | None = None
    cutoff_bvp: float | None = None
    cutoff_gsr: float | None = None
    parallel: bool = False
    seed: int | None = None

    @property
    def cutoffs(self) -> dict:
        return {
            ChannelKind.EMG: self.cutoff_emg,
            ChannelKind.BVP: self.cutoff_bvp,
            ChannelKind.GSR: self.cutoff_gsr,
        }


@dataclass(frozen=True, eq=False)
class FoldModel:
    """Everything trained for one fold: the mask and one learner per modality."""

    mask: FeatureMask
    columns: dict
    learners: dict

    def likelihood_matrices(self, X) -> np.ndarray:
        """rows x 3 x 8 weight matrices for a block of 27-column feature rows."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        out = np.empty((len(X), len(CHANNELS), N_EMOTIONS))
        for kind in CHANNELS:
            g = discriminants(self.learners[kind], X[:, self.columns[kind]])
            out[:, int(kind)] = weight_vector(g)
        return out

    def decide(self, X) -> list[tuple[np.ndarray, FusedDecision]]:
        return [(m, fuse(m)) for m in self.likelihood_matrices(X)]

    def same_as(self, other: FoldModel) -> bool:
        return (
            self.mask == other.mask
            and self.columns == other.columns
            and all(self.learners[k].same_as(other.learners[k]) for k in CHANNELS)
        )

    def to_json(self) -> dict:
        return {
            "mask": self.mask.to_json(),
            "modalities": {
                kind.label: {"columns": self.columns[kind], **self.learners[kind].to_json()}
                for kind in CHANNELS
            },
        }


def train_fold(train: FeatureTable, config: EvalConfig = EvalConfig()) -> FoldModel:
    if config.prune:
        mask = require_every_channel(prune_correlated(train.values, config.threshold))
    else:
        mask = FeatureMask.all_features()
    y = train.emotions
    columns, learners = {}, {}
    for kind in CHANNELS:
        cols = mask.for_channel(kind)
        columns[kind] = cols
        learners[kind] = fit_lda(train.values[:, cols], y, config.shrinkage, config.ridge)
    return FoldModel(mask, columns, learners)


@dataclass(frozen=True, eq=False)
class Metrics:
    confusion: np.ndarray
    accuracy: float
    tpr: np.ndarray
    fpr: np.ndarray
    mscr: np.ndarray


def metrics(truth, predicted) -> Metrics:
    """Confusion counts and per-emotion one-vs-rest rates.

    ``mscr[e][j]`` is the share of emotion-``e`` instances predicted as ``j``
    (zero on the diagonal), so each row sums to ``1 - tpr[e]``.
    """
    truth = np.asarray(truth, dtype=np.int64)
    predicted = np.asarray(predicted, dtype=np.int64)
    if truth.shape != predicted.shape or truth.size == 0:
        raise ValueError("need at least one (truth, prediction) pair of matching shapes")
    missing = sorted(set(EMOTION_IDS) - set(truth.tolist()))
    if missing:
        raise ValueError(f"emotions {missing} never appear as truth")
    bad = sorted((set(truth.tolist()) | set(predicted.tolist())) - set(EMOTION_IDS))
    if bad:
        raise ValueError(f"labels {bad} outside 1..8")

    confusion = np.zeros((N_EMOTIONS, N_EMOTIONS), dtype=np.int64)
    np.add.at(confusion, (truth - 1, predicted - 1), 1)
    total = int(confusion.sum())
    per_truth = confusion.sum(axis=1)
    per_pred = confusion.sum(axis=0)
    hits = np.diag(confusion)

    tpr = hits / per_truth
    negatives = total - per_truth
    false_pos = per_pred - hits
    fpr = np.divide(false_pos, negatives, out=np.zeros(N_EMOTIONS), where=negatives > 0)
    mscr = confusion / per_truth[:, None]
    np.fill_diagonal(mscr, 0.0)
    return Metrics(confusion, int(hits.sum()) / total, tpr, fpr, mscr)


@dataclass
class FoldResult:
    held_out: str
    model: FoldModel
    truth: list
    decisions: list

    @property
    def predicted(self) -> list[int]:
        return [d.predicted for _, d in self.decisions]

    @property
    def accuracy(self) -> float:
        return sum(t == p for t, p in zip(self.truth, self.predicted)) / len(self.truth)

    def to_json(self) -> dict:
        return {
            "held_out": self.held_out,
            "mask": self.model.mask.to_json(),
            "n_kept": len(self.model.mask.kept),
            "kept_per_modality": {k.label: len(self.model.columns[k]) for k in CHANNELS},
            "accuracy": self.accuracy,
            "predictions": [
                {
                    "emotion": int(t),
                    "predicted": d.predicted,
                    "weight_matrix": m.tolist(),
                    "mean_weights": d.mean_weights.tolist(),
                }
                for t, (m, d) in zip(self.truth, self.decisions)
            ],
        }


@dataclass
class EvalReport:
    folds: list
    metrics: Metrics
    config: EvalConfig
    filters: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    @property
    def accuracy(self) -> float:
        return self.metrics.accuracy

    def to_json(self) -> dict:
        m = self.metrics
        return {
            "version": __version__,
            "config": asdict(self.config),
            "filters": self.filters,
            "warnings": self.warnings,
            "n_folds": len(self.folds),
            "n_predictions": int(m.confusion.sum()),
            "accuracy": m.accuracy,
            "fold_accuracy": {f.held_out: f.accuracy for f in self.folds},
            "tpr": m.tpr.tolist(),
            "fpr": m.fpr.tolist(),
            "mscr": m.mscr.tolist(),
            "confusion": m.confusion.tolist(),
            "folds": [f.to_json() for f in self.folds],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def _fold(table: FeatureTable, held_out: str, config: EvalConfig) -> FoldResult:
    model = train_fold(table.without(held_out), config)
    test = table.rows_for([held_out])
    return FoldResult(held_out, model, test.emotions.tolist(), model.decide(test.values))


def prepare(sessions, config: EvalConfig = EvalConfig()) -> tuple[FeatureTable, FilterBank]:
    """Preprocess every session and build the feature table."""
    sessions = list(sessions)
    if len(sessions) < 2:
        raise IngestionError(f"leave-one-out needs at least 2 sessions, got {len(sessions)}")
    rates = {s.fs_hz for s in sessions}
    if len(rates) != 1:
        raise IngestionError(f"sessions disagree on sampling rate: {sorted(rates)}")
    bank = FilterBank.design(rates.pop(), config.cutoffs)
    processed = [preprocess(s, bank) for s in sessions]
    return build_feature_table(processed, config.entropy_bins), bank


def clamp_warnings(bank: FilterBank) -> list[str]:
    return [
        f"nyquist-clamp channel={kind.label} requested={f.requested_hz:g} effective={f.cutoff_hz:g}"
        for kind, f in bank.filters.items()
        if f.clamped
    ]


def run_table(table: FeatureTable, config: EvalConfig = EvalConfig()) -> list[FoldResult]:
    held = table.sessions
    if config.parallel:
        with ThreadPoolExecutor() as pool:
            return list(pool.map(lambda s: _fold(table, s, config), held))
    return [_fold(table, s, config) for s in held]


def run_loocv(sessions, config: EvalConfig = EvalConfig()) -> EvalReport:
    table, bank = prepare(sessions, config)
    folds = run_table(table, config)
    truth = [t for f in folds for t in f.truth]
    predicted = [p for f in folds for p in f.predicted]
    return EvalReport(folds, metrics(truth, predicted), config, bank.describe(), clamp_warnings(bank))


def write_companions(report: EvalReport, out_dir) -> None:
    """confusion.csv, rates.csv, mscr.csv and roc_points.csv next to the report."""
    from pathlib import Path

    from .core import EMOTION_NAMES

    out = Path(out_dir)
    m = report.metrics
    ids = [str(e) for e in EMOTION_IDS]

    def matrix_csv(name, mat, fmt):
        lines = ["truth," + ",".join(ids)]
        for e, row in zip(EMOTION_IDS, mat):
            lines.append(f"{e}," + ",".join(fmt(v) for v in row))
        (out / name).write_text("\n".join(lines) + "\n")

    matrix_csv("confusion.csv", m.confusion, lambda v: str(int(v)))
    matrix_csv("mscr.csv", m.mscr, lambda v: repr(float(v)))
    rates = ["emotion,name,tpr,fpr"]
    roc = ["emotion,name,fpr,tpr"]
    for i, e in enumerate(EMOTION_IDS):
        rates.append(f"{e},{EMOTION_NAMES[e]},{float(m.tpr[i])!r},{float(m.fpr[i])!r}")
        roc.append(f"{e},{EMOTION_NAMES[e]},{float(m.fpr[i])!r},{float(m.tpr[i])!r}")
    (out / "rates.csv").write_text("\n".join(rates) + "\n")
    (out / "roc_points.csv").write_text("\n".join(roc) + "\n")
