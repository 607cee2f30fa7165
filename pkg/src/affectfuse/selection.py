"""Correlation-threshold feature pruning, fitted on training rows only."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CHANNELS, N_FEATURES, split_feature_index

DEFAULT_THRESHOLD = 0.8


class SelectionError(ValueError):
    pass


def pearson(x, y) -> float:
    """Sample Pearson correlation; 0 when either column is constant."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ValueError(f"pearson needs two equal-length columns of length >= 2, got {x.shape}, {y.shape}")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        return 0.0
    r = float(dx @ dy) / np.sqrt(sxx * syy)
    return float(min(1.0, max(-1.0, r)))


def correlation_matrix(values) -> np.ndarray:
    """Pairwise ``pearson`` over the columns of ``values``."""
    values = np.asarray(values, dtype=np.float64)
    m = values.shape[1]
    r = np.eye(m)
    for i in range(m):
        for j in range(i + 1, m):
            r[i, j] = r[j, i] = pearson(values[:, i], values[:, j])
    return r


@dataclass(frozen=True)
class FeatureMask:
    kept: tuple
    threshold: float
    dropped_constant: tuple = ()

    @classmethod
    def all_features(cls) -> FeatureMask:
        return cls(tuple(range(N_FEATURES)), 1.0)

    def for_channel(self, channel) -> list[int]:
        return [i for i in self.kept if split_feature_index(i)[0] == channel]

    def to_json(self) -> dict:
        return {
            "kept": list(self.kept),
            "threshold": self.threshold,
            "dropped_constant": list(self.dropped_constant),
        }


def prune_correlated(values, threshold: float = DEFAULT_THRESHOLD) -> FeatureMask:
    """Greedy scan in column order: keep a column unless it correlates above
    ``threshold`` (in absolute value) with a column already kept.

    ``values`` is the training block, rows x 27 columns. Constant columns are
    dropped first.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[1] != N_FEATURES:
        raise ValueError(f"expected rows x {N_FEATURES} training block, got {values.shape}")
    if values.shape[0] < 2:
        raise ValueError("pruning needs at least 2 training rows")
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must lie in (0, 1], got {threshold}")

    constant = tuple(int(j) for j in np.flatnonzero(np.ptp(values, axis=0) == 0))
    r = np.abs(correlation_matrix(values))
    kept: list[int] = []
    for j in range(N_FEATURES):
        if j in constant:
            continue
        if all(r[j, k] <= threshold for k in kept):
            kept.append(j)

    return FeatureMask(tuple(kept), float(threshold), constant)


def require_every_channel(mask: FeatureMask) -> FeatureMask:
    """Each modality's learner needs at least one surviving feature."""
    empty = [c.label for c in CHANNELS if not mask.for_channel(c)]
    if empty:
        raise SelectionError(
            f"correlation pruning at threshold {mask.threshold} removed every feature of channel(s) {', '.join(empty)}"
        )
    return mask
