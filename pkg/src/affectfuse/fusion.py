"""Fusion of the per-modality weight vectors into one emotion decision."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import EMOTION_IDS

ROW_SUM_TOLERANCE = 1e-6


class ContractError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FusedDecision:
    mean_weights: np.ndarray
    predicted: int


def fuse(matrix, labels=EMOTION_IDS) -> FusedDecision:
    """Average the modality rows per emotion column and pick the largest.

    Ties go to the first column (lowest emotion id). Column sums use
    ``math.fsum`` so the result does not depend on the order of the rows.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[1] != len(labels) or m.shape[0] < 1:
        raise ContractError(f"weight matrix must be modalities x {len(labels)}, got {m.shape}")
    if not np.all(np.isfinite(m)) or np.any(m < 0) or np.any(m > 1):
        raise ContractError("weight matrix entries must lie in [0, 1]")
    for r, row in enumerate(m):
        total = math.fsum(row)
        if abs(total - 1.0) > ROW_SUM_TOLERANCE:
            raise ContractError(f"weight matrix row {r} sums to {total!r}, not 1")
    rows = m.shape[0]
    mean = np.array([math.fsum(m[:, j]) / rows for j in range(m.shape[1])])
    return FusedDecision(mean, int(labels[int(np.argmax(mean))]))
