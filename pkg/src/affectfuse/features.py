"""Nine per-channel features and the 27-column (session, emotion) feature table."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .core import (
    CHANNELS,
    EMOTION_IDS,
    N_FEATURES,
    IngestionError,
    Session,
    segments_of,
)
from .dsp import local_extrema

DEFAULT_ENTROPY_BINS = 16
_DEGENERATE_VARIANCE = 1e-24


def count_peaks(x) -> int:
    x = np.asarray(x, dtype=np.float64)
    if len(x) < 3:
        raise ValueError(f"count_peaks needs at least 3 samples, got {len(x)}")
    return int(local_extrema(x, "max").size)


def shannon_entropy(x, bins: int = DEFAULT_ENTROPY_BINS) -> float:
    """Entropy in nats of an equal-width histogram spanning [min(x), max(x)]."""
    x = np.asarray(x, dtype=np.float64)
    if len(x) < 1:
        raise ValueError("shannon_entropy needs at least one sample")
    if bins < 1:
        raise ValueError(f"bins must be positive, got {bins}")
    lo, hi = x.min(), x.max()
    if lo == hi:
        return 0.0
    counts, _ = np.histogram(x, bins=bins, range=(lo, hi))
    p = counts[counts > 0] / len(x)
    return float(max(0.0, -np.sum(p * np.log(p))))


def moments(x) -> tuple[float, float, float]:
    """Population mean, population variance and Pearson (non-excess) kurtosis.

    Kurtosis of a (numerically) constant signal is defined as 0.
    """
    x = np.asarray(x, dtype=np.float64)
    if len(x) < 2:
        raise ValueError(f"moments needs at least 2 samples, got {len(x)}")
    mean = float(np.mean(x))
    d = x - mean
    m2 = float(np.mean(d * d))
    if m2 < _DEGENERATE_VARIANCE:
        return mean, m2, 0.0
    m4 = float(np.mean(d**4))
    return mean, m2, m4 / (m2 * m2)


def powers(x, fs_hz: float) -> tuple[float, float]:
    """Signal power and the periodogram power outside the DC bin.

    The periodogram ``|X_k|^2 / N^2`` sums to the signal power over all bins, so
    the non-DC part equals ``signal_power - mean**2``. ``fs_hz`` only sets the
    frequency axis and does not change either value.
    """
    x = np.asarray(x, dtype=np.float64)
    n = len(x)
    if n < 2:
        raise ValueError(f"powers needs at least 2 samples, got {n}")
    if not fs_hz > 0:
        raise ValueError(f"fs_hz must be positive, got {fs_hz}")
    signal_power = float(np.mean(x * x))
    spectrum = np.abs(np.fft.rfft(x)) ** 2 / (n * n)
    # one-sided bins other than DC and (for even n) Nyquist stand for two two-sided bins
    weights = np.full(len(spectrum), 2.0)
    weights[0] = 1.0
    if n % 2 == 0:
        weights[-1] = 1.0
    spectral_power = float(np.sum(weights[1:] * spectrum[1:]))
    return signal_power, spectral_power


@dataclass(frozen=True)
class FeatureVector:
    values: tuple

    def __post_init__(self):
        if len(self.values) != 9:
            raise ValueError(f"feature vector needs 9 values, got {len(self.values)}")

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def extract_features(x, fs_hz: float, bins: int = DEFAULT_ENTROPY_BINS) -> FeatureVector:
    x = np.asarray(x, dtype=np.float64)
    mean, var, kurt = moments(x)
    power, spectral = powers(x, fs_hz)
    # float rounding can nudge the mean just outside [min, max] on near-constant input
    lo, hi = float(x.min()), float(x.max())
    mean = min(max(mean, lo), hi)
    return FeatureVector(
        (
            hi,
            lo,
            float(count_peaks(x)),
            mean,
            var,
            kurt,
            shannon_entropy(x, bins),
            power,
            spectral,
        )
    )


class FeatureTable:
    """Feature rows keyed by (session_id, emotion), 27 columns in canonical order.

    Rows are stored sorted by session order of insertion, then emotion id.
    """

    def __init__(self, keys, values):
        values = np.asarray(values, dtype=np.float64)
        keys = [(str(s), int(e)) for s, e in keys]
        if values.shape != (len(keys), N_FEATURES):
            raise ValueError(f"feature table shape {values.shape} does not match {len(keys)} keys x 27")
        if not np.all(np.isfinite(values)):
            raise ValueError("feature table contains non-finite values")
        values.setflags(write=False)
        self.keys = keys
        self.values = values

    def __len__(self) -> int:
        return len(self.keys)

    @property
    def sessions(self) -> list[str]:
        return list(dict.fromkeys(s for s, _ in self.keys))

    @property
    def emotions(self) -> np.ndarray:
        return np.array([e for _, e in self.keys], dtype=np.int64)

    def row(self, session_id: str, emotion: int) -> np.ndarray:
        return self.values[self.keys.index((session_id, emotion))]

    def rows_for(self, session_ids) -> FeatureTable:
        wanted = set(session_ids)
        pick = [i for i, (s, _) in enumerate(self.keys) if s in wanted]
        return FeatureTable([self.keys[i] for i in pick], self.values[pick])

    def without(self, session_id: str) -> FeatureTable:
        return self.rows_for(s for s in self.sessions if s != session_id)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["session", "emotion"] + [f"f{i:02d}" for i in range(N_FEATURES)])
            for (s, e), row in zip(self.keys, self.values):
                w.writerow([s, e] + [repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path) -> FeatureTable:
        keys, values = [], []
        with open(path, newline="") as fh:
            r = csv.reader(fh)
            header = next(r)
            if header[:2] != ["session", "emotion"] or len(header) != 2 + N_FEATURES:
                raise IngestionError(f"{path}: unexpected feature table header")
            for row in r:
                keys.append((row[0], int(row[1])))
                values.append([float(v) for v in row[2:]])
        return cls(keys, values)


def session_features(session: Session, bins: int = DEFAULT_ENTROPY_BINS) -> np.ndarray:
    """8 x 27 matrix for one preprocessed session, rows in emotion order 1..8.

    Multiple runs of one emotion are averaged elementwise.
    """
    per_emotion: dict[int, list[np.ndarray]] = {e: [] for e in EMOTION_IDS}
    for seg in segments_of(session):
        vec = np.concatenate(
            [
                np.asarray(extract_features(session.channel(k)[seg.start : seg.end], session.fs_hz, bins))
                for k in CHANNELS
            ]
        )
        per_emotion[seg.emotion].append(vec)
    rows = []
    for e in EMOTION_IDS:
        if not per_emotion[e]:
            raise IngestionError(f"session {session.session_id}: emotion {e} has no segment")
        rows.append(np.mean(per_emotion[e], axis=0))
    return np.vstack(rows)


def build_feature_table(sessions, bins: int = DEFAULT_ENTROPY_BINS) -> FeatureTable:
    sessions = list(sessions)
    keys, blocks = [], []
    for s in sessions:
        blocks.append(session_features(s, bins))
        keys.extend((s.session_id, e) for e in EMOTION_IDS)
    values = np.vstack(blocks) if blocks else np.zeros((0, N_FEATURES))
    return FeatureTable(keys, values)
