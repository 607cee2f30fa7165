"""Domain types: channels, emotion labels, sessions, segments and feature indexing."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

N_EMOTIONS = 8
N_FEATURES_PER_CHANNEL = 9
N_FEATURES = 27
MIN_SEGMENT_SECONDS = 10.0

EMOTION_IDS = tuple(range(1, N_EMOTIONS + 1))
EMOTION_NAMES = {
    1: "no-emotion",
    2: "anger",
    3: "hate",
    4: "grief",
    5: "platonic-love",
    6: "romantic-love",
    7: "joy",
    8: "reverence",
}

FEATURE_SLOTS = (
    "max",
    "min",
    "peaks",
    "mean",
    "variance",
    "kurtosis",
    "entropy",
    "power",
    "spectral_power",
)


class IngestionError(ValueError):
    """Raised when a session or manifest violates the data contract."""


class ChannelKind(enum.IntEnum):
    EMG = 0
    BVP = 1
    GSR = 2

    @property
    def label(self) -> str:
        return self.name.lower()


CHANNELS = tuple(ChannelKind)


def feature_index(channel: ChannelKind | int, slot: int) -> int:
    if not 0 <= slot < N_FEATURES_PER_CHANNEL:
        raise ValueError(f"feature slot out of range: {slot}")
    return int(ChannelKind(channel)) * N_FEATURES_PER_CHANNEL + slot


def split_feature_index(idx: int) -> tuple[ChannelKind, int]:
    if not 0 <= idx < N_FEATURES:
        raise ValueError(f"feature index out of range: {idx}")
    return ChannelKind(idx // N_FEATURES_PER_CHANNEL), idx % N_FEATURES_PER_CHANNEL


def feature_name(idx: int) -> str:
    """Human-readable column name, e.g. ``bvp_kurtosis`` for index 14."""
    channel, slot = split_feature_index(idx)
    return f"{channel.label}_{FEATURE_SLOTS[slot]}"


@dataclass(frozen=True)
class Segment:
    emotion: int
    start: int
    end: int

    def __len__(self) -> int:
        return self.end - self.start


@dataclass(frozen=True, eq=False)
class Session:
    """One recording day: three equal-length channels plus a per-sample label track.

    ``channels`` has shape (3, n) in EMG, BVP, GSR order. Labels are 0 for
    transition samples and 1..8 for emotion runs.
    """

    session_id: str
    fs_hz: float
    channels: np.ndarray
    labels: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        channels = np.array(self.channels, dtype=np.float64)
        labels = np.array(self.labels)
        if not np.isfinite(self.fs_hz) or self.fs_hz <= 0:
            raise IngestionError(f"session {self.session_id}: fs_hz must be positive, got {self.fs_hz}")
        if channels.ndim != 2 or channels.shape[0] != len(CHANNELS):
            raise IngestionError(
                f"session {self.session_id}: expected 3 channels, got shape {channels.shape}"
            )
        n = channels.shape[1]
        if n < 2:
            raise IngestionError(f"session {self.session_id}: need at least 2 samples, got {n}")
        if labels.shape != (n,):
            raise IngestionError(
                f"session {self.session_id}: label track length {labels.shape} != channel length {n}"
            )
        if not np.all(np.isfinite(channels)):
            bad = int(np.argwhere(~np.isfinite(channels))[0, 1])
            raise IngestionError(f"session {self.session_id}: non-finite sample at offset {bad}")
        if labels.dtype.kind == "f":
            if not np.all(labels == np.round(labels)):
                raise IngestionError(f"session {self.session_id}: non-integer label")
        labels = labels.astype(np.int64)
        if labels.min() < 0 or labels.max() > N_EMOTIONS:
            bad = int(np.argmax((labels < 0) | (labels > N_EMOTIONS)))
            raise IngestionError(
                f"session {self.session_id}: label {labels[bad]} at offset {bad} outside 0..8"
            )
        channels.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "fs_hz", float(self.fs_hz))

    def __len__(self) -> int:
        return self.channels.shape[1]

    def channel(self, kind: ChannelKind | int) -> np.ndarray:
        return self.channels[int(kind)]

    def with_channels(self, channels) -> Session:
        return Session(self.session_id, self.fs_hz, channels, self.labels, dict(self.meta))


def segments_of(session: Session, min_seconds: float = MIN_SEGMENT_SECONDS) -> list[Segment]:
    """Split the label track into maximal runs of equal nonzero labels.

    Every labeled sample lands in exactly one returned segment; label-0
    transition samples land in none.
    """
    labels = session.labels
    change = np.flatnonzero(np.diff(labels)) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [len(labels)]))

    segments = [
        Segment(int(labels[s]), int(s), int(e)) for s, e in zip(starts, ends) if labels[s] != 0
    ]
    if not segments:
        raise IngestionError(f"session {session.session_id}: no segments (all labels are 0)")

    min_len = session.fs_hz * min_seconds
    for seg in segments:
        if len(seg) < min_len:
            raise IngestionError(
                f"session {session.session_id}: emotion {seg.emotion} run at offset {seg.start} "
                f"has {len(seg)} samples, shorter than {min_seconds:g} s ({min_len:g} samples)"
            )

    missing = sorted(set(EMOTION_IDS) - {seg.emotion for seg in segments})
    if missing:
        raise IngestionError(
            f"session {session.session_id}: missing emotion ids {missing}"
        )
    return segments
