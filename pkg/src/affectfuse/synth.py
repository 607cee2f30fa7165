"""Seeded synthetic eight-emotion sessions.

Each day draws from its own PCG64 stream, seeded with
``SeedSequence(seed, spawn_key=(day,))``, so a session depends only on the
seed and its day index. Within a day the emotion order is shuffled, segments
are separated by label-0 transitions, and every channel sample is

    offset_d + gain_d * (level + amp * sin(2 pi f t + phase) + sigma * noise)

where ``level``, ``amp``, ``f`` and ``sigma`` are a shared baseline plus
``separation`` times a fixed per-(channel, emotion) signature. With
``separation == 0`` the channel statistics do not depend on the emotion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EMOTION_IDS, N_EMOTIONS, Session

TRANSITION_SECONDS = 5.0

# Emotion ranks per channel, chosen so that no two channels order the
# emotions alike (pairwise rank correlation |rho| <= 0.43).
_LEVEL_RANKS = np.array(
    [
        [0, 5, 2, 7, 1, 4, 6, 3],
        [3, 0, 6, 5, 7, 2, 1, 4],
        [6, 2, 0, 4, 3, 7, 5, 1],
    ]
)
_BASE_LEVEL = np.array([0.0, 0.0, 0.0])
_BASE_AMP = np.array([1.0, 1.0, 1.0])
_BASE_FREQ = np.array([1.5, 1.2, 0.4])
_BASE_SIGMA = np.array([1.0, 0.5, 0.3])


def _signature():
    rng = np.random.default_rng(20160801)
    level = _LEVEL_RANKS / (N_EMOTIONS - 1) * 2.0 - 1.0
    amp = rng.uniform(-0.4, 0.4, size=(3, N_EMOTIONS))
    freq = rng.uniform(-0.1, 0.4, size=(3, N_EMOTIONS))
    sigma = rng.uniform(-0.1, 0.2, size=(3, N_EMOTIONS)) * _BASE_SIGMA[:, None]
    return level, amp, freq, sigma


SIGNATURE = _signature()


@dataclass(frozen=True)
class SynthConfig:
    days: int = 20
    seed: int = 0
    separation: float = 1.0
    fs_hz: float = 20.0
    segment_seconds: float = 180.0

    def __post_init__(self):
        if self.days < 2:
            raise ValueError(f"need at least 2 days, got {self.days}")
        if self.separation < 0:
            raise ValueError(f"separation must be nonnegative, got {self.separation}")
        if not self.fs_hz > 0:
            raise ValueError(f"fs_hz must be positive, got {self.fs_hz}")
        if self.segment_seconds < 10.0:
            raise ValueError(f"segments must last at least 10 s, got {self.segment_seconds}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed}")

    def to_json(self) -> dict:
        return {
            "days": self.days,
            "seed": self.seed,
            "separation": self.separation,
            "fs_hz": self.fs_hz,
            "segment_seconds": self.segment_seconds,
        }


def day_rng(seed: int, day: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(day,))))


def session_id(day: int, days: int) -> str:
    return f"day{day + 1:0{max(2, len(str(days)))}d}"


def generate_day(config: SynthConfig, day: int) -> Session:
    rng = day_rng(config.seed, day)
    fs = config.fs_hz
    seg_n = int(round(config.segment_seconds * fs))
    gap_n = int(round(TRANSITION_SECONDS * fs))
    order = rng.permutation(EMOTION_IDS)

    n = gap_n + N_EMOTIONS * (seg_n + gap_n)
    labels = np.zeros(n, dtype=np.int64)
    layout = []
    pos = gap_n
    for e in order:
        labels[pos : pos + seg_n] = e
        layout.append((int(e), pos, pos + seg_n))
        pos += seg_n + gap_n

    level, amp, freq, sigma = SIGNATURE
    d = config.separation
    channels = np.empty((3, n))
    gain = rng.uniform(0.8, 1.25, size=3)
    offset = rng.normal(0.0, 1.0, size=3)
    for r in range(3):
        # transitions carry the baseline parameters
        lv = np.full(n, _BASE_LEVEL[r])
        am = np.full(n, _BASE_AMP[r])
        fr = np.full(n, _BASE_FREQ[r])
        sg = np.full(n, _BASE_SIGMA[r])
        for e, start, end in layout:
            lv[start:end] += d * level[r, e - 1]
            am[start:end] += d * amp[r, e - 1]
            fr[start:end] += d * freq[r, e - 1]
            sg[start:end] += d * sigma[r, e - 1]
        # integrate frequency so the phase stays continuous across segment edges
        phase = 2.0 * np.pi * np.cumsum(fr) / fs + rng.uniform(0.0, 2.0 * np.pi)
        noise = rng.standard_normal(n)
        channels[r] = offset[r] + gain[r] * (lv + am * np.sin(phase) + sg * noise)

    meta = {
        "layout": layout,
        "day": day,
        "seed": config.seed,
        "gain": gain.tolist(),
        "offset": offset.tolist(),
    }
    return Session(session_id(day, config.days), fs, channels, labels, meta)


def generate(config: SynthConfig) -> list[Session]:
    return [generate_day(config, day) for day in range(config.days)]
