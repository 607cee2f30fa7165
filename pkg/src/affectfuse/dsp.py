"""Per-channel preprocessing: Butterworth low-pass, zero-phase filtering,
envelope-mean smoothing and min-max scaling."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .core import ChannelKind, Session

log = logging.getLogger(__name__)

NYQUIST_CLAMP = 0.95


@dataclass(frozen=True, eq=False)
class FilterCoefficients:
    b: np.ndarray
    a: np.ndarray
    order: int
    fs_hz: float
    cutoff_hz: float
    requested_hz: float
    clamped: bool = False

    @property
    def dc_gain(self) -> float:
        return float(np.sum(self.b) / np.sum(self.a))


def design_lowpass_butterworth(order: int, cutoff_hz: float, fs_hz: float) -> FilterCoefficients:
    """Digital Butterworth low-pass by bilinear transform of the analog prototype.

    The cutoff is pre-warped so the -3 dB point lands exactly on ``cutoff_hz``.
    Cutoffs at or above Nyquist are unrealizable; they are clamped to
    ``0.95 * fs/2`` and the returned coefficients carry ``clamped=True``.
    """
    if isinstance(order, bool) or int(order) != order or order < 1:
        raise ValueError(f"filter order must be a positive integer, got {order!r}")
    for name, v in (("cutoff_hz", cutoff_hz), ("fs_hz", fs_hz)):
        if not (isinstance(v, (int, float, np.floating)) and math.isfinite(v) and v > 0):
            raise ValueError(f"{name} must be finite and positive, got {v!r}")
    order = int(order)

    nyquist = fs_hz / 2.0
    effective = float(cutoff_hz)
    clamped = cutoff_hz >= nyquist
    if clamped:
        effective = NYQUIST_CLAMP * nyquist

    fs2 = 2.0 * fs_hz
    warped = fs2 * math.tan(math.pi * effective / fs_hz)
    k = np.arange(-order + 1, order, 2)
    analog_poles = -warped * np.exp(1j * np.pi * k / (2 * order))
    poles = (fs2 + analog_poles) / (fs2 - analog_poles)
    zeros = -np.ones(order)
    # unit gain at DC (z = 1)
    gain = np.real(np.prod(1.0 - poles)) / 2.0**order

    b = gain * np.real(np.poly(zeros))
    a = np.real(np.poly(poles))
    a0 = a[0]
    return FilterCoefficients(
        b=b / a0,
        a=a / a0,
        order=order,
        fs_hz=float(fs_hz),
        cutoff_hz=effective,
        requested_hz=float(cutoff_hz),
        clamped=bool(clamped),
    )


def pad_length(coeffs: FilterCoefficients) -> int:
    return 3 * (max(len(coeffs.a), len(coeffs.b)) - 1)


def forward_filter(coeffs: FilterCoefficients, x) -> np.ndarray:
    """One causal pass of the difference equation, started in the steady state
    that a constant input equal to ``x[0]`` would have reached."""
    x = np.asarray(x, dtype=np.float64)
    zi = signal.lfilter_zi(coeffs.b, coeffs.a)
    return signal.lfilter(coeffs.b, coeffs.a, x, zi=zi * x[0])[0]


def zero_phase_filter(coeffs: FilterCoefficients, x) -> np.ndarray:
    """Forward-backward filtering with odd edge extension.

    Each pass starts from the steady state for its first input sample, so a
    constant input passes through untouched. The effective magnitude response
    is ``|H|**2``.
    """
    x = np.asarray(x, dtype=np.float64)
    ntaps = max(len(coeffs.a), len(coeffs.b))
    if x.ndim != 1 or len(x) <= 3 * ntaps:
        raise ValueError(f"input length {x.shape} too short: need more than {3 * ntaps} samples")

    n = pad_length(coeffs)
    left = 2.0 * x[0] - x[n:0:-1]
    right = 2.0 * x[-1] - x[-2 : -n - 2 : -1]
    ext = np.concatenate((left, x, right))

    y = forward_filter(coeffs, ext)
    y = forward_filter(coeffs, y[::-1])
    return y[::-1][n : len(ext) - n]


def local_extrema(x, kind: str = "max") -> np.ndarray:
    """Indices of strict interior local maxima (or minima).

    A flat run that is higher (lower) than both neighbouring runs counts once,
    at its first sample. Endpoints are never extrema.
    """
    x = np.asarray(x, dtype=np.float64)
    if len(x) < 3:
        return np.zeros(0, dtype=np.int64)
    keep = np.concatenate(([True], x[1:] != x[:-1]))
    starts = np.flatnonzero(keep)
    v = x[starts]
    if len(v) < 3:
        return np.zeros(0, dtype=np.int64)
    mid, prev, nxt = v[1:-1], v[:-2], v[2:]
    if kind == "max":
        hit = (mid > prev) & (mid > nxt)
    elif kind == "min":
        hit = (mid < prev) & (mid < nxt)
    else:
        raise ValueError(f"kind must be 'max' or 'min', got {kind!r}")
    return starts[1:-1][hit]


def _envelope(x: np.ndarray, knots: np.ndarray) -> np.ndarray:
    n = len(x)
    idx = np.concatenate(([0], knots, [n - 1]))
    return np.interp(np.arange(n), idx, x[idx])


def envelope_mean(x) -> np.ndarray:
    """Mean of the upper and lower piecewise-linear envelopes of ``x``."""
    x = np.asarray(x, dtype=np.float64)
    if len(x) < 3:
        raise ValueError(f"envelope_mean needs at least 3 samples, got {len(x)}")
    maxima = local_extrema(x, "max")
    minima = local_extrema(x, "min")
    if maxima.size == 0 and minima.size == 0:
        return x.copy()
    return 0.5 * (_envelope(x, maxima) + _envelope(x, minima))


def minmax_scale(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if len(x) < 1:
        raise ValueError("minmax_scale needs at least one sample")
    lo, hi = x.min(), x.max()
    if hi == lo:
        return np.zeros_like(x)
    return (x - lo) / (hi - lo)


@dataclass(frozen=True)
class ChannelChain:
    cutoff_hz: float
    envelope: bool
    order: int = 1


DEFAULT_CHAINS = {
    ChannelKind.EMG: ChannelChain(10.0, envelope=True),
    ChannelKind.BVP: ChannelChain(19.0, envelope=False),
    ChannelKind.GSR: ChannelChain(19.0, envelope=True),
}


@dataclass(frozen=True)
class FilterBank:
    """Designed filters for one sampling rate, one per channel."""

    fs_hz: float
    chains: dict = field(default_factory=lambda: dict(DEFAULT_CHAINS))
    filters: dict = field(default_factory=dict)

    @classmethod
    def design(cls, fs_hz: float, cutoffs: dict | None = None) -> FilterBank:
        chains = dict(DEFAULT_CHAINS)
        for kind, hz in (cutoffs or {}).items():
            if hz is not None:
                kind = ChannelKind(kind)
                chains[kind] = ChannelChain(float(hz), chains[kind].envelope, chains[kind].order)
        filters = {}
        for kind, chain in chains.items():
            coeffs = design_lowpass_butterworth(chain.order, chain.cutoff_hz, fs_hz)
            if coeffs.clamped:
                log.warning(
                    "nyquist-clamp channel=%s requested=%g effective=%g",
                    kind.label,
                    coeffs.requested_hz,
                    coeffs.cutoff_hz,
                )
            filters[kind] = coeffs
        return cls(float(fs_hz), chains, filters)

    def describe(self) -> dict:
        return {
            kind.label: {
                "order": f.order,
                "requested_hz": f.requested_hz,
                "effective_hz": f.cutoff_hz,
                "clamped": f.clamped,
                "envelope": self.chains[kind].envelope,
            }
            for kind, f in self.filters.items()
        }


def preprocess_channel(x, coeffs: FilterCoefficients, envelope: bool) -> np.ndarray:
    y = zero_phase_filter(coeffs, x)
    if envelope:
        y = envelope_mean(y)
    return minmax_scale(y)


def preprocess(session: Session, bank: FilterBank | None = None) -> Session:
    """Filter, optionally smooth, and scale each channel of one session.

    Scaling is per session and per channel, so no information crosses
    session boundaries.
    """
    if bank is None:
        bank = FilterBank.design(session.fs_hz)
    elif bank.fs_hz != session.fs_hz:
        raise ValueError(
            f"session {session.session_id}: filter bank designed for {bank.fs_hz} Hz, session is {session.fs_hz} Hz"
        )
    out = np.empty_like(session.channels)
    for kind in ChannelKind:
        out[kind] = preprocess_channel(
            session.channel(kind), bank.filters[kind], bank.chains[kind].envelope
        )
    return session.with_channels(out)
