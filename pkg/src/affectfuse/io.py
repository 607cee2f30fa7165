"""Session CSV and manifest JSON reading/writing."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .core import IngestionError, Session

CSV_HEADER = ["t", "emg", "bvp", "gsr", "label"]


def _fmt(value: float) -> str:
    # repr() is the shortest string that round-trips the double exactly.
    return repr(float(value))


def write_session_csv(session: Session, path) -> None:
    path = Path(path)
    n = len(session)
    t = np.arange(n) / session.fs_hz
    emg, bvp, gsr = session.channels
    with path.open("w", newline="") as fh:
        fh.write(",".join(CSV_HEADER) + "\n")
        for i in range(n):
            fh.write(
                f"{_fmt(t[i])},{_fmt(emg[i])},{_fmt(bvp[i])},{_fmt(gsr[i])},{int(session.labels[i])}\n"
            )


def read_session_csv(path, fs_hz: float, session_id: str | None = None) -> Session:
    """Parse one session file. ``fs_hz`` comes from the manifest; ``t`` is checked against it."""
    path = Path(path)
    session_id = session_id or path.stem
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: empty file") from None
        if [h.strip() for h in header] != CSV_HEADER:
            raise IngestionError(f"{path}: header must be {','.join(CSV_HEADER)}, got {','.join(header)}")
        t, values, labels = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                raise IngestionError(f"{path}:{lineno}: expected 5 fields, got {len(row)}")
            try:
                t.append(float(row[0]))
                values.append((float(row[1]), float(row[2]), float(row[3])))
                labels.append(int(row[4]))
            except ValueError as exc:
                raise IngestionError(f"{path}:{lineno}: {exc}") from None

    t = np.asarray(t)
    if len(t) >= 2:
        steps = np.diff(t)
        bad = np.flatnonzero(np.abs(steps * fs_hz - 1.0) > 1e-3)
        if bad.size:
            raise IngestionError(
                f"{path}:{int(bad[0]) + 3}: time step {steps[bad[0]]!r} does not match 1/fs = {1.0 / fs_hz!r}"
            )
    channels = np.asarray(values, dtype=np.float64).T if values else np.zeros((3, 0))
    try:
        return Session(session_id, fs_hz, channels, np.asarray(labels, dtype=np.int64))
    except IngestionError as exc:
        raise IngestionError(f"{path}: {exc}") from None


def read_manifest(path) -> tuple[float, list[Path]]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise IngestionError(f"{path}: cannot read manifest: {exc}") from None
    if not isinstance(doc, dict) or "fs_hz" not in doc or "sessions" not in doc:
        raise IngestionError(f"{path}: manifest needs 'fs_hz' and 'sessions'")
    fs_hz = doc["fs_hz"]
    if not isinstance(fs_hz, (int, float)) or not fs_hz > 0:
        raise IngestionError(f"{path}: fs_hz must be a positive number, got {fs_hz!r}")
    sessions = doc["sessions"]
    if not isinstance(sessions, list) or len(sessions) < 2:
        raise IngestionError(f"{path}: manifest needs at least 2 sessions")
    return float(fs_hz), [path.parent / s for s in sessions]


def load_manifest(path) -> list[Session]:
    fs_hz, files = read_manifest(path)
    sessions = [read_session_csv(f, fs_hz) for f in files]
    ids = [s.session_id for s in sessions]
    if len(set(ids)) != len(ids):
        raise IngestionError(f"{path}: duplicate session ids in manifest")
    return sessions


def write_manifest(sessions, out_dir, name: str = "manifest.json") -> Path:
    """Write every session as ``<session_id>.csv`` plus a manifest into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fs = {s.fs_hz for s in sessions}
    if len(fs) != 1:
        raise IngestionError(f"sessions disagree on sampling rate: {sorted(fs)}")
    files = []
    for s in sessions:
        fname = f"{s.session_id}.csv"
        write_session_csv(s, out_dir / fname)
        files.append(fname)
    manifest = out_dir / name
    manifest.write_text(json.dumps({"fs_hz": fs.pop(), "sessions": files}, indent=2) + "\n")
    return manifest
