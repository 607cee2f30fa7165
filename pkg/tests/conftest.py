import numpy as np
import pytest

from affectfuse.core import Session
from affectfuse.synth import SynthConfig, generate


def labelled_session(session_id="s1", fs_hz=1.0, run=12, gap=3, rng=None, emotions=range(1, 9)):
    """Session with one run of ``run`` samples per emotion, separated by ``gap`` zeros."""
    rng = rng or np.random.default_rng(0)
    labels = [0] * gap
    for e in emotions:
        labels += [e] * run + [0] * gap
    n = len(labels)
    return Session(session_id, fs_hz, rng.normal(size=(3, n)), np.array(labels))


@pytest.fixture(scope="session")
def small_synth():
    """Six short synthetic days with clear class structure."""
    return generate(SynthConfig(days=6, seed=11, separation=2.0, segment_seconds=30.0))
