import numpy as np
import pytest

from ipcondense.dynamics import canonical_probabilities, enumerate_configurations
from ipcondense.schemas import ModelParams


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_params():
    return ModelParams(L=3, N=3, d=0.7)


def enumerated_law(L, N, d):
    """(states, probabilities) of the canonical measure by brute force."""
    states = enumerate_configurations(L, N)
    return states, canonical_probabilities(states, d)


def total_variation(states, probs, samples):
    """TV distance between the empirical law of `samples` (rows) and probs over states."""
    index = {tuple(int(v) for v in s): i for i, s in enumerate(states)}
    counts = np.zeros(len(states))
    for s in samples:
        counts[index[tuple(int(v) for v in s)]] += 1
    return 0.5 * np.abs(counts / counts.sum() - probs).sum()
