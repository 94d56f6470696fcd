"""Shared fixtures: the worked examples used across the test modules.

`sports_counts` is the integer win/loss table whose ratio matrix is exactly
consistent; `probs_modified` is the probability table obtained by perturbing
one pair of an exactly consistent table, making it inconsistent.  All golden
expectations against these fixtures carry the +/-0.001 precision at which the
reference values are stated.
"""

from __future__ import annotations

import numpy as np
import pytest

from paircomp import ComparisonGraph, DataMatrix, IPCM, pcm_from_data

GOLDEN_TOL = 1e-3

# Complete, exactly consistent win/loss counts on 4 items.
SPORTS_COUNTS = {
    (0, 1): (1.0, 2.0),
    (0, 2): (1.0, 2.0),
    (0, 3): (1.0, 1.0),
    (1, 2): (1.0, 1.0),
    (1, 3): (2.0, 1.0),
    (2, 3): (2.0, 1.0),
}

# Complete comparison probabilities for m = (0, 0.25, 0.75, 1.75) under the
# logistic model, with the (3, 4) pair shifted by 0.2: inconsistent.
PROBS_MODIFIED = {
    (0, 1): (0.562, 0.438),
    (0, 2): (0.679, 0.321),
    (0, 3): (0.852, 0.148),
    (1, 2): (0.622, 0.378),
    (1, 3): (0.818, 0.182),
    (2, 3): (0.531, 0.469),
}

# The pair subset kept in the incomplete variant of the modified table.
INCOMPLETE_PAIRS = ((0, 1), (0, 2), (0, 3), (2, 3))


@pytest.fixture
def sports_counts() -> DataMatrix:
    return DataMatrix(4, SPORTS_COUNTS)


@pytest.fixture
def sports_ratios(sports_counts) -> IPCM:
    return pcm_from_data(sports_counts)


@pytest.fixture
def probs_modified() -> DataMatrix:
    return DataMatrix(4, PROBS_MODIFIED)


@pytest.fixture
def ratios_modified(probs_modified) -> IPCM:
    return pcm_from_data(probs_modified)


@pytest.fixture
def probs_incomplete(probs_modified) -> DataMatrix:
    return probs_modified.restrict(ComparisonGraph(4, INCOMPLETE_PAIRS))


@pytest.fixture
def ratios_incomplete(probs_incomplete) -> IPCM:
    return pcm_from_data(probs_incomplete)


def random_connected_graph(rng: np.random.Generator, n: int) -> ComparisonGraph:
    """Uniformly draw edge subsets until one is connected."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    while True:
        mask = rng.integers(0, 2, size=len(pairs)).astype(bool)
        graph = ComparisonGraph(n, [p for p, keep in zip(pairs, mask) if keep])
        if graph.is_connected():
            return graph


def random_merits(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random gauge-fixed expected values with the spread the experiment uses."""
    weights = rng.integers(1, 10, size=n).astype(float)
    logs = np.log(weights / weights.sum())
    return logs - logs[0]
