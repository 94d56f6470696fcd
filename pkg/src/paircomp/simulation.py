"""Monte-Carlo experiment: information retrieval of incomplete comparisons.

Each replication draws a random priority vector (uniform integers 1..9,
normalized), converts it to expected values, computes the exact outcome
probabilities on the complete graph, perturbs them with additive uniform
noise, evaluates the perturbed data by maximum likelihood — once complete,
then restricted to every connected comparison structure — and scores each
structure against the complete evaluation with six similarity measures.

Replication r draws from an independent substream derived from (seed, r), and
rows of the batch solver are frozen individually on convergence, so results
are bitwise identical no matter how replications are chunked across workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import repeat
from typing import Callable, Mapping

import numpy as np
from scipy.special import ndtri
from scipy.stats import rankdata

from .core import (
    ComparisonGraph,
    DataMatrix,
    ExpectedValueVector,
    ModelKind,
    WeightVector,
    exact_probabilities,
)
from .estimators import (
    DEFAULT_MAX_ITER,
    DEFAULT_MLE_TOL,
    _mm_solve,
    _newton_normal,
    m_from_weights,
)
from .graphs import GraphClass, enumerate_connected

#: Measure column names, in canonical order.
MEASURE_NAMES = ("eu_m", "eu_w", "pe_m", "pe_w", "rho", "tau")

#: Orientation of each measure: True when larger values mean more retrieval.
HIGHER_IS_BETTER = {
    "eu_m": False,
    "eu_w": False,
    "pe_m": True,
    "pe_w": True,
    "rho": True,
    "tau": True,
}

#: Worker-count environment override.
THREADS_ENV = "PAIRCOMP_THREADS"


@dataclass(frozen=True)
class SimulationConfig:
    """Parameters of one experiment."""

    n: int
    perturb: float
    num_sims: int
    seed: int
    model: ModelKind = ModelKind.LOGISTIC
    epsilon: float = 1e-6

    def __post_init__(self):
        if not 2 <= self.n <= 6:
            raise ValueError("item count must be between 2 and 6")
        if not 0.0 <= self.perturb < 1.0:
            raise ValueError("perturbation level must be in [0, 1)")
        if self.num_sims < 1:
            raise ValueError("need at least one replication")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not 0.0 < self.epsilon < 0.5:
            raise ValueError("epsilon must be in (0, 0.5)")


@dataclass(frozen=True)
class MeasureSet:
    """The six similarity measures of one (replication, structure) cell.

    Pearson coefficients are NaN when one of the compared vectors is
    constant (zero variance); such cells are excluded from aggregation.
    """

    eu_m: float
    eu_w: float
    pe_m: float
    pe_w: float
    spearman_rho: float
    kendall_tau: float

    def as_tuple(self) -> tuple[float, ...]:
        return (self.eu_m, self.eu_w, self.pe_m, self.pe_w, self.spearman_rho, self.kendall_tau)


@dataclass(frozen=True)
class MeasureStats:
    """Mean and sample standard deviation over the aggregated replications."""

    mean: float
    stddev: float
    count: int


@dataclass(frozen=True)
class SimulationSummary:
    """Aggregated results: one :class:`MeasureStats` per (structure, measure),
    plus the configuration and any excluded replications."""

    config: SimulationConfig
    classes: tuple[GraphClass, ...]
    stats: Mapping[tuple[int, str], MeasureStats]
    failures: tuple[tuple[int, int | None], ...] = field(default=())

    def cell(self, graph_id: int, measure: str) -> MeasureStats:
        return self.stats[(graph_id, measure)]

    def mean(self, graph_id: int, measure: str) -> float:
        return self.stats[(graph_id, measure)].mean


def draw_initial_weights(rng: np.random.Generator, n: int) -> WeightVector:
    """Random priority vector: n uniform integers from 1 to 9, normalized."""
    values = rng.integers(1, 10, size=n).astype(float)
    return WeightVector.normalized(values)


def perturb_data(
    data: DataMatrix, level: float, rng: np.random.Generator, epsilon: float = 1e-6
) -> DataMatrix:
    """Add an independent uniform draw from [-level, level] to each d1,
    redrawing until the result lies in (epsilon, 1 - epsilon), and set
    d2 = 1 - d1.  Redrawing keeps the offset distribution symmetric, which
    clamping would not.  A level of 0 returns the input unchanged."""
    if not 0.0 <= level < 1.0:
        raise ValueError("perturbation level must be in [0, 1)")
    if not 0.0 < epsilon < 0.5:
        raise ValueError("epsilon must be in (0, 0.5)")
    pair_count = data.n * (data.n - 1) // 2
    if len(data.entries) != pair_count:
        raise ValueError("perturbation expects complete comparison data")
    for d1, _ in data.entries.values():
        if not 0.0 < d1 < 1.0:
            raise ValueError("perturbation expects probabilities strictly inside (0, 1)")
    if level == 0.0:
        return data
    entries = {}
    for pair in data.sorted_pairs():
        d1 = data.entries[pair][0]
        while True:
            candidate = d1 + rng.uniform(-level, level)
            if epsilon < candidate < 1.0 - epsilon:
                break
        entries[pair] = (candidate, 1.0 - candidate)
    return DataMatrix(data.n, entries)


# ---------------------------------------------------------------------------
# Similarity measures


def _pearson_rows(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    xc = x - x.mean(axis=1, keepdims=True)
    yc = y - y.mean(axis=1, keepdims=True)
    sxy = np.sum(xc * yc, axis=1)
    sx = np.sum(xc * xc, axis=1)
    sy = np.sum(yc * yc, axis=1)
    product = sx * sy
    with np.errstate(invalid="ignore", divide="ignore"):
        r = sxy / np.sqrt(product)
    return np.where(product > 0.0, r, np.nan)


def _measure_rows(
    m_full: np.ndarray, w_full: np.ndarray, m_part: np.ndarray, w_part: np.ndarray
) -> np.ndarray:
    """All six measures for row-aligned batches; returns shape (rows, 6).

    Rank correlations are computed from the expected-value vectors; the
    weight transform is strictly monotone, so weight ranks are identical.
    """
    n = m_full.shape[1]
    out = np.empty((m_full.shape[0], len(MEASURE_NAMES)))
    out[:, 0] = np.sqrt(np.sum((m_full - m_part) ** 2, axis=1))
    out[:, 1] = np.sqrt(np.sum((w_full - w_part) ** 2, axis=1))
    out[:, 2] = _pearson_rows(m_full, m_part)
    out[:, 3] = _pearson_rows(w_full, w_part)

    # Spearman: 1 - 6 sum(d^2) / (n (n^2 - 1)), average ranks on ties.
    rank_full = rankdata(m_full, axis=1, method="average")
    rank_part = rankdata(m_part, axis=1, method="average")
    squared = np.sum((rank_full - rank_part) ** 2, axis=1)
    out[:, 4] = 1.0 - 6.0 * squared / (n * (n * n - 1))

    # Kendall: mean of sign agreements over pairs, sign(0) = 0 on ties.
    total = n * (n - 1) // 2
    acc = np.zeros(m_full.shape[0])
    for i in range(n):
        for j in range(i + 1, n):
            acc += np.sign(m_full[:, i] - m_full[:, j]) * np.sign(m_part[:, i] - m_part[:, j])
    out[:, 5] = acc / total
    return out


def similarity(
    m_full: ExpectedValueVector,
    w_full: WeightVector,
    m_part: ExpectedValueVector,
    w_part: WeightVector,
) -> MeasureSet:
    """Score one incomplete-structure evaluation against the complete one."""
    n = len(m_full)
    if not (len(w_full) == len(m_part) == len(w_part) == n):
        raise ValueError("all four vectors must have the same length")
    row = _measure_rows(
        m_full.values[None, :],
        w_full.values[None, :],
        m_part.values[None, :],
        w_part.values[None, :],
    )[0]
    return MeasureSet(*map(float, row))


def error_bound(num_sims: int, alpha: float, sigma: float) -> float:
    """Central-limit upper bound u_alpha * sigma / sqrt(N) on the simulation
    error at reliability 1 - alpha, with Phi(u_alpha) = 1 - alpha/2."""
    if num_sims < 1:
        raise ValueError("need at least one replication")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    return float(ndtri(1.0 - alpha / 2.0)) * sigma / math.sqrt(num_sims)


# ---------------------------------------------------------------------------
# The experiment


def _softmax_rows(m: np.ndarray) -> np.ndarray:
    e = np.exp(m - np.max(m, axis=1, keepdims=True))
    return e / e.sum(axis=1, keepdims=True)


def _draw_rows(config: SimulationConfig, start: int, stop: int) -> np.ndarray:
    """Perturbed d1 values, one row per replication, columns in lexicographic
    pair order.  Replication r uses the substream seeded by (seed, r)."""
    complete = ComparisonGraph.complete(config.n)
    pairs = complete.sorted_edges()
    rows = np.empty((stop - start, len(pairs)))
    for offset, r in enumerate(range(start, stop)):
        rng = np.random.default_rng([config.seed, r])
        weights = draw_initial_weights(rng, config.n)
        m0 = m_from_weights(weights)
        exact = exact_probabilities(m0, complete, config.model)
        perturbed = perturb_data(exact, config.perturb, rng, config.epsilon)
        rows[offset] = [perturbed.entries[p][0] for p in pairs]
    return rows


def _solve_rows(d1, d2, ii, jj, n, model: ModelKind):
    """Per-row MLE; returns (m rows, converged mask)."""
    if model is ModelKind.LOGISTIC:
        m, _, converged = _mm_solve(d1, d2, ii, jj, n, DEFAULT_MLE_TOL, DEFAULT_MAX_ITER)
        return m, converged
    m = np.empty((d1.shape[0], n))
    converged = np.empty(d1.shape[0], dtype=bool)
    for r in range(d1.shape[0]):
        m[r], _, converged[r] = _newton_normal(
            ii, jj, d1[r], d2[r], n, DEFAULT_MLE_TOL, DEFAULT_MAX_ITER
        )
    return m, converged


def _solve_chunk(config: SimulationConfig, start: int, stop: int):
    """Measures of shape (stop - start, classes, 6) plus failure records
    (global replication index, graph id or None for the complete stage)."""
    n = config.n
    classes = enumerate_connected(n)
    complete = ComparisonGraph.complete(n)
    pairs = complete.sorted_edges()
    column = {p: s for s, p in enumerate(pairs)}
    ii = np.array([p[0] for p in pairs], dtype=np.intp)
    jj = np.array([p[1] for p in pairs], dtype=np.intp)

    d1 = _draw_rows(config, start, stop)
    d2 = 1.0 - d1

    failures: list[tuple[int, int | None]] = []
    m_full, converged = _solve_rows(d1, d2, ii, jj, n, config.model)
    failures.extend((start + r, None) for r in np.flatnonzero(~converged))
    w_full = _softmax_rows(m_full)

    measures = np.empty((stop - start, len(classes), len(MEASURE_NAMES)))
    for g, cls in enumerate(classes):
        edges = cls.member().sorted_edges()
        if len(edges) == len(pairs):
            m_part, ok = m_full, converged
        else:
            cols = [column[p] for p in edges]
            sub_ii = np.array([p[0] for p in edges], dtype=np.intp)
            sub_jj = np.array([p[1] for p in edges], dtype=np.intp)
            m_part, ok = _solve_rows(d1[:, cols], d2[:, cols], sub_ii, sub_jj, n, config.model)
            failures.extend((start + r, cls.id) for r in np.flatnonzero(~ok))
        measures[:, g, :] = _measure_rows(m_full, w_full, m_part, _softmax_rows(m_part))
    return measures, failures


def worker_count() -> int:
    """Worker processes to use: the PAIRCOMP_THREADS environment variable,
    defaulting to the machine's parallelism."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    count = int(raw)
    if count < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer")
    return count


def _chunk_bounds(total: int, threads: int) -> list[tuple[int, int]]:
    # Few large chunks: rows are solved in vectorized batches, so oversized
    # chunk counts only add per-call overhead.  Results do not depend on the
    # chunking (rows are frozen individually on convergence).
    size = max(1, -(-total // max(threads * 4, 8)))
    return [(s, min(s + size, total)) for s in range(0, total, size)]


def run(
    config: SimulationConfig, progress: Callable[[int, int], None] | None = None
) -> SimulationSummary:
    """Run the full experiment and aggregate mean and sample standard
    deviation per (structure, measure).

    Replications with a non-converged evaluation are excluded from every cell
    and recorded in ``failures``; Pearson cells that are NaN (zero variance)
    are excluded from that cell only.  ``progress`` is called with
    (replications completed, total) as chunks finish.
    """
    classes = enumerate_connected(config.n)
    total = config.num_sims
    threads = worker_count()
    bounds = _chunk_bounds(total, threads)

    outputs = []
    if threads == 1 or len(bounds) == 1:
        for s, e in bounds:
            outputs.append(_solve_chunk(config, s, e))
            if progress is not None:
                progress(e, total)
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for out, (_, e) in zip(
                pool.map(_solve_chunk, repeat(config), *zip(*bounds)), bounds
            ):
                outputs.append(out)
                if progress is not None:
                    progress(e, total)

    measures = np.concatenate([o[0] for o in outputs], axis=0)
    failures = tuple(f for o in outputs for f in o[1])
    included = np.ones(total, dtype=bool)
    for replication, _ in failures:
        included[replication] = False

    sqrt2 = math.sqrt(2.0)
    stats: dict[tuple[int, str], MeasureStats] = {}
    for g, cls in enumerate(classes):
        for k, name in enumerate(MEASURE_NAMES):
            values = measures[included, g, k]
            finite = np.isfinite(values)
            if name in ("eu_m", "eu_w"):
                assert finite.all(), f"distance {name} must always be finite"
                assert np.all(values >= 0.0)
                if name == "eu_w":
                    assert np.all(values <= sqrt2 + 1e-9)
            else:
                assert np.all(np.abs(values[finite]) <= 1.0 + 1e-9)
            kept = values[finite]
            count = int(kept.size)
            mean = float(kept.mean()) if count else float("nan")
            stddev = float(kept.std(ddof=1)) if count >= 2 else 0.0
            stats[(cls.id, name)] = MeasureStats(mean, stddev, count)
    return SimulationSummary(config=config, classes=classes, stats=stats, failures=failures)
