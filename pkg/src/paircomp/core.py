"""Domain types for pairwise comparison data and the core operations on them.

Comparison data lives in two equivalent representations: count/probability
pairs per compared pair of items ("worse" and "better" amounts), and positive
reciprocal ratio matrices.  This module defines both, the conversions between
them, the cycle-product consistency tests, and the strong-connectivity
existence condition for maximum likelihood evaluation.

Items are indexed 0..n-1 throughout the in-memory API; file formats use
1-based labels (see :mod:`paircomp.fileio`).
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
from scipy.special import expit, log_expit, log_ndtr, ndtr

from .errors import DisconnectedGraph

#: Default tolerance on |sum of log ratios| per cycle for consistency checks.
DEFAULT_CYCLE_TOL = 1e-9

#: Relative tolerance enforced on a_ij * a_ji = 1 when constructing an IPCM.
RECIPROCITY_TOL = 1e-12


class ModelKind(enum.Enum):
    """Choice of outcome distribution: logistic (Bradley-Terry) or
    standard normal (Thurstone)."""

    LOGISTIC = "logistic"
    NORMAL = "normal"

    def cdf(self, x):
        """Cumulative distribution function F evaluated elementwise."""
        if self is ModelKind.LOGISTIC:
            return expit(x)
        return ndtr(x)

    def log_cdf(self, x):
        """ln F(x), computed without underflow for very negative x."""
        if self is ModelKind.LOGISTIC:
            return log_expit(x)
        return log_ndtr(x)


def _read_only(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.flags.writeable = False
    return arr


def _check_pair(pair: tuple[int, int], n: int) -> tuple[int, int]:
    i, j = pair
    if not (0 <= i < j < n):
        raise ValueError(f"pair {pair!r} is not 0 <= i < j < n for n={n}")
    return (int(i), int(j))


@dataclass(frozen=True)
class ComparisonGraph:
    """Undirected graph of compared pairs on vertices 0..n-1."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        normalized = set()
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            e = (min(i, j), max(i, j))
            _check_pair(e, n)
            normalized.add(e)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", frozenset(normalized))

    @classmethod
    def complete(cls, n: int) -> "ComparisonGraph":
        return cls(n, [(i, j) for i in range(n) for j in range(i + 1, n)])

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.edges))

    def adjacency(self) -> dict[int, tuple[int, ...]]:
        """Neighbor lists in ascending vertex order."""
        adj: dict[int, list[int]] = {v: [] for v in range(self.n)}
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return {v: tuple(sorted(ns)) for v, ns in adj.items()}

    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return tuple(deg)

    def is_connected(self) -> bool:
        if self.n == 1:
            return True
        adj = self.adjacency()
        seen = {0}
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == self.n


@dataclass(frozen=True)
class DataMatrix:
    """Comparison amounts per unordered pair: entry (i, j) with i < j maps to
    (d1, d2) where d1 is the amount of "i worse than j" and d2 of "i better
    than j".  Amounts may be counts or probabilities (any nonnegative reals);
    only their ratios matter for evaluation."""

    n: int
    entries: Mapping[tuple[int, int], tuple[float, float]]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one item")
        checked = {}
        for pair, value in self.entries.items():
            pair = _check_pair(pair, self.n)
            d1, d2 = float(value[0]), float(value[1])
            if not (math.isfinite(d1) and math.isfinite(d2)):
                raise ValueError(f"non-finite amount for pair {pair}")
            if d1 < 0 or d2 < 0:
                raise ValueError(f"negative amount for pair {pair}")
            checked[pair] = (d1, d2)
        object.__setattr__(self, "entries", checked)

    def sorted_pairs(self) -> tuple[tuple[int, int], ...]:
        """All stored pairs in lexicographic order."""
        return tuple(sorted(self.entries))

    @property
    def comparison_pairs(self) -> tuple[tuple[int, int], ...]:
        """Pairs where both sides are positive (the set I), sorted."""
        return tuple(
            p for p in self.sorted_pairs() if self.entries[p][0] > 0 and self.entries[p][1] > 0
        )

    def comparison_graph(self) -> ComparisonGraph:
        """Undirected graph of the both-sides-positive pairs."""
        return ComparisonGraph(self.n, self.comparison_pairs)

    def value(self, i: int, j: int) -> tuple[float, float]:
        """(worse, better) amounts for item i against item j, any orientation."""
        if i < j:
            return self.entries[(i, j)]
        d1, d2 = self.entries[(j, i)]
        return (d2, d1)

    def restrict(self, graph: ComparisonGraph) -> "DataMatrix":
        """Keep only the pairs that are edges of ``graph``."""
        if graph.n != self.n:
            raise ValueError("graph size does not match item count")
        kept = {p: v for p, v in self.entries.items() if p in graph.edges}
        return DataMatrix(self.n, kept)

    def scaled(self, factor: float) -> "DataMatrix":
        """Multiply every amount by a positive constant."""
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return DataMatrix(
            self.n, {p: (d1 * factor, d2 * factor) for p, (d1, d2) in self.entries.items()}
        )


@dataclass(frozen=True)
class IPCM:
    """Positive reciprocal (possibly partial) matrix of preference ratios.

    Both orientations of every known off-diagonal pair are stored so that
    reciprocity is an enforced invariant; the diagonal is implicitly 1.
    """

    n: int
    entries: Mapping[tuple[int, int], float]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one item")
        checked = {}
        for (i, j), a in self.entries.items():
            if not (0 <= i < self.n and 0 <= j < self.n) or i == j:
                raise ValueError(f"bad entry position ({i}, {j})")
            a = float(a)
            if not (math.isfinite(a) and a > 0):
                raise ValueError(f"entry ({i}, {j}) must be a positive finite ratio")
            checked[(int(i), int(j))] = a
        for (i, j), a in checked.items():
            rec = checked.get((j, i))
            if rec is None:
                raise ValueError(f"entry ({i}, {j}) present without its reciprocal")
            if abs(a * rec - 1.0) > RECIPROCITY_TOL:
                raise ValueError(f"entries ({i}, {j}) and ({j}, {i}) are not reciprocal")
        object.__setattr__(self, "entries", checked)

    @classmethod
    def from_upper(cls, n: int, upper: Mapping[tuple[int, int], float]) -> "IPCM":
        """Build from upper-triangle ratios; reciprocals are filled in exactly."""
        entries: dict[tuple[int, int], float] = {}
        for pair, a in upper.items():
            i, j = _check_pair(pair, n)
            entries[(i, j)] = float(a)
            entries[(j, i)] = 1.0 / float(a)
        return cls(n, entries)

    @classmethod
    def from_weight_ratios(cls, weights: "WeightVector") -> "IPCM":
        """Complete consistent matrix of coordinate ratios w_i / w_j."""
        w = weights.values
        n = len(w)
        return cls.from_upper(
            n, {(i, j): w[i] / w[j] for i in range(n) for j in range(i + 1, n)}
        )

    def known_pairs(self) -> tuple[tuple[int, int], ...]:
        """Known unordered pairs (i < j), sorted."""
        return tuple(sorted(p for p in self.entries if p[0] < p[1]))

    def representing_graph(self) -> ComparisonGraph:
        return ComparisonGraph(self.n, self.known_pairs())

    def value(self, i: int, j: int) -> float:
        if i == j:
            return 1.0
        return self.entries[(i, j)]

    @property
    def is_complete(self) -> bool:
        return len(self.entries) == self.n * (self.n - 1)

    def restrict(self, graph: ComparisonGraph) -> "IPCM":
        """Keep only the entries whose pair is an edge of ``graph``."""
        if graph.n != self.n:
            raise ValueError("graph size does not match item count")
        kept = {
            (i, j): a
            for (i, j), a in self.entries.items()
            if (min(i, j), max(i, j)) in graph.edges
        }
        return IPCM(self.n, kept)

    def as_array(self, missing: float = np.nan) -> np.ndarray:
        """Dense n-by-n array with 1 on the diagonal and ``missing`` elsewhere
        for unknown entries."""
        a = np.full((self.n, self.n), missing, dtype=float)
        np.fill_diagonal(a, 1.0)
        for (i, j), v in self.entries.items():
            a[i, j] = v
        return a


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Priority vector: positive coordinates summing to 1."""

    values: np.ndarray

    def __post_init__(self):
        arr = _read_only(self.values)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("weights must be a non-empty vector")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise ValueError("weights must be positive and finite")
        if abs(float(arr.sum()) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "values", arr)

    @classmethod
    def normalized(cls, values) -> "WeightVector":
        arr = np.asarray(values, dtype=float)
        return cls(arr / arr.sum())

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> float:
        return float(self.values[i])


@dataclass(frozen=True, eq=False)
class ExpectedValueVector:
    """Expected values on the log scale, gauge-fixed so the first coordinate
    is exactly 0."""

    values: np.ndarray

    def __post_init__(self):
        arr = _read_only(self.values)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("expected values must be a non-empty vector")
        if not np.all(np.isfinite(arr)):
            raise ValueError("expected values must be finite")
        if arr[0] != 0.0:
            raise ValueError("first coordinate must be exactly 0 (gauge)")
        object.__setattr__(self, "values", arr)

    @classmethod
    def gauged(cls, values) -> "ExpectedValueVector":
        """Shift an arbitrary vector so its first coordinate becomes 0."""
        arr = np.asarray(values, dtype=float)
        return cls(arr - arr[0])

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> float:
        return float(self.values[i])


@dataclass(frozen=True)
class ConsistencyReport:
    """Outcome of a cycle-product consistency check.

    ``max_cycle_deviation`` is the largest |sum of log ratios| over the
    fundamental cycles of a spanning tree; ``witness`` is a vertex sequence of
    a worst cycle when the check fails, None otherwise.
    """

    consistent: bool
    max_cycle_deviation: float
    witness: tuple[int, ...] | None = field(default=None)


def exact_probabilities(
    m: ExpectedValueVector, graph: ComparisonGraph, model: ModelKind
) -> DataMatrix:
    """Outcome probabilities implied by expected values ``m`` on each edge.

    For edge (i, j): d1 = F(m_j - m_i) is the probability of "i worse than j"
    and d2 = 1 - d1 of "i better than j"; pairs outside the graph are absent.
    """
    if graph.n != len(m):
        raise ValueError("graph size does not match expected value vector")
    mv = m.values
    entries = {}
    for i, j in graph.sorted_edges():
        d1 = float(model.cdf(mv[j] - mv[i]))
        entries[(i, j)] = (d1, 1.0 - d1)
    return DataMatrix(graph.n, entries)


def pcm_from_data(data: DataMatrix) -> IPCM:
    """Ratio matrix with a_ij = d2/d1 per pair; pairs with a zero side are
    omitted."""
    upper = {
        (i, j): d2 / d1 for (i, j), (d1, d2) in data.entries.items() if d1 > 0 and d2 > 0
    }
    return IPCM.from_upper(data.n, upper)


def _bfs_tree(graph: ComparisonGraph) -> tuple[list[int], dict[int, int]]:
    """Breadth-first spanning tree from vertex 0, visiting lowest-index
    neighbors first.  Returns (visit order, parent map); raises if the graph
    is not connected."""
    adj = graph.adjacency()
    parent: dict[int, int] = {0: -1}
    order = [0]
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in parent:
                parent[w] = v
                order.append(w)
                queue.append(w)
    if len(order) != graph.n:
        raise DisconnectedGraph(
            f"comparison graph is not connected ({len(order)} of {graph.n} vertices reachable)"
        )
    return order, parent


def _canonical_cycle(cycle: list[int]) -> tuple[int, ...]:
    """Rotate/reflect a cycle's vertex sequence into a deterministic form:
    smallest vertex first, then the smaller of its two neighbors."""
    k = cycle.index(min(cycle))
    rotated = cycle[k:] + cycle[:k]
    if len(rotated) > 2 and rotated[-1] < rotated[1]:
        rotated = [rotated[0]] + rotated[1:][::-1]
    return tuple(rotated)


def _cycle_check(
    graph: ComparisonGraph, log_ratio: Mapping[tuple[int, int], float], tol: float
) -> ConsistencyReport:
    """Check that every fundamental cycle of a BFS spanning tree has zero sum
    of log ratios (within tol).  Any cycle's sum is a signed combination of
    fundamental-cycle sums, so fundamental cycles suffice.

    ``log_ratio[(i, j)]`` (i < j) is ln of the ratio oriented from i to j; the
    reverse orientation contributes the negative.
    """
    order, parent = _bfs_tree(graph)

    def oriented(u: int, v: int) -> float:
        return log_ratio[(u, v)] if u < v else -log_ratio[(v, u)]

    # Potentials along the tree: y mimics expected values, so that a
    # consistent graph has oriented(u, v) == y[u] - y[v] on every edge.
    y = {0: 0.0}
    tree_edges = set()
    for v in order[1:]:
        p = parent[v]
        y[v] = y[p] - oriented(p, v)
        tree_edges.add((min(p, v), max(p, v)))

    worst = 0.0
    worst_edge: tuple[int, int] | None = None
    for u, v in graph.sorted_edges():
        if (u, v) in tree_edges:
            continue
        deviation = abs(oriented(u, v) - (y[u] - y[v]))
        if deviation > worst:
            worst = deviation
            worst_edge = (u, v)

    consistent = worst <= tol
    witness = None
    if not consistent and worst_edge is not None:
        u, v = worst_edge
        path_u = [u]
        while path_u[-1] != 0:
            path_u.append(parent[path_u[-1]])
        path_v = [v]
        while path_v[-1] != 0:
            path_v.append(parent[path_v[-1]])
        in_u = set(path_u)
        lca = next(x for x in path_v if x in in_u)
        cycle = path_u[: path_u.index(lca) + 1] + path_v[: path_v.index(lca)][::-1]
        witness = _canonical_cycle(cycle)
    return ConsistencyReport(consistent, worst, witness)


def data_consistency(data: DataMatrix, tol: float = DEFAULT_CYCLE_TOL) -> ConsistencyReport:
    """Consistency of comparison data: cycle products of h_ij = d2/d1 over
    the both-sides-positive pair set must all equal 1."""
    pairs = data.comparison_pairs
    graph = ComparisonGraph(data.n, pairs)
    log_ratio = {
        (i, j): math.log(data.entries[(i, j)][1]) - math.log(data.entries[(i, j)][0])
        for (i, j) in pairs
    }
    return _cycle_check(graph, log_ratio, tol)


def pcm_consistency(pcm: IPCM, tol: float = DEFAULT_CYCLE_TOL) -> ConsistencyReport:
    """Consistency of a ratio matrix: cycle products of a_ij must equal 1."""
    graph = pcm.representing_graph()
    log_ratio = {(i, j): math.log(pcm.entries[(i, j)]) for (i, j) in pcm.known_pairs()}
    return _cycle_check(graph, log_ratio, tol)


def ford_condition(data: DataMatrix) -> bool:
    """Whether the directed comparison graph is strongly connected.

    There is an arc i -> j when i was ever better than j.  Strong
    connectivity is necessary and sufficient for the existence and uniqueness
    of the Bradley-Terry maximum likelihood estimate.
    """
    n = data.n
    if n == 1:
        return True
    out: list[list[int]] = [[] for _ in range(n)]
    into: list[list[int]] = [[] for _ in range(n)]
    for (i, j), (d1, d2) in data.entries.items():
        if d2 > 0:  # i better than j
            out[i].append(j)
            into[j].append(i)
        if d1 > 0:  # j better than i
            out[j].append(i)
            into[i].append(j)

    def reaches_all(adj: list[list[int]]) -> bool:
        seen = {0}
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == n

    return reaches_all(out) and reaches_all(into)
