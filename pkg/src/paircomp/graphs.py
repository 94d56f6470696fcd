"""Catalog of connected comparison structures up to isomorphism.

Graphs on up to 6 vertices are enumerated by scanning all edge subsets and
deduplicating with a canonical code: the lexicographically minimal edge
bitstring over all vertex relabelings.  At this scale an exhaustive
permutation scan (at most 8! relabelings) is fast and easy to verify, so no
general canonical-labeling algorithm is used.
"""

from __future__ import annotations

import functools
from collections import deque
from dataclasses import dataclass
from itertools import permutations

from .core import ComparisonGraph
from .errors import DisconnectedGraph, TooLarge

#: Largest vertex count accepted by the permutation-scan canonical code.
MAX_CANONICAL_N = 8

#: Largest vertex count of the enumerated catalog.
MAX_CATALOG_N = 6


def pair_order(n: int) -> tuple[tuple[int, int], ...]:
    """All vertex pairs (i < j) in lexicographic order; pair k corresponds to
    bit k of an edge bitstring, most significant bit first."""
    return tuple((i, j) for i in range(n) for j in range(i + 1, n))


def _encode(n: int, edges) -> int:
    k = n * (n - 1) // 2
    index = {p: s for s, p in enumerate(pair_order(n))}
    code = 0
    for i, j in edges:
        code |= 1 << (k - 1 - index[(min(i, j), max(i, j))])
    return code


def _decode(n: int, code: int) -> ComparisonGraph:
    k = n * (n - 1) // 2
    pairs = pair_order(n)
    edges = [pairs[s] for s in range(k) if code >> (k - 1 - s) & 1]
    return ComparisonGraph(n, edges)


def canonical_code(graph: ComparisonGraph) -> int:
    """Lexicographically minimal edge bitstring over all vertex permutations,
    as an integer (pair order of :func:`pair_order`, first pair = most
    significant bit).  Two graphs get equal codes iff they are isomorphic."""
    n = graph.n
    if n > MAX_CANONICAL_N:
        raise TooLarge(f"canonical code scans n! permutations; n={n} exceeds {MAX_CANONICAL_N}")
    edges = graph.sorted_edges()
    best = None
    for perm in permutations(range(n)):
        code = _encode(n, ((perm[i], perm[j]) for i, j in edges))
        if best is None or code < best:
            best = code
    return best


def code_to_hex(n: int, code: int) -> str:
    """Fixed-width hex rendering of a code for n-vertex graphs."""
    nibbles = -(-(n * (n - 1) // 2) // 4)
    return format(code, f"0{nibbles}x")


@dataclass(frozen=True)
class GraphClass:
    """Isomorphism class of a connected comparison graph.

    ``id`` is a stable 1-based ordinal assigned by sorting classes on
    (edge_count, canonical_code); the label "g{id}" names the class in files
    and reports.
    """

    n: int
    canonical_code: int
    edge_count: int
    id: int

    @property
    def label(self) -> str:
        return f"g{self.id}"

    @property
    def code_hex(self) -> str:
        return code_to_hex(self.n, self.canonical_code)

    def member(self) -> ComparisonGraph:
        """The canonical member graph (the one realizing the code)."""
        return _decode(self.n, self.canonical_code)


@dataclass(frozen=True)
class GraphProperties:
    """Structural facts about a connected graph."""

    degree_sequence: tuple[int, ...]
    is_regular: bool
    is_bipartite: bool
    is_star: bool
    is_spanning_tree: bool
    diameter: int


def _connected_code(n: int, code: int) -> bool:
    k = n * (n - 1) // 2
    pairs = pair_order(n)
    adj: list[list[int]] = [[] for _ in range(n)]
    for s in range(k):
        if code >> (k - 1 - s) & 1:
            i, j = pairs[s]
            adj[i].append(j)
            adj[j].append(i)
    seen = {0}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == n


@functools.lru_cache(maxsize=MAX_CATALOG_N)
def enumerate_connected(n: int) -> tuple[GraphClass, ...]:
    """All isomorphism classes of connected graphs on n vertices (2 <= n <= 6),
    sorted by (edge count, canonical code) and numbered from 1.

    Edge subsets are scanned in ascending code order; the first member of each
    isomorphism orbit encountered is therefore its canonical representative,
    and the rest of the orbit is marked visited.
    """
    if n < 2:
        raise ValueError("enumeration needs at least 2 vertices")
    if n > MAX_CATALOG_N:
        raise TooLarge(f"catalog covers n <= {MAX_CATALOG_N}, got {n}")
    k = n * (n - 1) // 2
    pairs = pair_order(n)
    perms = list(permutations(range(n)))
    # Bit positions of each pair under each permutation, for orbit expansion.
    index = {p: s for s, p in enumerate(pairs)}
    perm_maps = []
    for perm in perms:
        perm_maps.append(
            [index[(min(perm[i], perm[j]), max(perm[i], perm[j]))] for (i, j) in pairs]
        )

    visited = bytearray(1 << k)
    codes: list[int] = []
    for code in range(1, 1 << k):
        if visited[code] or not _connected_code(n, code):
            continue
        codes.append(code)
        bits = [s for s in range(k) if code >> (k - 1 - s) & 1]
        for pmap in perm_maps:
            image = 0
            for s in bits:
                image |= 1 << (k - 1 - pmap[s])
            visited[image] = 1

    codes.sort(key=lambda c: (bin(c).count("1"), c))
    return tuple(
        GraphClass(n=n, canonical_code=c, edge_count=bin(c).count("1"), id=ordinal)
        for ordinal, c in enumerate(codes, start=1)
    )


def properties(graph: ComparisonGraph) -> GraphProperties:
    """Degree sequence, regularity, bipartiteness, star/spanning-tree flags,
    and diameter of a connected graph."""
    if not graph.is_connected():
        raise DisconnectedGraph("properties are defined for connected graphs only")
    n = graph.n
    deg = graph.degrees()
    adj = graph.adjacency()

    color = {0: 0}
    bipartite = True
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in color:
                color[w] = color[v] ^ 1
                queue.append(w)
            elif color[w] == color[v]:
                bipartite = False

    diameter = 0
    for source in range(n):
        dist = {source: 0}
        queue = deque([source])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        diameter = max(diameter, max(dist.values()))

    is_tree = graph.edge_count == n - 1
    return GraphProperties(
        degree_sequence=tuple(sorted(deg, reverse=True)),
        is_regular=len(set(deg)) == 1,
        is_bipartite=bipartite,
        is_star=is_tree and max(deg) == n - 1,
        is_spanning_tree=is_tree,
        diameter=diameter,
    )


def single_edge_extensions(a: GraphClass, b: GraphClass) -> bool:
    """Whether adding one edge to a member of class ``a`` can yield a member
    of class ``b``."""
    if a.n != b.n or b.edge_count != a.edge_count + 1:
        return False
    base = a.member()
    for pair in pair_order(a.n):
        if pair in base.edges:
            continue
        extended = ComparisonGraph(a.n, set(base.edges) | {pair})
        if canonical_code(extended) == b.canonical_code:
            return True
    return False


def star_class(n: int) -> GraphClass:
    """The unique star spanning-tree class of the catalog for n vertices."""
    for cls in enumerate_connected(n):
        if cls.edge_count == n - 1 and properties(cls.member()).is_star:
            return cls
    raise LookupError(f"no star class found for n={n}")
