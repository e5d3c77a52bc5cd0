"""Simple undirected graphs: construction, Laplacians, generators, edge-list I/O.

Vertices are labeled 1..n in every public interface (function arguments,
edge lists, file formats). Adjacency is stored dense, which keeps the
Laplacian and eigensolver paths straightforward at the target scale of a
few thousand vertices.

Random generators draw from an explicitly seeded ``numpy.random.Generator``
(PCG64), so a random graph is reproducible bit-exact from its seed.
"""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

__all__ = [
    "Graph",
    "build_graph",
    "laplacian",
    "complete",
    "star",
    "path",
    "cycle",
    "edgeless",
    "erdos_renyi",
    "threshold_model",
    "generate",
    "GENERATOR_FAMILIES",
    "join",
    "disjoint_union",
    "parse_edge_list",
    "serialize_edge_list",
]


class Graph:
    """Immutable simple undirected graph on vertices labeled 1..n.

    Equality and hashing compare the full adjacency relation, so two graphs
    built through different routes compare equal when they describe the same
    labeled graph.
    """

    __slots__ = ("n", "adjacency", "_hash")

    def __init__(self, n: int, adjacency: np.ndarray) -> None:
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        adj = np.array(adjacency, dtype=bool)
        if adj.shape != (n, n):
            raise ValueError(f"adjacency must have shape ({n}, {n}), got {adj.shape}")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        if n and adj.diagonal().any():
            raise ValueError("self-loops are not allowed")
        adj.setflags(write=False)
        self.n = n
        self.adjacency = adj
        self._hash: int | None = None

    def index(self, v: int) -> int:
        """0-based array index for the vertex label ``v`` (validates range)."""
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
            raise ValueError(f"vertex label must be an integer, got {v!r}")
        if not 1 <= v <= self.n:
            raise ValueError(f"vertex {v} out of range 1..{self.n}")
        return int(v) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adjacency[self.index(u), self.index(v)])

    def degree(self, v: int) -> int:
        return int(self.adjacency[self.index(v)].sum())

    def degrees(self) -> np.ndarray:
        """Degrees of all vertices; entry ``i`` belongs to label ``i + 1``."""
        return self.adjacency.sum(axis=1, dtype=np.int64)

    def neighbors(self, v: int) -> list[int]:
        return [int(j) + 1 for j in np.flatnonzero(self.adjacency[self.index(v)])]

    def edges(self) -> list[tuple[int, int]]:
        """All edges as sorted (u, v) pairs with u < v."""
        iu, iv = np.nonzero(np.triu(self.adjacency, k=1))
        return [(int(u) + 1, int(v) + 1) for u, v in zip(iu, iv)]

    @property
    def num_edges(self) -> int:
        return int(self.adjacency.sum()) // 2

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def induced_subgraph(self, vertices: Iterable[int]) -> "Graph":
        """Induced subgraph on the given labels, relabeled 1..m in ascending order."""
        idx = np.array(sorted({self.index(v) for v in vertices}), dtype=np.intp)
        return Graph(len(idx), self.adjacency[np.ix_(idx, idx)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.adjacency, other.adjacency)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self.adjacency.tobytes()))
        return self._hash

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.num_edges})"


def build_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Graph on 1..n containing exactly the given edges.

    Edges are symmetrized and duplicates collapse silently; self-loops and
    out-of-range labels are rejected.
    """
    adj = np.zeros((n, n), dtype=bool)
    for u, v in edges:
        if isinstance(u, bool) or isinstance(v, bool) \
                or not isinstance(u, (int, np.integer)) or not isinstance(v, (int, np.integer)):
            raise ValueError(f"edge ({u!r}, {v!r}) must have integer endpoints")
        if not (1 <= u <= n) or not (1 <= v <= n):
            raise ValueError(f"edge ({u}, {v}) out of range 1..{n}")
        if u == v:
            raise ValueError(f"self-loop ({u}, {v}) is not allowed")
        adj[u - 1, v - 1] = True
        adj[v - 1, u - 1] = True
    return Graph(n, adj)


def laplacian(g: Graph) -> np.ndarray:
    """Degree matrix minus adjacency matrix, as an exact integer array.

    Every row sums to zero and the matrix is symmetric positive semidefinite.
    """
    a = g.adjacency.astype(np.int64)
    return np.diag(g.degrees()) - a


def complete(n: int) -> Graph:
    _check_size(n)
    adj = np.ones((n, n), dtype=bool)
    np.fill_diagonal(adj, False)
    return Graph(n, adj)


def star(n: int) -> Graph:
    """Star with center 1 and leaves 2..n."""
    _check_size(n)
    adj = np.zeros((n, n), dtype=bool)
    if n > 1:
        adj[0, 1:] = True
        adj[1:, 0] = True
    return Graph(n, adj)


def path(n: int) -> Graph:
    _check_size(n)
    return build_graph(n, [(i, i + 1) for i in range(1, n)])


def cycle(n: int) -> Graph:
    _check_size(n)
    edges = [(i, i + 1) for i in range(1, n)]
    if n > 2:
        edges.append((1, n))
    return build_graph(n, edges)


def edgeless(n: int) -> Graph:
    if n < 0:
        raise ValueError("vertex count must be non-negative")
    return Graph(n, np.zeros((n, n), dtype=bool))


def erdos_renyi(n: int, p: float, seed: int = 0) -> Graph:
    """G(n, p): every vertex pair is an edge independently with probability p."""
    _check_size(n)
    _check_probability(p)
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < p, k=1)
    return Graph(n, upper | upper.T)


def threshold_model(n: int, p: float, seed: int = 0) -> Graph:
    """Grow a graph one vertex at a time.

    At each of the n steps the new vertex is either isolated (probability
    1 - p) or joined to every vertex added before it (probability p).
    """
    _check_size(n)
    _check_probability(p)
    rng = np.random.default_rng(seed)
    joins = rng.random(n) < p
    adj = np.zeros((n, n), dtype=bool)
    for i in range(n):
        if joins[i]:
            adj[i, :i] = True
            adj[:i, i] = True
    return Graph(n, adj)


GENERATOR_FAMILIES = (
    "complete",
    "star",
    "path",
    "cycle",
    "edgeless",
    "erdos_renyi",
    "threshold",
)


def generate(family: str, n: int, p: float | None = None, seed: int = 0) -> Graph:
    """Dispatch to a named generator family.

    Deterministic families ignore ``p`` and ``seed``; random families require
    ``p`` and are reproducible from ``seed``.
    """
    if family in ("complete", "star", "path", "cycle", "edgeless"):
        return {"complete": complete, "star": star, "path": path,
                "cycle": cycle, "edgeless": edgeless}[family](n)
    if family in ("erdos_renyi", "threshold", "threshold_model"):
        if p is None:
            raise ValueError(f"family {family!r} requires an edge probability p")
        maker = erdos_renyi if family == "erdos_renyi" else threshold_model
        return maker(n, p, seed)
    raise ValueError(f"unknown graph family {family!r}")


def join(g1: Graph, g2: Graph) -> Graph:
    """Disjoint union of g1 and g2 plus every cross edge.

    Vertex labels of g2 are shifted up by g1.n.
    """
    n = g1.n + g2.n
    adj = np.zeros((n, n), dtype=bool)
    adj[: g1.n, : g1.n] = g1.adjacency
    adj[g1.n :, g1.n :] = g2.adjacency
    adj[: g1.n, g1.n :] = True
    adj[g1.n :, : g1.n] = True
    return Graph(n, adj)


def disjoint_union(g1: Graph, g2: Graph) -> Graph:
    """Disjoint union with no cross edges; labels of g2 shifted up by g1.n."""
    n = g1.n + g2.n
    adj = np.zeros((n, n), dtype=bool)
    adj[: g1.n, : g1.n] = g1.adjacency
    adj[g1.n :, g1.n :] = g2.adjacency
    return Graph(n, adj)


def parse_edge_list(text: str) -> Graph:
    """Parse the edge-list text format.

    First significant line is the vertex count n; each following line is an
    edge "u v" with 1 <= u, v <= n and u != v. Blank lines and lines starting
    with '#' are ignored. Duplicate edges collapse; either endpoint order is
    accepted.
    """
    n: int | None = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            try:
                n = int(line)
            except ValueError:
                raise ValueError(f"line {lineno}: expected vertex count, got {raw!r}") from None
            if n < 0:
                raise ValueError(f"line {lineno}: vertex count must be non-negative")
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: expected integer labels, got {raw!r}") from None
        if not (1 <= u <= n) or not (1 <= v <= n):
            raise ValueError(f"line {lineno}: vertex out of range 1..{n}")
        if u == v:
            raise ValueError(f"line {lineno}: self-loop {u} {v}")
        edges.append((u, v))
    if n is None:
        raise ValueError("empty edge list: missing vertex count line")
    return build_graph(n, edges)


def serialize_edge_list(g: Graph) -> str:
    """Canonical edge-list text: vertex count, then sorted 'u v' lines (u < v)."""
    lines = [str(g.n)]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def _check_size(n: int) -> None:
    if n < 1:
        raise ValueError("vertex count must be at least 1")


def _check_probability(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must be in [0, 1], got {p}")
