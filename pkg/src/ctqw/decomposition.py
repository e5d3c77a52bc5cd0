"""Block decompositions of a graph with all-or-nothing coupling between blocks.

A partition of the vertex set is accepted when every pair of blocks is
either completely joined (all cross edges present) or completely separated
(no cross edge). Such partitions split the Laplacian into a block-diagonal
part plus an integer coupling matrix, which is what the fast walk route in
:mod:`ctqw.walk` exploits.

``verify_fid`` is the single constructor of :class:`FidPartition`; the
construction helpers (twin coarsening, dominating split, clique/gateway
split) all funnel their candidate blocks through it.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .graphs import Graph, laplacian

__all__ = [
    "KIND_OVERLAP",
    "KIND_UNCOVERED",
    "KIND_MIXED",
    "FidViolation",
    "FidPartition",
    "verify_fid",
    "twin_coarsen",
    "dominating_split",
    "clique_gateway_split",
    "tilde_matrix",
    "reduced_matrix",
    "block_diagonal_laplacian",
    "parse_blocks",
    "serialize_blocks",
]

KIND_OVERLAP = "overlap"
KIND_UNCOVERED = "uncovered"
KIND_MIXED = "mixed_cross_edges"


@dataclass(frozen=True)
class FidViolation:
    """Concrete witness that a candidate partition is invalid.

    Witness layout by kind:
      - overlap: (vertex, first block index, second block index)
      - uncovered: (vertex,)
      - mixed_cross_edges: ((block_i, block_j), present edge, absent pair)
    Block indices are 0-based; vertices and vertex pairs use 1-based labels.
    """

    kind: str
    witness: tuple

    def describe(self) -> str:
        if self.kind == KIND_OVERLAP:
            v, bi, bj = self.witness
            return f"vertex {v} appears in blocks {bi + 1} and {bj + 1}"
        if self.kind == KIND_UNCOVERED:
            return f"vertex {self.witness[0]} is not covered by any block"
        (bi, bj), present, absent = self.witness
        return (
            f"blocks {bi + 1} and {bj + 1} are neither fully joined nor fully "
            f"separated: edge {present} present but {absent} absent"
        )


class FidPartition:
    """Verified all-or-nothing block partition of a graph's vertex set.

    Attributes
    ----------
    blocks : tuple[tuple[int, ...], ...]
        The blocks, each a sorted tuple of 1-based vertex labels. Block order
        is the order in which the blocks were supplied or constructed.
    sizes : np.ndarray
        Block sizes.
    block_adjacency : np.ndarray
        Symmetric boolean k x k relation; True where the block pair is fully
        joined. The diagonal is False.
    d_tilde : np.ndarray
        Per-block total size of all fully joined partner blocks. This is the
        uniform degree contribution each vertex receives from outside its
        block.
    """

    __slots__ = ("blocks", "sizes", "block_adjacency", "d_tilde", "n", "k",
                 "_members", "_block_index", "_local", "_hash")

    def __init__(self, blocks: Sequence[Sequence[int]], block_adjacency: np.ndarray, n: int) -> None:
        self.blocks = tuple(tuple(int(v) for v in b) for b in blocks)
        self.k = len(self.blocks)
        self.n = n
        self.sizes = np.array([len(b) for b in self.blocks], dtype=np.int64)
        adj = np.array(block_adjacency, dtype=bool)
        adj.setflags(write=False)
        self.block_adjacency = adj
        self.d_tilde = adj.astype(np.int64) @ self.sizes
        self.d_tilde.setflags(write=False)
        self.sizes.setflags(write=False)
        block_index = np.full(n + 1, -1, dtype=np.int64)
        local = np.full(n + 1, -1, dtype=np.int64)
        members = []
        for bi, block in enumerate(self.blocks):
            for li, v in enumerate(block):
                block_index[v] = bi
                local[v] = li
            members.append(np.array(block, dtype=np.intp) - 1)
        self._members = tuple(members)
        self._block_index = block_index
        self._local = local
        self._hash: int | None = None

    def block_of(self, v: int) -> int:
        """0-based index of the block containing vertex label ``v``."""
        if not 1 <= v <= self.n or self._block_index[v] < 0:
            raise ValueError(f"vertex {v} is not covered by this partition")
        return int(self._block_index[v])

    def local_index(self, v: int) -> int:
        """0-based position of vertex ``v`` inside its block."""
        self.block_of(v)
        return int(self._local[v])

    def member_indices(self, i: int) -> np.ndarray:
        """0-based global array indices of the vertices of block ``i``."""
        return self._members[i]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FidPartition):
            return NotImplemented
        return (self.n == other.n and self.blocks == other.blocks
                and np.array_equal(self.block_adjacency, other.block_adjacency))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self.blocks, self.block_adjacency.tobytes()))
        return self._hash

    def __repr__(self) -> str:
        return f"FidPartition(k={self.k}, sizes={self.sizes.tolist()})"


def verify_fid(g: Graph, blocks: Iterable[Iterable[int]]) -> FidPartition | FidViolation:
    """Check a candidate partition and build the verified value.

    Returns a :class:`FidPartition` on success; on failure returns a
    :class:`FidViolation` whose witness reproduces the problem. Every cross
    pair of vertices is scanned, never sampled.
    """
    normalized: list[tuple[int, ...]] = []
    for b in blocks:
        labels = sorted({g.index(v) + 1 for v in b})
        if not labels:
            raise ValueError("blocks must be non-empty")
        normalized.append(tuple(labels))

    owner = np.full(g.n, -1, dtype=np.int64)
    for bi, block in enumerate(normalized):
        for v in block:
            if owner[v - 1] >= 0:
                return FidViolation(KIND_OVERLAP, (v, int(owner[v - 1]), bi))
            owner[v - 1] = bi
    uncovered = np.flatnonzero(owner < 0)
    if uncovered.size:
        return FidViolation(KIND_UNCOVERED, (int(uncovered[0]) + 1,))

    k = len(normalized)
    members = [np.array(b, dtype=np.intp) - 1 for b in normalized]
    adj = np.zeros((k, k), dtype=bool)
    a = g.adjacency
    for i in range(k):
        for j in range(i + 1, k):
            cross = a[np.ix_(members[i], members[j])]
            total = int(cross.sum())
            if total == cross.size:
                adj[i, j] = adj[j, i] = True
            elif total != 0:
                pi, pj = np.argwhere(cross)[0]
                qi, qj = np.argwhere(~cross)[0]
                present = (normalized[i][pi], normalized[j][pj])
                absent = (normalized[i][qi], normalized[j][qj])
                return FidViolation(KIND_MIXED, ((i, j), present, absent))
    return FidPartition(normalized, adj, g.n)


def _twin_classes(g: Graph, members: Iterable[int] | None = None) -> list[list[int]]:
    """Group the given vertices (default: all) into twin equivalence classes.

    Two vertices are twins when they share the same open neighborhood or the
    same closed neighborhood in ``g``. Each class is a module of ``g``, so any
    partition assembled from such classes has all-or-nothing cross edges.
    """
    idx = np.arange(g.n) if members is None else np.array(sorted(g.index(v) for v in members))
    parent = {int(i): int(i) for i in idx}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    open_groups: dict[bytes, int] = {}
    closed_groups: dict[bytes, int] = {}
    for i in idx:
        i = int(i)
        row = g.adjacency[i]
        open_key = row.tobytes()
        if open_key in open_groups:
            union(open_groups[open_key], i)
        else:
            open_groups[open_key] = i
        closed_row = row.copy()
        closed_row[i] = True
        closed_key = closed_row.tobytes()
        if closed_key in closed_groups:
            union(closed_groups[closed_key], i)
        else:
            closed_groups[closed_key] = i

    classes: dict[int, list[int]] = {}
    for i in idx:
        classes.setdefault(find(int(i)), []).append(int(i) + 1)
    return [sorted(cls) for _, cls in sorted(classes.items())]


def twin_coarsen(g: Graph) -> FidPartition:
    """Coarsest partition obtained by merging twin vertices.

    Vertices sharing an open neighborhood (non-adjacent twins) or a closed
    neighborhood (adjacent twins) end up in one block; merging is iterated to
    a fixed point. Blocks are ordered by their smallest vertex label.
    """
    part = verify_fid(g, _twin_classes(g))
    if isinstance(part, FidViolation):
        raise RuntimeError(f"twin coarsening produced an invalid partition: {part.describe()}")
    return part


def dominating_split(g: Graph) -> FidPartition | None:
    """Two-block partition [dominating vertices, rest], or None when there are none.

    A dominating vertex neighbors every other vertex, so the dominating set
    induces a complete subgraph and is fully joined to the remainder.
    """
    if g.n == 0:
        return None
    deg = g.degrees()
    dom = [int(i) + 1 for i in np.flatnonzero(deg == g.n - 1)]
    if not dom:
        return None
    dom_idx = np.array(dom, dtype=np.intp) - 1
    inner = g.adjacency[np.ix_(dom_idx, dom_idx)]
    if len(dom) > 1 and not np.all(inner | np.eye(len(dom), dtype=bool)):
        raise RuntimeError("dominating vertices failed to induce a complete subgraph")
    if len(dom) == g.n:
        blocks: list[list[int]] = [dom]
    else:
        rest = [v for v in g.vertices() if v not in set(dom)]
        blocks = [dom, rest]
    part = verify_fid(g, blocks)
    if isinstance(part, FidViolation):
        raise RuntimeError(f"dominating split produced an invalid partition: {part.describe()}")
    return part


def clique_gateway_split(g: Graph, clique: Iterable[int]) -> FidPartition:
    """Partition [clique minus gateways, each gateway alone, the rest].

    Gateways are clique vertices with at least one edge leaving the clique.
    When the non-clique remainder does not form a valid single block it is
    refined into twin classes, which always yields a valid partition. An
    empty non-gateway core is dropped.
    """
    cl = sorted({g.index(v) + 1 for v in clique})
    if not cl:
        raise ValueError("clique must be non-empty")
    pos = np.array(cl, dtype=np.intp) - 1
    inner = g.adjacency[np.ix_(pos, pos)]
    if len(cl) > 1:
        missing = np.argwhere(~(inner | np.eye(len(cl), dtype=bool)))
        if missing.size:
            u, v = cl[missing[0][0]], cl[missing[0][1]]
            raise ValueError(f"clique is not complete: pair ({u}, {v}) is not an edge")

    outside_mask = np.ones(g.n, dtype=bool)
    outside_mask[pos] = False
    cross = g.adjacency[pos][:, outside_mask]
    is_gateway = cross.any(axis=1)
    gateways = [cl[i] for i in np.flatnonzero(is_gateway)]
    core = [v for v in cl if v not in set(gateways)]
    outer = [int(i) + 1 for i in np.flatnonzero(outside_mask)]

    blocks: list[list[int]] = []
    if core:
        blocks.append(core)
    blocks.extend([gv] for gv in gateways)

    if outer:
        candidate = verify_fid(g, blocks + [outer])
        if isinstance(candidate, FidPartition):
            return candidate
        candidate = verify_fid(g, blocks + _twin_classes(g, outer))
    else:
        candidate = verify_fid(g, blocks)
    if isinstance(candidate, FidViolation):
        raise RuntimeError(f"clique/gateway split produced an invalid partition: {candidate.describe()}")
    return candidate


def tilde_matrix(p: FidPartition) -> np.ndarray:
    """Integer coupling matrix of the partition, in global vertex order.

    Diagonal entries hold the block's outside-coupling degree; entries between
    fully joined blocks are -1; everything else is 0. Adding this matrix to
    the block-diagonal of induced-subgraph Laplacians reproduces the graph
    Laplacian exactly.
    """
    m = np.zeros((p.n, p.n), dtype=np.int64)
    for i in range(p.k):
        mi = p.member_indices(i)
        m[mi, mi] = p.d_tilde[i]
        for j in range(i + 1, p.k):
            if p.block_adjacency[i, j]:
                mj = p.member_indices(j)
                m[np.ix_(mi, mj)] = -1
                m[np.ix_(mj, mi)] = -1
    return m


def reduced_matrix(p: FidPartition) -> np.ndarray:
    """k x k integer matrix driving the block-constant modes.

    Diagonal entry i is the outside-coupling degree of block i; entry (i, j)
    is minus the size of block j when blocks i and j are fully joined, else 0.
    Every row sums to zero.
    """
    r = np.where(p.block_adjacency, -p.sizes[None, :], 0).astype(np.int64)
    np.fill_diagonal(r, p.d_tilde)
    return r


def block_diagonal_laplacian(g: Graph, p: FidPartition) -> np.ndarray:
    """Laplacians of the induced block subgraphs, embedded at their global positions."""
    out = np.zeros((g.n, g.n), dtype=np.int64)
    for i in range(p.k):
        mi = p.member_indices(i)
        sub = g.induced_subgraph(p.blocks[i])
        out[np.ix_(mi, mi)] = laplacian(sub)
    return out


def parse_blocks(text: str) -> list[list[int]]:
    """Parse the partition text format: one line per block, space-separated labels."""
    blocks: list[list[int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            labels = [int(tok) for tok in line.split()]
        except ValueError:
            raise ValueError(f"line {lineno}: expected integer labels, got {raw!r}") from None
        blocks.append(labels)
    if not blocks:
        raise ValueError("partition file contains no blocks")
    return blocks


def serialize_blocks(p: FidPartition) -> str:
    """Partition text format: one line per block, space-separated labels."""
    return "\n".join(" ".join(str(v) for v in block) for block in p.blocks) + "\n"
