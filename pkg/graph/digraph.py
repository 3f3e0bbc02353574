"""
Digraph Generation
------------------
Builds the communication digraphs the simulator runs on.
A directed ring backbone guarantees strong connectivity; extra edges are
drawn independently from a seeded numpy Generator. Every node carries a
self-loop.
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Iterable

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Digraph:
    """Directed graph on nodes 0..n-1. An edge (i, j) means i transmits to j."""

    n: int
    edges: frozenset

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], strict: bool = True) -> "Digraph":
        """Build a digraph from an edge iterable, adding the self-loops.

        With ``strict=True`` the graph must be strongly connected.
        """
        if n < 1:
            raise ValueError(f"Node count must be positive, got {n}")
        edge_set = set()
        for src, dst in edges:
            src, dst = int(src), int(dst)
            if not (0 <= src < n and 0 <= dst < n):
                raise ValueError(f"Edge ({src}, {dst}) out of range for n={n}")
            edge_set.add((src, dst))
        edge_set.update((i, i) for i in range(n))
        graph = cls(n=n, edges=frozenset(edge_set))
        if strict and not is_strongly_connected(graph):
            raise ValueError("Digraph is not strongly connected")
        return graph

    def adjacency(self) -> np.ndarray:
        """Receive-side adjacency: A[i, j] = 1 iff j transmits to i."""
        a = np.zeros((self.n, self.n))
        for src, dst in self.edges:
            a[dst, src] = 1.0
        return a

    def in_neighbors(self, i: int) -> list[int]:
        return sorted(src for src, dst in self.edges if dst == i)

    def out_neighbors(self, j: int) -> list[int]:
        return sorted(dst for src, dst in self.edges if src == j)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


def generate_digraph(n: int, extra_edge_prob: float, seed: int) -> Digraph:
    """Directed ring 0 -> 1 -> ... -> n-1 -> 0 plus random extra edges and self-loops.

    Each ordered pair (i, j), i != j, not on the ring is added independently
    with probability ``extra_edge_prob``. Pairs are visited in row-major order
    so the draw sequence is fixed for a given seed.
    """
    if n < 1:
        raise ValueError(f"Node count must be positive, got {n}")
    if not 0.0 <= extra_edge_prob <= 1.0:
        raise ValueError(f"extra_edge_prob must lie in [0, 1], got {extra_edge_prob}")

    rng = np.random.default_rng(seed)
    ring = {(i, (i + 1) % n) for i in range(n)} if n > 1 else set()
    edges = set(ring)

    draws = rng.random((n, n))
    for i in range(n):
        for j in range(n):
            if i != j and (i, j) not in ring and draws[i, j] < extra_edge_prob:
                edges.add((i, j))

    graph = Digraph.from_edges(n, edges, strict=True)
    logger.debug(f"Generated digraph: n={n}, edges={len(graph.edges)}, seed={seed}")
    return graph


def _reachable(successors: list[list[int]], start: int) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for nxt in successors[node]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def is_strongly_connected(graph: Digraph) -> bool:
    """BFS from every node; strongly connected iff every search reaches all nodes."""
    successors = [[] for _ in range(graph.n)]
    for src, dst in graph.sorted_edges():
        successors[src].append(dst)
    return all(len(_reachable(successors, s)) == graph.n for s in range(graph.n))


def matrix_roots(weights: np.ndarray) -> set[int]:
    """Spanning-tree roots of the graph induced by a mixing matrix.

    The induced graph has an edge j -> i whenever weights[i, j] > 0. A node is
    a root when every node is reachable from it.
    """
    w = np.asarray(weights)
    n = w.shape[0]
    successors = [[i for i in range(n) if w[i, j] > 0] for j in range(n)]
    return {s for s in range(n) if len(_reachable(successors, s)) == n}
