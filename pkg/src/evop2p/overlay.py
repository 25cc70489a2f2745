"""Overlay topology: uniform-attachment generation plus churn operations.

The graph starts as an N0-clique; every further node links to m distinct
existing nodes picked uniformly at random (no preferential attachment).
Connections are bidirectional and never duplicated.  Departing nodes
simply vanish together with their edges; no repair links are added, so the
overlay may fragment under churn and that is observable, not prevented.

Node ids are handed out by a monotone counter and never reused, so a
cached reference to a departed node can never alias a newcomer.

Adjacency is stored as dict-of-dicts rather than dict-of-sets: insertion
order makes neighbor iteration deterministic for a fixed seed, which the
reproducibility contract of the simulator depends on.
"""

from dataclasses import dataclass

__all__ = ["TopologyParams", "OverlayGraph", "generate", "dump_topology"]


@dataclass(frozen=True)
class TopologyParams:
    n: int = 10000
    n0: int = 5
    m: int = 3

    def __post_init__(self):
        if self.n0 < 2:
            raise ValueError("initial clique size N0 must be >= 2")
        if self.n < self.n0:
            raise ValueError("target size N must be >= N0")
        if not 1 <= self.m <= self.n0:
            raise ValueError("links per join m must be in [1, N0]")


class OverlayGraph:
    """Undirected overlay with O(1) uniform sampling of alive nodes."""

    def __init__(self):
        self.adjacency = {}     # node id -> {neighbor id: None}
        self._ids = []          # alive ids, order irrelevant, swap-removed
        self._slot = {}         # node id -> index into _ids
        self._next_id = 0

    def __len__(self):
        return len(self.adjacency)

    def __contains__(self, node):
        return node in self.adjacency

    @property
    def alive(self):
        return self.adjacency.keys()

    def alive_list(self):
        """Alive ids as an indexable sequence (do not mutate)."""
        return self._ids

    def neighbors(self, node):
        return self.adjacency[node].keys()

    def degree(self, node) -> int:
        return len(self.adjacency[node])

    def add_node(self) -> int:
        node = self._next_id
        self._next_id += 1
        self.adjacency[node] = {}
        self._slot[node] = len(self._ids)
        self._ids.append(node)
        return node

    def add_edge(self, a, b):
        if a == b:
            raise ValueError("self-loops are not allowed")
        self.adjacency[a][b] = None
        self.adjacency[b][a] = None

    def join(self, m: int, rng) -> int:
        """Attach a fresh node to m distinct alive nodes chosen uniformly."""
        if len(self._ids) < m:
            raise ValueError(f"need at least {m} alive nodes to join")
        targets = rng.sample(self._ids, m)
        node = self.add_node()
        for t in targets:
            self.add_edge(node, t)
        return node

    def leave(self, node):
        """Remove a node and all incident edges."""
        if node not in self.adjacency:
            raise ValueError(f"unknown node {node}")
        for nb in self.adjacency[node]:
            del self.adjacency[nb][node]
        del self.adjacency[node]
        idx = self._slot.pop(node)
        last = self._ids.pop()
        if last != node:
            self._ids[idx] = last
            self._slot[last] = idx

    def edges(self):
        for a, nbs in self.adjacency.items():
            for b in nbs:
                if a < b:
                    yield a, b


def generate(params: TopologyParams, rng) -> OverlayGraph:
    """Build the initial topology: an N0-clique plus uniform attachment."""
    graph = OverlayGraph()
    for _ in range(params.n0):
        graph.add_node()
    clique = list(graph.alive)
    for i, a in enumerate(clique):
        for b in clique[i + 1:]:
            graph.add_edge(a, b)
    for _ in range(params.n - params.n0):
        graph.join(params.m, rng)
    return graph


def dump_topology(graph: OverlayGraph, path):
    """One edge per line as "a,b" with a < b, lines sorted."""
    lines = sorted(graph.edges())
    with open(path, "w", encoding="utf-8") as fh:
        for a, b in lines:
            fh.write(f"{a},{b}\n")
