# network.py
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx
import numpy as np

from .errors import (
    DisconnectedGraphError,
    InvalidArgumentError,
    UnsupportedSizeError,
)

# Exhaustive route search is only offered on networks up to this size.
MAX_ROUTE_SEARCH_NODES = 16

Edge = Tuple[int, int]
Route = Tuple[int, ...]


class NetworkKind(Enum):
    RING = "ring"
    SW1 = "sw1"
    SW2 = "sw2"

    @staticmethod
    def from_text(text: str) -> NetworkKind:
        txt = text.lower()
        for member in NetworkKind:
            if member.value == txt:
                return member
        raise InvalidArgumentError(
            f"Unknown network kind: {text}, must be one of {', '.join(m.value for m in NetworkKind)}"
        )


@dataclass(frozen=True)
class Graph:
    """
    Undirected routing network with unit-hop edges.

    Edges are stored as ordered pairs (u, v) with u < v, so the adjacency is
    symmetric by construction and holds no self-loops or parallel edges.
    """

    node_count: int
    edges: FrozenSet[Edge] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.node_count < 1:
            raise InvalidArgumentError(
                f"A graph needs at least one node, got node_count={self.node_count}"
            )
        for u, v in self.edges:
            if not (0 <= u < v < self.node_count):
                raise InvalidArgumentError(
                    f"Invalid edge ({u}, {v}) for a graph on {self.node_count} nodes"
                )

    @staticmethod
    def from_edges(node_count: int, pairs: Iterable[Tuple[int, int]]) -> Graph:
        """Builds a graph from arbitrary pairs, dropping self-loops and duplicates."""
        edges = frozenset(
            (min(u, v), max(u, v)) for u, v in pairs if u != v
        )
        return Graph(node_count=node_count, edges=edges)

    @cached_property
    def adjacency(self) -> Dict[int, FrozenSet[int]]:
        neighbors: Dict[int, set] = {v: set() for v in range(self.node_count)}
        for u, v in self.edges:
            neighbors[u].add(v)
            neighbors[v].add(u)
        return {v: frozenset(ns) for v, ns in neighbors.items()}

    @property
    def nodes(self) -> range:
        return range(self.node_count)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> FrozenSet[int]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges)

    def to_networkx(self) -> nx.Graph:
        nx_graph = nx.Graph()
        nx_graph.add_nodes_from(self.nodes)
        nx_graph.add_edges_from(self.sorted_edges())
        return nx_graph

    def is_connected(self) -> bool:
        return nx.is_connected(self.to_networkx())

    def __repr__(self) -> str:
        return f"Graph(node_count={self.node_count}, edges={self.sorted_edges()!r})"

    def __str__(self) -> str:
        return f"Graph({self.node_count} nodes, {self.edge_count} edges)"


@dataclass(frozen=True)
class NetworkMetrics:
    """
    Characteristic path length L and the traffic counts behind the highest
    traffic node metric B.
    """

    char_path_length: float
    max_traffic: float
    per_node_traffic: Dict[int, int] = field(default_factory=dict)

    def __repr__(self) -> str:
        return (
            f"NetworkMetrics(char_path_length={self.char_path_length!r}, "
            f"max_traffic={self.max_traffic!r})"
        )


def _require_connected(g: Graph) -> None:
    if not g.is_connected():
        raise DisconnectedGraphError(f"{g} is not connected")


def _require_node(g: Graph, v: int) -> None:
    if not 0 <= v < g.node_count:
        raise InvalidArgumentError(f"Node {v} is not in {g}")


def ring(n: int) -> Graph:
    """Cycle graph on n nodes."""
    if n < 3:
        raise InvalidArgumentError(f"A ring needs at least 3 nodes, got {n}")
    return Graph.from_edges(n, ((v, (v + 1) % n) for v in range(n)))


def transfer_links(g: Graph, a: int, b: int) -> Graph:
    """
    One step of topology morphing with fixed nodes: every link of A moves to B,
    A is cleared and then linked to B alone. Transferred links that would become
    self-loops or duplicates are dropped.
    """
    _require_node(g, a)
    _require_node(g, b)
    if a == b:
        raise InvalidArgumentError(f"Morphing needs two distinct nodes, got A=B={a}")

    new_b_neighbors = (g.neighbors(b) | g.neighbors(a)) - {a, b}
    kept = [(u, v) for u, v in g.edges if a not in (u, v) and b not in (u, v)]
    transferred = [(b, x) for x in new_b_neighbors]
    return Graph.from_edges(g.node_count, kept + transferred + [(a, b)])


def morph(
    g: Graph,
    rng: np.random.Generator,
    bias: Optional[Iterable[int]] = None,
    bias_role: str = "b",
) -> Tuple[Graph, int, int]:
    """
    Topology morphing with randomly drawn nodes.

    Without a bias A and B are drawn uniformly without replacement. With a bias
    the node filling ``bias_role`` ("b" or "a") is drawn from the bias set and the
    other one uniformly from the remaining nodes.
    """
    if g.node_count < 3:
        raise InvalidArgumentError(f"Morphing needs at least 3 nodes, got {g.node_count}")
    _require_connected(g)

    biased = sorted(set(bias)) if bias else []
    if biased:
        if bias_role not in ("a", "b"):
            raise InvalidArgumentError(f"bias_role must be 'a' or 'b', got {bias_role!r}")
        for v in biased:
            _require_node(g, v)
        pick = biased[int(rng.integers(len(biased)))]
        others = [v for v in g.nodes if v != pick]
        other = others[int(rng.integers(len(others)))]
        a, b = (other, pick) if bias_role == "b" else (pick, other)
    else:
        a, b = (int(x) for x in rng.choice(g.node_count, size=2, replace=False))

    return transfer_links(g, a, b), a, b


def build_network(
    kind: NetworkKind, n: int, rng: np.random.Generator, sw2_bias: float = 0.5
) -> Graph:
    """
    Ring, SW1 (one morph of the ring) or SW2 (two morphs, where the second
    reuses the first B as its B with probability ``sw2_bias`` and as its A otherwise).
    """
    g = ring(n)
    if kind is NetworkKind.RING:
        return g

    g, _, first_b = morph(g, rng)
    if kind is NetworkKind.SW1:
        return g

    role = "b" if rng.random() < sw2_bias else "a"
    g, _, _ = morph(g, rng, bias={first_b}, bias_role=role)
    return g


@lru_cache(maxsize=512)
def distance_matrix(g: Graph) -> Tuple[Tuple[int, ...], ...]:
    """Hop distances between all node pairs."""
    _require_connected(g)
    lengths = dict(nx.all_pairs_shortest_path_length(g.to_networkx()))
    return tuple(
        tuple(lengths[s][t] for t in g.nodes) for s in g.nodes
    )


def char_path_length(g: Graph) -> float:
    """Mean shortest-path hop distance over all ordered pairs of distinct nodes."""
    distances = distance_matrix(g)
    n = g.node_count
    if n < 2:
        return 0.0
    total = sum(sum(row) for row in distances)
    return total / (n * (n - 1))


def _shortest_path_counts(g: Graph, source: int) -> Tuple[List[int], List[int]]:
    """BFS from source returning hop distances and the number of shortest paths."""
    dist = [-1] * g.node_count
    sigma = [0] * g.node_count
    dist[source] = 0
    sigma[source] = 1
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in sorted(g.neighbors(v)):
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue.append(w)
            if dist[w] == dist[v] + 1:
                sigma[w] += sigma[v]
    return dist, sigma


def traffic(g: Graph) -> NetworkMetrics:
    """
    Counts, for every node v, the shortest paths over ordered pairs (s, t) with
    v strictly inside the path. Tied shortest paths are counted separately.
    """
    _require_connected(g)
    n = g.node_count
    counts = [_shortest_path_counts(g, s) for s in g.nodes]

    per_node: Dict[int, int] = {}
    for v in g.nodes:
        dist_v, sigma_v = counts[v]
        through = 0
        for s in g.nodes:
            if s == v:
                continue
            dist_s, sigma_s = counts[s]
            for t in g.nodes:
                if t == v or t == s:
                    continue
                if dist_s[v] + dist_v[t] == dist_s[t]:
                    through += sigma_s[v] * sigma_v[t]
        per_node[v] = through

    return NetworkMetrics(
        char_path_length=char_path_length(g),
        max_traffic=float(max(per_node.values())) if n else 0.0,
        per_node_traffic=per_node,
    )


def _check_route_query(g: Graph, s: int, t: int) -> None:
    _require_node(g, s)
    _require_node(g, t)
    if s == t:
        raise InvalidArgumentError(f"Route endpoints must differ, got s=t={s}")
    if g.node_count > MAX_ROUTE_SEARCH_NODES:
        raise UnsupportedSizeError(
            f"Exhaustive route search is capped at {MAX_ROUTE_SEARCH_NODES} nodes, "
            f"got {g.node_count}"
        )
    _require_connected(g)


@lru_cache(maxsize=4096)
def longest_route_hops(g: Graph, s: int, t: int) -> int:
    """Hop count of the longest simple path from s to t (exhaustive search)."""
    _check_route_query(g, s, t)

    @lru_cache(maxsize=None)
    def longest_from(v: int, visited: int) -> int:
        if v == t:
            return 0
        best = -1
        for w in g.neighbors(v):
            bit = 1 << w
            if visited & bit:
                continue
            rest = longest_from(w, visited | bit)
            if rest >= 0:
                best = max(best, rest + 1)
        return best

    return longest_from(s, 1 << s)


@lru_cache(maxsize=4096)
def route_candidates(g: Graph, s: int, t: int) -> Tuple[Route, ...]:
    """
    All simple s -> t paths, shortest first; ties broken by the node sequence.
    """
    _check_route_query(g, s, t)
    paths = nx.all_simple_paths(g.to_networkx(), source=s, target=t)
    return tuple(sorted((tuple(p) for p in paths), key=lambda p: (len(p), p)))


def shortest_route(g: Graph, s: int, t: int) -> Route:
    return route_candidates(g, s, t)[0]


@dataclass(frozen=True)
class NetworkStatistics:
    """Replicate means of L and B for one network kind."""

    kind: NetworkKind
    replicates: int
    mean_char_path_length: float
    mean_max_traffic: float
    std_char_path_length: float
    std_max_traffic: float

    def __str__(self) -> str:
        return (
            f"{self.kind.value}: L={self.mean_char_path_length:.2f} "
            f"B={self.mean_max_traffic:.1f} (n={self.replicates})"
        )


def network_statistics(
    kind: NetworkKind, n: int, replicates: int, seed: int, sw2_bias: float = 0.5
) -> NetworkStatistics:
    if replicates < 1:
        raise InvalidArgumentError(f"replicates must be >= 1, got {replicates}")
    rng = np.random.default_rng(seed)
    lengths = np.empty(replicates)
    peaks = np.empty(replicates)
    for i in range(replicates):
        metrics = traffic(build_network(kind, n, rng, sw2_bias=sw2_bias))
        lengths[i] = metrics.char_path_length
        peaks[i] = metrics.max_traffic
    return NetworkStatistics(
        kind=kind,
        replicates=replicates,
        mean_char_path_length=float(lengths.mean()),
        mean_max_traffic=float(peaks.mean()),
        std_char_path_length=float(lengths.std()),
        std_max_traffic=float(peaks.std()),
    )
