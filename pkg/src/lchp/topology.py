"""Graphs of cache nodes: lattices, regular trees and edge-list graphs.

Node ids are dense integers ``0..n-1``. Every edge costs one hop. A
:class:`Topology` is immutable once built, so it can be shared freely
between threads.
"""
from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass
from typing import Iterable, TextIO

from .exceptions import EdgeListParseError, EmptyGraphError, InvalidParameterError

__all__ = [
    "Topology",
    "UserAttachment",
    "Neighborhood",
    "build_lattice",
    "build_regular_tree",
    "load_edge_list",
    "hop_distance",
    "neighborhood",
    "lattice_node",
    "lattice_coords",
    "boundary_midpoint_user",
    "leaf_user",
    "random_connected_graph",
]


class Topology:
    """Undirected, unweighted graph with a per-node buffer capacity.

    Parameters
    ----------
    adjacency : sequence of iterables
        ``adjacency[v]`` lists the neighbors of node ``v``. Must be symmetric.
    buffers : sequence of int, optional
        Cache capacity of each node in content units. Defaults to 1 everywhere.
    kind : str
        ``"lattice"``, ``"tree"`` or ``"generic"``.
    params : dict, optional
        Generator parameters (``n`` for lattices, ``arity``/``depth`` for trees).
    labels : sequence, optional
        Original node identifiers when the graph was densified on load.
    """

    __slots__ = ("_adj", "_buffers", "kind", "params", "labels")

    def __init__(self, adjacency, buffers=None, kind="generic", params=None, labels=None):
        adj = tuple(tuple(sorted(set(nbrs))) for nbrs in adjacency)
        n = len(adj)
        for v, nbrs in enumerate(adj):
            for w in nbrs:
                if not 0 <= w < n:
                    raise InvalidParameterError(f"node {v} has out-of-range neighbor {w}")
                if w == v:
                    raise InvalidParameterError(f"self-loop at node {v}")
                if v not in adj[w]:
                    raise InvalidParameterError(f"edge {v}-{w} is not symmetric")
        if buffers is None:
            buffers = (1,) * n
        buffers = tuple(buffers)
        if len(buffers) != n:
            raise InvalidParameterError(f"expected {n} buffers, got {len(buffers)}")
        if any(b < 0 for b in buffers):
            raise InvalidParameterError("buffers must be non-negative")
        self._adj = adj
        self._buffers = buffers
        self.kind = kind
        self.params = dict(params or {})
        self.labels = tuple(labels) if labels is not None else None

    def __len__(self):
        return len(self._adj)

    def __repr__(self):
        return f"Topology(kind={self.kind!r}, nodes={len(self)}, edges={self.n_edges}, params={self.params})"

    @property
    def n_nodes(self) -> int:
        return len(self._adj)

    @property
    def n_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self._adj) // 2

    @property
    def buffers(self) -> tuple:
        return self._buffers

    @property
    def nodes(self) -> range:
        return range(len(self._adj))

    def neighbors(self, v: int) -> tuple:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def edges(self):
        """Yield each undirected edge once as ``(u, v)`` with ``u < v``."""
        for u, nbrs in enumerate(self._adj):
            for w in nbrs:
                if u < w:
                    yield u, w

    def with_buffers(self, buffers) -> "Topology":
        """Return a copy of this topology with different buffer sizes."""
        return Topology(self._adj, buffers, self.kind, self.params, self.labels)

    def check_node(self, v: int) -> None:
        if not 0 <= v < len(self._adj):
            raise InvalidParameterError(f"node {v} not in topology of {len(self._adj)} nodes")

    def bfs_distances(self, source: int, max_hops: int | None = None) -> dict:
        """Hop distances from ``source`` to every node reachable within ``max_hops``."""
        self.check_node(source)
        dist = {source: 0}
        queue = deque([source])
        while queue:
            v = queue.popleft()
            d = dist[v]
            if max_hops is not None and d >= max_hops:
                continue
            for w in self._adj[v]:
                if w not in dist:
                    dist[w] = d + 1
                    queue.append(w)
        return dist

    def is_connected(self) -> bool:
        return len(self) > 0 and len(self.bfs_distances(0)) == len(self)


@dataclass(frozen=True)
class UserAttachment:
    """A user co-located with a cache node; hop costs are measured from ``attachment``."""

    attachment: int
    user_id: int = 0


@dataclass(frozen=True)
class Neighborhood:
    center: int
    radius: int
    distances: dict

    @property
    def members(self) -> frozenset:
        return frozenset(self.distances)

    def __contains__(self, v):
        return v in self.distances

    def __len__(self):
        return len(self.distances)


def build_lattice(n: int, buffer: int = 1) -> Topology:
    """Square ``n x n`` grid with 4-neighbor connectivity.

    Node ``(r, c)`` gets id ``r * n + c``.
    """
    if n < 2:
        raise InvalidParameterError(f"lattice side must be >= 2, got {n}")
    adj = []
    for r in range(n):
        for c in range(n):
            nbrs = []
            if r > 0:
                nbrs.append((r - 1) * n + c)
            if r < n - 1:
                nbrs.append((r + 1) * n + c)
            if c > 0:
                nbrs.append(r * n + c - 1)
            if c < n - 1:
                nbrs.append(r * n + c + 1)
            adj.append(nbrs)
    return Topology(adj, [buffer] * (n * n), kind="lattice", params={"n": n})


def lattice_node(n: int, row: int, col: int) -> int:
    return row * n + col


def lattice_coords(n: int, v: int) -> tuple:
    return divmod(v, n)


def build_regular_tree(arity: int, depth: int, buffer: int = 1) -> Topology:
    """Full ``arity``-ary tree of the given depth, root 0, breadth-first ids.

    Children of node ``i`` are ``arity*i + 1 .. arity*i + arity``; the leaves
    sit at level ``depth``.
    """
    if arity < 2:
        raise InvalidParameterError(f"tree arity must be >= 2, got {arity}")
    if depth < 1:
        raise InvalidParameterError(f"tree depth must be >= 1, got {depth}")
    size = (arity ** (depth + 1) - 1) // (arity - 1)
    adj = [[] for _ in range(size)]
    for child in range(1, size):
        parent = (child - 1) // arity
        adj[parent].append(child)
        adj[child].append(parent)
    return Topology(adj, [buffer] * size, kind="tree", params={"arity": arity, "depth": depth})


def load_edge_list(stream: TextIO | Iterable[str], default_buffer: int = 1) -> Topology:
    """Parse ``u v [buffer_u buffer_v]`` lines into a generic topology.

    Blank lines and ``#`` comments are skipped. Node ids may be any
    non-negative integers; they are densified in ascending order and the
    original ids are kept in ``Topology.labels``. A duplicate edge is
    ignored with a warning.
    """
    edges = []
    overrides = {}
    seen = set()
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) not in (2, 4):
            raise EdgeListParseError(f"expected 2 or 4 fields, got {len(fields)}", lineno)
        try:
            values = [int(f) for f in fields]
        except ValueError:
            raise EdgeListParseError(f"non-integer field in {line!r}", lineno) from None
        if any(x < 0 for x in values):
            raise EdgeListParseError("ids and buffers must be non-negative", lineno)
        u, v = values[:2]
        if u == v:
            raise EdgeListParseError(f"self-loop on node {u}", lineno)
        if len(values) == 4:
            overrides[u], overrides[v] = values[2], values[3]
        key = (min(u, v), max(u, v))
        if key in seen:
            warnings.warn(f"line {lineno}: duplicate edge {u}-{v} ignored", stacklevel=2)
            continue
        seen.add(key)
        edges.append(key)
    if not edges:
        raise EmptyGraphError("edge list contains no edges")
    labels = sorted({x for e in edges for x in e})
    index = {label: i for i, label in enumerate(labels)}
    adj = [[] for _ in labels]
    for u, v in edges:
        adj[index[u]].append(index[v])
        adj[index[v]].append(index[u])
    buffers = [overrides.get(label, default_buffer) for label in labels]
    return Topology(adj, buffers, kind="generic", labels=labels)


def hop_distance(t: Topology, a: int, b: int) -> int | None:
    """Shortest-path hop count from ``a`` to ``b``; ``None`` when unreachable."""
    t.check_node(b)
    return t.bfs_distances(a).get(b)


def neighborhood(t: Topology, v: int, h: int) -> Neighborhood:
    """All nodes within ``h`` hops of ``v``, with their distances."""
    if h < 0:
        raise InvalidParameterError(f"radius must be >= 0, got {h}")
    return Neighborhood(v, h, t.bfs_distances(v, max_hops=h))


def boundary_midpoint_user(t: Topology) -> UserAttachment:
    """User attached to the middle node of the lattice's top row."""
    if t.kind != "lattice":
        raise InvalidParameterError("boundary_midpoint_user needs a lattice topology")
    n = t.params["n"]
    return UserAttachment(lattice_node(n, 0, (n - 1) // 2))


def leaf_user(t: Topology) -> UserAttachment:
    """User attached to the first leaf (lowest id) of a regular tree."""
    if t.kind != "tree":
        raise InvalidParameterError("leaf_user needs a tree topology")
    arity, depth = t.params["arity"], t.params["depth"]
    first_leaf = (arity ** depth - 1) // (arity - 1)
    return UserAttachment(first_leaf)


def random_connected_graph(n_nodes: int, edge_prob: float, rng, buffers=None) -> Topology:
    """Random spanning tree plus independent extra edges with ``edge_prob``.

    ``rng`` is a :class:`numpy.random.Generator`.
    """
    if n_nodes < 1:
        raise InvalidParameterError("need at least one node")
    adj = [set() for _ in range(n_nodes)]
    order = rng.permutation(n_nodes)
    for i in range(1, n_nodes):
        u, v = int(order[i]), int(order[rng.integers(i)])
        adj[u].add(v)
        adj[v].add(u)
    for u in range(n_nodes):
        for v in range(u + 1, n_nodes):
            if rng.random() < edge_prob:
                adj[u].add(v)
                adj[v].add(u)
    return Topology(adj, buffers)
