"""Node centrality scores: cache-connectivity centrality and the classical metrics.

Cache-connectivity centrality (CCC) of a node is the total buffer capacity
it can reach within ``h`` hops, not counting its own buffer. Placement
policies sort nodes by these scores; :func:`tier_partition` groups nodes
with equal scores.
"""
from __future__ import annotations

import io
import math
import warnings
from collections import deque
from dataclasses import dataclass, field

from .exceptions import InvalidParameterError
from .topology import Topology

__all__ = [
    "CentralityTable",
    "ccc",
    "degree_centrality",
    "closeness_centrality",
    "betweenness_centrality",
    "centrality",
    "tier_partition",
]

METRICS = ("ccc", "degree", "closeness", "betweenness")


@dataclass(frozen=True)
class CentralityTable:
    """One score per node for a single metric.

    ``partial`` is set when closeness was computed on a disconnected graph,
    i.e. over each node's reachable set only.
    """

    metric: str
    scores: tuple
    h: int | None = None
    partial: bool = False
    include_self: bool = field(default=False, compare=False)

    def __len__(self):
        return len(self.scores)

    def __getitem__(self, v):
        return self.scores[v]

    def to_csv(self, stream=None) -> str:
        """Serialize as ``node,score`` rows behind a ``#`` header comment."""
        out = io.StringIO()
        header = f"# metric={self.metric}"
        if self.h is not None:
            header += f" h={self.h}"
        if self.partial:
            header += " partial=1"
        out.write(header + "\n")
        out.write("node,score\n")
        for v, s in enumerate(self.scores):
            out.write(f"{v},{s!r}\n")
        text = out.getvalue()
        if stream is not None:
            stream.write(text)
        return text


def ccc(t: Topology, h: int, include_self: bool = False) -> CentralityTable:
    """Cache-connectivity centrality with radius ``h``.

    Parameters
    ----------
    t : Topology
    h : int
        Neighborhood radius in hops, ``h >= 1``.
    include_self : bool
        Count the node's own buffer too. Off by default so that unit
        buffers and ``h=1`` reproduce the degree exactly.
    """
    if h < 1:
        raise InvalidParameterError(f"CCC radius must be >= 1, got {h}")
    buffers = t.buffers
    scores = []
    for v in t.nodes:
        reach = t.bfs_distances(v, max_hops=h)
        total = sum(buffers[w] for w in reach)
        if not include_self:
            total -= buffers[v]
        scores.append(total)
    return CentralityTable("ccc", tuple(scores), h=h, include_self=include_self)


def degree_centrality(t: Topology) -> CentralityTable:
    return CentralityTable("degree", tuple(t.degree(v) for v in t.nodes))


def closeness_centrality(t: Topology) -> CentralityTable:
    """Reciprocal of the summed hop distance to all other nodes.

    On a disconnected graph the sum runs over the reachable set and the
    table is flagged ``partial``; a node that reaches nothing scores 0.
    """
    if len(t) < 2:
        raise InvalidParameterError("closeness is undefined on a graph with fewer than 2 nodes")
    scores = []
    partial = False
    for v in t.nodes:
        dist = t.bfs_distances(v)
        if len(dist) < len(t):
            partial = True
        total = sum(dist.values())
        scores.append(1.0 / total if total > 0 else 0.0)
    if partial:
        warnings.warn("graph is disconnected; closeness computed over reachable sets", stacklevel=2)
    return CentralityTable("closeness", tuple(scores), partial=partial)


def betweenness_centrality(t: Topology) -> CentralityTable:
    """Brandes' accumulation; each unordered source/target pair counted once."""
    n = len(t)
    cb = [0.0] * n
    for s in t.nodes:
        stack = []
        preds = [[] for _ in range(n)]
        sigma = [0] * n
        sigma[s] = 1
        dist = [-1] * n
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in t.neighbors(v):
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                cb[w] += delta[w]
    return CentralityTable("betweenness", tuple(x / 2.0 for x in cb))


def centrality(t: Topology, metric: str = "ccc", h: int | None = None, **kwargs) -> CentralityTable:
    """Dispatch by metric name; ``h`` is required for ``"ccc"``."""
    if metric == "ccc":
        if h is None:
            raise InvalidParameterError("metric 'ccc' needs a radius h")
        return ccc(t, h, **kwargs)
    if metric == "degree":
        return degree_centrality(t)
    if metric == "closeness":
        return closeness_centrality(t)
    if metric == "betweenness":
        return betweenness_centrality(t)
    raise InvalidParameterError(f"unknown centrality metric {metric!r}; expected one of {METRICS}")


def tier_partition(table: CentralityTable, rel_tol: float = 1e-9, abs_tol: float = 1e-12) -> list:
    """Group nodes into equal-score tiers, ordered by ascending score.

    Float scores are compared with :func:`math.isclose` so that symmetric
    nodes are not split by rounding noise. Each tier is a frozenset.
    """
    order = sorted(range(len(table.scores)), key=lambda v: (table.scores[v], v))
    tiers = []
    current = []
    anchor = None
    for v in order:
        s = table.scores[v]
        if anchor is not None and math.isclose(s, anchor, rel_tol=rel_tol, abs_tol=abs_tol):
            current.append(v)
            continue
        if current:
            tiers.append(frozenset(current))
        current = [v]
        anchor = s
    if current:
        tiers.append(frozenset(current))
    return tiers
