"""Content-to-node assignments: LCHP, HCHP, greedy, and the distributed round protocol.

A :class:`Placement` records, for every node, the ordered list of content
ranks it caches. Ranks are 1-based popularity ranks.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

from .centrality import centrality
from .exceptions import InvalidParameterError, NonTerminationError
from .topology import Neighborhood, Topology, UserAttachment

__all__ = [
    "Placement",
    "place_by_centrality",
    "place_lchp",
    "place_hchp",
    "place_greedy",
    "algorithm1",
    "availability",
]

ASCENDING = "ascending"
DESCENDING = "descending"


@dataclass(frozen=True)
class Placement:
    """Per-node cached content ranks plus the policy that produced them.

    ``rounds`` and ``trace`` are filled in by :func:`algorithm1` only; each
    trace entry is ``(round, node, ranks_added)``.
    """

    contents: tuple
    policy: str = "manual"
    h: int | None = None
    rounds: int | None = field(default=None, compare=False)
    trace: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        frozen = tuple(tuple(int(x) for x in node) for node in self.contents)
        object.__setattr__(self, "contents", frozen)
        for v, ranks in enumerate(frozen):
            if len(set(ranks)) != len(ranks):
                raise InvalidParameterError(f"node {v} caches a content twice: {ranks}")

    def __len__(self):
        return len(self.contents)

    def at(self, v: int) -> tuple:
        return self.contents[v]

    def holders(self, rank: int) -> list:
        return [v for v, ranks in enumerate(self.contents) if rank in ranks]

    def cached_ranks(self) -> set:
        return {x for ranks in self.contents for x in ranks}

    def check_capacity(self, t: Topology) -> None:
        if len(self.contents) != len(t):
            raise InvalidParameterError(f"placement covers {len(self.contents)} nodes, topology has {len(t)}")
        for v, ranks in enumerate(self.contents):
            if len(ranks) > t.buffers[v]:
                raise InvalidParameterError(f"node {v} holds {len(ranks)} contents, buffer is {t.buffers[v]}")

    @classmethod
    def empty(cls, n_nodes: int, policy="empty", h=None) -> "Placement":
        return cls(((),) * n_nodes, policy=policy, h=h)

    def to_csv(self, stream=None) -> str:
        """Serialize as ``node,slot,content_rank`` rows with a header comment."""
        out = io.StringIO()
        out.write(f"# policy={self.policy} h={self.h}\n")
        out.write("node,slot,content_rank\n")
        for v, ranks in enumerate(self.contents):
            for slot, x in enumerate(ranks):
                out.write(f"{v},{slot},{x}\n")
        text = out.getvalue()
        if stream is not None:
            stream.write(text)
        return text

    @classmethod
    def from_csv(cls, stream, n_nodes: int) -> "Placement":
        policy, h = "manual", None
        per_node = [dict() for _ in range(n_nodes)]
        for line in stream:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for token in line[1:].split():
                    key, _, value = token.partition("=")
                    if key == "policy":
                        policy = value
                    elif key == "h" and value != "None":
                        h = int(value)
                continue
            if line.startswith("node"):
                continue
            v, slot, x = (int(f) for f in line.split(","))
            per_node[v][slot] = x
        contents = [tuple(d[s] for s in sorted(d)) for d in per_node]
        return cls(tuple(contents), policy=policy, h=h)


def _sort_key(order: str, tiebreak: str, scores):
    if order not in (ASCENDING, DESCENDING):
        raise InvalidParameterError(f"order must be 'ascending' or 'descending', got {order!r}")
    if tiebreak not in ("id", "reverse_id"):
        raise InvalidParameterError(f"unknown tiebreak {tiebreak!r}")
    sign = 1 if order == ASCENDING else -1
    id_sign = 1 if tiebreak == "id" else -1
    return lambda v: (sign * scores[v], id_sign * v)


def place_by_centrality(t: Topology, n_contents: int, h: int, order: str = ASCENDING,
                        metric: str = "ccc", tiebreak: str = "id") -> Placement:
    """Fill nodes in centrality order with contents in popularity order.

    Nodes are visited by ascending score for LCHP or descending for HCHP,
    ties broken by node id. Each node's buffer is filled before moving on;
    every content is placed at most once in the whole network.

    Parameters
    ----------
    t : Topology
    n_contents : int
        Catalog size ``N``; ranks ``1..N`` are available.
    h : int
        Radius used for the CCC metric (ignored by the other metrics).
    order : {"ascending", "descending"}
    metric : {"ccc", "degree", "closeness", "betweenness"}
    tiebreak : {"id", "reverse_id"}
    """
    if n_contents < 1:
        raise InvalidParameterError("catalog must be nonempty")
    table = centrality(t, metric, h=h)
    nodes = sorted(t.nodes, key=_sort_key(order, tiebreak, table.scores))
    contents = [[] for _ in t.nodes]
    next_rank = 1
    for v in nodes:
        take = min(t.buffers[v], n_contents - next_rank + 1)
        contents[v] = list(range(next_rank, next_rank + take))
        next_rank += take
        if next_rank > n_contents:
            break
    label = "LCHP" if order == ASCENDING else "HCHP"
    return Placement(tuple(contents), policy=label, h=h)


def place_lchp(t: Topology, n_contents: int, h: int, **kwargs) -> Placement:
    return place_by_centrality(t, n_contents, h, ASCENDING, **kwargs)


def place_hchp(t: Topology, n_contents: int, h: int, **kwargs) -> Placement:
    return place_by_centrality(t, n_contents, h, DESCENDING, **kwargs)


def place_greedy(t: Topology, users, n_contents: int, h: int) -> Placement:
    """Edge-first placement: popularity decreases with distance from the users.

    Nodes are grouped into rings by hop distance to the nearest user
    attachment. Ring ``k`` (``k <= h``) caches the next block of contents
    after ring ``k-1``, the same block on every node of the ring, so with
    unit buffers the attachment holds rank 1, its one-hop ring rank 2, and
    so on. Nodes beyond ``h`` hops stay empty.
    """
    if isinstance(users, UserAttachment):
        users = [users]
    users = list(users)
    if not users:
        raise InvalidParameterError("greedy placement needs at least one user")
    if h < 0:
        raise InvalidParameterError(f"h must be >= 0, got {h}")
    ring = {}
    for u in users:
        for v, d in t.bfs_distances(u.attachment, max_hops=h).items():
            if d < ring.get(v, math.inf):
                ring[v] = d
    contents = [() for _ in t.nodes]
    start = 1
    for k in range(h + 1):
        members = sorted(v for v, d in ring.items() if d == k)
        if not members:
            break
        width = 0
        for v in members:
            take = max(0, min(t.buffers[v], n_contents - start + 1))
            contents[v] = tuple(range(start, start + take))
            width = max(width, t.buffers[v])
        start += width
        if start > n_contents:
            break
    return Placement(tuple(contents), policy="greedy", h=h)


def algorithm1(t: Topology, n_contents: int, h: int, mode: str = "synchronous",
               max_rounds: int | None = None) -> Placement:
    """Distributed neighborhood placement by lowest cache-connectivity centrality.

    Each round, every node that still has room scores itself by CCC over
    its ``h``-hop neighborhood (a node that is done reports +inf). A node
    acts when its ``(score, id)`` is the strict minimum of its
    neighborhood: it fills its buffer with the most popular contents not
    already cached anywhere in that neighborhood, then drops out. The
    neighborhood content sets are refreshed between rounds.

    In ``"sequential"`` mode only the global minimum acts each round.
    """
    if mode not in ("synchronous", "sequential"):
        raise InvalidParameterError(f"unknown mode {mode!r}")
    if h < 1:
        raise InvalidParameterError(f"h must be >= 1, got {h}")
    n = len(t)
    guard = max_rounds if max_rounds is not None else max(1, n * max(n_contents, 1))
    hoods = [t.bfs_distances(v, max_hops=h) for v in t.nodes]
    static_ccc = [sum(t.buffers[w] for w in hood) - t.buffers[v] for v, hood in enumerate(hoods)]
    cached = [[] for _ in t.nodes]
    done = [t.buffers[v] == 0 for v in t.nodes]
    trace = []
    rounds = 0
    while not all(done):
        if rounds >= guard:
            raise NonTerminationError(f"no convergence after {rounds} rounds on {n} nodes")
        rounds += 1
        score = [(math.inf, v) if done[v] else (static_ccc[v], v) for v in t.nodes]
        if mode == "sequential":
            actors = [min((v for v in t.nodes if not done[v]), key=lambda v: score[v])]
        else:
            actors = [v for v in t.nodes
                      if not done[v] and all(score[v] < score[w] for w in hoods[v] if w != v)]
        snapshot = [set(c) for c in cached]
        for v in actors:
            present = set().union(*(snapshot[w] for w in hoods[v]))
            added = []
            x = 1
            room = t.buffers[v] - len(cached[v])
            while room > 0 and x <= n_contents:
                if x not in present:
                    added.append(x)
                    room -= 1
                x += 1
            cached[v].extend(added)
            done[v] = True
            trace.append((rounds, v, tuple(added)))
    return Placement(tuple(tuple(c) for c in cached), policy="algorithm1", h=h,
                     rounds=rounds, trace=tuple(trace))


def availability(pl: Placement, x: int, s: Neighborhood) -> int:
    """1 if any member of ``s`` caches content ``x``, else 0."""
    return int(any(x in pl.contents[v] for v in s.members))
