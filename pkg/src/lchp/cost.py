"""Expected retrieval cost of a placement for a user under Zipf demand.

A request for content ``x`` costs the hop distance to the nearest replica
within ``h`` hops of the user's attachment node, or ``c_o`` when no such
replica exists. Costs are reported as an in-network part plus a
coefficient multiplying ``c_o``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .centrality import centrality, tier_partition
from .demand import PopularityVector, sample_requests, tail_mass
from .exceptions import InvalidParameterError
from .placement import (
    ASCENDING,
    DESCENDING,
    Placement,
    algorithm1,
    place_greedy,
)
from .topology import Topology, UserAttachment

__all__ = [
    "CostReport",
    "DEFAULT_ORIGIN_COST",
    "expected_cost",
    "tier_averaged_cost",
    "policy_tier_cost",
    "monte_carlo_cost",
    "policy_comparison",
    "POLICIES",
    "PolicyResult",
]

DEFAULT_ORIGIN_COST = 5.0
POLICIES = ("LCHP", "HCHP", "greedy", "algorithm1")
_MC_CHUNK = 1 << 18


@dataclass(frozen=True)
class CostReport:
    """Expected (or sampled) per-request cost split into hops and origin share.

    ``total(c_o) = in_network + origin_coefficient * c_o``. ``stderr`` is
    only set for Monte Carlo estimates and refers to the total at the
    ``c_o`` the sample was drawn with.
    """

    in_network: float
    origin_coefficient: float
    stderr: float | None = None
    n_requests: int | None = None

    def total(self, c_o: float = DEFAULT_ORIGIN_COST) -> float:
        return self.in_network + self.origin_coefficient * c_o


def _check_user(t: Topology, user: UserAttachment) -> None:
    t.check_node(user.attachment)


def nearest_replica_distances(t: Topology, pl: Placement, user: UserAttachment, h: int) -> dict:
    """Map each content cached within ``h`` hops to its nearest replica distance."""
    _check_user(t, user)
    best = {}
    for v, d in t.bfs_distances(user.attachment, max_hops=h).items():
        for x in pl.contents[v]:
            if d < best.get(x, math.inf):
                best[x] = d
    return best


def expected_cost(t: Topology, pl: Placement, user: UserAttachment, h: int,
                  pop: PopularityVector) -> CostReport:
    """Exact expectation over the popularity law for one concrete placement."""
    if len(pl) != len(t):
        raise InvalidParameterError("placement and topology sizes differ")
    best = nearest_replica_distances(t, pl, user, h)
    n = len(pop)
    hits = [(x, d) for x, d in best.items() if x <= n]
    in_network = math.fsum(pop[x] * d for x, d in hits)
    hit_ranks = {x for x, _ in hits}
    origin = math.fsum(pop.p[x - 1] for x in range(1, n + 1) if x not in hit_ranks)
    return CostReport(in_network, origin)


def tier_averaged_cost(t: Topology, tiers, order: str, user: UserAttachment, h: int,
                       pop: PopularityVector) -> CostReport:
    """Cost averaged over all assignments of contents within centrality tiers.

    Tiers are visited in the given (ascending) order for LCHP and in reverse
    for HCHP. Each tier takes as many consecutive contents as the buffer
    capacity of its members reachable from the user; each of those contents
    costs its probability times the buffer-weighted mean distance to those
    members. A tier with no reachable capacity takes no content, and the
    unassigned tail is served by the origin.
    """
    _check_user(t, user)
    if order not in (ASCENDING, DESCENDING):
        raise InvalidParameterError(f"order must be 'ascending' or 'descending', got {order!r}")
    tiers = list(tiers)
    covered = set().union(*tiers) if tiers else set()
    if covered != set(t.nodes):
        raise InvalidParameterError("tiers must cover every node of the topology")
    if order == DESCENDING:
        tiers = tiers[::-1]
    dist = t.bfs_distances(user.attachment, max_hops=h)
    n = len(pop)
    next_rank = 1
    terms = []
    for tier in tiers:
        if next_rank > n:
            break
        reach = [(v, dist[v]) for v in tier if v in dist]
        capacity = sum(t.buffers[v] for v, _ in reach)
        if capacity == 0:
            continue
        mean = sum(t.buffers[v] * d for v, d in reach) / capacity
        last = min(n, next_rank + capacity - 1)
        terms.append(mean * pop.block(next_rank, last))
        next_rank = last + 1
    return CostReport(math.fsum(terms), tail_mass(pop, next_rank - 1))


def policy_tier_cost(t: Topology, policy: str, user: UserAttachment, h: int,
                     pop: PopularityVector, metric: str = "ccc") -> CostReport:
    """Tier-averaged cost for LCHP or HCHP with tiers from ``metric``."""
    order = {"LCHP": ASCENDING, "HCHP": DESCENDING}.get(policy)
    if order is None:
        raise InvalidParameterError(f"tier averaging applies to LCHP/HCHP, not {policy!r}")
    tiers = tier_partition(centrality(t, metric, h=h))
    return tier_averaged_cost(t, tiers, order, user, h, pop)


def _mc_chunk(cost_table, miss_table, pop, seed_seq, size):
    rng = np.random.default_rng(seed_seq)
    ranks = sample_requests(pop, rng, size)
    hops = cost_table[ranks]
    misses = miss_table[ranks]
    return float(hops.sum()), float(misses.sum()), hops, misses


def monte_carlo_cost(t: Topology, pl: Placement, user: UserAttachment, h: int,
                     pop: PopularityVector, c_o: float = DEFAULT_ORIGIN_COST,
                     n_requests: int = 100_000, seed: int = 0, workers: int = 1) -> CostReport:
    """Sample-mean cost of ``n_requests`` independent requests.

    Requests are drawn in fixed-size chunks, each with its own child seed
    spawned from ``seed``, and merged in chunk order, so the estimate does
    not depend on ``workers``.
    """
    if n_requests < 1:
        raise InvalidParameterError("need at least one request")
    best = nearest_replica_distances(t, pl, user, h)
    n = len(pop)
    hop_table = np.zeros(n + 1)
    miss_table = np.ones(n + 1)
    for x, d in best.items():
        if x <= n:
            hop_table[x] = d
            miss_table[x] = 0.0
    sizes = [_MC_CHUNK] * (n_requests // _MC_CHUNK)
    if n_requests % _MC_CHUNK:
        sizes.append(n_requests % _MC_CHUNK)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(seeds, sizes))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: _mc_chunk(hop_table, miss_table, pop, *job), jobs))
    else:
        results = [_mc_chunk(hop_table, miss_table, pop, *job) for job in jobs]
    hop_sum = math.fsum(r[0] for r in results)
    miss_sum = math.fsum(r[1] for r in results)
    mean_hops = hop_sum / n_requests
    miss_rate = miss_sum / n_requests
    mean_total = mean_hops + c_o * miss_rate
    sq = math.fsum(float(np.sum((r[2] + c_o * r[3] - mean_total) ** 2)) for r in results)
    stderr = math.sqrt(sq / (n_requests - 1) / n_requests) if n_requests > 1 else 0.0
    return CostReport(mean_hops, miss_rate, stderr=stderr, n_requests=n_requests)


class PolicyResult(NamedTuple):
    policy: str
    report: CostReport
    total: float


def policy_comparison(t: Topology, user: UserAttachment, h: int, pop: PopularityVector,
                      c_o: float = DEFAULT_ORIGIN_COST, policies=("LCHP", "HCHP", "greedy"),
                      metric: str = "ccc") -> list:
    """Evaluate several policies for one user, each with its matching evaluator.

    LCHP and HCHP use tier averaging; greedy and the distributed protocol
    are evaluated exactly on their concrete placement. Returns one
    :class:`PolicyResult` per policy, in the requested order.
    """
    out = []
    for policy in policies:
        if policy in ("LCHP", "HCHP"):
            report = policy_tier_cost(t, policy, user, h, pop, metric=metric)
        elif policy == "greedy":
            report = expected_cost(t, place_greedy(t, user, len(pop), h), user, h, pop)
        elif policy == "algorithm1":
            report = expected_cost(t, algorithm1(t, len(pop), h), user, h, pop)
        else:
            raise InvalidParameterError(f"unknown policy {policy!r}; expected one of {POLICIES}")
        out.append(PolicyResult(policy, report, report.total(c_o)))
    return out
