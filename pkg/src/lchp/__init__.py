"""Centrality-driven content placement in networks of caches.

Places the most popular content at the least central caches (LCHP) and
compares it with the reverse policy (HCHP) and edge-first greedy caching,
both by closed-form expectations on lattices and binary trees and by
evaluation on arbitrary graphs.
"""
from .analytic import crosscheck, grid_cost, m, mu, tree_cost
from .centrality import (
    CentralityTable,
    betweenness_centrality,
    ccc,
    closeness_centrality,
    degree_centrality,
    tier_partition,
)
from .cost import CostReport, expected_cost, monte_carlo_cost, policy_comparison, tier_averaged_cost
from .demand import Catalog, PopularityVector, sample_request, tail_mass, zipf_popularity
from .placement import Placement, algorithm1, availability, place_by_centrality, place_greedy
from .topology import (
    Neighborhood,
    Topology,
    UserAttachment,
    build_lattice,
    build_regular_tree,
    hop_distance,
    load_edge_list,
    neighborhood,
)

__version__ = "0.1.0"

__all__ = [
    "Catalog",
    "CentralityTable",
    "CostReport",
    "Neighborhood",
    "Placement",
    "PopularityVector",
    "Topology",
    "UserAttachment",
    "algorithm1",
    "availability",
    "betweenness_centrality",
    "build_lattice",
    "build_regular_tree",
    "ccc",
    "closeness_centrality",
    "crosscheck",
    "degree_centrality",
    "expected_cost",
    "grid_cost",
    "hop_distance",
    "load_edge_list",
    "m",
    "monte_carlo_cost",
    "mu",
    "neighborhood",
    "place_by_centrality",
    "place_greedy",
    "policy_comparison",
    "sample_request",
    "tail_mass",
    "tier_averaged_cost",
    "tier_partition",
    "tree_cost",
    "zipf_popularity",
]
