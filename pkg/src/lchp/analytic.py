"""Closed-form retrieval costs on the lattice and the binary tree.

These formulas are written independently of the graph simulator and serve
as its oracle. Coefficients are exact :class:`fractions.Fraction` values;
they only become floats when multiplied by the popularity vector.

Lattice geometry: the user sits on a mid-boundary node. Row ``i`` (1-based,
row 1 being the boundary row) holds ``2(h-i+1)+1`` nodes within ``h``
hops; ``mu(i, h)`` is their mean distance and ``m(i, h)`` the number of
reachable nodes on the rows before row ``i``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .cost import CostReport, expected_cost, tier_averaged_cost
from .centrality import ccc, tier_partition
from .demand import PopularityVector
from .exceptions import InvalidParameterError
from .placement import ASCENDING, DESCENDING, place_greedy
from .topology import boundary_midpoint_user, build_lattice, build_regular_tree, leaf_user

__all__ = [
    "mu",
    "m",
    "GridRowProfile",
    "grid_row_profile",
    "CostFormula",
    "grid_formula",
    "tree_formula",
    "grid_cost",
    "tree_cost",
    "crosscheck",
    "breakeven_origin_cost",
]


@lru_cache(maxsize=None)
def mu(i: int, h: int) -> Fraction:
    """Mean hop distance from the user to the reachable nodes on row ``i``."""
    if h < 0 or not 1 <= i <= h + 1:
        raise InvalidParameterError(f"mu needs 1 <= i <= h+1, got i={i}, h={h}")
    if i == 1:
        return Fraction(h * (h + 1), 2 * h + 1)
    return 1 + mu(i - 1, h - 1)


@lru_cache(maxsize=None)
def m(i: int, h: int) -> int:
    """Number of reachable nodes on rows ``1..i-1``; ``m(h+2, h) == (h+1)**2``."""
    if h < 0 or not 1 <= i <= h + 2:
        raise InvalidParameterError(f"m needs 1 <= i <= h+2, got i={i}, h={h}")
    if i == 1:
        return 0
    return m(i - 1, h) + 2 * (h - i + 2) + 1


@dataclass(frozen=True)
class GridRowProfile:
    h: int
    counts: tuple
    means: tuple
    cumulative: tuple


def grid_row_profile(h: int) -> GridRowProfile:
    rows = range(1, h + 2)
    return GridRowProfile(
        h=h,
        counts=tuple(2 * (h - i + 1) + 1 for i in rows),
        means=tuple(mu(i, h) for i in rows),
        cumulative=tuple(m(i, h) for i in range(1, h + 3)),
    )


@dataclass(frozen=True)
class CostFormula:
    """``sum(coefficients[k] * p_k) + c_o * sum_{k > cached} p_k``."""

    coefficients: dict
    cached: int

    def evaluate(self, pop: PopularityVector) -> CostReport:
        n = len(pop)
        in_network = math.fsum(float(c) * pop[k] for k, c in sorted(self.coefficients.items()) if k <= n)
        origin = math.fsum(pop.p[min(self.cached, n):])
        return CostReport(in_network, origin)


def _blocks_formula(means, counts, reverse: bool) -> CostFormula:
    """Assign consecutive popularity blocks to rows, optionally last row first."""
    order = list(range(len(counts)))
    if reverse:
        order.reverse()
    coefficients = {}
    rank = 1
    for row in order:
        for _ in range(counts[row]):
            coefficients[rank] = means[row]
            rank += 1
    return CostFormula(coefficients, rank - 1)


def _greedy_formula(h: int) -> CostFormula:
    return CostFormula({k: Fraction(k - 1) for k in range(2, h + 2)}, h + 1)


def grid_formula(policy: str, h: int) -> CostFormula:
    """Exact cost coefficients on the lattice for a mid-boundary user."""
    if h < 1:
        raise InvalidParameterError(f"h must be >= 1, got {h}")
    if policy == "greedy":
        return _greedy_formula(h)
    if policy not in ("LCHP", "HCHP"):
        raise InvalidParameterError(f"unknown policy {policy!r}")
    profile = grid_row_profile(h)
    return _blocks_formula(profile.means, profile.counts, reverse=policy == "HCHP")


_TREE_FORMULAS = {
    (2, "LCHP"): ({1: 1, 2: 1, 3: 1, 4: 2}, 4),
    (2, "HCHP"): ({1: 2, 2: 1, 3: 1, 4: 1}, 4),
    (2, "greedy"): ({2: 1, 3: 2}, 3),
    (3, "LCHP"): ({1: 1, 2: 1, 3: 2, 4: 2, 5: 2, 6: 3}, 6),
    (3, "HCHP"): ({1: 3, 2: 2, 3: 2, 4: 2, 5: 1, 6: 1}, 6),
    (3, "greedy"): ({2: 1, 3: 2, 4: 3}, 4),
}


def tree_formula(policy: str, h: int) -> CostFormula:
    """Exact cost coefficients on the binary tree for a leaf user, ``h`` in {2, 3}."""
    try:
        coefficients, cached = _TREE_FORMULAS[(h, policy)]
    except KeyError:
        raise InvalidParameterError(f"no closed form for policy={policy!r}, h={h} on the tree") from None
    return CostFormula({k: Fraction(c) for k, c in coefficients.items()}, cached)


def grid_cost(policy: str, h: int, pop: PopularityVector) -> CostReport:
    """Lattice cost for a mid-boundary user, boundary effects ignored.

    >>> from lchp.demand import zipf_popularity
    >>> round(grid_cost("LCHP", 2, zipf_popularity(100, 1.0)).in_network, 2)
    0.71
    """
    return grid_formula(policy, h).evaluate(pop)


def tree_cost(policy: str, h: int, pop: PopularityVector) -> CostReport:
    """Binary-tree cost for a leaf user.

    Closed forms exist for ``h`` in {2, 3}. Other radii are computed on a
    generated binary tree of depth ``h + 2`` (tier averaging for LCHP/HCHP,
    the concrete greedy placement otherwise), with a warning.
    """
    if h in (2, 3):
        return tree_formula(policy, h).evaluate(pop)
    if h < 1:
        raise InvalidParameterError(f"h must be >= 1, got {h}")
    warnings.warn(f"no closed form for h={h}; evaluating on a generated binary tree", stacklevel=2)
    return _simulated("tree", policy, h, pop, size=h + 2)


def _simulated(kind: str, policy: str, h: int, pop: PopularityVector, size: int) -> CostReport:
    if kind == "grid":
        t = build_lattice(size)
        user = boundary_midpoint_user(t)
    elif kind == "tree":
        t = build_regular_tree(2, size)
        user = leaf_user(t)
    else:
        raise InvalidParameterError(f"unknown topology kind {kind!r}")
    if policy == "greedy":
        return expected_cost(t, place_greedy(t, user, len(pop), h), user, h, pop)
    if policy not in ("LCHP", "HCHP"):
        raise InvalidParameterError(f"unknown policy {policy!r}")
    tiers = tier_partition(ccc(t, h))
    order = ASCENDING if policy == "LCHP" else DESCENDING
    return tier_averaged_cost(t, tiers, order, user, h, pop)


def crosscheck(policy: str, kind: str, h: int, pop: PopularityVector, size: int | None = None) -> float:
    """Largest absolute gap between the closed form and the graph simulator.

    Both the in-network part and the origin coefficient are compared.
    ``size`` is the lattice side (default ``2h + 5``) or the tree depth
    (default ``h + 2``).
    """
    if kind == "grid":
        formula = grid_cost(policy, h, pop)
        size = 2 * h + 5 if size is None else size
    elif kind == "tree":
        formula = tree_cost(policy, h, pop)
        size = h + 2 if size is None else size
    else:
        raise InvalidParameterError(f"unknown topology kind {kind!r}")
    sim = _simulated(kind, policy, h, pop, size)
    return max(abs(formula.in_network - sim.in_network),
               abs(formula.origin_coefficient - sim.origin_coefficient))


def breakeven_origin_cost(a: CostReport, b: CostReport) -> float:
    """Origin cost above which ``a`` becomes cheaper than ``b``.

    Returns ``inf`` when ``a`` never wins and ``-inf`` when it always does.
    """
    slope = b.origin_coefficient - a.origin_coefficient
    gap = a.in_network - b.in_network
    if slope == 0:
        return -math.inf if gap < 0 else math.inf
    if slope < 0:
        return math.inf if gap >= 0 else -math.inf
    return gap / slope
