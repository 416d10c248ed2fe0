"""Slow reference computations used to cross-check the fast paths.

Nothing here shares code with the BFS, Brandes or closed-form routines it
checks: distances come from explicit path enumeration or from lattice
coordinates.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations


def all_simple_paths(adjacency, s, t):
    stack = [(s, (s,))]
    while stack:
        v, path = stack.pop()
        if v == t:
            yield path
            continue
        for w in adjacency[v]:
            if w not in path:
                stack.append((w, path + (w,)))


def brute_force_betweenness(adjacency):
    """Betweenness by enumerating every simple path of every unordered pair."""
    n = len(adjacency)
    scores = [Fraction(0)] * n
    for s, t in combinations(range(n), 2):
        paths = list(all_simple_paths(adjacency, s, t))
        if not paths:
            continue
        shortest = min(len(p) for p in paths)
        geodesics = [p for p in paths if len(p) == shortest]
        for v in range(n):
            if v in (s, t):
                continue
            through = sum(1 for p in geodesics if v in p)
            scores[v] += Fraction(through, len(geodesics))
    return scores


def lattice_half_diamond_rows(h):
    """Manhattan distances of reachable lattice nodes, grouped by row.

    User at the origin of an unbounded half-plane; row ``i`` (1-based) is
    depth ``i - 1`` into the lattice.
    """
    rows = []
    for depth in range(h + 1):
        span = h - depth
        rows.append([depth + abs(dx) for dx in range(-span, span + 1)])
    return rows
