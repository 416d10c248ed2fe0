"""Reproduce the published numeric results and report pass/fail per target.

Each :class:`Check` carries the published target, the computed value and
the tolerance. Targets known to be internally inconsistent in the source
are reported with status ``FLAGGED`` and do not count as failures.
"""
from __future__ import annotations

import math
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import analytic
from ._oracles import brute_force_betweenness, lattice_half_diamond_rows
from .centrality import betweenness_centrality
from .cost import CostReport, expected_cost, monte_carlo_cost
from .demand import tail_mass, zipf_popularity
from .experiments import ScenarioConfig, rows_to_csv, run_sweep, write_atomic
from .placement import algorithm1, place_by_centrality, place_greedy
from .topology import UserAttachment, boundary_midpoint_user, build_lattice, random_connected_graph

PASS, FAIL, FLAGGED = "PASS", "FAIL", "FLAGGED"
TOL2 = 0.005
TOL3 = 0.002
EXACT = 1e-9
PSI_GRID = tuple(round(0.2 * k, 1) for k in range(1, 11))


@dataclass(frozen=True)
class Check:
    criterion: int
    name: str
    target: object
    computed: object
    tolerance: object
    status: str
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.status != FAIL

    def line(self) -> str:
        def fmt(x):
            return f"{x:.6g}" if isinstance(x, float) else str(x)
        text = (f"[{self.status:7}] C{self.criterion:<2} {self.name}: target={fmt(self.target)} "
                f"computed={fmt(self.computed)} tol={fmt(self.tolerance)}")
        return text + (f"  ({self.note})" if self.note else "")


def _near(criterion, name, target, computed, tol, note=""):
    status = PASS if abs(computed - target) <= tol else FAIL
    return Check(criterion, name, target, computed, tol, status, note)


def _flag(criterion, name, target, computed, note):
    return Check(criterion, name, target, computed, "-", FLAGGED, note)


def _bool(criterion, name, ok, computed="", note=""):
    return Check(criterion, name, True, computed, "-", PASS if ok else FAIL, note)


def check_grid_h2(pop):
    lchp = analytic.grid_cost("LCHP", 2, pop)
    hchp = analytic.grid_cost("HCHP", 2, pop)
    greedy = analytic.grid_cost("greedy", 2, pop)
    return [
        _near(1, "grid h=2 LCHP in-network", 0.71, lchp.in_network, TOL2),
        _near(1, "grid h=2 HCHP in-network", 0.91, hchp.in_network, TOL2),
        _near(1, "grid h=2 greedy in-network", 0.22, greedy.in_network, TOL2),
        _near(1, "grid h=2 greedy origin share = tail beyond rank 3", tail_mass(pop, 3),
              greedy.origin_coefficient, EXACT, "printed 'j>32' read as j>3"),
    ]


def check_grid_h3(pop):
    lchp = analytic.grid_cost("LCHP", 3, pop)
    hchp = analytic.grid_cost("HCHP", 3, pop)
    greedy = analytic.grid_cost("greedy", 3, pop)
    t = build_lattice(4 * 3 + 1)
    user = boundary_midpoint_user(t)
    sim = expected_cost(t, place_greedy(t, user, len(pop), 3), user, 3, pop)
    return [
        _near(2, "grid h=3 LCHP in-network", 1.22, lchp.in_network, TOL2),
        _near(2, "grid h=3 HCHP in-network", 1.63, hchp.in_network, TOL2),
        _near(2, "grid h=3 greedy formula vs placement simulation", greedy.in_network,
              sim.in_network, EXACT),
        _flag(2, "grid h=3 greedy printed value", 0.35, greedy.in_network,
              "formula p2+2p3+3p4 gives 0.37"),
    ]


def check_tree_h2(pop):
    lchp = analytic.tree_cost("LCHP", 2, pop)
    hchp = analytic.tree_cost("HCHP", 2, pop)
    greedy = analytic.tree_cost("greedy", 2, pop)
    return [
        _near(3, "tree h=2 LCHP in-network", 0.450, lchp.in_network, TOL3),
        _near(3, "tree h=2 LCHP origin share", 0.598, lchp.origin_coefficient, TOL3),
        _near(3, "tree h=2 HCHP in-network", 0.594, hchp.in_network, TOL3),
        _near(3, "tree h=2 HCHP origin share", 0.598, hchp.origin_coefficient, TOL3),
        _near(3, "tree h=2 greedy in-network", 0.22, greedy.in_network, TOL2),
        _near(3, "tree h=2 greedy origin share", 0.65, greedy.origin_coefficient, TOL2),
    ]


def check_tree_breakeven(pop):
    lchp = analytic.tree_cost("LCHP", 2, pop)
    greedy = analytic.tree_cost("greedy", 2, pop)
    c_star = analytic.breakeven_origin_cost(lchp, greedy)
    below = lchp.total(c_star - 0.01) > greedy.total(c_star - 0.01)
    above = lchp.total(c_star + 0.01) < greedy.total(c_star + 0.01)
    return [
        _near(4, "tree h=2 LCHP beats greedy above c_o", 4.6, c_star, 0.1),
        _bool(4, "tree h=2 ordering flips at breakeven", below and above, f"{c_star:.4f}"),
    ]


def check_tree_h3(pop):
    lchp = analytic.tree_cost("LCHP", 3, pop)
    hchp = analytic.tree_cost("HCHP", 3, pop)
    greedy = analytic.tree_cost("greedy", 3, pop)
    printed = analytic.breakeven_origin_cost(CostReport(0.69, 0.35), CostReport(0.37, 0.60))
    return [
        _near(5, "tree h=3 LCHP in-network", 0.69, lchp.in_network, TOL2),
        _near(5, "tree h=3 HCHP in-network", 1.07, hchp.in_network, TOL2),
        _near(5, "tree h=3 greedy in-network", 0.37, greedy.in_network, TOL2),
        _near(5, "tree h=3 greedy origin share", 0.60, greedy.origin_coefficient, TOL2),
        _near(5, "tree h=3 LCHP origin share = tail beyond rank 6", 0.528, lchp.origin_coefficient, TOL3),
        _near(5, "tree h=3 HCHP origin share = tail beyond rank 6", 0.528, hchp.origin_coefficient, TOL3),
        _flag(5, "tree h=3 printed LCHP/HCHP origin share", 0.35, lchp.origin_coefficient,
              "inconsistent with tail beyond rank 6"),
        _near(5, "tree h=3 breakeven from printed coefficients", 1.28, printed, TOL2),
    ]


def check_figure_shape():
    worst = math.inf
    for kind, cost in (("grid", analytic.grid_cost), ("tree", analytic.tree_cost)):
        for h in (2, 3):
            for psi in PSI_GRID:
                pop = zipf_popularity(100, psi)
                gap = cost("HCHP", h, pop).total(5.0) - cost("LCHP", h, pop).total(5.0)
                worst = min(worst, gap)
    equal = 0.0
    for cost in (analytic.grid_cost, analytic.tree_cost):
        for h in (2, 3):
            pop = zipf_popularity(100, 0.0)
            equal = max(equal, abs(cost("HCHP", h, pop).total(5.0) - cost("LCHP", h, pop).total(5.0)))
    return [
        _bool(6, "LCHP total < HCHP total, psi in 0.2..2.0, grid+tree, h in {2,3}", worst > 0,
              f"min gap {worst:.4g}"),
        _near(6, "LCHP total == HCHP total at psi=0", 0.0, equal, 1e-12),
    ]


def check_oracle_equivalence(pop):
    out = []
    for kind in ("grid", "tree"):
        for h in (2, 3):
            size = 2 * h + 5 if kind == "grid" else h + 2
            for policy in ("LCHP", "HCHP", "greedy"):
                dev = analytic.crosscheck(policy, kind, h, pop, size=size)
                note = ""
                if dev > EXACT and kind == "grid":
                    note = (f"lattice side {size} < 4h+1 puts boundary nodes near corners into a "
                            "lower CCC tier")
                label = f"lattice n={size}" if kind == "grid" else f"binary tree depth {size}"
                out.append(_near(7, f"{policy} h={h} closed form vs simulator on {label}", 0.0, dev,
                                 EXACT, note))
    return out


def check_coefficients():
    expected = {2: [Fraction(6, 5), Fraction(5, 3), Fraction(2)],
                3: [Fraction(12, 7), Fraction(11, 5), Fraction(8, 3), Fraction(3)]}
    out = []
    for h, values in expected.items():
        got = [analytic.mu(i, h) for i in range(1, h + 2)]
        out.append(_bool(8, f"mu(., {h}) exact", got == values, ", ".join(map(str, got))))
    ok = True
    for h in range(0, 11):
        rows = lattice_half_diamond_rows(h)
        counts = [len(r) for r in rows]
        for i in range(1, h + 2):
            ok &= analytic.m(i + 1, h) - analytic.m(i, h) == counts[i - 1]
            ok &= analytic.mu(i, h) == Fraction(sum(rows[i - 1]), len(rows[i - 1]))
        ok &= analytic.m(h + 2, h) == (h + 1) ** 2 == sum(counts)
    out.append(_bool(8, "m totals (h+1)^2 and row profiles vs enumeration, h <= 10", ok))
    return out


def check_properties(seed: int = 2024):
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(200):
        n = int(rng.integers(2, 9))
        t = random_connected_graph(n, float(rng.uniform(0.1, 0.7)), rng)
        fast = betweenness_centrality(t).scores
        slow = brute_force_betweenness([t.neighbors(v) for v in t.nodes])
        bad += any(abs(a - float(b)) > 1e-9 for a, b in zip(fast, slow))
    out = [_near(9, "Brandes == brute force on 200 random graphs", 0, bad, 0)]

    zipf_ok = True
    for psi in (0, 0.5, 1, 1.5, 2):
        for n in (1, 10, 100, 10_000):
            p = zipf_popularity(n, psi).p
            zipf_ok &= abs(math.fsum(p) - 1) <= 1e-12
            zipf_ok &= bool(np.all(np.diff(p) < 0)) if psi > 0 else bool(np.all(np.diff(p) == 0))
    out.append(_bool(9, "Zipf normalization and monotonicity", zipf_ok))

    over_rounds = 0
    over_capacity = 0
    for _ in range(100):
        n = int(rng.integers(1, 41))
        buffers = [int(b) for b in rng.integers(0, 4, size=n)]
        t = random_connected_graph(n, float(rng.uniform(0.02, 0.3)), rng, buffers)
        h = int(rng.integers(1, 4))
        pl = algorithm1(t, int(rng.integers(1, 60)), h)
        over_rounds += pl.rounds > n
        for other in (pl, place_by_centrality(t, 50, h), place_greedy(t, [_first_user(t)], 50, h)):
            over_capacity += any(len(other.at(v)) > t.buffers[v] for v in t.nodes)
    out.append(_near(9, "Algorithm 1 rounds > |V| on 100 random graphs", 0, over_rounds, 0))
    out.append(_near(9, "capacity violations across policies", 0, over_capacity, 0))

    outside = 0
    for k in range(20):
        n = int(rng.integers(5, 30))
        t = random_connected_graph(n, 0.15, rng)
        h = int(rng.integers(1, 4))
        pop = zipf_popularity(int(rng.integers(5, 80)), float(rng.uniform(0.3, 1.8)))
        pl = algorithm1(t, len(pop), h)
        user = _first_user(t)
        exact = expected_cost(t, pl, user, h, pop).total(5.0)
        mc = monte_carlo_cost(t, pl, user, h, pop, 5.0, 100_000, seed=k)
        outside += abs(mc.total(5.0) - exact) > 3 * mc.stderr
    out.append(_near(9, "Monte Carlo outside 3 stderr (20 seeded scenarios)", 0, outside, 0))
    return out


def _first_user(t):
    return UserAttachment(0)


def check_determinism():
    config = ScenarioConfig(topology="grid", h=(2, 3), policies=("LCHP", "HCHP", "greedy"),
                            evaluator="both")
    with tempfile.TemporaryDirectory() as tmp:
        a = write_atomic(Path(tmp) / "a.csv", rows_to_csv(run_sweep(config))).read_bytes()
        b = write_atomic(Path(tmp) / "b.csv", rows_to_csv(run_sweep(config))).read_bytes()
    return [_bool(10, "sweep CSV byte-identical across runs", a == b, f"{len(a)} bytes")]


def verify_published_numbers(include_properties: bool = True) -> list:
    """Run the whole numeric acceptance table at psi=1, N=100, c_o=5."""
    pop = zipf_popularity(100, 1.0)
    checks = []
    checks += check_grid_h2(pop)
    checks += check_grid_h3(pop)
    checks += check_tree_h2(pop)
    checks += check_tree_breakeven(pop)
    checks += check_tree_h3(pop)
    checks += check_figure_shape()
    checks += check_oracle_equivalence(pop)
    checks += check_coefficients()
    if include_properties:
        checks += check_properties()
    checks += check_determinism()
    return checks
