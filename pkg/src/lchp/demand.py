"""Content catalog and Zipf request popularity.

Contents are identified by popularity rank, 1 being the most requested.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidParameterError

__all__ = [
    "Catalog",
    "PopularityVector",
    "zipf_popularity",
    "tail_mass",
    "head_mass",
    "sample_request",
    "sample_requests",
    "load_popularity_csv",
]

DEFAULT_CATALOG_SIZE = 100


@dataclass(frozen=True)
class Catalog:
    n_contents: int = DEFAULT_CATALOG_SIZE
    psi: float = 1.0

    def __post_init__(self):
        if self.n_contents < 1:
            raise InvalidParameterError(f"catalog size must be >= 1, got {self.n_contents}")
        if self.psi < 0:
            raise InvalidParameterError(f"Zipf skewness must be >= 0, got {self.psi}")

    def popularity(self) -> "PopularityVector":
        return zipf_popularity(self.n_contents, self.psi)


class PopularityVector:
    """Request probabilities indexed by rank (``pop[1]`` is the top content).

    The underlying array ``p`` is 0-indexed and read-only.
    """

    __slots__ = ("p", "_cumulative")

    def __init__(self, probabilities):
        p = np.array(probabilities, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise InvalidParameterError("popularity needs at least one probability")
        if np.any(p <= 0):
            raise InvalidParameterError("probabilities must be positive")
        if np.any(np.diff(p) > 0):
            raise InvalidParameterError("probabilities must be non-increasing in rank")
        if abs(math.fsum(p) - 1.0) > 1e-12:
            raise InvalidParameterError(f"probabilities sum to {math.fsum(p)!r}, not 1")
        p.setflags(write=False)
        self.p = p
        cumulative = np.array([0.0] + list(np.cumsum(p)))
        cumulative.setflags(write=False)
        self._cumulative = cumulative

    def __len__(self):
        return self.p.size

    def __getitem__(self, rank: int) -> float:
        if not 1 <= rank <= self.p.size:
            raise IndexError(f"rank {rank} outside 1..{self.p.size}")
        return float(self.p[rank - 1])

    def __repr__(self):
        head = ", ".join(f"{x:.4f}" for x in self.p[:4])
        return f"PopularityVector(N={self.p.size}, p=[{head}{', ...' if self.p.size > 4 else ''}])"

    @property
    def n_contents(self) -> int:
        return self.p.size

    def block(self, first: int, last: int) -> float:
        """Total probability of ranks ``first..last`` inclusive, clipped to the catalog."""
        first = max(first, 1)
        last = min(last, self.p.size)
        if last < first:
            return 0.0
        return math.fsum(self.p[first - 1:last])


def zipf_popularity(n_contents: int, psi: float) -> PopularityVector:
    """Zipf law ``p_k = k**-psi / sum_j j**-psi`` over ranks ``1..n_contents``.

    The normalizing sum runs over the whole catalog, which is what gives
    ``p_1 ~= 0.193`` for ``N=100, psi=1``.
    """
    if n_contents < 1:
        raise InvalidParameterError(f"catalog size must be >= 1, got {n_contents}")
    if psi < 0:
        raise InvalidParameterError(f"Zipf skewness must be >= 0, got {psi}")
    weights = np.arange(1, n_contents + 1, dtype=float) ** (-float(psi))
    return PopularityVector(weights / math.fsum(weights))


def head_mass(pop: PopularityVector, k: int) -> float:
    """Probability of the ``k`` most popular contents."""
    if not 0 <= k <= len(pop):
        raise InvalidParameterError(f"k must be in 0..{len(pop)}, got {k}")
    return math.fsum(pop.p[:k])


def tail_mass(pop: PopularityVector, k: int) -> float:
    """Probability of all contents ranked strictly below ``k``."""
    if not 0 <= k <= len(pop):
        raise InvalidParameterError(f"k must be in 0..{len(pop)}, got {k}")
    return math.fsum(pop.p[k:])


def sample_request(pop: PopularityVector, rng: np.random.Generator) -> int:
    """Draw one content rank from ``pop`` using the caller's generator."""
    return int(sample_requests(pop, rng, 1)[0])


def sample_requests(pop: PopularityVector, rng: np.random.Generator, size: int) -> np.ndarray:
    """Vectorized :func:`sample_request`; returns 1-based ranks."""
    u = rng.random(size)
    idx = np.searchsorted(pop._cumulative[1:], u * pop._cumulative[-1], side="right")
    return np.minimum(idx, len(pop) - 1) + 1


def load_popularity_csv(stream) -> PopularityVector:
    """Read ``rank,probability`` rows, renormalizing if the sum drifts past 1e-9."""
    rows = []
    for row in csv.reader(line for line in stream if line.strip() and not line.lstrip().startswith("#")):
        if row[0].strip().lower() == "rank":
            continue
        try:
            rows.append((int(row[0]), float(row[1])))
        except (ValueError, IndexError):
            raise InvalidParameterError(f"bad popularity row {row!r}") from None
    if not rows:
        raise InvalidParameterError("popularity file is empty")
    rows.sort()
    ranks = [r for r, _ in rows]
    if ranks != list(range(1, len(rows) + 1)):
        raise InvalidParameterError("ranks must be exactly 1..N")
    p = np.array([x for _, x in rows])
    total = math.fsum(p)
    if abs(total - 1.0) > 1e-9:
        warnings.warn(f"popularity sums to {total}; renormalizing", stacklevel=2)
    return PopularityVector(p / total)
