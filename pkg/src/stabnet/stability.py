"""Clustered community matrices over a Markov-time grid and the stability score."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .graph import Graph, Partition
from .markov import MarkovModel, MarkovTimeGrid, ScaledAdjacencyCache

__all__ = [
    "CommunityMatrixSet",
    "StabilityVector",
    "StabilityScore",
    "community_matrices",
    "stability_vector",
    "stability",
    "delta_stability",
    "merge_communities",
    "evaluate_partition",
]

_CONS_TOL = 1e-9


@dataclass(frozen=True)
class StabilityVector:
    """Per-grid-time stability values Q_{S_t}."""

    values: np.ndarray
    grid: MarkovTimeGrid


@dataclass(frozen=True)
class StabilityScore:
    """Minimum of a stability vector over a time window."""

    value: float


class CommunityMatrixSet:
    """Link-fraction matrices e_t for every grid time, merged in place.

    ``e_stack`` has shape (s, c, c); ``a`` holds the community strength
    fractions, identical for all times because every A_t conserves row
    sums.  One optimisation run owns one set.
    """

    def __init__(self, e_stack: np.ndarray, a: np.ndarray, grid: MarkovTimeGrid):
        self.e_stack = e_stack
        self.a = a
        self.grid = grid
        row_sums = e_stack.sum(axis=2)
        if not np.allclose(row_sums, a[None, :], atol=_CONS_TOL):
            raise DomainError("community matrix row sums deviate from a")
        if not np.allclose(e_stack.sum(axis=(1, 2)), 1.0, atol=_CONS_TOL):
            raise DomainError("community matrices must each sum to 1")

    @property
    def community_count(self) -> int:
        return self.a.size

    def copy(self) -> "CommunityMatrixSet":
        return CommunityMatrixSet(self.e_stack.copy(), self.a.copy(), self.grid)

    def merge(self, i: int, j: int) -> None:
        """Fold community j into i, shrinking every matrix by one."""
        c = self.community_count
        if i == j or not (0 <= i < c and 0 <= j < c):
            raise DomainError(f"cannot merge communities {i} and {j} (c={c})")
        e = self.e_stack
        e[:, i, :] += e[:, j, :]
        e[:, :, i] += e[:, :, j]
        self.e_stack = np.ascontiguousarray(
            np.delete(np.delete(e, j, axis=1), j, axis=2)
        )
        a = self.a.copy()
        a[i] += a[j]
        self.a = np.delete(a, j)


def community_matrices(
    g: Graph,
    p: Partition,
    grid: MarkovTimeGrid,
    model: MarkovModel = MarkovModel.DISCRETE,
    cache: ScaledAdjacencyCache | None = None,
) -> CommunityMatrixSet:
    """Accumulate e_t = (1/2m) sum_{u in i, v in j} A_t[u, v] for each grid time."""
    if len(p) != g.n:
        raise DomainError(f"partition covers {len(p)} nodes, graph has {g.n}")
    if cache is None:
        cache = ScaledAdjacencyCache(g, model)
    elif cache.graph is not g or cache.model is not model:
        raise DomainError("cache was built for a different graph or model")
    c = p.community_count
    two_m = 2.0 * g.total_weight
    if two_m <= 0:
        raise DomainError("graph has no edges")
    flat = (p.assignment[:, None] * c + p.assignment[None, :]).ravel()
    s = len(grid)
    e_stack = np.empty((s, c, c))
    for k, t in enumerate(grid.times):
        at = cache.get(t)
        e_stack[k] = np.bincount(flat, weights=at.ravel(), minlength=c * c).reshape(c, c) / two_m
    a = np.bincount(p.assignment, weights=g.strengths, minlength=c) / two_m
    return CommunityMatrixSet(e_stack, a, grid)


def stability_vector(cms: CommunityMatrixSet) -> StabilityVector:
    """Q_{S_t} = sum_i (e_{t,ii} - a_i^2) for every grid time."""
    traces = np.einsum("tii->t", cms.e_stack)
    values = traces - float(cms.a @ cms.a)
    return StabilityVector(values, cms.grid)


def stability(
    v: StabilityVector,
    lower: float | None = None,
    upper: float | None = None,
) -> StabilityScore:
    """Minimum stability over grid times within [lower, upper]."""
    t = v.grid.times
    lo = t[0] if lower is None else lower
    hi = t[-1] if upper is None else upper
    sel = (t >= lo - 1e-12) & (t <= hi + 1e-12)
    if not sel.any():
        raise DomainError(f"window [{lo}, {hi}] contains no grid time")
    return StabilityScore(float(v.values[sel].min()))


def delta_stability(cms: CommunityMatrixSet, i: int, j: int) -> np.ndarray:
    """Per-time stability change from merging communities i and j."""
    c = cms.community_count
    if i == j or not (0 <= i < c and 0 <= j < c):
        raise DomainError(f"invalid community pair ({i}, {j}) for c={c}")
    return 2.0 * (cms.e_stack[:, i, j] - cms.a[i] * cms.a[j])


def merge_communities(cms: CommunityMatrixSet, i: int, j: int) -> CommunityMatrixSet:
    """In-place merge of j into i; returns the same (mutated) set."""
    cms.merge(i, j)
    return cms


def evaluate_partition(
    g: Graph,
    p: Partition,
    grid: MarkovTimeGrid,
    model: MarkovModel = MarkovModel.DISCRETE,
    lower: float | None = None,
    upper: float | None = None,
    cache: ScaledAdjacencyCache | None = None,
) -> tuple[StabilityVector, StabilityScore]:
    cms = community_matrices(g, p, grid, model, cache)
    vec = stability_vector(cms)
    return vec, stability(vec, lower, upper)
