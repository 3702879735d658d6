"""Random-walk matrices, Markov-time scaled adjacencies and time grids."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .graph import Graph

__all__ = [
    "MarkovModel",
    "MarkovTimeGrid",
    "ScaledAdjacency",
    "ScaledAdjacencyCache",
    "transition_matrix",
    "stationary_distribution",
    "scaled_adjacency",
    "matrix_exponential_scaled",
    "build_time_grid",
    "default_time_grid",
]


class MarkovModel(enum.Enum):
    DISCRETE = "discrete"
    CONTINUOUS = "continuous"

    @classmethod
    def from_string(cls, s: str) -> "MarkovModel":
        try:
            return cls(s.lower())
        except ValueError:
            raise DomainError(f"unknown Markov model {s!r}") from None


@dataclass(frozen=True)
class MarkovTimeGrid:
    """Strictly increasing non-negative Markov times."""

    times: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or t.size < 1:
            raise DomainError("time grid must hold at least one value")
        if t[0] < 0 or np.any(np.diff(t) <= 0):
            raise DomainError("times must be non-negative and strictly increasing")
        t.setflags(write=False)
        object.__setattr__(self, "times", t)

    def __len__(self) -> int:
        return self.times.size

    def restrict(self, upper: float) -> "MarkovTimeGrid":
        """Sub-grid of times <= upper (with a small absolute slack)."""
        sel = self.times[self.times <= upper + 1e-12]
        if sel.size == 0:
            raise DomainError(f"no grid point at or below t={upper}")
        return MarkovTimeGrid(sel)

    @classmethod
    def single(cls, t: float) -> "MarkovTimeGrid":
        return cls(np.array([float(t)]))


@dataclass(frozen=True)
class ScaledAdjacency:
    """The matrix A_t whose modularity is stability at Markov time t."""

    matrix: np.ndarray
    time: float
    model: MarkovModel


def transition_matrix(g: Graph) -> np.ndarray:
    """Row-stochastic random-walk matrix of the graph."""
    d = g.strengths
    if np.any(d <= 0):
        bad = g.node_labels[int(np.argmin(d))]
        raise DomainError(f"isolated node {bad!r} has no transitions")
    return g.adjacency / d[:, None]


def stationary_distribution(g: Graph) -> np.ndarray:
    if g.total_weight <= 0:
        raise DomainError("graph has no edges; stationary distribution undefined")
    return g.strengths / (2.0 * g.total_weight)


def matrix_exponential_scaled(g: Graph, t: float) -> np.ndarray:
    """e^{(M-I)t} by scaling-and-squaring with a truncated Taylor series."""
    if t < 0:
        raise DomainError("Markov time must be non-negative")
    m = transition_matrix(g)
    b = (m - np.eye(g.n)) * t
    return _expm(b)


def _expm(b: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(b, 1)
    squarings = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 0.5 else 0
    scaled = b / (2.0**squarings)
    result = np.eye(b.shape[0])
    term = np.eye(b.shape[0])
    # ||scaled|| <= 0.5, so term norms fall below 1e-16 well before k=25
    for k in range(1, 30):
        term = term @ scaled / k
        result = result + term
        if np.linalg.norm(term, 1) < 1e-16:
            break
    for _ in range(squarings):
        result = result @ result
    return result


def scaled_adjacency(
    g: Graph, t: float, model: MarkovModel = MarkovModel.DISCRETE
) -> ScaledAdjacency:
    """A_t = D M^t (discrete, interpolated for fractional t) or D e^{(M-I)t}."""
    if t < 0:
        raise DomainError("Markov time must be non-negative")
    d = g.strengths
    if model is MarkovModel.CONTINUOUS:
        mat = d[:, None] * matrix_exponential_scaled(g, t)
        np.clip(mat, 0.0, None, out=mat)  # kill round-off negatives
    else:
        m = transition_matrix(g)
        lo = math.floor(t)
        hi = math.ceil(t)
        a_lo = d[:, None] * np.linalg.matrix_power(m, lo)
        if hi == lo:
            mat = a_lo
        else:
            a_hi = d[:, None] * np.linalg.matrix_power(m, hi)
            mat = (hi - t) * a_lo + (t - lo) * a_hi
    mat = (mat + mat.T) / 2.0  # enforce the detailed-balance symmetry exactly
    return ScaledAdjacency(mat, float(t), model)


class ScaledAdjacencyCache:
    """Memoises A_t for one graph and model across many optimiser runs.

    Discrete integer powers of M are built incrementally, so a sweep over
    a large grid costs one matrix product per new integer time.
    """

    def __init__(self, g: Graph, model: MarkovModel = MarkovModel.DISCRETE):
        self.graph = g
        self.model = model
        self._at: dict[float, np.ndarray] = {}
        self._powers: dict[int, np.ndarray] = {}
        self._m = transition_matrix(g) if model is MarkovModel.DISCRETE else None

    def _power(self, k: int) -> np.ndarray:
        if k not in self._powers:
            if k == 0:
                self._powers[0] = np.eye(self.graph.n)
            elif k == 1:
                self._powers[1] = self._m
            elif (k - 1) in self._powers:
                self._powers[k] = self._powers[k - 1] @ self._m
            else:
                half = self._power(k // 2)
                rest = self._power(k - k // 2)
                self._powers[k] = half @ rest
        return self._powers[k]

    def get(self, t: float) -> np.ndarray:
        t = float(t)
        if t not in self._at:
            if self.model is MarkovModel.DISCRETE:
                d = self.graph.strengths
                lo, hi = math.floor(t), math.ceil(t)
                a_lo = d[:, None] * self._power(lo)
                if hi == lo:
                    mat = a_lo
                else:
                    a_hi = d[:, None] * self._power(hi)
                    mat = (hi - t) * a_lo + (t - lo) * a_hi
                mat = (mat + mat.T) / 2.0
            else:
                mat = scaled_adjacency(self.graph, t, self.model).matrix
            mat.setflags(write=False)
            self._at[t] = mat
        return self._at[t]

    def stack(self, grid: MarkovTimeGrid) -> np.ndarray:
        """(s, n, n) array of A_t over the grid."""
        return np.ascontiguousarray([self.get(t) for t in grid.times])


def build_time_grid(
    t_min: float,
    t_max: float,
    linear_step: float,
    linear_cutoff: float,
    log_points: int,
) -> MarkovTimeGrid:
    """Linear spacing up to a cutoff, then log spacing up to t_max."""
    if not (0 <= t_min < t_max):
        raise DomainError("need 0 <= t_min < t_max")
    if linear_step <= 0:
        raise DomainError("linear_step must be positive")
    if log_points < 0:
        raise DomainError("log_points must be non-negative")
    lin_end = min(linear_cutoff, t_max)
    count = int(round((lin_end - t_min) / linear_step))
    times = [t_min + i * linear_step for i in range(count + 1) if t_min + i * linear_step <= lin_end + 1e-12]
    if lin_end < t_max and log_points > 0:
        start = max(lin_end, linear_step)  # log scale needs a positive anchor
        logs = np.logspace(math.log10(start), math.log10(t_max), log_points + 1)[1:]
        times.extend(float(x) for x in logs)
    if not times or times[-1] < t_max - 1e-12:
        times.append(t_max)
    out: list[float] = []
    for t in times:
        if not out or t > out[-1] + 1e-12:
            out.append(t)
    return MarkovTimeGrid(np.array(out))


def default_time_grid() -> MarkovTimeGrid:
    """0.05 steps on [0, 2], then 100 log-spaced points up to 100."""
    return build_time_grid(0.0, 100.0, 0.05, 2.0, 100)
