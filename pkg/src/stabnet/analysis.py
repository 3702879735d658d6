"""Partition comparison (NMI), Markov-time sweeps and plateau detection."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .graph import Graph, Partition
from .markov import MarkovTimeGrid, ScaledAdjacencyCache
from .optimize import (
    OPTIMIZERS,
    OptimizerConfig,
    gso,
    gso_single_time,
    lso,
    msgso,
    rgso,
)

__all__ = [
    "nmi",
    "sweep",
    "detect_plateaus",
    "SweepRecord",
    "Plateau",
]


def nmi(a: Partition, b: Partition) -> float:
    """Normalised mutual information between two partitions, in [0, 1].

    Degenerate single-community partitions score 0 by convention;
    identical partitions with at least two communities score 1.
    """
    if len(a) != len(b):
        raise DomainError(f"partitions cover {len(a)} vs {len(b)} nodes")
    if a.community_count == 1 or b.community_count == 1:
        return 0.0
    n = len(a)
    ca, cb = a.community_count, b.community_count
    conf = np.zeros((ca, cb))
    np.add.at(conf, (a.assignment, b.assignment), 1.0)
    rows = conf.sum(axis=1)
    cols = conf.sum(axis=0)
    num = 0.0
    for i in range(ca):
        for j in range(cb):
            cij = conf[i, j]
            if cij > 0:
                num += cij * math.log(cij * n / (rows[i] * cols[j]))
    num *= -2.0
    den = float(rows @ np.log(rows / n) + cols @ np.log(cols / n))
    if den == 0.0:
        return 0.0
    val = num / den
    return min(1.0, max(0.0, val))


@dataclass
class SweepRecord:
    time: float
    community_count: int
    stability: float
    nmi_prev: float | None
    partition: Partition = field(repr=False)


@dataclass
class Plateau:
    time_start: float
    time_end: float
    community_count: int
    representative_partition: Partition
    mean_nmi: float
    n_points: int


def _run_point(args) -> tuple[Partition, float]:
    g, optimizer, t, window, cfg = args
    return _run_point_cached(g, optimizer, t, window, cfg, None)


def _run_point_cached(
    g: Graph,
    optimizer: str,
    t: float,
    window: MarkovTimeGrid,
    cfg: OptimizerConfig,
    cache: ScaledAdjacencyCache | None,
) -> tuple[Partition, float]:
    if optimizer == "gso":
        res = gso(g, OptimizerConfig(cfg.model, window, cfg.seed), cache)
    elif optimizer == "rgso":
        res = rgso(g, OptimizerConfig(cfg.model, window, cfg.seed), cache)
    elif optimizer == "msgso":
        res = msgso(
            g, OptimizerConfig(cfg.model, window, cfg.seed, cfg.msgso_k), cache
        )
    elif optimizer == "gso-single":
        res = gso_single_time(g, t, cfg.model, cache)
    elif optimizer == "lso":
        res = lso(g, t, cfg.model, cfg.seed, cache)
    else:
        raise DomainError(f"unknown optimiser {optimizer!r}; choose from {OPTIMIZERS}")
    return res.best_partition, res.score


def sweep(
    g: Graph,
    eval_times: MarkovTimeGrid,
    optimizer: str = "gso-single",
    cfg: OptimizerConfig | None = None,
    jobs: int = 1,
) -> list[SweepRecord]:
    """Run the chosen optimiser at every evaluation time, ascending.

    Windowed optimisers (gso, rgso, msgso) use the sub-grid of
    evaluation times up to t as their stability window; single-time
    variants (gso-single, lso) run at t alone.  Each record carries the
    NMI against the previous time's partition.
    """
    cfg = cfg or OptimizerConfig()
    if optimizer not in OPTIMIZERS:
        raise DomainError(f"unknown optimiser {optimizer!r}; choose from {OPTIMIZERS}")
    windowed = optimizer in ("gso", "rgso", "msgso")
    tasks = []
    for t in eval_times.times:
        window = eval_times.restrict(t) if windowed else MarkovTimeGrid.single(t)
        tasks.append((float(t), window))
    results: list[tuple[Partition, float]] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(
                pool.map(_run_point, [(g, optimizer, t, w, cfg) for t, w in tasks])
            )
    else:
        cache = ScaledAdjacencyCache(g, cfg.model)
        for t, window in tasks:
            results.append(_run_point_cached(g, optimizer, t, window, cfg, cache))
    records: list[SweepRecord] = []
    prev: Partition | None = None
    for (t, _), (part, score) in zip(tasks, results):
        val = nmi(prev, part) if prev is not None else None
        records.append(SweepRecord(t, part.community_count, score, val, part))
        prev = part
    return records


def detect_plateaus(
    records: list[SweepRecord],
    nmi_threshold: float = 0.99,
    min_points: int = 3,
) -> list[Plateau]:
    """Maximal stretches of constant community count with near-1 NMI
    between successive records, ranked by log-time span (descending)."""
    if not records:
        raise DomainError("no sweep records given")
    if not (0 < nmi_threshold <= 1):
        raise DomainError("nmi_threshold must lie in (0, 1]")
    positive = [r.time for r in records if r.time > 0]
    t_floor = min(positive) if positive else 1.0
    runs: list[list[SweepRecord]] = []
    cur: list[SweepRecord] = [records[0]]
    for rec in records[1:]:
        same = rec.community_count == cur[-1].community_count
        steady = rec.nmi_prev is not None and rec.nmi_prev >= nmi_threshold
        if same and steady:
            cur.append(rec)
        else:
            runs.append(cur)
            cur = [rec]
    runs.append(cur)
    plateaus: list[Plateau] = []
    for run in runs:
        if len(run) < min_points:
            continue
        inner = [r.nmi_prev for r in run[1:] if r.nmi_prev is not None]
        plateaus.append(
            Plateau(
                time_start=run[0].time,
                time_end=run[-1].time,
                community_count=run[0].community_count,
                representative_partition=run[0].partition,
                mean_nmi=float(np.mean(inner)) if inner else 1.0,
                n_points=len(run),
            )
        )

    def span(p: Plateau) -> float:
        lo = max(p.time_start, t_floor)
        hi = max(p.time_end, lo)
        return math.log(hi / lo) if hi > 0 else 0.0

    plateaus.sort(key=lambda p: (-span(p), -p.n_points, p.time_start))
    return plateaus
