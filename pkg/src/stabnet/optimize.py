"""Greedy stability optimisers, the Louvain hybrid and vertex-mover refinement."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .graph import Graph, Partition
from .kernels import min_candidate
from .markov import (
    MarkovModel,
    MarkovTimeGrid,
    ScaledAdjacencyCache,
    default_time_grid,
)
from .stability import (
    CommunityMatrixSet,
    StabilityScore,
    StabilityVector,
    community_matrices,
    delta_stability,
    evaluate_partition,
    stability_vector,
)

__all__ = [
    "OptimizerConfig",
    "OptimizationResult",
    "gso",
    "gso_single_time",
    "rgso",
    "msgso",
    "louvain",
    "lso",
    "refine_vertex_mover",
    "OPTIMIZERS",
]

_NEG_INF = -np.inf


@dataclass
class OptimizerConfig:
    model: MarkovModel = MarkovModel.DISCRETE
    grid: MarkovTimeGrid | None = None  # None selects the default sweep grid
    seed: int = 0
    msgso_k: int = 2
    tie_break: str = "lexicographic"
    refine_max_passes: int = 10

    def __post_init__(self):
        if self.msgso_k < 1:
            raise DomainError("msgso_k must be >= 1")
        if self.tie_break != "lexicographic":
            raise DomainError(f"unknown tie-break rule {self.tie_break!r}")

    def resolved_grid(self) -> MarkovTimeGrid:
        return self.grid if self.grid is not None else default_time_grid()


@dataclass(frozen=True)
class OptimizationResult:
    best_partition: Partition
    best_score: StabilityScore
    best_vector: StabilityVector
    merge_history: tuple[tuple[tuple[int, int], float], ...]
    communities_at_best: int

    @property
    def score(self) -> float:
        return self.best_score.value


def _check_input(g: Graph) -> None:
    off = g.adjacency.copy()
    np.fill_diagonal(off, 0.0)
    if not np.any(off > 0):
        raise DomainError("graph has no inter-node edges")
    if not g.is_connected():
        warnings.warn("optimising a disconnected graph", stacklevel=3)


class _GreedyState:
    """Shared bookkeeping for the agglomerative optimisers."""

    def __init__(self, g: Graph, grid: MarkovTimeGrid, model: MarkovModel,
                 cache: ScaledAdjacencyCache | None):
        self.cms = community_matrices(g, Partition.singletons(g.n), grid, model, cache)
        self.grid = grid
        self.comm_nodes: list[list[int]] = [[i] for i in range(g.n)]
        self.qv = stability_vector(self.cms).values.copy()
        mask = (self.cms.e_stack > 0).any(axis=0)
        np.fill_diagonal(mask, False)
        self.mask = mask
        self.n = g.n
        self.history: list[tuple[tuple[int, int], float]] = []
        self.best_q = float(self.qv.min())
        self.best_partition = Partition.singletons(g.n)
        self.best_vector = self.qv.copy()

    @property
    def c(self) -> int:
        return self.cms.community_count

    def snapshot(self) -> Partition:
        assign = np.empty(self.n, dtype=np.intp)
        for idx, nodes in enumerate(self.comm_nodes):
            assign[nodes] = idx
        return Partition(assign)

    def merge(self, i: int, j: int, q_loop: float) -> None:
        """Merge communities i and j (matrix indices), tracking the best."""
        i, j = (i, j) if i < j else (j, i)
        dqv = delta_stability(self.cms, i, j)
        self.cms.merge(i, j)
        self.qv += dqv
        self.comm_nodes[i].extend(self.comm_nodes[j])
        del self.comm_nodes[j]
        self.mask[i] |= self.mask[j]
        self.mask[:, i] |= self.mask[:, j]
        self.mask = np.delete(np.delete(self.mask, j, axis=0), j, axis=1)
        np.fill_diagonal(self.mask, False)
        self.history.append(((i, j), q_loop))
        if q_loop > self.best_q:
            self.best_q = q_loop
            self.best_partition = self.snapshot()
            self.best_vector = self.qv.copy()

    def result(self) -> OptimizationResult:
        return OptimizationResult(
            best_partition=self.best_partition,
            best_score=StabilityScore(self.best_q),
            best_vector=StabilityVector(self.best_vector, self.grid),
            merge_history=tuple(self.history),
            communities_at_best=self.best_partition.community_count,
        )

    def candidate_table(self, rows: np.ndarray | None = None) -> np.ndarray:
        """Min-over-time candidate score for each (row, col) pair; -inf where
        the pair is unconnected or on the diagonal."""
        e = self.cms.e_stack
        a = self.cms.a
        if rows is None:
            table = min_candidate(e, a, a, self.qv)
            table[~self.mask] = _NEG_INF
        else:
            sub = np.ascontiguousarray(e[:, rows, :])
            table = min_candidate(sub, np.ascontiguousarray(a[rows]), a, self.qv)
            table[~self.mask[rows]] = _NEG_INF
        return table


def gso(
    g: Graph,
    cfg: OptimizerConfig | None = None,
    cache: ScaledAdjacencyCache | None = None,
) -> OptimizationResult:
    """Greedy stability optimisation over a Markov-time window.

    Starts from singletons, always merges the connected pair whose
    merged partition has the highest windowed stability, runs down to a
    single community and returns the best partition seen.
    """
    cfg = cfg or OptimizerConfig()
    _check_input(g)
    state = _GreedyState(g, cfg.resolved_grid(), cfg.model, cache)
    while state.c > 1:
        table = state.candidate_table()
        table[np.tril_indices(state.c)] = _NEG_INF
        flat = int(np.argmax(table))
        i, j = divmod(flat, state.c)
        if table[i, j] == _NEG_INF:
            warnings.warn("no connected community pair left; stopping early")
            break
        state.merge(i, j, float(table[i, j]))
    return state.result()


def gso_single_time(
    g: Graph,
    t: float,
    model: MarkovModel = MarkovModel.DISCRETE,
    cache: ScaledAdjacencyCache | None = None,
) -> OptimizationResult:
    """Greedy stability optimisation at a single Markov time.

    Scalar variation bookkeeping; merge sequence matches gso on the
    single-point grid {t}.
    """
    if t < 0:
        raise DomainError("Markov time must be non-negative")
    _check_input(g)
    grid = MarkovTimeGrid.single(t)
    cms = community_matrices(g, Partition.singletons(g.n), grid, model, cache)
    comm_nodes: list[list[int]] = [[i] for i in range(g.n)]
    e = cms.e_stack[0]
    mask = e > 0
    np.fill_diagonal(mask, False)
    q_cur = float(np.trace(e) - cms.a @ cms.a)
    best_q = q_cur
    best_partition = Partition.singletons(g.n)
    history: list[tuple[tuple[int, int], float]] = []

    def snapshot() -> Partition:
        assign = np.empty(g.n, dtype=np.intp)
        for idx, nodes in enumerate(comm_nodes):
            assign[nodes] = idx
        return Partition(assign)

    while cms.community_count > 1:
        a = cms.a
        dq = 2.0 * (e - np.outer(a, a))
        dq[~mask] = _NEG_INF
        dq[np.tril_indices(cms.community_count)] = _NEG_INF
        flat = int(np.argmax(dq))
        i, j = divmod(flat, cms.community_count)
        if dq[i, j] == _NEG_INF:
            warnings.warn("no connected community pair left; stopping early")
            break
        q_cur += float(dq[i, j])
        cms.merge(i, j)
        e = cms.e_stack[0]
        comm_nodes[i].extend(comm_nodes[j])
        del comm_nodes[j]
        mask[i] |= mask[j]
        mask[:, i] |= mask[:, j]
        mask = np.delete(np.delete(mask, j, axis=0), j, axis=1)
        np.fill_diagonal(mask, False)
        history.append(((i, j), q_cur))
        if q_cur > best_q:
            best_q = q_cur
            best_partition = snapshot()
    return OptimizationResult(
        best_partition=best_partition,
        best_score=StabilityScore(best_q),
        best_vector=StabilityVector(np.array([best_q]), grid),
        merge_history=tuple(history),
        communities_at_best=best_partition.community_count,
    )


def rgso(
    g: Graph,
    cfg: OptimizerConfig | None = None,
    cache: ScaledAdjacencyCache | None = None,
) -> OptimizationResult:
    """Randomised GSO: each pass scores only pairs incident to randomly
    drawn communities (one draw in the first half of the merging, two in
    the second half).  Deterministic for a fixed seed."""
    cfg = cfg or OptimizerConfig()
    _check_input(g)
    rng = np.random.default_rng(cfg.seed)
    state = _GreedyState(g, cfg.resolved_grid(), cfg.model, cache)
    n0 = g.n
    while state.c > 1:
        k = 2 if state.c < n0 / 2 else 1
        k = min(k, state.c)
        rows = None
        for _ in range(20):
            draw = np.sort(rng.choice(state.c, size=k, replace=False))
            if state.mask[draw].any():
                rows = draw
                break
        if rows is None:
            # drawn communities kept missing connected partners; fall back
            # to a full scan so the pass can still make progress
            full = state.candidate_table()
            full[np.tril_indices(state.c)] = _NEG_INF
            flat = int(np.argmax(full))
            i, j = divmod(flat, state.c)
            if full[i, j] == _NEG_INF:
                warnings.warn("no connected community pair left; stopping early")
                break
            state.merge(i, j, float(full[i, j]))
            continue
        table = state.candidate_table(rows)
        flat = int(np.argmax(table))
        r, j = divmod(flat, state.c)
        i = int(rows[r])
        state.merge(i, j, float(table[r, j]))
    return state.result()


def msgso(
    g: Graph,
    cfg: OptimizerConfig | None = None,
    cache: ScaledAdjacencyCache | None = None,
) -> OptimizationResult:
    """Multi-step GSO: merge up to k non-overlapping community pairs per
    pass instead of one.

    A pass scans connected pairs in index order and keeps only pairs
    whose candidate score strictly beats the best stability reached so
    far (the threshold also rises within the scan), then merges up to k
    of those, best first, skipping pairs that share a community.  When
    no pair improves on the best known stability the algorithm stops
    and returns that best.  The improvement filter matters: it keeps a
    pass from padding its quota with poor pairs when fewer than k
    genuinely good disjoint merges exist, which would wreck chained
    consolidations in hierarchical graphs.  With k = 1 the merge
    sequence is the prefix of gso's that ends at the peak.
    """
    cfg = cfg or OptimizerConfig()
    _check_input(g)
    state = _GreedyState(g, cfg.resolved_grid(), cfg.model, cache)
    k = cfg.msgso_k
    while state.c > 1:
        c = state.c
        table = state.candidate_table()
        table[np.tril_indices(c)] = _NEG_INF
        ii, jj = np.nonzero(table > _NEG_INF)
        if ii.size == 0:
            warnings.warn("no connected community pair left; stopping early")
            break
        # row-major scan with a rising threshold; strict > keeps the
        # lexicographically first of tied pairs
        vals = table[ii, jj]
        run = np.maximum.accumulate(np.concatenate(([state.best_q], vals)))[:-1]
        keep = np.nonzero(vals > run)[0]
        if keep.size == 0:
            break
        order = keep[::-1]
        remap: list[int | None] = list(range(c))
        used: set[int] = set()
        merges = 0
        for idx in order:
            if merges >= k:
                break
            i, j = int(ii[idx]), int(jj[idx])
            if i in used or j in used:
                continue
            ci, cj = remap[i], remap[j]
            assert ci is not None and cj is not None
            lo, hi = (ci, cj) if ci < cj else (cj, ci)
            dqv = delta_stability(state.cms, lo, hi)
            q_loop = float((state.qv + dqv).min())
            state.merge(lo, hi, q_loop)
            for x in range(c):
                r = remap[x]
                if r is None:
                    continue
                if r == hi:
                    remap[x] = lo
                elif r > hi:
                    remap[x] = r - 1
            used.add(i)
            used.add(j)
            merges += 1
    return state.result()


def louvain(g: Graph, seed: int = 0) -> Partition:
    """Two-phase Louvain modularity optimisation on a weighted graph.

    Self-loop weights count once in the strengths, matching the Graph
    convention, so it can run directly on scaled adjacencies and the
    quantity it maximises is exactly their stability.  Returns the
    coarsest partition.
    """
    _check_input_louvain(g)
    rng = np.random.default_rng(seed)
    adj = g.adjacency.copy()
    n = g.n
    orig_to_level = np.arange(n)
    while True:
        nl = adj.shape[0]
        d = adj.sum(axis=1)
        two_m = d.sum()
        m = two_m / 2.0
        comm = np.arange(nl)
        sigma_tot = d.copy()
        moved_any = True
        while moved_any:
            moved_any = False
            for u in rng.permutation(nl):
                w = adj[u]
                neigh = np.nonzero(w > 0)[0]
                neigh = neigh[neigh != u]
                if neigh.size == 0:
                    continue
                cu = int(comm[u])
                link = np.bincount(comm[neigh], weights=w[neigh], minlength=nl)
                sigma_tot[cu] -= d[u]
                base = link[cu]
                best_gain, best_c = 0.0, cu
                for cv in sorted(set(int(x) for x in comm[neigh])):
                    if cv == cu:
                        continue
                    gain = (link[cv] - base) / m - d[u] * (
                        sigma_tot[cv] - sigma_tot[cu]
                    ) / (2.0 * m * m)
                    if gain > best_gain + 1e-12:
                        best_gain, best_c = gain, cv
                sigma_tot[best_c] += d[u]
                if best_c != cu:
                    comm[u] = best_c
                    moved_any = True
        comm = Partition.from_labels(comm.tolist()).assignment
        c = int(comm.max()) + 1
        orig_to_level = comm[orig_to_level]
        if c == nl:
            break
        # contract: block sums; the diagonal block sum is already the
        # correct self-loop weight under the loops-count-once convention
        flat = (comm[:, None] * c + comm[None, :]).ravel()
        adj = np.bincount(flat, weights=adj.ravel(), minlength=c * c).reshape(c, c)
    return Partition.from_labels(orig_to_level.tolist())


def _check_input_louvain(g: Graph) -> None:
    if g.total_weight <= 0:
        raise DomainError("graph has no edges")
    off = g.adjacency.copy()
    np.fill_diagonal(off, 0.0)
    if not np.any(off > 0):
        raise DomainError("graph has no inter-node edges")


def lso(
    g: Graph,
    t: float,
    model: MarkovModel = MarkovModel.DISCRETE,
    seed: int = 0,
    cache: ScaledAdjacencyCache | None = None,
) -> OptimizationResult:
    """Louvain applied to the graph with adjacency A_t, scored as stability."""
    if t < 0:
        raise DomainError("Markov time must be non-negative")
    if cache is None:
        cache = ScaledAdjacencyCache(g, model)
    at = cache.get(t)
    off = at.copy()
    np.fill_diagonal(off, 0.0)
    if not np.any(off > 0):
        # A_0 is diagonal: no move can improve, the partition stays singletons
        p = Partition.singletons(g.n)
    else:
        g_t = Graph(g.node_labels, at)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # A_t graphs flag spurious disconnection
            p = louvain(g_t, seed)
    vec, score = evaluate_partition(g, p, MarkovTimeGrid.single(t), model, cache=cache)
    return OptimizationResult(
        best_partition=p,
        best_score=score,
        best_vector=vec,
        merge_history=(),
        communities_at_best=p.community_count,
    )


def refine_vertex_mover(
    g: Graph,
    p: Partition,
    cfg: OptimizerConfig | None = None,
    cache: ScaledAdjacencyCache | None = None,
) -> Partition:
    """Move boundary nodes between neighbouring communities while the
    windowed stability strictly improves (one move per sweep, at most
    ``cfg.refine_max_passes`` sweeps).  Empty communities are compacted."""
    cfg = cfg or OptimizerConfig()
    if len(p) != g.n:
        raise DomainError("partition does not cover the graph")
    grid = cfg.resolved_grid()
    if cache is None:
        cache = ScaledAdjacencyCache(g, cfg.model)
    a_stack = cache.stack(grid)  # (s, n, n)
    assign = p.assignment.copy()
    c = p.community_count
    cms = community_matrices(g, p, grid, cfg.model, cache)
    qv = stability_vector(cms).values.copy()
    a = cms.a.copy()
    two_m = 2.0 * g.total_weight
    m = g.total_weight
    w_node = g.strengths / two_m
    ind = np.zeros((g.n, c))
    ind[np.arange(g.n), assign] = 1.0
    grp = a_stack @ ind  # (s, n, c): per-node strength toward each community
    off = g.adjacency.copy()
    np.fill_diagonal(off, 0.0)

    for _ in range(cfg.refine_max_passes):
        q_cur = float(qv.min())
        best_gain = 0.0
        best_move = None
        for u in range(g.n):
            x = int(assign[u])
            neigh_comms = sorted(set(int(assign[v]) for v in np.nonzero(off[u] > 0)[0]))
            r_ux = grp[:, u, x] - a_stack[:, u, u]
            for y in neigh_comms:
                if y == x:
                    continue
                delta = (
                    (grp[:, u, y] - r_ux) / m
                    - 2.0 * w_node[u] * (a[y] - a[x])
                    - 2.0 * w_node[u] ** 2
                )
                gain = float((qv + delta).min()) - q_cur
                if gain > best_gain + 1e-12:
                    best_gain = gain
                    best_move = (u, x, y, delta)
        if best_move is None:
            break
        u, x, y, delta = best_move
        qv += delta
        a[x] -= w_node[u]
        a[y] += w_node[u]
        grp[:, :, x] -= a_stack[:, :, u]
        grp[:, :, y] += a_stack[:, :, u]
        assign[u] = y
    return Partition.from_labels(assign.tolist())


OPTIMIZERS = ("gso", "gso-single", "rgso", "msgso", "lso")
