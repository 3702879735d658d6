"""Synthetic benchmark generators: the 5^k hierarchical scale-free network
and the two-level homogeneous-degree network."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GenerationError
from .graph import Graph

__all__ = ["RBParams", "HParams", "ravasz_barabasi", "arenas_h"]


@dataclass(frozen=True)
class RBParams:
    steps: int = 3

    def __post_init__(self):
        if self.steps < 1:
            raise DomainError("steps must be >= 1")


@dataclass(frozen=True)
class HParams:
    """Per-node degree quotas for the 256-node two-level network."""

    z_in1: int = 13
    z_in2: int = 4
    z_out: int = 1
    seed: int = 0
    group_size: int = 16
    groups_per_super: int = 4
    supers: int = 4

    @property
    def n(self) -> int:
        return self.group_size * self.groups_per_super * self.supers

    def __post_init__(self):
        if not (0 < self.z_in1 < self.group_size):
            raise DomainError("z_in1 must fit inside a level-1 group")
        pool2 = self.group_size * (self.groups_per_super - 1)
        if not (0 < self.z_in2 <= pool2):
            raise DomainError("z_in2 must fit inside the level-2 pool")
        if self.z_out < 1:
            raise DomainError("z_out must be >= 1")


def ravasz_barabasi(steps: int = 3) -> Graph:
    """Deterministic hierarchical network of 5^steps nodes.

    Step 1 is a 5-node motif (centre plus a 4-cycle of corners, centre
    linked to all corners).  Each further step surrounds the block with 4
    replicas and links the grand centre to every replica node whose
    lineage is all-corner.
    """
    if steps < 1:
        raise DomainError("steps must be >= 1")
    edges: set[tuple[int, int]] = set()

    def add(u: int, v: int) -> None:
        edges.add((min(u, v), max(u, v)))

    add(0, 1)
    add(0, 2)
    add(0, 3)
    add(0, 4)
    add(1, 2)
    add(2, 3)
    add(3, 4)
    add(4, 1)
    size = 5
    peripheral = [1, 2, 3, 4]
    for _ in range(1, steps):
        new_edges: set[tuple[int, int]] = set(edges)
        new_peripheral: list[int] = []
        for r in range(1, 5):
            off = r * size
            for u, v in edges:
                new_edges.add((u + off, v + off))
            for p in peripheral:
                new_edges.add((0, p + off))
                new_peripheral.append(p + off)
        edges = new_edges
        size *= 5
        peripheral = new_peripheral
    adj = np.zeros((size, size))
    for u, v in edges:
        adj[u, v] = adj[v, u] = 1.0
    return Graph([str(i) for i in range(size)], adj)


def _pair_stubs(
    rng: np.random.Generator,
    stubs: np.ndarray,
    forbidden,
    existing: set[tuple[int, int]],
    attempts: int = 200,
) -> list[tuple[int, int]]:
    """Random matching of stubs avoiding self-loops, multi-edges and
    forbidden partners.

    Each stub greedily takes the nearest compatible partner in a fresh
    shuffle; rare dead ends restart the whole shuffle."""
    for _ in range(attempts):
        order = [int(x) for x in rng.permutation(stubs)]
        pairs: list[tuple[int, int]] = []
        seen = set(existing)
        ok = True
        while order:
            u = order.pop()
            partner = None
            for idx in range(len(order) - 1, -1, -1):
                v = order[idx]
                key = (min(u, v), max(u, v))
                if u != v and key not in seen and not forbidden(u, v):
                    partner = idx
                    break
            if partner is None:
                ok = False
                break
            v = order.pop(partner)
            key = (min(u, v), max(u, v))
            seen.add(key)
            pairs.append(key)
        if ok:
            return pairs
    raise GenerationError("stub pairing failed; retry with a different seed")


def arenas_h(params: HParams | None = None) -> Graph:
    """Seeded two-level homogeneous-degree benchmark network.

    Every node gets exactly z_in1 edges inside its 16-node group, z_in2
    edges to the rest of its 64-node supergroup and z_out edges outside
    the supergroup; no self-loops or multi-edges.
    """
    params = params or HParams()
    rng = np.random.default_rng(params.seed)
    n = params.n
    gsz = params.group_size
    ssz = params.group_size * params.groups_per_super
    group = np.arange(n) // gsz
    superg = np.arange(n) // ssz
    edges: set[tuple[int, int]] = set()

    # level 1: z_in1-regular inside each group, via the complement of a
    # low-degree regular graph when that is cheaper to sample
    comp_deg = gsz - 1 - params.z_in1
    for gidx in range(n // gsz):
        members = np.arange(gidx * gsz, (gidx + 1) * gsz)
        if comp_deg == 0:
            for i in range(gsz):
                for j in range(i + 1, gsz):
                    edges.add((int(members[i]), int(members[j])))
            continue
        use_complement = comp_deg < params.z_in1
        deg = comp_deg if use_complement else params.z_in1
        stubs = np.repeat(members, deg)
        sub = _pair_stubs(rng, stubs, lambda u, v: False, set())
        if use_complement:
            chosen = set(sub)
            for i in range(gsz):
                for j in range(i + 1, gsz):
                    key = (int(members[i]), int(members[j]))
                    if key not in chosen:
                        edges.add(key)
        else:
            edges.update(sub)

    # level 2: z_in2-regular across groups within each supergroup
    for sidx in range(params.supers):
        members = np.arange(sidx * ssz, (sidx + 1) * ssz)
        stubs = np.repeat(members, params.z_in2)
        sub = _pair_stubs(
            rng, stubs, lambda u, v: group[u] == group[v], edges
        )
        edges.update(sub)

    # level 3: z_out edges per node across supergroups
    stubs = np.repeat(np.arange(n), params.z_out)
    sub = _pair_stubs(rng, stubs, lambda u, v: superg[u] == superg[v], edges)
    edges.update(sub)

    adj = np.zeros((n, n))
    for u, v in edges:
        adj[u, v] = adj[v, u] = 1.0
    g = Graph([str(i) for i in range(n)], adj)
    # generator self-check: every quota met exactly
    unweighted = (g.adjacency > 0).astype(float)
    same_group = group[:, None] == group[None, :]
    same_super = superg[:, None] == superg[None, :]
    d1 = (unweighted * same_group).sum(axis=1)
    d2 = (unweighted * (same_super & ~same_group)).sum(axis=1)
    d3 = (unweighted * ~same_super).sum(axis=1)
    if not (
        np.all(d1 == params.z_in1)
        and np.all(d2 == params.z_in2)
        and np.all(d3 == params.z_out)
    ):
        raise GenerationError("degree quotas violated after pairing")
    return g
