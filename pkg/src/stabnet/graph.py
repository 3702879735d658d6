"""Undirected weighted graphs, file ingestion, line graphs and leaf pruning."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ParseError

__all__ = [
    "Graph",
    "Partition",
    "LineGraphMapping",
    "LeafRecord",
    "load_edge_list",
    "load_gml",
    "parse_gml",
    "line_graph",
    "project_edge_partition",
    "prune_leaves",
    "reattach_leaves",
]

_SYM_TOL = 1e-12


class Graph:
    """Undirected weighted graph held as a dense symmetric adjacency matrix.

    Node strengths are plain adjacency row sums (a self-loop contributes
    its weight once), so ``strengths.sum() == 2 * total_weight`` holds
    exactly and stays exact when scaled adjacencies introduce self-loops
    downstream.  With any other convention the random-walk matrix of a
    self-looped graph would not be row-stochastic and modularity of the
    scaled adjacency would stop matching stability.
    """

    def __init__(self, node_labels: Sequence[str], adjacency: np.ndarray):
        labels = tuple(str(x) for x in node_labels)
        adj = np.asarray(adjacency, dtype=float)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise DomainError("adjacency must be a square matrix")
        n = adj.shape[0]
        if n < 1:
            raise DomainError("graph needs at least one node")
        if len(labels) != n:
            raise DomainError("label count does not match adjacency size")
        if len(set(labels)) != n:
            raise DomainError("node labels must be unique")
        if not np.allclose(adj, adj.T, atol=_SYM_TOL):
            raise DomainError("adjacency must be symmetric")
        if np.any(adj < 0):
            raise DomainError("edge weights must be non-negative")
        adj = (adj + adj.T) / 2.0
        adj.setflags(write=False)
        self.node_labels = labels
        self.adjacency = adj
        self.strengths = adj.sum(axis=1)
        self.strengths.setflags(write=False)
        self.total_weight = float(adj.sum()) / 2.0

    @property
    def n(self) -> int:
        return len(self.node_labels)

    @property
    def m(self) -> float:
        return self.total_weight

    def degrees(self) -> np.ndarray:
        """Unweighted degrees, ignoring self-loops."""
        off = self.adjacency.copy()
        np.fill_diagonal(off, 0.0)
        return (off > 0).sum(axis=1)

    def index_of(self, label: str) -> int:
        try:
            return self.node_labels.index(label)
        except ValueError:
            raise DomainError(f"unknown node label {label!r}") from None

    def edges(self) -> list[tuple[int, int, float]]:
        """Undirected edges (u < v, self-loops excluded) with weights."""
        iu, iv = np.nonzero(np.triu(self.adjacency, k=1))
        return [(int(u), int(v), float(self.adjacency[u, v])) for u, v in zip(iu, iv)]

    def is_connected(self) -> bool:
        seen = np.zeros(self.n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            u = stack.pop()
            for v in np.nonzero(self.adjacency[u] > 0)[0]:
                if v != u and not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
        return bool(seen.all())

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m:g})"


class Partition:
    """Assignment of every node to one of ``community_count`` communities.

    Community indices are contiguous ``0..c-1`` and every community is
    non-empty; use :meth:`from_labels` to canonicalise arbitrary labels
    into first-appearance order.
    """

    def __init__(self, assignment: Sequence[int]):
        arr = np.asarray(assignment, dtype=np.intp)
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("assignment must be a non-empty 1-d sequence")
        c = int(arr.max()) + 1
        if arr.min() < 0 or len(np.unique(arr)) != c:
            raise DomainError("community indices must form a contiguous 0..c-1 range")
        arr.setflags(write=False)
        self.assignment = arr
        self.community_count = c

    @classmethod
    def from_labels(cls, labels: Sequence) -> "Partition":
        """Canonicalise arbitrary community labels by first appearance."""
        seen: dict = {}
        out = []
        for x in labels:
            if x not in seen:
                seen[x] = len(seen)
            out.append(seen[x])
        return cls(out)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(np.arange(n))

    def communities(self) -> list[np.ndarray]:
        return [np.nonzero(self.assignment == i)[0] for i in range(self.community_count)]

    def canonical(self) -> "Partition":
        return Partition.from_labels(self.assignment.tolist())

    def __len__(self) -> int:
        return self.assignment.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(
            self.canonical().assignment, other.canonical().assignment
        )

    def __repr__(self) -> str:
        return f"Partition(n={len(self)}, c={self.community_count})"


@dataclass(frozen=True)
class LineGraphMapping:
    """Per line-node, the endpoints of the original edge it represents."""

    edge_endpoints: tuple[tuple[int, int], ...]
    original_n: int


@dataclass(frozen=True)
class LeafRecord:
    """Reattachment data for pruned degree-1 nodes.

    ``removed`` holds (leaf, neighbour) original-index pairs in removal
    order; ``kept`` lists the surviving original indices in the order they
    appear in the pruned graph.
    """

    removed: tuple[tuple[int, int], ...]
    kept: tuple[int, ...]
    original_labels: tuple[str, ...] = field(repr=False)


def _graph_from_weights(labels: list[str], weights: dict[tuple[int, int], float]) -> Graph:
    n = len(labels)
    adj = np.zeros((n, n))
    for (u, v), w in weights.items():
        if u == v:
            adj[u, u] += w
        else:
            adj[u, v] += w
            adj[v, u] += w
    g = Graph(labels, adj)
    if n > 1 and not g.is_connected():
        warnings.warn("input graph is disconnected", stacklevel=3)
    return g


def load_edge_list(text: str | Iterable[str]) -> Graph:
    """Parse ``u v [w]`` lines into a Graph.

    Labels are mapped to indices in first-appearance order, duplicate
    edges (in either direction) sum their weights and ``#`` starts a
    comment line.
    """
    if isinstance(text, str):
        lines: Iterable[str] = text.splitlines()
    else:
        lines = text
    index: dict[str, int] = {}
    labels: list[str] = []
    weights: dict[tuple[int, int], float] = {}

    def node(label: str) -> int:
        if label not in index:
            index[label] = len(labels)
            labels.append(label)
        return index[label]

    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParseError(f"expected 'u v [w]', got {len(parts)} fields", lineno)
        w = 1.0
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise ParseError(f"non-numeric weight {parts[2]!r}", lineno) from None
            if not np.isfinite(w) or w < 0:
                raise ParseError(f"invalid weight {parts[2]!r}", lineno)
        u, v = node(parts[0]), node(parts[1])
        key = (min(u, v), max(u, v))
        weights[key] = weights.get(key, 0.0) + w
    if not labels:
        raise ParseError("no nodes found in edge list")
    return _graph_from_weights(labels, weights)


def _tokenize_gml(text: str):
    tokens: list[tuple[int, str]] = []
    i, n, line = 0, len(text), 1
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
        elif ch.isspace():
            i += 1
        elif ch == "#":
            while i < n and text[i] != "\n":
                i += 1
        elif ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    line += 1
                j += 1
            if j >= n:
                raise ParseError("unterminated string", line)
            tokens.append((line, text[i : j + 1]))
            i = j + 1
        elif ch in "[]":
            tokens.append((line, ch))
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "[]#":
                j += 1
            tokens.append((line, text[i:j]))
            i = j
    return tokens


def parse_gml(text: str) -> list[tuple[str, object]]:
    """Parse GML into a nested list of (key, value) pairs.

    Values are floats, quoted strings (unquoted) or nested lists.  Keys
    may repeat, which is how GML encodes node/edge collections.
    """
    tokens = _tokenize_gml(text)
    pos = 0

    def parse_block(closing_expected: bool) -> list[tuple[str, object]]:
        nonlocal pos
        items: list[tuple[str, object]] = []
        while pos < len(tokens):
            line, tok = tokens[pos]
            if tok == "]":
                if not closing_expected:
                    raise ParseError("unexpected ']'", line)
                pos += 1
                return items
            key = tok
            pos += 1
            if pos >= len(tokens):
                raise ParseError(f"key {key!r} has no value", line)
            vline, vtok = tokens[pos]
            pos += 1
            value: object
            if vtok == "[":
                value = parse_block(True)
            elif vtok.startswith('"'):
                value = vtok[1:-1]
            else:
                try:
                    value = float(vtok)
                except ValueError:
                    value = vtok
            items.append((key, value))
        if closing_expected:
            raise ParseError("missing ']'")
        return items

    return parse_block(False)


def _first(items: list[tuple[str, object]], key: str):
    for k, v in items:
        if k == key:
            return v
    return None


def load_gml(text: str) -> Graph:
    """Load the GML subset ``graph [ node [...] edge [...] ]``.

    ``value`` on an edge becomes its weight (default 1.0); unknown keys
    are skipped.
    """
    doc = parse_gml(text)
    graph = _first(doc, "graph")
    if not isinstance(graph, list):
        raise ParseError("no 'graph [...]' block found")
    index: dict[int, int] = {}
    labels: list[str] = []
    weights: dict[tuple[int, int], float] = {}
    for key, value in graph:
        if key == "node" and isinstance(value, list):
            nid = _first(value, "id")
            if not isinstance(nid, float):
                raise ParseError("node without numeric 'id'")
            nid = int(nid)
            if nid in index:
                raise ParseError(f"duplicate node id {nid}")
            label = _first(value, "label")
            index[nid] = len(labels)
            labels.append(str(label) if label is not None else str(nid))
    for key, value in graph:
        if key == "edge" and isinstance(value, list):
            src, tgt = _first(value, "source"), _first(value, "target")
            if not isinstance(src, float) or not isinstance(tgt, float):
                raise ParseError("edge without numeric source/target")
            src, tgt = int(src), int(tgt)
            for nid in (src, tgt):
                if nid not in index:
                    raise ParseError(f"edge references undeclared node id {nid}")
            w = _first(value, "value")
            w = float(w) if isinstance(w, float) else 1.0
            if w < 0:
                raise ParseError("negative edge value")
            u, v = index[src], index[tgt]
            key2 = (min(u, v), max(u, v))
            weights[key2] = weights.get(key2, 0.0) + w
    if not labels:
        raise ParseError("graph block declares no nodes")
    return _graph_from_weights(labels, weights)


def gml_node_values(text: str) -> dict[str, float]:
    """Per-node ``value`` attributes keyed by node label (missing: skipped)."""
    doc = parse_gml(text)
    graph = _first(doc, "graph")
    if not isinstance(graph, list):
        raise ParseError("no 'graph [...]' block found")
    out: dict[str, float] = {}
    for key, value in graph:
        if key == "node" and isinstance(value, list):
            nid = _first(value, "id")
            label = _first(value, "label")
            val = _first(value, "value")
            if isinstance(val, float):
                name = str(label) if label is not None else str(int(nid))
                out[name] = val
    return out


def line_graph(g: Graph) -> tuple[Graph, LineGraphMapping]:
    """Build L(g): one node per edge of g, adjacent when edges share an endpoint.

    Self-loops of g are ignored, and L(g) is unweighted regardless of the
    original edge weights.
    """
    edges = [(u, v) for u, v, _ in g.edges()]
    ne = len(edges)
    if ne == 0:
        raise DomainError("line graph of an edgeless graph is undefined")
    labels = [f"{g.node_labels[u]}|{g.node_labels[v]}" for u, v in edges]
    adj = np.zeros((ne, ne))
    incident: dict[int, list[int]] = {}
    for e, (u, v) in enumerate(edges):
        incident.setdefault(u, []).append(e)
        incident.setdefault(v, []).append(e)
    for members in incident.values():
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                adj[members[a], members[b]] = 1.0
                adj[members[b], members[a]] = 1.0
    mapping = LineGraphMapping(tuple(edges), g.n)
    return Graph(labels, adj), mapping


def project_edge_partition(mapping: LineGraphMapping, p: Partition) -> list[set[int]]:
    """Project a partition of L(g) back onto g's nodes as overlapping sets."""
    if len(p) != len(mapping.edge_endpoints):
        raise DomainError(
            f"partition covers {len(p)} line-nodes, mapping has "
            f"{len(mapping.edge_endpoints)}"
        )
    out: list[set[int]] = [set() for _ in range(mapping.original_n)]
    for e, (u, v) in enumerate(mapping.edge_endpoints):
        comm = int(p.assignment[e])
        out[u].add(comm)
        out[v].add(comm)
    return out


def prune_leaves(g: Graph, recursive: bool = False) -> tuple[Graph, LeafRecord]:
    """Remove degree-1 nodes, remembering their unique neighbour.

    A single pass over the original graph by default; with
    ``recursive=True`` passes repeat until no leaf remains.  A leaf whose
    neighbour was itself already removed in the same pass is kept, so the
    pruned graph is never empty.
    """
    adj = g.adjacency.copy()
    np.fill_diagonal(adj, 0.0)
    alive = np.ones(g.n, dtype=bool)
    removed: list[tuple[int, int]] = []
    while True:
        deg = (adj > 0)[np.ix_(alive, alive)].sum(axis=1)
        deg_full = np.zeros(g.n, dtype=int)
        deg_full[np.nonzero(alive)[0]] = deg
        batch: list[tuple[int, int]] = []
        gone_this_pass: set[int] = set()
        for u in np.nonzero(alive)[0]:
            if deg_full[u] != 1:
                continue
            nb = next(
                int(v) for v in np.nonzero(adj[u] > 0)[0] if alive[v]
            )
            if nb in gone_this_pass:
                continue
            batch.append((int(u), nb))
            gone_this_pass.add(int(u))
        for u, _ in batch:
            alive[u] = False
        removed.extend(batch)
        if not batch or not recursive:
            break
    kept = tuple(int(i) for i in np.nonzero(alive)[0])
    sub = Graph(
        [g.node_labels[i] for i in kept],
        g.adjacency[np.ix_(kept, kept)],
    )
    return sub, LeafRecord(tuple(removed), kept, g.node_labels)


def reattach_leaves(p: Partition, record: LeafRecord) -> Partition:
    """Assign each pruned leaf to its neighbour's community."""
    if len(p) != len(record.kept):
        raise DomainError(
            f"partition covers {len(p)} nodes, pruned graph has {len(record.kept)}"
        )
    n = len(record.original_labels)
    assignment = np.full(n, -1, dtype=np.intp)
    for pos, orig in enumerate(record.kept):
        assignment[orig] = p.assignment[pos]
    for leaf, nb in reversed(record.removed):
        assignment[leaf] = assignment[nb]
    if np.any(assignment < 0):
        raise DomainError("leaf record does not cover all removed nodes")
    return Partition(assignment)
