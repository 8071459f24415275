"""Labelled graphs and dyadic vertex signals.

Graphs are finite, undirected, simple (irreflexive, no multi-edges), with
vertices 0..n-1 and an optional per-vertex boolean label vector of uniform
width.  Signals attach a vector of dyadic rationals to every vertex.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from foclogic.dyadic import DyadicRational, dy


def _norm_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class LabelledGraph:
    n: int
    edges: frozenset[tuple[int, int]]
    labels: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("order must be nonnegative")
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise ValueError(f"bad edge ({u}, {v}) for order {self.n}")
        if self.labels:
            if len(self.labels) != self.n:
                raise ValueError("labels must cover every vertex")
            width = len(self.labels[0])
            for row in self.labels:
                if len(row) != width or any(b not in (0, 1) for b in row):
                    raise ValueError("labels must be uniform-width bit rows")

    @staticmethod
    def make(n: int, edges=(), labels=None) -> "LabelledGraph":
        es = frozenset(_norm_edge(u, v) for u, v in edges)
        for u, v in es:
            if u == v:
                raise ValueError("self-loops are not allowed")
        lab = tuple(tuple(row) for row in labels) if labels else ()
        return LabelledGraph(n, es, lab)

    @property
    def label_width(self) -> int:
        return len(self.labels[0]) if self.labels else 0

    def has_edge(self, u: int, v: int) -> bool:
        return u != v and _norm_edge(u, v) in self.edges

    def neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(w for w in range(self.n) if self.has_edge(v, w))

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def label_bit(self, v: int, k: int) -> bool:
        if not self.labels or k >= self.label_width:
            return False
        return self.labels[v][k] == 1

    def relabel(self, perm: dict[int, int]) -> "LabelledGraph":
        """Image under a vertex permutation {old: new}."""
        edges = [(perm[u], perm[v]) for u, v in self.edges]
        labels = None
        if self.labels:
            rows = [None] * self.n
            for old, new in perm.items():
                rows[new] = self.labels[old]
            labels = rows
        return LabelledGraph.make(self.n, edges, labels)


@dataclass(frozen=True)
class Signal:
    values: tuple[tuple[DyadicRational, ...], ...]

    def __post_init__(self):
        if self.values:
            width = len(self.values[0])
            for row in self.values:
                if len(row) != width:
                    raise ValueError("signal rows must have uniform width")

    @staticmethod
    def make(rows) -> "Signal":
        return Signal(tuple(tuple(dy(q) for q in row) for row in rows))

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def width(self) -> int:
        return len(self.values[0]) if self.values else 0

    def sup_norm(self) -> DyadicRational:
        best = dy(0)
        for row in self.values:
            for q in row:
                a = abs(q)
                if a > best:
                    best = a
        return best


def enumerate_graphs(n: int, label_width: int = 0, dedup: bool = False):
    """All labelled graphs of order exactly n, every edge subset crossed with
    every labelling.  Guarded to n <= 7 (beyond that the count is hopeless).
    With dedup=True, one representative per isomorphism class.
    """
    if n > 7:
        raise ValueError("enumeration supported for order at most 7")
    if n < 0:
        raise ValueError("order must be nonnegative")
    pairs = list(itertools.combinations(range(n), 2))
    label_rows = list(itertools.product((0, 1), repeat=label_width))
    seen = set()
    for edge_mask in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if (edge_mask >> i) & 1]
        labelings = (
            itertools.product(label_rows, repeat=n) if label_width else [None]
        )
        for labels in labelings:
            G = LabelledGraph.make(n, edges, labels)
            if dedup:
                key = canonical_form(G)
                if key in seen:
                    continue
                seen.add(key)
            yield G


def canonical_form(G: LabelledGraph):
    """Lexicographically least (edges, labels) over all vertex permutations.
    Brute force; fine for the enumeration sizes this package supports."""
    best = None
    for perm_tuple in itertools.permutations(range(G.n)):
        perm = {old: new for old, new in enumerate(perm_tuple)}
        H = G.relabel(perm)
        key = (tuple(sorted(H.edges)), H.labels)
        if best is None or key < best:
            best = key
    return (G.n, best)


def are_isomorphic(G: LabelledGraph, H: LabelledGraph) -> bool:
    if G.n != H.n or len(G.edges) != len(H.edges) or G.labels and not H.labels:
        return False
    return canonical_form(G) == canonical_form(H)


# --- file format -------------------------------------------------------------


def parse_graph_file(text: str) -> tuple[LabelledGraph, Signal | None]:
    """Line format: `graph N`, `edge U V`, `label V b0 b1 ...`,
    `signal V q0 q1 ...` with dyadic literals.  Blank lines and lines
    starting with # are skipped."""
    n = None
    edges = []
    label_rows: dict[int, tuple[int, ...]] = {}
    signal_rows: dict[int, tuple[DyadicRational, ...]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "graph":
                n = int(parts[1])
                if n < 0:
                    raise ValueError("negative order")
            elif kind == "edge":
                u, v = int(parts[1]), int(parts[2])
                if n is None:
                    raise ValueError("edge before `graph N` header")
                if not (0 <= u < n and 0 <= v < n) or u == v:
                    raise ValueError(f"bad edge {u} {v} for order {n}")
                edges.append((u, v))
            elif kind == "label":
                v = int(parts[1])
                if n is None or not 0 <= v < n:
                    raise ValueError(f"bad vertex {v}")
                label_rows[v] = tuple(int(b) for b in parts[2:])
            elif kind == "signal":
                v = int(parts[1])
                if n is None or not 0 <= v < n:
                    raise ValueError(f"bad vertex {v}")
                signal_rows[v] = tuple(dy(q) for q in parts[2:])
            else:
                raise ValueError(f"unknown directive {kind!r}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"graph file line {lineno}: {exc}") from None
    if n is None:
        raise ValueError("graph file missing `graph N` header")
    labels = None
    if label_rows:
        width = len(next(iter(label_rows.values())))
        labels = [label_rows.get(v, (0,) * width) for v in range(n)]
    G = LabelledGraph.make(n, edges, labels)
    signal = None
    if signal_rows:
        width = len(next(iter(signal_rows.values())))
        zero = tuple(dy(0) for _ in range(width))
        signal = Signal(tuple(signal_rows.get(v, zero) for v in range(n)))
    return G, signal


def write_graph_file(G: LabelledGraph, signal: Signal | None = None) -> str:
    lines = [f"graph {G.n}"]
    for u, v in sorted(G.edges):
        lines.append(f"edge {u} {v}")
    for v in range(G.n):
        if G.labels:
            bits = " ".join(str(b) for b in G.labels[v])
            lines.append(f"label {v} {bits}")
    if signal is not None:
        for v in range(G.n):
            qs = " ".join(str(q) for q in signal.values[v])
            lines.append(f"signal {v} {qs}")
    return "\n".join(lines) + "\n"
