"""Undirected simple graphs: parsing, generation and serialization.

Nodes are dense 0-based ints internally. The text format is DIMACS-like and
1-based::

    c optional comment
    p edge <n> <m>
    e <u> <v>
"""

from __future__ import annotations

import io
import random
from dataclasses import dataclass, field
from typing import Iterable, TextIO


class GraphFormatError(ValueError):
    """Raised for malformed graph text; the message names the line."""

    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class Graph:
    node_count: int
    adjacency: tuple[tuple[int, ...], ...]
    degrees: tuple[int, ...] = field(init=False)
    max_degree: int = field(init=False)

    def __post_init__(self):
        degrees = tuple(len(a) for a in self.adjacency)
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "max_degree", max(degrees, default=0))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build from 0-based edges, dropping duplicates. Self-loops are rejected."""
        if n < 1:
            raise ValueError(f"node count must be positive, got {n}")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs))

    @property
    def n(self) -> int:
        return self.node_count

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, adj in enumerate(self.adjacency) for v in adj if u < v]

    @property
    def edge_count(self) -> int:
        return sum(self.degrees) // 2

    def check(self) -> None:
        """Assert the structural invariants (symmetry, no loops, no duplicates)."""
        assert len(self.adjacency) == self.node_count
        for v, adj in enumerate(self.adjacency):
            assert v not in adj, f"self-loop at {v}"
            assert len(set(adj)) == len(adj), f"duplicate neighbor at {v}"
            for u in adj:
                assert 0 <= u < self.node_count
                assert v in self.adjacency[u], f"asymmetric edge {v}-{u}"
        assert self.degrees == tuple(len(a) for a in self.adjacency)
        assert self.max_degree == max(self.degrees, default=0)


def parse_graph(text: str | TextIO) -> Graph:
    if not isinstance(text, str):
        text = text.read()
    header = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens or tokens[0] == "c":
            continue
        tag = tokens[0]
        if tag == "p":
            if header is not None:
                raise GraphFormatError(lineno, "duplicate 'p' header")
            if len(tokens) != 4 or tokens[1] != "edge":
                raise GraphFormatError(lineno, "expected 'p edge <n> <m>'")
            try:
                n, m = int(tokens[2]), int(tokens[3])
            except ValueError:
                raise GraphFormatError(lineno, "non-integer node or edge count") from None
            if n < 1 or m < 0:
                raise GraphFormatError(lineno, f"invalid counts n={n} m={m}")
            header = (n, m)
        elif tag == "e":
            if header is None:
                raise GraphFormatError(lineno, "edge before 'p edge' header")
            if len(tokens) != 3:
                raise GraphFormatError(lineno, "expected 'e <u> <v>'")
            try:
                u, v = int(tokens[1]), int(tokens[2])
            except ValueError:
                raise GraphFormatError(lineno, "non-integer node id") from None
            n = header[0]
            for node in (u, v):
                if not 1 <= node <= n:
                    raise GraphFormatError(lineno, f"node id {node} out of range 1..{n}")
            if u == v:
                raise GraphFormatError(lineno, f"self-loop at node {u}")
            edges.append((u - 1, v - 1))
        else:
            raise GraphFormatError(lineno, f"unknown line type {tag!r}")
    if header is None:
        raise GraphFormatError(0, "missing 'p edge <n> <m>' header")
    # The declared m counts lines and may include duplicates, so it is not enforced.
    return Graph.from_edges(header[0], edges)


def format_graph(graph: Graph) -> str:
    edges = graph.edges()
    out = io.StringIO()
    out.write(f"p edge {graph.node_count} {len(edges)}\n")
    for u, v in edges:
        out.write(f"e {u + 1} {v + 1}\n")
    return out.getvalue()


def _random_regular(n: int, d: int, seed: int, max_tries: int = 100_000) -> Graph:
    if d < 0 or d >= n or (n * d) % 2:
        raise ValueError(f"random_regular needs 0 <= d < n and n*d even, got n={n} d={d}")
    if 2 * d > n - 1:
        # Dense case: complementing is a bijection, and the sparse side pairs quickly.
        sparse = _random_regular(n, n - 1 - d, seed, max_tries)
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if v not in sparse.adjacency[u]]
        return Graph.from_edges(n, edges)
    rng = random.Random(seed)
    stubs = [v for v in range(n) for _ in range(d)]
    for _ in range(max_tries):
        rng.shuffle(stubs)
        seen = set()
        ok = True
        for i in range(0, len(stubs), 2):
            u, v = stubs[i], stubs[i + 1]
            key = (min(u, v), max(u, v))
            if u == v or key in seen:
                ok = False
                break
            seen.add(key)
        if ok:
            return Graph.from_edges(n, seen)
    raise RuntimeError(f"pairing model failed {max_tries} times for n={n} d={d}")


def generate(kind: str, *params: int, seed: int = 0) -> Graph:
    """Deterministic graph generators.

    ``cycle n``, ``path n``, ``complete n``, ``star leaves``, ``grid rows cols``,
    ``empty n`` and ``random_regular n d``. Only ``random_regular`` uses the
    seed; it runs the pairing model and restarts from scratch on any loop or
    repeated edge.
    """
    def need(count):
        if len(params) != count:
            raise ValueError(f"{kind} takes {count} parameter(s), got {len(params)}")

    if kind == "cycle":
        need(1)
        (n,) = params
        if n < 3:
            raise ValueError("cycle needs n >= 3")
        return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
    if kind == "path":
        need(1)
        (n,) = params
        return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    if kind == "complete":
        need(1)
        (n,) = params
        return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
    if kind == "star":
        need(1)
        (leaves,) = params
        return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])
    if kind == "empty":
        need(1)
        return Graph.from_edges(params[0], [])
    if kind == "grid":
        need(2)
        rows, cols = params
        if rows < 1 or cols < 1:
            raise ValueError("grid needs positive dimensions")
        edges = []
        for r in range(rows):
            for c in range(cols):
                v = r * cols + c
                if c + 1 < cols:
                    edges.append((v, v + 1))
                if r + 1 < rows:
                    edges.append((v, v + cols))
        return Graph.from_edges(rows * cols, edges)
    if kind == "random_regular":
        need(2)
        return _random_regular(params[0], params[1], seed)
    raise ValueError(f"unknown graph kind {kind!r}")


def parse_generator_spec(spec: str, seed: int = 0) -> Graph:
    """Build a graph from ``kind:p1[,p2]``, e.g. ``grid:4,5`` or ``random_regular:50,3``."""
    kind, _, rest = spec.partition(":")
    try:
        params = [int(p) for p in rest.split(",")] if rest else []
    except ValueError:
        raise ValueError(f"bad generator parameters in {spec!r}") from None
    return generate(kind.strip(), *params, seed=seed)
