"""Coloring state, the weight index, and the membership predicate.

A coloring is a plain ``list[int]`` of 1-based colors, one per node. The
index assigns every node one of four conditions:

* ``-b``   forbidden to take color ``b``
* ``c``    frozen at color ``c``
* ``0``    ignored (its edges impose nothing)
* ``None`` unrestricted (an ordinary node of a proper coloring)

Given an index, the coloring is uniform over the colorings that satisfy every
condition; :func:`is_member` is that predicate and :func:`enumerate_members`
lists the whole set by brute force for small graphs.
"""

from __future__ import annotations

import heapq
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .graph import Graph
from .randomness import BitSource

UNRESTRICTED = None

# Class codes double as selection priority: lower is handled first.
FORBIDDEN, FROZEN, IGNORED, UNR = 0, 1, 2, 3
CLASS_NAMES = ("forbidden", "frozen", "ignored", "unrestricted")

DEFAULT_ENUMERATION_CAP = 10**7


def entry_class(value: int | None) -> int:
    if value is None:
        return UNR
    if value < 0:
        return FORBIDDEN
    if value == 0:
        return IGNORED
    return FROZEN


class IndexState:
    """Per-node index entries plus an incrementally maintained four-way partition.

    Each class keeps a set for membership and a min-heap (lazily pruned) so
    the lowest node id of a class is found without scanning the graph.
    """

    __slots__ = ("k", "entries", "_cls", "_members", "_heaps", "forbidden_color")

    def __init__(self, entries: Sequence[int | None], k: int):
        self.k = k
        self.entries = list(entries)
        self._cls = [entry_class(e) for e in self.entries]
        self._members = [set() for _ in range(4)]
        for v, c in enumerate(self._cls):
            self._members[c].add(v)
        self._heaps = [sorted(s) for s in self._members]
        colors = {-e for e in self.entries if e is not None and e < 0}
        if len(colors) > 1:
            raise ValueError(f"more than one forbidden color: {sorted(colors)}")
        for e in self.entries:
            if e is not None and not -k <= e <= k:
                raise ValueError(f"index entry {e} outside -{k}..{k}")
        self.forbidden_color = colors.pop() if colors else None

    @classmethod
    def all_ignored(cls, n: int, k: int) -> "IndexState":
        return cls([0] * n, k)

    @classmethod
    def all_unrestricted(cls, n: int, k: int) -> "IndexState":
        return cls([UNRESTRICTED] * n, k)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, v: int):
        return self.entries[v]

    def __eq__(self, other):
        if not isinstance(other, IndexState):
            return NotImplemented
        return self.k == other.k and self.entries == other.entries

    def __repr__(self):
        return f"IndexState({self.entries!r}, k={self.k})"

    def key(self) -> tuple:
        return tuple(self.entries)

    def copy(self) -> "IndexState":
        new = IndexState.__new__(IndexState)
        new.k = self.k
        new.entries = list(self.entries)
        new._cls = list(self._cls)
        new._members = [set(s) for s in self._members]
        new._heaps = [list(h) for h in self._heaps]
        new.forbidden_color = self.forbidden_color
        return new

    def class_of(self, v: int) -> int:
        return self._cls[v]

    def members(self, cls: int) -> set[int]:
        return self._members[cls]

    def counts(self) -> tuple[int, int, int, int]:
        """Sizes of (forbidden, frozen, ignored, unrestricted)."""
        return tuple(len(s) for s in self._members)

    def is_target(self) -> bool:
        return len(self._members[UNR]) == len(self.entries)

    def set(self, v: int, value: int | None) -> None:
        new_cls = entry_class(value)
        if new_cls == FORBIDDEN:
            b = -value
            if self.forbidden_color is None:
                self.forbidden_color = b
            elif self.forbidden_color != b:
                raise AssertionError(
                    f"forbidding color {b} while {self.forbidden_color} is active"
                )
        old_cls = self._cls[v]
        self.entries[v] = value
        if old_cls != new_cls:
            self._members[old_cls].discard(v)
            self._members[new_cls].add(v)
            heapq.heappush(self._heaps[new_cls], v)
            self._cls[v] = new_cls
        if not self._members[FORBIDDEN]:
            self.forbidden_color = None

    def lowest(self, cls: int) -> int | None:
        """Lowest node id currently in ``cls``, or None."""
        heap = self._heaps[cls]
        members = self._members[cls]
        while heap and heap[0] not in members:
            heapq.heappop(heap)
        # A node may be pushed more than once; stale duplicates are harmless.
        return heap[0] if heap else None

    def check(self) -> None:
        """Assert partition consistency and the single-forbidden-color rule."""
        seen = set()
        for cls, members in enumerate(self._members):
            assert not (members & seen), "partition classes overlap"
            seen |= members
            for v in members:
                assert entry_class(self.entries[v]) == cls, f"node {v} in wrong class"
                assert self._cls[v] == cls
        assert seen == set(range(len(self.entries))), "partition does not cover V"
        forb = {-self.entries[v] for v in self._members[FORBIDDEN]}
        if forb:
            assert forb == {self.forbidden_color}, f"forbidden colors {forb}"
        else:
            assert self.forbidden_color is None


@dataclass
class RunMetrics:
    total_steps: int = 0
    steps_by_kind: dict = field(
        default_factory=lambda: {"remove_forbidden": 0, "remove_frozen": 0, "remove_ignored": 0}
    )
    steps_by_branch: Counter = field(default_factory=Counter)
    random_bits: int = 0
    restarts: int = 0
    min_d: int | None = None
    potential_trace: list[tuple[int, Fraction]] | None = None
    wall_time_s: float = 0.0

    def record(self, kind: str, branch: str) -> None:
        self.total_steps += 1
        self.steps_by_kind[kind] += 1
        self.steps_by_branch[f"{kind}:{branch}"] += 1

    def as_dict(self, include_time: bool = False) -> dict:
        out = {
            "total_steps": self.total_steps,
            "steps_by_kind": dict(self.steps_by_kind),
            "steps_by_branch": dict(sorted(self.steps_by_branch.items())),
            "random_bits": self.random_bits,
            "restarts": self.restarts,
            "min_d": self.min_d,
        }
        if self.potential_trace is not None:
            out["potential_trace"] = [[s, str(phi)] for s, phi in self.potential_trace]
        if include_time:
            out["wall_time_s"] = self.wall_time_s
        return out


def initial_state(graph: Graph, k: int, rng: BitSource) -> tuple[list[int], IndexState]:
    """All nodes ignored; every color drawn independently and uniformly from 1..k."""
    if k < 1:
        raise ValueError(f"need at least one color, got k={k}")
    coloring = [rng.uniform_int(k) + 1 for _ in range(graph.node_count)]
    return coloring, IndexState.all_ignored(graph.node_count, k)


def edge_ok(x: Sequence[int], xs: Sequence, u: int, v: int) -> bool:
    """The edge factor: distinct colors, both frozen at the shared color, or an ignored end."""
    su, sv = xs[u], xs[v]
    if su == 0 or sv == 0:
        return True
    if x[u] != x[v]:
        return True
    return su == x[u] and sv == x[v]


def node_ok(x: Sequence[int], xs: Sequence, v: int) -> bool:
    e = xs[v]
    if e is None or e == 0:
        return True
    if e > 0:
        return x[v] == e
    return x[v] != -e


def is_member(x: Sequence[int], xs: IndexState | Sequence, graph: Graph) -> bool:
    entries = xs.entries if isinstance(xs, IndexState) else xs
    adjacency = graph.adjacency
    for v in range(graph.node_count):
        if not node_ok(x, entries, v):
            return False
        for u in adjacency[v]:
            if u > v and not edge_ok(x, entries, v, u):
                return False
    return True


def enumerate_members(
    xs: IndexState | Sequence,
    graph: Graph,
    k: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> list[tuple[int, ...]]:
    """All colorings of weight one under ``xs``, in lexicographic order.

    Depth-first over nodes 0..n-1 with colors ascending, pruning on the node
    condition and on edges back to already-colored nodes.
    """
    n = graph.node_count
    if k**n > cap:
        raise ValueError(f"enumeration of {k}^{n} colorings exceeds cap {cap}")
    entries = list(xs.entries if isinstance(xs, IndexState) else xs)
    earlier = [[u for u in graph.adjacency[v] if u < v] for v in range(n)]
    x = [0] * n
    out = []

    def rec(v):
        if v == n:
            out.append(tuple(x))
            return
        for c in range(1, k + 1):
            x[v] = c
            if not node_ok(x, entries, v):
                continue
            if all(edge_ok(x, entries, u, v) for u in earlier[v]):
                rec(v + 1)
        x[v] = 0

    rec(0)
    return out


def proper_colorings(graph: Graph, k: int, cap: int = DEFAULT_ENUMERATION_CAP):
    return enumerate_members(IndexState.all_unrestricted(graph.node_count, k), graph, k, cap)


def coloring_to_json(coloring: Sequence[int]) -> str:
    return json.dumps(list(coloring))


def coloring_to_text(coloring: Sequence[int]) -> str:
    """One ``<node> <color>`` line per node, both 1-based."""
    return "".join(f"{v + 1} {c}\n" for v, c in enumerate(coloring))


def coloring_from_json(text: str) -> list[int]:
    data = json.loads(text)
    if not isinstance(data, list) or not all(isinstance(c, int) and c >= 1 for c in data):
        raise ValueError("expected a JSON array of positive integer colors")
    return data


def coloring_from_text(text: str) -> list[int]:
    pairs = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) != 2:
            raise ValueError(f"line {lineno}: expected '<node> <color>'")
        v, c = int(tokens[0]), int(tokens[1])
        if v < 1 or c < 1 or v in pairs:
            raise ValueError(f"line {lineno}: bad or repeated entry")
        pairs[v] = c
    if sorted(pairs) != list(range(1, len(pairs) + 1)):
        raise ValueError("node ids must be exactly 1..n")
    return [pairs[v] for v in range(1, len(pairs) + 1)]
