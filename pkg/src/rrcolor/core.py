"""Randomness Recycler sampler for uniform proper k-colorings.

The sampler carries a coloring ``x`` together with an index ``xs`` and keeps
``x`` uniform over the colorings admitted by ``xs`` at every step. It starts
from the all-ignored index (any coloring is admissible) and removes one
condition per step, forbidden conditions first, then frozen, then ignored.
When every node is unrestricted, ``x`` is an exact uniform proper coloring.

Procedures mutate ``x`` and ``xs`` in place and return a :class:`StepOutcome`
describing which branch fired.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .graph import Graph
from .potential import PotentialParams, above_asymptotic_threshold
from .randomness import BitSource
from .state import (
    FORBIDDEN,
    FROZEN,
    IGNORED,
    UNR,
    IndexState,
    RunMetrics,
    initial_state,
    is_member,
)

THRESHOLD_TEXT = "(k-1)/max_degree > (7 + sqrt(57))/4 ~= 3.637"
DEFAULT_STEP_CAP_PER_NODE = 10**6

# Branch labels, per procedure.
IGNORED_BRANCHES = ("accept", "reject")
FROZEN_BRANCHES = ("convert",)
FORBIDDEN_BRANCHES = (
    "frozen_neighbor",  # a neighbor is frozen at the forbidden color
    "keep_color",  # recolor coin failed
    "blocked",  # recolored, but a neighbor already holds the color
    "accept",  # recolor accepted
    "reject_known_color",  # rejected; chosen neighbor repeats a frozen color
    "reject_shared_color",  # rejected; chosen neighbor's color is shared inside U
    "degenerate",  # d < 1, no valid recolor probability; caller restarts
)


class GuaranteeWarning(UserWarning):
    """k is too small for the linear expected running time bound."""


class BudgetExceeded(RuntimeError):
    """The step cap was hit before the index reached the target; no sample exists."""

    def __init__(self, metrics: RunMetrics, cap: int):
        super().__init__(f"step budget of {cap} exceeded without reaching a proper coloring")
        self.metrics = metrics
        self.cap = cap


@dataclass
class StepOutcome:
    kind: str
    branch: str
    node: int | None = None
    affected_nodes: list[int] = field(default_factory=list)
    d: int | None = None


def select_node(xs: IndexState) -> tuple[int, int] | None:
    """Lowest-id node of the highest-priority nonempty class, or None when done."""
    for cls in (FORBIDDEN, FROZEN, IGNORED):
        v = xs.lowest(cls)
        if v is not None:
            return v, cls
    return None


def _neighborhood(xs: IndexState, v: int, graph: Graph) -> tuple[set[int], list[int]]:
    """Colors frozen on neighbors of v, and the neighbors neither frozen nor ignored."""
    frozen_colors = set()
    free = []
    entries = xs.entries
    for u in graph.adjacency[v]:
        e = entries[u]
        if e is None or e < 0:
            free.append(u)
        elif e > 0:
            frozen_colors.add(e)
    return frozen_colors, free


def compute_d(xs: IndexState, v: int, graph: Graph) -> int:
    frozen_colors, free = _neighborhood(xs, v, graph)
    return xs.k - len(frozen_colors) - len(free)


def compute_n1(x, xs: IndexState, v: int, graph: Graph) -> int:
    """Number of colors v could take with the rest of the coloring held fixed."""
    b = -xs[v]
    frozen_colors, free = _neighborhood(xs, v, graph)
    blocked = frozen_colors | {x[u] for u in free}
    blocked.add(b)
    return xs.k - len(blocked)


def _share_groups(x, free, frozen_colors, b):
    sizes = {}
    for u in free:
        sizes[x[u]] = sizes.get(x[u], 0) + 1
    known = frozen_colors | {b}
    return sizes, known


def compute_shares(x, xs: IndexState, v: int, graph: Graph) -> dict[int, Fraction]:
    """Share of the surplus ``n1 - (d - 1)`` carried by each free neighbor of v."""
    b = -xs[v]
    frozen_colors, free = _neighborhood(xs, v, graph)
    sizes, known = _share_groups(x, free, frozen_colors, b)
    shares = {}
    for u in free:
        c = x[u]
        shares[u] = Fraction(1) if c in known else Fraction(sizes[c] - 1, sizes[c])
    return shares


def remove_ignored(x, xs: IndexState, v: int, graph: Graph, rng: BitSource) -> StepOutcome:
    if xs[v] != 0 or xs.members(FORBIDDEN) or xs.members(FROZEN):
        raise AssertionError("remove_ignored needs an ignored v and no forbidden/frozen nodes")
    color = x[v]
    entries = xs.entries
    search = [u for u in graph.adjacency[v] if entries[u] is None or entries[u] < 0]
    before, w = rng.shuffled_prefix_search(search, lambda u: x[u] == color)
    if w is None:
        xs.set(v, None)
        return StepOutcome("remove_ignored", "accept", v, [v])
    for u in before:
        xs.set(u, -color)
    xs.set(w, color)
    x[v] = rng.uniform_int(xs.k) + 1
    return StepOutcome("remove_ignored", "reject", v, before + [w])


def remove_frozen(x, xs: IndexState, v: int, graph: Graph, rng: BitSource) -> StepOutcome:
    c = xs[v]
    if c is None or c <= 0 or x[v] != c or xs.members(FORBIDDEN):
        raise AssertionError("remove_frozen needs v frozen at its color and no forbidden nodes")
    changed = [v]
    for u in graph.adjacency[v]:
        if xs.class_of(u) == UNR:
            xs.set(u, -c)
            changed.append(u)
    xs.set(v, 0)
    x[v] = rng.uniform_int(xs.k) + 1
    return StepOutcome("remove_frozen", "convert", v, changed)


def remove_forbidden(
    x,
    xs: IndexState,
    v: int,
    graph: Graph,
    rng: BitSource,
    *,
    v_freeze: str = "w_color",
) -> StepOutcome:
    """Try to lift the forbidden color ``b`` from node v.

    ``v_freeze`` selects what v is frozen at when the rejection branch picks a
    neighbor whose color is shared only within the free neighbors:
    ``"w_color"`` (v recolored and frozen at that neighbor's color) is the
    correct reading; ``"b"`` exists so tests can show the alternative breaks
    uniformity.
    """
    e = xs[v]
    if e is None or e >= 0:
        raise AssertionError("remove_forbidden needs a forbidden node")
    b = -e
    k = xs.k
    frozen_colors, free = _neighborhood(xs, v, graph)

    if b in frozen_colors:
        xs.set(v, None)
        return StepOutcome("remove_forbidden", "frozen_neighbor", v, [v])

    d = k - len(frozen_colors) - len(free)
    if d < 1:
        return StepOutcome("remove_forbidden", "degenerate", v, [], d)

    if not rng.bernoulli_rational(1, d):
        xs.set(v, None)
        return StepOutcome("remove_forbidden", "keep_color", v, [v], d)

    if any(x[u] == b for u in free):
        # The proposed color clashes. x(v) keeps its original value: the
        # input coloring is still uniform given the revealed clash, whereas
        # the recolored one is weighted by n1 and would be biased.
        before, w = rng.shuffled_prefix_search(free, lambda u: x[u] == b)
        changed = [v, w]
        for u in before:
            if xs[u] != -b:
                xs.set(u, -b)
                changed.append(u)
        xs.set(w, b)
        xs.set(v, None)
        return StepOutcome("remove_forbidden", "blocked", v, changed, d)

    blocked = frozen_colors | {x[u] for u in free}
    blocked.add(b)
    n1 = k - len(blocked)
    x[v] = b
    if rng.bernoulli_rational(d - 1, n1):
        xs.set(v, None)
        return StepOutcome("remove_forbidden", "accept", v, [v], d)

    sizes, known = _share_groups(x, free, frozen_colors, b)
    scale = math.lcm(*(sizes[x[u]] for u in free))
    weights = [
        scale if x[u] in known else scale * (sizes[x[u]] - 1) // sizes[x[u]] for u in free
    ]
    if sum(weights) != (n1 - d + 1) * scale:
        raise AssertionError(f"share sum {Fraction(sum(weights), scale)} != n1 - (d-1) = {n1 - d + 1}")
    w = free[rng.choose_weighted(weights)]
    c = x[w]

    if c in known:
        xs.set(w, c)
        xs.set(v, b)
        return StepOutcome("remove_forbidden", "reject_known_color", v, [v, w], d)

    changed = [v]
    for u in free:
        if x[u] == c:
            xs.set(u, c)
        else:
            xs.set(u, -b)
        changed.append(u)
    if v_freeze == "w_color":
        x[v] = c
        xs.set(v, c)
    elif v_freeze == "b":
        xs.set(v, b)
    else:
        raise ValueError(f"unknown v_freeze {v_freeze!r}")
    return StepOutcome("remove_forbidden", "reject_shared_color", v, changed, d)


_PROCEDURES: dict[int, Callable[..., StepOutcome]] = {
    FORBIDDEN: remove_forbidden,
    FROZEN: remove_frozen,
    IGNORED: remove_ignored,
}


def rr_step(x, xs: IndexState, graph: Graph, rng: BitSource) -> StepOutcome:
    picked = select_node(xs)
    if picked is None:
        return StepOutcome("done", "done")
    v, cls = picked
    return _PROCEDURES[cls](x, xs, v, graph, rng)


def rr_sample(
    graph: Graph,
    k: int,
    rng: BitSource,
    *,
    step_cap: int | None = None,
    trace_potential: bool = False,
    check_invariants: bool = False,
    warn: bool = True,
    on_step: Callable[[StepOutcome, list, IndexState], None] | None = None,
) -> tuple[list[int], RunMetrics]:
    """Draw one exactly uniform proper k-coloring of ``graph``.

    Raises :class:`BudgetExceeded` when ``step_cap`` steps pass without
    termination (default ``10**6 * n``); no partial sample is returned since
    that would bias the output. A :class:`GuaranteeWarning` is issued when
    ``k`` is below the linear-time threshold; the sampler still runs and any
    sample it returns is exact.

    A forbidden removal with ``d < 1`` (possible only when ``k`` does not
    exceed a node's degree) restarts from a fresh initial state. The decision
    depends on the index alone, so exactness is preserved.
    """
    if k < 1:
        raise ValueError(f"need at least one color, got k={k}")
    if warn and not above_asymptotic_threshold(k, graph.max_degree):
        warnings.warn(
            f"k={k} with max degree {graph.max_degree} is below the linear-time "
            f"guarantee {THRESHOLD_TEXT}; the sample is still exact if it terminates",
            GuaranteeWarning,
            stacklevel=2,
        )
    cap = step_cap if step_cap is not None else DEFAULT_STEP_CAP_PER_NODE * graph.node_count
    params = PotentialParams.for_graph(k, graph.max_degree) if trace_potential else None

    metrics = RunMetrics()
    start = time.perf_counter()
    bits_start = rng.bits_consumed
    x, xs = initial_state(graph, k, rng)
    if params is not None:
        metrics.potential_trace = [(0, params.potential(xs))]

    while not xs.is_target():
        if metrics.total_steps >= cap:
            metrics.random_bits = rng.bits_consumed - bits_start
            metrics.wall_time_s = time.perf_counter() - start
            raise BudgetExceeded(metrics, cap)
        before = xs.key() if check_invariants else None
        out = rr_step(x, xs, graph, rng)
        if out.branch == "degenerate":
            metrics.restarts += 1
            metrics.min_d = out.d if metrics.min_d is None else min(metrics.min_d, out.d)
            x, xs = initial_state(graph, k, rng)
            if params is not None:
                metrics.potential_trace.append((metrics.total_steps, params.potential(xs)))
            continue
        metrics.record(out.kind, out.branch)
        if out.d is not None:
            metrics.min_d = out.d if metrics.min_d is None else min(metrics.min_d, out.d)
        if params is not None:
            metrics.potential_trace.append((metrics.total_steps, params.potential(xs)))
        if check_invariants:
            xs.check()
            if xs.key() == before:
                raise AssertionError(f"step {out} left the index unchanged")
            if not is_member(x, xs, graph):
                raise AssertionError(f"membership lost after {out}")
        if on_step is not None:
            on_step(out, x, xs)

    metrics.random_bits = rng.bits_consumed - bits_start
    metrics.wall_time_s = time.perf_counter() - start
    return x, metrics
