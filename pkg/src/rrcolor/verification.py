"""Oracles and experiments that check the sampler against its guarantees.

Exactness is checked by enumerating the support and running chi-square
goodness-of-fit tests; the running-time claim is checked by measuring the
potential drift per step and the growth of step counts with graph size.
"""

from __future__ import annotations

import math
import statistics
import time
import warnings
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from scipy import stats

from .core import GuaranteeWarning, rr_sample, select_node, _PROCEDURES
from .graph import Graph, generate
from .potential import PotentialParams, epsilon_bound, guarantee_applies
from .randomness import BitSource
from .state import IndexState, enumerate_members, is_member, proper_colorings

P_THRESHOLD = 0.001
MIN_EXPECTED_PER_CELL = 5


class NoProperColorings(ValueError):
    """The graph has no proper k-coloring, so there is nothing to test."""


def chi_square_uniform(counts: Sequence[int]) -> tuple[float, int, float]:
    """Chi-square statistic, degrees of freedom and p-value against uniform."""
    if len(counts) < 2:
        return 0.0, 0, 1.0
    res = stats.chisquare(counts)
    return float(res.statistic), len(counts) - 1, float(res.pvalue)


@dataclass
class UniformityReport:
    support_size: int
    num_samples: int
    statistic: float
    dof: int
    p_value: float
    unsupported: int = 0

    @property
    def passed(self) -> bool:
        return self.unsupported == 0 and self.p_value > P_THRESHOLD

    def as_dict(self) -> dict:
        return {
            "support_size": self.support_size,
            "num_samples": self.num_samples,
            "chi_square": self.statistic,
            "dof": self.dof,
            "p_value": self.p_value,
            "unsupported_samples": self.unsupported,
            "passed": self.passed,
        }


def uniformity_test(
    graph: Graph, k: int, num_samples: int, seed: int = 0, step_cap: int | None = None
) -> UniformityReport:
    """Sample ``num_samples`` times (seeds ``seed + i``) and test against the enumerated support."""
    support = proper_colorings(graph, k)
    if not support:
        raise NoProperColorings(f"graph has no proper {k}-coloring")
    counts = Counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GuaranteeWarning)
        for i in range(num_samples):
            x, _ = rr_sample(graph, k, BitSource(seed + i), step_cap=step_cap)
            counts[tuple(x)] += 1
    observed = [counts[s] for s in support]
    stat, dof, p = chi_square_uniform(observed)
    return UniformityReport(len(support), num_samples, stat, dof, p, num_samples - sum(observed))


@dataclass
class ProcedureConfig:
    """One desk-scale instance for a single-procedure oracle test."""

    name: str
    graph: Graph
    k: int
    entries: list
    trials: int
    seed: int = 0
    options: dict = field(default_factory=dict)

    @property
    def index(self) -> IndexState:
        return IndexState(self.entries, self.k)


@dataclass
class BucketResult:
    index: tuple
    support_size: int
    count: int
    statistic: float
    dof: int
    p_value: float
    tested: bool


@dataclass
class OracleReport:
    name: str
    procedure: str
    trials: int
    buckets: list[BucketResult]
    non_members: int
    branches: Counter

    @property
    def tested(self) -> list[BucketResult]:
        return [b for b in self.buckets if b.tested]

    @property
    def min_p(self) -> float:
        return min((b.p_value for b in self.tested), default=1.0)

    @property
    def pooled(self) -> tuple[float, int, float]:
        stat = sum(b.statistic for b in self.tested)
        dof = sum(b.dof for b in self.tested)
        return stat, dof, float(stats.chi2.sf(stat, dof)) if dof else 1.0

    @property
    def passed(self) -> bool:
        return self.non_members == 0 and bool(self.tested) and self.min_p > P_THRESHOLD


def procedure_oracle_test(config: ProcedureConfig) -> OracleReport:
    """Feed one procedure exactly uniform inputs and check its outputs bucket by bucket.

    Inputs are drawn uniformly from the enumerated admissible set of the
    configured index. After one application, outputs are grouped by output
    index; within each group the output colorings must be uniform over the
    output index's admissible set. Groups too small for a chi-square test
    (fewer than five expected hits per coloring) are reported but not tested.
    """
    graph, k = config.graph, config.k
    start = config.index
    inputs = enumerate_members(start, graph, k)
    if not inputs:
        raise ValueError(f"config {config.name!r} admits no colorings")
    v, cls = select_node(start)
    procedure = _PROCEDURES[cls]
    rng = BitSource(config.seed)

    observed = defaultdict(Counter)
    branches = Counter()
    non_members = 0
    for _ in range(config.trials):
        x = list(inputs[rng.uniform_int(len(inputs))])
        xs = start.copy()
        out = procedure(x, xs, v, graph, rng, **config.options)
        branches[out.branch] += 1
        if not is_member(x, xs, graph):
            non_members += 1
        observed[xs.key()][tuple(x)] += 1

    buckets = []
    for key in sorted(observed, key=repr):
        counts = observed[key]
        total = sum(counts.values())
        support = enumerate_members(list(key), graph, k)
        cells = [counts[s] for s in support]
        stray = total - sum(cells)
        tested = total >= MIN_EXPECTED_PER_CELL * len(support) and stray == 0
        stat, dof, p = chi_square_uniform(cells) if tested else (math.nan, len(support) - 1, math.nan)
        buckets.append(BucketResult(key, len(support), total, stat, dof, p, tested))
    return OracleReport(config.name, procedure.__name__, config.trials, buckets, non_members, branches)


def default_oracle_configs() -> list[ProcedureConfig]:
    star = generate("star", 3)
    path = generate("path", 3)
    # Node 0 adjacent to 1, 2, 3 plus the edge 1-2, so neighbors of v touch.
    paw = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2)])
    N = None
    return [
        ProcedureConfig("ignored_path", path, 4, [0, N, N], 50_000, seed=11),
        ProcedureConfig("ignored_star", star, 4, [0, N, N, N], 60_000, seed=12),
        ProcedureConfig("frozen_path", path, 4, [1, N, 0], 20_000, seed=13),
        ProcedureConfig("frozen_star", star, 5, [3, N, 0, 3], 20_000, seed=14),
        ProcedureConfig("forbidden_star_k13", star, 13, [-13, N, N, N], 400_000, seed=15),
        ProcedureConfig("forbidden_star_k5", star, 5, [-1, N, N, N], 200_000, seed=16),
        ProcedureConfig("forbidden_star_frozen_leaf", star, 5, [-1, 2, N, N], 200_000, seed=17),
        ProcedureConfig("forbidden_star_forbidden_leaf", star, 5, [-1, -1, N, N], 200_000, seed=18),
        ProcedureConfig("forbidden_frozen_at_b", star, 4, [-2, 2, N, 0], 5_000, seed=19),
        ProcedureConfig("forbidden_paw", paw, 6, [-1, N, N, N], 300_000, seed=20),
    ]


@dataclass
class DriftReport:
    k: int
    max_degree: int
    epsilon: Fraction
    steps: int
    runs: int
    mean: float
    stderr: float
    by_kind: dict[str, tuple[int, float, float]]
    min_d: int | None

    @property
    def bound(self) -> float:
        return -float(self.epsilon) + 3 * self.stderr

    @property
    def passed(self) -> bool:
        return self.mean <= self.bound

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "max_degree": self.max_degree,
            "epsilon": str(self.epsilon),
            "steps": self.steps,
            "runs": self.runs,
            "mean_delta_phi": self.mean,
            "stderr": self.stderr,
            "bound": self.bound,
            "passed": self.passed,
            "min_d": self.min_d,
            "by_kind": {
                kind: {"steps": n, "mean_delta_phi": m, "stderr": s}
                for kind, (n, m, s) in sorted(self.by_kind.items())
            },
        }


def _mean_stderr(values: list[float]) -> tuple[float, float]:
    if not values:
        return math.nan, math.nan
    if len(values) == 1:
        return values[0], 0.0
    return statistics.fmean(values), statistics.stdev(values) / math.sqrt(len(values))


def drift_experiment(graph: Graph, k: int, steps: int, seed: int = 0) -> DriftReport:
    """Run complete samples until ``steps`` steps are observed; report per-step potential change.

    Runs are never truncated, so the run count is whatever is needed to reach
    ``steps``. Seeds are ``seed + i`` for the i-th run.
    """
    params = PotentialParams.for_graph(k, graph.max_degree)
    if not guarantee_applies(k, graph.max_degree):
        raise ValueError(f"epsilon = {params.epsilon} is not positive for k={k}")
    deltas: list[float] = []
    per_kind: dict[str, list[float]] = defaultdict(list)
    runs = 0
    min_d = None

    last_phi = Fraction(0)

    def on_step(out, x, xs):
        nonlocal last_phi
        phi = params.potential(xs)
        delta = float(phi - last_phi)
        last_phi = phi
        deltas.append(delta)
        per_kind[out.kind].append(delta)

    while len(deltas) < steps:
        last_phi = Fraction(graph.node_count)
        _, metrics = rr_sample(graph, k, BitSource(seed + runs), warn=False, on_step=on_step)
        if metrics.restarts:
            raise RuntimeError("restart during drift experiment; k too small")
        if metrics.min_d is not None:
            min_d = metrics.min_d if min_d is None else min(min_d, metrics.min_d)
        runs += 1

    mean, se = _mean_stderr(deltas)
    by_kind = {kind: (len(vals), *_mean_stderr(vals)) for kind, vals in per_kind.items()}
    return DriftReport(k, graph.max_degree, params.epsilon, len(deltas), runs, mean, se, by_kind, min_d)


@dataclass
class BenchRow:
    family: str
    n: int
    k: int
    delta: int
    epsilon: Fraction
    reps: int
    mean_steps: float
    steps_per_node: float
    mean_bits_per_step: float
    wall_ms: float

    @property
    def step_bound(self) -> Fraction:
        return self.n / self.epsilon

    @property
    def bits_ceiling(self) -> int:
        return bits_per_step_ceiling(self.k, self.delta)

    def csv_fields(self) -> list:
        return [
            self.family,
            self.n,
            self.k,
            self.delta,
            str(self.epsilon),
            f"{self.mean_steps:.4f}",
            f"{self.steps_per_node:.6f}",
            f"{self.mean_bits_per_step:.4f}",
            f"{self.wall_ms:.3f}",
        ]


BENCH_COLUMNS = [
    "family", "n", "k", "delta", "epsilon", "mean_steps",
    "steps_per_node", "mean_bits_per_step", "wall_ms",
]


def bits_per_step_ceiling(k: int, max_degree: int) -> int:
    return 64 * (max_degree + 2) * max(1, math.ceil(math.log2(k)))


def family_graph(family: str, n: int, seed: int) -> Graph:
    """``cycle``, ``path``, ``complete`` or ``random_regular:<d>`` at size n."""
    kind, _, rest = family.partition(":")
    params = [n] + ([int(p) for p in rest.split(",")] if rest else [])
    return generate(kind, *params, seed=seed)


def scaling_bench(
    family: str, sizes: Sequence[int], k: int, reps: int, seed: int = 0
) -> list[BenchRow]:
    """Mean step counts, bits per step and wall time across graph sizes.

    Run ``i`` at each size uses BitSource seed ``seed + i``; random families
    use ``seed`` for the graph itself.
    """
    rows = []
    if reps <= 0:
        return rows
    for n in sizes:
        graph = family_graph(family, n, seed)
        eps = epsilon_bound(k, graph.max_degree)
        if not guarantee_applies(k, graph.max_degree):
            raise ValueError(f"no linear-time guarantee for k={k}, max degree {graph.max_degree}")
        steps, bits = [], []
        t0 = time.perf_counter()
        for i in range(reps):
            _, m = rr_sample(graph, k, BitSource(seed + i), warn=False)
            steps.append(m.total_steps)
            bits.append(m.random_bits)
        wall_ms = (time.perf_counter() - t0) * 1000 / reps
        mean_steps = statistics.fmean(steps)
        rows.append(
            BenchRow(
                family, n, k, graph.max_degree, eps, reps, mean_steps, mean_steps / n,
                sum(bits) / sum(steps), wall_ms,
            )
        )
    return rows


def scaling_checks(rows: list[BenchRow], trend_tolerance: float = 1.25) -> dict[str, bool]:
    """Step bound per row, bits ceiling per row, and no growth of steps per node."""
    checks = {}
    for r in rows:
        checks[f"steps<=n/eps n={r.n}"] = Fraction(r.mean_steps) <= r.step_bound
        checks[f"bits/step<=ceiling n={r.n}"] = r.mean_bits_per_step <= r.bits_ceiling
    if rows:
        small = min(rows, key=lambda r: r.n)
        large = max(rows, key=lambda r: r.n)
        checks["steps/n trend"] = large.steps_per_node <= trend_tolerance * small.steps_per_node
    return checks




@dataclass
class InvariantReport:
    steps: int
    samples: int
    violations: Counter
    branches: Counter
    share_checks: int

    @property
    def passed(self) -> bool:
        return not self.violations


def invariant_sweep(
    cases: Sequence[tuple[Graph, int]], min_steps: int, seed: int = 0
) -> InvariantReport:
    """Step instrumented samplers over ``cases`` round-robin until ``min_steps`` steps.

    After every step this checks partition consistency and the single
    forbidden color, membership of the state in its index, that the index
    changed, and that only the nodes reported in ``affected_nodes`` changed.
    The share-sum identity is asserted inside the forbidden removal itself;
    ``share_checks`` counts how often that code ran.
    """
    from .core import rr_step
    from .state import initial_state

    violations = Counter()
    branches = Counter()
    steps = samples = share_checks = 0
    rng = BitSource(seed)
    while steps < min_steps:
        graph, k = cases[samples % len(cases)]
        x, xs = initial_state(graph, k, rng)
        samples += 1
        while not xs.is_target() and steps < min_steps:
            before = list(xs.entries)
            try:
                out = rr_step(x, xs, graph, rng)
            except AssertionError:
                violations["share_sum"] += 1
                break
            if out.branch == "degenerate":
                x, xs = initial_state(graph, k, rng)
                continue
            steps += 1
            branches[f"{out.kind}:{out.branch}"] += 1
            if out.branch.startswith("reject_"):
                share_checks += 1
            try:
                xs.check()
            except AssertionError:
                violations["partition"] += 1
            if not is_member(x, xs, graph):
                violations["membership"] += 1
            changed = {v for v, (a, b) in enumerate(zip(before, xs.entries)) if a != b}
            if not changed:
                violations["no_progress"] += 1
            if not changed <= set(out.affected_nodes):
                violations["unreported_change"] += 1
    return InvariantReport(steps, samples, violations, branches, share_checks)
