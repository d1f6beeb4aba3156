"""Acceptance gate: one test and one PASS/FAIL line per criterion."""

import math
from fractions import Fraction

import pytest
import sympy as sp

from rrcolor.graph import generate
from rrcolor.potential import PotentialParams, above_asymptotic_threshold, epsilon_bound, guarantee_applies
from rrcolor.state import proper_colorings
from rrcolor.verification import (
    P_THRESHOLD,
    default_oracle_configs,
    drift_experiment,
    invariant_sweep,
    procedure_oracle_test,
    scaling_bench,
    scaling_checks,
)

SIZES = [64, 256, 1024]
BENCH_K = 13
BENCH_REPS = 20


@pytest.fixture(scope="module")
def bench_rows():
    return {
        "cycle": scaling_bench("cycle", SIZES, BENCH_K, BENCH_REPS, seed=1),
        "random_regular:3": scaling_bench("random_regular:3", SIZES, BENCH_K, BENCH_REPS, seed=1),
    }


def test_criterion_1_exact_uniformity(report_line):
    from rrcolor.verification import uniformity_test

    cases = [("K3", generate("complete", 3), 6, 101), ("P3", generate("path", 3), 12, 202),
             ("C4", generate("cycle", 4), 18, 303)]
    results = []
    for name, g, support, seed in cases:
        assert len(proper_colorings(g, 3)) == support
        rep = uniformity_test(g, 3, 60_000, seed=seed * 1_000_000)
        results.append((name, rep))
    ok = all(r.passed and r.support_size == s for (_, r), (_, _, s, _) in zip(results, cases))
    detail = ", ".join(f"{n} p={r.p_value:.3g} (support {r.support_size})" for n, r in results)
    report_line("1 exactness, 60000 samples each", ok, detail)
    assert ok


def test_criterion_2_procedure_oracles(report_line):
    reports = [procedure_oracle_test(cfg) for cfg in default_oracle_configs()]
    ok = all(r.passed for r in reports)
    worst = min(reports, key=lambda r: r.min_p)
    non_members = sum(r.non_members for r in reports)
    buckets = sum(len(r.tested) for r in reports)
    detail = (f"{len(reports)} configs, {buckets} tested buckets, min p={worst.min_p:.3g} ({worst.name}), "
              f"non-members={non_members}")
    report_line("2 per-procedure oracles", ok, detail)
    for r in reports:
        assert r.non_members == 0, r.name
        assert r.tested and r.min_p > P_THRESHOLD, (r.name, r.min_p)


def test_criterion_3_linear_steps(report_line, bench_rows):
    parts, ok = [], True
    for family, rows in bench_rows.items():
        assert float(rows[0].epsilon) > 0 and all(Fraction(BENCH_K - 1, r.delta) > Fraction(37, 10) for r in rows)
        checks = {k: v for k, v in scaling_checks(rows, 1.25).items() if not k.startswith("bits")}
        ok = ok and all(checks.values())
        ratio = rows[-1].steps_per_node / rows[0].steps_per_node
        parts.append(
            f"{family}: steps/n " + "/".join(f"{r.steps_per_node:.3f}" for r in rows)
            + f" (ratio {ratio:.3f}, 1/eps={float(1 / rows[0].epsilon):.3f})"
        )
    report_line("3 linear time", ok, "; ".join(parts))
    assert ok


def test_criterion_4_drift(report_line):
    rep = drift_experiment(generate("cycle", 8), 13, 10_000, seed=4)
    assert rep.epsilon == epsilon_bound(13, 2)
    kinds = ", ".join(f"{k} {m:.3f}" for k, (_, m, _) in sorted(rep.by_kind.items()))
    report_line("4 drift", rep.passed,
                f"mean dphi {rep.mean:.4f} <= bound {rep.bound:.4f} over {rep.steps} steps ({kinds})")
    assert rep.passed


def test_criterion_5_constants(report_line):
    p = PotentialParams.for_graph(13, 3)
    a, d = sp.symbols("alpha Delta")
    expr = (2 * d * a**2 - 7 * d * a - d + 3 * a - 1) / (
        3 * d**2 * a - 3 * d**2 + 2 * d * a**2 - 4 * d * a - d + 3 * a + 2)
    sym = expr.subs({a: 4, d: 3})
    ok = (p.epsilon == Fraction(1, 7) and p.w2 == Fraction(4, 7) and p.w1 == Fraction(20, 7)
          and sym == sp.Rational(1, 7))
    report_line("5 constants", ok, f"eps={p.epsilon}, w2={p.w2}, w1={p.w1}, symbolic eps={sym}")
    assert ok


def _first(pred, D):
    return next(k for k in range(3 * D, 10 * D) if pred(k, D))


def test_criterion_5_sign_tracks_threshold(report_line):
    """The sign change converges on (7 + sqrt 57)/4 as the degree grows."""
    alpha_star = (7 + math.sqrt(57)) / 4
    gaps = {}
    for D in (10, 100, 1000, 10_000):
        k = _first(guarantee_applies, D)
        gaps[D] = abs((k - 1) / D - alpha_star)
    ok = all(gaps[D] <= 2 / D for D in gaps) and abs(alpha_star - 3.637) < 5e-4
    report_line("5 sign consistent with 3.637", ok,
                ", ".join(f"D={D} |alpha-alpha*|={g:.2e}" for D, g in gaps.items()))
    assert ok


@pytest.mark.xfail(strict=True, reason="at finite degree the sign of epsilon turns positive "
                                       "before 2a^2-7a-1 does; the two agree only as degree grows")
def test_criterion_5_sign_flip_exact(report_line):
    mismatches = []
    for D in (2, 3, 8, 100, 10_000):
        k_eps = _first(guarantee_applies, D)
        k_quad = _first(above_asymptotic_threshold, D)
        if k_eps != k_quad:
            mismatches.append(f"D={D}: eps>0 from k={k_eps}, quadratic>0 from k={k_quad}")
    ok = not mismatches
    report_line("5 sign flips exactly at quadratic", ok, "; ".join(mismatches) or "all agree")
    assert ok


def test_criterion_6_invariants(report_line):
    cases = [
        (generate("cycle", 9), 13),
        (generate("grid", 4, 4), 5),
        (generate("star", 5), 7),
        (generate("random_regular", 12, 3, seed=2), 13),
        (generate("random_regular", 12, 3, seed=3), 5),
        (generate("complete", 4), 6),
        (generate("path", 6), 3),
    ]
    rep = invariant_sweep(cases, 100_000, seed=6)
    forbidden = {b.split(":")[1] for b in rep.branches if b.startswith("remove_forbidden")}
    ok = rep.passed and rep.steps >= 100_000
    report_line("6 invariants", ok,
                f"{rep.steps} steps over {rep.samples} samples, violations={dict(rep.violations)}, "
                f"share-sum checks={rep.share_checks}, forbidden branches seen={len(forbidden)}")
    assert ok
    assert rep.share_checks > 0


def test_criterion_7_bits_per_step(report_line, bench_rows):
    rows = [r for family in bench_rows.values() for r in family]
    ok = all(r.mean_bits_per_step <= r.bits_ceiling for r in rows)
    worst = max(rows, key=lambda r: r.mean_bits_per_step / r.bits_ceiling)
    report_line("7 bits per step", ok,
                f"max {worst.mean_bits_per_step:.2f} bits/step vs ceiling {worst.bits_ceiling} "
                f"({worst.family} n={worst.n})")
    assert ok
