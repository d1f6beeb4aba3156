from fractions import Fraction

import pytest

from rrcolor.graph import generate
from rrcolor.verification import (
    BENCH_COLUMNS,
    NoProperColorings,
    ProcedureConfig,
    bits_per_step_ceiling,
    chi_square_uniform,
    default_oracle_configs,
    drift_experiment,
    family_graph,
    invariant_sweep,
    procedure_oracle_test,
    scaling_bench,
    scaling_checks,
    uniformity_test,
)

N = None


def test_chi_square_uniform_flat_counts():
    stat, dof, p = chi_square_uniform([100, 100, 100])
    assert stat == 0 and dof == 2 and p == pytest.approx(1.0)


def test_uniformity_small_graph():
    report = uniformity_test(generate("path", 2), 3, 3000, seed=5)
    assert report.support_size == 6
    assert report.passed
    assert report.num_samples == 3000 and report.unsupported == 0


def test_uniformity_empty_support():
    with pytest.raises(NoProperColorings):
        uniformity_test(generate("complete", 3), 2, 10, seed=0, step_cap=100)


def test_uniformity_deterministic():
    a = uniformity_test(generate("path", 2), 3, 500, seed=2)
    b = uniformity_test(generate("path", 2), 3, 500, seed=2)
    assert a.as_dict() == b.as_dict()


def test_oracle_small_config_passes():
    cfg = ProcedureConfig("frozen_path_small", generate("path", 3), 3, [1, N, 0], 6000, seed=3)
    report = procedure_oracle_test(cfg)
    assert report.non_members == 0
    assert report.tested
    assert report.passed


def test_oracle_detects_wrong_line_nine():
    # Freezing v at the forbidden color instead of w's color is not exact.
    good = next(c for c in default_oracle_configs() if c.name == "forbidden_star_k5")
    bad = ProcedureConfig(good.name, good.graph, good.k, good.entries, 60_000, seed=good.seed,
                          options={"v_freeze": "b"})
    assert not procedure_oracle_test(bad).passed


def test_default_configs_cover_all_kinds():
    names = [c.name for c in default_oracle_configs()]
    assert len(names) == len(set(names))
    assert {n.split("_")[0] for n in names} == {"ignored", "frozen", "forbidden"}


def test_drift_single_node():
    report = drift_experiment(generate("empty", 1), 5, 20, seed=1)
    assert report.runs == 20 and report.steps == 20
    assert report.mean == -1 and report.stderr == 0


def test_drift_deterministic_and_bounded():
    a = drift_experiment(generate("cycle", 8), 13, 2000, seed=4)
    b = drift_experiment(generate("cycle", 8), 13, 2000, seed=4)
    assert a.as_dict() == b.as_dict()
    assert a.epsilon == Fraction(25, 58)
    assert a.passed


def test_drift_requires_positive_epsilon():
    with pytest.raises(ValueError):
        drift_experiment(generate("cycle", 8), 5, 10)
    with pytest.raises(ValueError):
        drift_experiment(generate("cycle", 8), 2, 10)


def test_bench_reps_zero_is_empty():
    assert scaling_bench("cycle", [8, 16], 13, 0) == []
    assert scaling_checks([]) == {}


def test_bench_rows_and_checks():
    rows = scaling_bench("cycle", [16, 64], 13, 5, seed=2)
    assert [r.n for r in rows] == [16, 64]
    assert all(len(r.csv_fields()) == len(BENCH_COLUMNS) for r in rows)
    checks = scaling_checks(rows)
    assert all(checks.values())
    again = scaling_bench("cycle", [16, 64], 13, 5, seed=2)
    assert [r.mean_steps for r in rows] == [r.mean_steps for r in again]


def test_bench_refuses_without_guarantee():
    with pytest.raises(ValueError):
        scaling_bench("cycle", [8], 4, 1)


def test_bits_ceiling_values():
    assert bits_per_step_ceiling(13, 2) == 64 * 4 * 4
    assert bits_per_step_ceiling(2, 1) == 64 * 3


def test_family_graph():
    assert family_graph("cycle", 10, 0) == generate("cycle", 10)
    assert set(family_graph("random_regular:3", 10, 1).degrees) == {3}


def test_invariant_sweep_small():
    cases = [(generate("cycle", 5), 3), (generate("grid", 3, 3), 5), (generate("star", 4), 6)]
    report = invariant_sweep(cases, 5000, seed=1)
    assert report.steps == 5000
    assert report.passed, report.violations
