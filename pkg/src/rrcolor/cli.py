"""Command line entry point.

Subcommands: ``sample``, ``enumerate``, ``verify``, ``drift``, ``bench``.
Exit status is 0 on success, 1 on usage or input errors, 2 when the step
budget runs out before a sample is produced, and 3 when a verification
check fails.

CSV columns for ``bench``: family,n,k,delta,epsilon,mean_steps,
steps_per_node,mean_bits_per_step,wall_ms.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor

from .core import THRESHOLD_TEXT, BudgetExceeded, GuaranteeWarning, rr_sample
from .graph import Graph, GraphFormatError, parse_generator_spec, parse_graph
from .potential import GuaranteeUndefined, above_asymptotic_threshold, epsilon_bound, guarantee_applies
from .randomness import SEED_MASK, BitSource
from .state import coloring_to_text, proper_colorings
from .verification import (
    BENCH_COLUMNS,
    NoProperColorings,
    drift_experiment,
    scaling_bench,
    scaling_checks,
    uniformity_test,
)

SCHEMA_VERSION = 1

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_CHECK_FAILED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= value <= SEED_MASK:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _sizes(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rrcolor", description="Exact uniform proper colorings.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--colors", "-k", type=_positive, required=True, help="number of colors k")
    common.add_argument("--seed", type=_seed, default=0, help="decimal or 0x-hex, up to 64 bits")
    common.add_argument("--format", choices=["json", "text", "csv"], default="json")
    common.add_argument("--step-cap", type=_positive, default=None, help="per-sample step budget")

    source = argparse.ArgumentParser(add_help=False)
    group = source.add_mutually_exclusive_group(required=True)
    group.add_argument("--graph", help="graph file in 'p edge' format")
    group.add_argument("--generate", help="generator spec, e.g. cycle:8, grid:4,5, random_regular:50,3")

    p = sub.add_parser("sample", parents=[common, source], help="draw proper colorings")
    p.add_argument("--samples", type=_positive, default=1)
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--trace-potential", action="store_true")

    sub.add_parser("enumerate", parents=[common, source], help="list all proper colorings")

    p = sub.add_parser("verify", parents=[common, source], help="chi-square uniformity test")
    p.add_argument("--samples", type=_positive, default=60_000)

    p = sub.add_parser("drift", parents=[common, source], help="per-step potential drift")
    p.add_argument("--steps", type=_positive, default=10_000)

    p = sub.add_parser("bench", parents=[common], help="step counts across graph sizes")
    p.add_argument("--family", default="cycle", help="cycle, path, complete or random_regular:<d>")
    p.add_argument("--sizes", type=_sizes, default=[64, 256, 1024])
    p.add_argument("--reps", type=int, default=10)
    return parser


def _load_graph(args) -> Graph:
    if args.graph:
        try:
            with open(args.graph, encoding="utf-8") as fh:
                return parse_graph(fh)
        except OSError as exc:
            raise UsageError(f"cannot read graph: {exc}") from None
    return parse_generator_spec(args.generate, seed=args.seed)


def _guarantee_info(graph: Graph, k: int) -> dict:
    try:
        eps = str(epsilon_bound(k, graph.max_degree))
    except GuaranteeUndefined:
        eps = None
    return {
        "max_degree": graph.max_degree,
        "epsilon": eps,
        "linear_time_guarantee": guarantee_applies(k, graph.max_degree),
        "above_asymptotic_threshold": above_asymptotic_threshold(k, graph.max_degree),
    }


def _dump_json(payload: dict, out) -> None:
    out.write(json.dumps({"schema_version": SCHEMA_VERSION, **payload}, indent=2) + "\n")


def _sample_one(job):
    graph, k, seed, step_cap, trace = job
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GuaranteeWarning)
        try:
            x, m = rr_sample(graph, k, BitSource(seed), step_cap=step_cap, trace_potential=trace)
        except BudgetExceeded as exc:
            return None, exc.metrics
    return x, m


def cmd_sample(args, graph: Graph, out) -> int:
    k = args.colors
    jobs = [(graph, k, (args.seed + i) & SEED_MASK, args.step_cap, args.trace_potential)
            for i in range(args.samples)]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_sample_one, jobs))
    else:
        results = [_sample_one(job) for job in jobs]
    for i, (x, m) in enumerate(results):
        if x is None:
            print(f"error: budget exceeded on sample {i} after {m.total_steps} steps "
                  f"({m.restarts} restarts); no sample emitted", file=sys.stderr)
            return EXIT_BUDGET

    if args.format == "json":
        _dump_json({
            "command": "sample",
            "n": graph.node_count,
            "k": k,
            "seed": args.seed,
            "guarantee": _guarantee_info(graph, k),
            "samples": [
                {"index": i, "seed": job[2], "coloring": x, "metrics": m.as_dict()}
                for i, (job, (x, m)) in enumerate(zip(jobs, results))
            ],
        }, out)
    elif args.format == "text":
        for i, (job, (x, m)) in enumerate(zip(jobs, results)):
            out.write(f"c sample {i} seed {job[2]} steps {m.total_steps} bits {m.random_bits}\n")
            out.write(coloring_to_text(x))
    else:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["sample", "node", "color"])
        for i, (x, _) in enumerate(results):
            for v, c in enumerate(x):
                writer.writerow([i, v + 1, c])
    return EXIT_OK


def cmd_enumerate(args, graph: Graph, out) -> int:
    try:
        colorings = proper_colorings(graph, args.colors)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "json":
        _dump_json({"command": "enumerate", "n": graph.node_count, "k": args.colors,
                    "count": len(colorings), "colorings": [list(c) for c in colorings]}, out)
    elif args.format == "text":
        out.write(f"c {len(colorings)} proper colorings\n")
        for c in colorings:
            out.write(" ".join(map(str, c)) + "\n")
    else:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow([f"node{v + 1}" for v in range(graph.node_count)])
        writer.writerows(colorings)
    return EXIT_OK


def cmd_verify(args, graph: Graph, out) -> int:
    try:
        report = uniformity_test(graph, args.colors, args.samples, args.seed, args.step_cap)
    except NoProperColorings as exc:
        raise UsageError(str(exc)) from None
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    data = report.as_dict()
    if args.format == "json":
        _dump_json({"command": "verify", "k": args.colors, "seed": args.seed, **data}, out)
    elif args.format == "text":
        out.write(f"support {report.support_size} colorings, {report.num_samples} samples\n"
                  f"chi-square {report.statistic:.4f} on {report.dof} dof, p = {report.p_value:.6g}\n"
                  f"{'PASS' if report.passed else 'FAIL'} (p > 0.001)\n")
    else:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(list(data))
        writer.writerow(list(data.values()))
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_drift(args, graph: Graph, out) -> int:
    try:
        report = drift_experiment(graph, args.colors, args.steps, args.seed)
    except (GuaranteeUndefined, ValueError) as exc:
        raise UsageError(str(exc)) from None
    data = report.as_dict()
    if args.format == "json":
        _dump_json({"command": "drift", "seed": args.seed, **data}, out)
    elif args.format == "text":
        out.write(f"{report.steps} steps over {report.runs} runs, epsilon = {report.epsilon}\n"
                  f"mean delta phi {report.mean:.6f} (stderr {report.stderr:.6f}), "
                  f"bound {report.bound:.6f}\n")
        for kind, (n, m, s) in sorted(report.by_kind.items()):
            out.write(f"  {kind}: {n} steps, mean {m:.6f} (stderr {s:.6f})\n")
        out.write(f"{'PASS' if report.passed else 'FAIL'}\n")
    else:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["kind", "steps", "mean_delta_phi", "stderr"])
        writer.writerow(["all", report.steps, report.mean, report.stderr])
        for kind, (n, m, s) in sorted(report.by_kind.items()):
            writer.writerow([kind, n, m, s])
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_bench(args, out) -> int:
    try:
        rows = scaling_bench(args.family, args.sizes, args.colors, args.reps, args.seed)
    except (GuaranteeUndefined, ValueError) as exc:
        raise UsageError(str(exc)) from None
    checks = scaling_checks(rows)
    if args.format == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(BENCH_COLUMNS)
        for r in rows:
            writer.writerow(r.csv_fields())
    elif args.format == "json":
        _dump_json({"command": "bench", "seed": args.seed,
                    "rows": [dict(zip(BENCH_COLUMNS, r.csv_fields())) for r in rows],
                    "checks": checks}, out)
    else:
        for r in rows:
            out.write(" ".join(f"{c}={v}" for c, v in zip(BENCH_COLUMNS, r.csv_fields())) + "\n")
        for name, ok in checks.items():
            out.write(f"{'PASS' if ok else 'FAIL'} {name}\n")
    return EXIT_OK if all(checks.values()) else EXIT_CHECK_FAILED


def run(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if args.command == "bench":
            return cmd_bench(args, out)
        graph = _load_graph(args)
        if not above_asymptotic_threshold(args.colors, graph.max_degree):
            print(f"warning: k={args.colors}, max degree {graph.max_degree}: below the "
                  f"linear-time guarantee {THRESHOLD_TEXT}", file=sys.stderr)
        handler = {"sample": cmd_sample, "enumerate": cmd_enumerate,
                   "verify": cmd_verify, "drift": cmd_drift}[args.command]
        return handler(args, graph, out)
    except (UsageError, GraphFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
