"""Command line interface.

Subcommands: run (one experiment to a JSON report), sweep (parameter
grid over problems), bench (method timing comparison), export-map
(fit once and write CSV/SVG), validate-graph (schema-check a graph
file).  Exit code 0 on success, 1 on any diagnosed error; the work pool
size is capped by the CHUNKLAB_THREADS environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

import numpy as np

from .clustering import ClusteringConfig, assign_chunks
from .dynamics import NEGATIVE_RULES, DynamicsConfig, SyncMap
from .errors import ChunkLabError
from .export import export_map
from .harness import (
    ExperimentConfig,
    bench_table,
    run_bench,
    run_experiment,
    run_sweep,
    sweep_table,
)
from .problems import get_problem, list_problems, load_graph

_RULE_CHOICES = sorted(set(NEGATIVE_RULES) | {"eq8", "split"})


def _dynamics_from(args) -> DynamicsConfig:
    cfg = DynamicsConfig()
    overrides = {}
    if args.alpha is not None:
        overrides["alpha"] = args.alpha
    if args.alpha_mode is not None:
        overrides["alpha_mode"] = args.alpha_mode
    if args.dims is not None:
        overrides["dims"] = args.dims
    if args.radius is not None:
        overrides["radius"] = args.radius
    if args.negative_rule is not None:
        overrides["negative_rule"] = args.negative_rule
    return replace(cfg, **overrides) if overrides else cfg


def cmd_run(args) -> int:
    config = ExperimentConfig(
        problem=args.problem,
        method=args.method,
        trials=args.trials,
        seed=args.seed,
        samples_per_task=args.samples_per_task,
        dynamics=_dynamics_from(args),
        clustering=(
            ClusteringConfig(eps=args.eps) if args.eps is not None
            else ClusteringConfig()
        ),
    )
    report = run_experiment(config)
    payload = json.dumps(report.to_dict(), indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)
    summary = ", ".join(
        f"{name} {m:0.3f} +- {s:0.3f}"
        for name, m, s in zip(report.task_names, report.means, report.stds)
    )
    print(f"{args.problem} / {args.method}: {summary}", file=sys.stderr)
    if report.errors:
        print(f"{len(report.errors)} trial(s) failed", file=sys.stderr)
        return 1
    return 0


def cmd_sweep(args) -> int:
    problems = [p for p in args.problems.split(",") if p]
    sweep = run_sweep(
        problems,
        trials=args.trials,
        seed=args.seed,
        samples_per_task=args.samples_per_task,
    )
    os.makedirs(args.out, exist_ok=True)
    failed = False
    for pid in problems:
        table = sweep_table(sweep, pid)
        base = os.path.join(args.out, pid.replace("/", "_"))
        with open(base + ".json", "w", encoding="utf-8") as fh:
            json.dump(
                {k: sweep[k] for k in ("schema_version", "trials", "seed")}
                | {"problem": pid, **sweep["problems"][pid]},
                fh, indent=2, sort_keys=True,
            )
            fh.write("\n")
        with open(base + ".txt", "w", encoding="utf-8") as fh:
            fh.write(table + "\n")
        print(table)
        print()
        failed = failed or any("error" in r for r in sweep["problems"][pid]["rows"])
    return 1 if failed else 0


def cmd_bench(args) -> int:
    methods = [m for m in args.methods.split(",") if m]
    bench = run_bench(
        methods,
        problem=args.problem,
        trials=args.trials,
        seed=args.seed,
        samples_per_task=args.samples_per_task,
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(bench, fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(bench_table(bench))
    return 0


def cmd_export_map(args) -> int:
    problem = get_problem(args.problem)
    rng = np.random.default_rng([args.seed, 0])
    sequence = problem.sequence(args.samples_per_task, rng)
    learner = SyncMap(len(sequence.state_names), rng=rng)
    learner.feed(sequence.states)
    labels = assign_chunks(learner).labels
    export_map(
        learner.weights, labels, args.out, args.format,
        state_names=sequence.state_names,
    )
    print(f"wrote {args.format} map for {args.problem} to {args.out}")
    return 0


def cmd_validate_graph(args) -> int:
    graph = load_graph(args.file)
    chunks = sorted(set(int(c) for c in graph.chunk_labels))
    print(
        f"{args.file}: ok ({len(graph.states)} states, "
        f"{int(np.count_nonzero(graph.transitions))} edges, "
        f"{len(chunks)} chunks, {int(graph.fixed.sum())} fixed states)"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="chunklab",
        description="Temporal chunking benchmark harness.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment, emit a JSON report")
    run.add_argument("--problem", required=True,
                     help=f"problem id ({', '.join(list_problems())}) "
                          "or a graph JSON path")
    run.add_argument("--method", default="syncmap",
                     choices=["syncmap", "parser"])
    run.add_argument("--trials", type=int, default=30)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--samples-per-task", type=int, default=100000)
    run.add_argument("--alpha", type=float, default=None)
    run.add_argument("--alpha-mode", default=None, choices=["fixed", "out"])
    run.add_argument("--dims", type=int, default=None)
    run.add_argument("--radius", type=float, default=None)
    run.add_argument("--eps", type=float, default=None)
    run.add_argument("--negative-rule", default=None, choices=_RULE_CHOICES)
    run.add_argument("--out", default=None, help="report path (default stdout)")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="parameter grid over problems")
    sweep.add_argument("--problems", required=True,
                       help="comma-separated problem ids")
    sweep.add_argument("--trials", type=int, default=30)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--samples-per-task", type=int, default=100000)
    sweep.add_argument("--out", required=True, help="output directory")
    sweep.set_defaults(func=cmd_sweep)

    bench = sub.add_parser("bench", help="method wall-clock comparison")
    bench.add_argument("--methods", default="syncmap,parser")
    bench.add_argument("--problem", default="fixed_chunks")
    bench.add_argument("--trials", type=int, default=30)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--samples-per-task", type=int, default=100000)
    bench.add_argument("--out", default=None, help="optional JSON path")
    bench.set_defaults(func=cmd_bench)

    export = sub.add_parser("export-map", help="fit once and export the map")
    export.add_argument("--problem", required=True)
    export.add_argument("--seed", type=int, default=0)
    export.add_argument("--samples-per-task", type=int, default=100000)
    export.add_argument("--format", required=True, choices=["csv", "svg"])
    export.add_argument("--out", required=True)
    export.set_defaults(func=cmd_export_map)

    validate = sub.add_parser("validate-graph", help="schema-check a graph file")
    validate.add_argument("file")
    validate.set_defaults(func=cmd_validate_graph)

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ChunkLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
