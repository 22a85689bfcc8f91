"""Experiment orchestration: trial batches, sweeps, timing, comparisons.

A trial is one end-to-end pass: generate a sequence, fit a method on it
(task by task for continual schedules, carrying the learner over), read
chunks out, and score each task against its truth labeling.  Trial i of
an experiment draws every random decision from a generator seeded with
(seed, i), so any single trial can be reproduced without re-running the
batch, and batches are embarrassingly parallel.

Reports serialize to JSON with a stable schema.  A determinism hash
covers everything except wall-clock timings and environment notes, so
re-running the same config+seed must reproduce the hash bit for bit.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import os
import platform
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .clustering import ClusteringConfig, assign_chunks
from .dynamics import DynamicsConfig, SyncMap
from .errors import ConfigError
from .metrics import nmi, welch_t_test
from .parser_baseline import ParserConfig, PerceptLexicon, parser_chunks
from .problems import get_problem

SCHEMA_VERSION = 1

METHODS = ("syncmap", "parser")

DEFAULT_SWEEP_GRID = (
    (0.1, "fixed", 3),
    (0.01, "fixed", 3),
    (0.01, "out", 3),
    (0.001, "out", 3),
    (0.1, "fixed", 2),
    (0.01, "fixed", 2),
    (0.01, "out", 2),
    (0.001, "out", 2),
)


def worker_count() -> int:
    """Size of the trial pool, capped by the CHUNKLAB_THREADS env var."""
    n = os.cpu_count() or 1
    cap = os.environ.get("CHUNKLAB_THREADS")
    if cap is not None:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ConfigError(f"CHUNKLAB_THREADS must be an integer, got {cap!r}")
    return n


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a problem, a method, and a trial budget."""

    problem: str
    method: str = "syncmap"
    trials: int = 30
    seed: int = 0
    samples_per_task: int = 100000
    dynamics: DynamicsConfig = field(default_factory=DynamicsConfig)
    parser: ParserConfig = field(default_factory=ParserConfig)
    clustering: ClusteringConfig = field(default_factory=ClusteringConfig)

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ConfigError(
                f"unknown method {self.method!r}; expected one of {METHODS}"
            )
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.samples_per_task < 1:
            raise ConfigError("samples_per_task must be at least 1")

    def echo(self) -> dict:
        """JSON-ready copy of every setting, for the report header."""
        return {
            "problem": self.problem,
            "method": self.method,
            "trials": self.trials,
            "seed": self.seed,
            "samples_per_task": self.samples_per_task,
            "dynamics": asdict(self.dynamics),
            "parser": asdict(self.parser),
            "clustering": asdict(self.clustering),
        }


@dataclass
class ExperimentReport:
    """Per-trial scores and timings plus their aggregates."""

    config: dict
    task_names: list
    scores: np.ndarray  # trials x tasks, NaN where the trial failed
    seconds: np.ndarray  # fit wall-clock per trial
    errors: list  # (trial index, message) pairs

    @property
    def means(self) -> np.ndarray:
        return np.nanmean(self.scores, axis=0)

    @property
    def stds(self) -> np.ndarray:
        """Sample std per task (ddof=1); a single trial has std 0."""
        out = np.zeros(self.scores.shape[1])
        for k in range(self.scores.shape[1]):
            col = self.scores[:, k]
            col = col[~np.isnan(col)]
            if col.size > 1:
                out[k] = col.std(ddof=1)
        return out

    def to_dict(self) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "config": self.config,
            "task_names": list(self.task_names),
            "scores": [[_json_float(v) for v in row] for row in self.scores],
            "means": [_json_float(v) for v in self.means],
            "stds": [_json_float(v) for v in self.stds],
            "errors": [list(e) for e in self.errors],
            "determinism_hash": self.determinism_hash(),
        }
        d["seconds"] = [float(s) for s in self.seconds]
        d["seconds_mean"] = float(np.mean(self.seconds))
        d["seconds_std"] = float(np.std(self.seconds))
        return d

    def determinism_hash(self) -> str:
        """SHA-256 over the report minus timing and environment fields."""
        stable = {
            "schema_version": SCHEMA_VERSION,
            "config": self.config,
            "task_names": list(self.task_names),
            "scores": [[_json_float(v) for v in row] for row in self.scores],
            "errors": [list(e) for e in self.errors],
        }
        blob = json.dumps(stable, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _json_float(v) -> float | None:
    v = float(v)
    return None if np.isnan(v) else v


def _score_tasks(sequence, fit_one_task) -> tuple[list, float]:
    """Feed each task slice and score at its end; returns scores, seconds."""
    scores = []
    elapsed = 0.0
    for (start, end), truth in zip(sequence.task_slices(), sequence.truth):
        t0 = time.perf_counter()
        labels = fit_one_task(sequence.states[start:end])
        elapsed += time.perf_counter() - t0
        scores.append(nmi(labels, truth))
    return scores, elapsed


def run_trial(config: ExperimentConfig, trial: int) -> tuple[list, float]:
    """One self-contained trial; (seed, trial) pins all randomness."""
    problem = get_problem(config.problem)
    rng = np.random.default_rng([config.seed, trial])
    sequence = problem.sequence(config.samples_per_task, rng)
    n_states = len(sequence.state_names)

    if config.method == "syncmap":
        learner = SyncMap(n_states, config.dynamics, rng=rng)

        def fit_one_task(states):
            learner.feed(states)
            return assign_chunks(learner, config.clustering).labels

    else:
        lexicon = PerceptLexicon(n_states, config.parser)

        def fit_one_task(states):
            lexicon.feed(states, rng)
            return parser_chunks(lexicon).labels

    return _score_tasks(sequence, fit_one_task)


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run every trial of one experiment, in a thread pool."""
    problem = get_problem(config.problem)  # fail fast on unknown ids
    n_tasks = len(problem.truths)
    scores = np.full((config.trials, n_tasks), np.nan)
    seconds = np.zeros(config.trials)
    errors: list[tuple[int, str]] = []

    def one(i: int):
        return run_trial(config, i)

    with concurrent.futures.ThreadPoolExecutor(worker_count()) as pool:
        futures = [pool.submit(one, i) for i in range(config.trials)]
        for i, future in enumerate(futures):
            try:
                trial_scores, elapsed = future.result()
            except Exception as exc:
                errors.append((i, f"{type(exc).__name__}: {exc}"))
                continue
            scores[i] = trial_scores
            seconds[i] = elapsed

    task_names = (
        ["nmi"] if n_tasks == 1 else [f"task{k + 1}" for k in range(n_tasks)]
    )
    return ExperimentReport(
        config=config.echo(),
        task_names=task_names,
        scores=scores,
        seconds=seconds,
        errors=errors,
    )


def run_sweep(
    problems,
    grid=None,
    trials: int = 30,
    seed: int = 0,
    samples_per_task: int = 100000,
    base_config: ExperimentConfig | None = None,
) -> dict:
    """Parameter sweep over (alpha, alpha_mode, dims) rows per problem.

    The default grid is the eight standard variation rows.  Each cell
    is a full experiment; a failing cell records its error and the sweep
    keeps going.  Returns {problem: {"task_names": [...], "rows": [...]}}
    plus a schema header.
    """
    problems = list(problems)
    grid = list(DEFAULT_SWEEP_GRID if grid is None else grid)
    if not problems:
        raise ConfigError("sweep needs at least one problem")
    if not grid:
        raise ConfigError("sweep grid is empty")
    base = base_config if base_config is not None else ExperimentConfig(
        problem="fixed_chunks"
    )

    out = {"schema_version": SCHEMA_VERSION, "trials": trials, "seed": seed,
           "problems": {}}
    for pid in problems:
        rows = []
        task_names = None
        for alpha, mode, dims in grid:
            label = f"({alpha}, {mode}, {dims}d)"
            try:
                config = replace(
                    base,
                    problem=pid,
                    method="syncmap",
                    trials=trials,
                    seed=seed,
                    samples_per_task=samples_per_task,
                    dynamics=replace(
                        base.dynamics, alpha=alpha, alpha_mode=mode, dims=dims
                    ),
                )
                report = run_experiment(config)
            except Exception as exc:
                rows.append({"label": label, "alpha": alpha, "mode": mode,
                             "dims": dims, "error": f"{type(exc).__name__}: {exc}"})
                continue
            task_names = report.task_names
            rows.append({
                "label": label,
                "alpha": alpha,
                "mode": mode,
                "dims": dims,
                "means": [_json_float(v) for v in report.means],
                "stds": [_json_float(v) for v in report.stds],
                "errors": [list(e) for e in report.errors],
                "determinism_hash": report.determinism_hash(),
            })
        out["problems"][pid] = {
            "task_names": task_names or ["nmi"],
            "rows": rows,
        }
    return out


def sweep_table(sweep: dict, problem: str) -> str:
    """Text table for one problem of a sweep report."""
    block = sweep["problems"][problem]
    names = block["task_names"]
    width = max(len(r["label"]) for r in block["rows"])
    lines = [f"== {problem} ==",
             " ".join([f"{'variant':<{width}}"] + [f"{n:>13}" for n in names])]
    for row in block["rows"]:
        if "error" in row:
            lines.append(f"{row['label']:<{width}} error: {row['error']}")
            continue
        cells = [
            f"{m:0.2f} +- {s:0.2f}".rjust(13)
            for m, s in zip(row["means"], row["stds"])
        ]
        lines.append(" ".join([f"{row['label']:<{width}}"] + cells))
    return "\n".join(lines)


def environment_note() -> dict:
    """Hardware/software context for timing tables."""
    return {
        "platform": platform.platform(),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "cpus": os.cpu_count(),
        "workers": worker_count(),
    }


def run_bench(
    methods=("syncmap", "parser"),
    problem: str = "fixed_chunks",
    trials: int = 30,
    seed: int = 0,
    samples_per_task: int = 100000,
) -> dict:
    """Wall-clock comparison of methods on identical generated inputs.

    Trial i of every method generates its sequence from the same
    (seed, i) stream, so the fitted inputs match sample for sample and
    only the fitting work differs.  Timing covers fit plus chunk
    readout, not sequence generation.
    """
    methods = list(methods)
    if not methods:
        raise ConfigError("bench needs at least one method")
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"unknown method {m!r}; expected one of {METHODS}")

    rows = []
    for method in methods:
        # throwaway run so JIT compilation never lands in a timed trial
        run_trial(ExperimentConfig(
            problem=problem, method=method, trials=1, seed=seed,
            samples_per_task=min(1000, samples_per_task),
        ), 0)
        report = run_experiment(ExperimentConfig(
            problem=problem, method=method, trials=trials, seed=seed,
            samples_per_task=samples_per_task,
        ))
        rows.append({
            "method": method,
            "seconds_mean": float(np.mean(report.seconds)),
            "seconds_std": float(np.std(report.seconds)),
            "nmi_means": [_json_float(v) for v in report.means],
            "errors": [list(e) for e in report.errors],
        })
    return {
        "schema_version": SCHEMA_VERSION,
        "problem": problem,
        "trials": trials,
        "seed": seed,
        "samples_per_task": samples_per_task,
        "environment": environment_note(),
        "rows": rows,
    }


def bench_table(bench: dict) -> str:
    """Text rendering of a bench report."""
    lines = [f"== timing on {bench['problem']} "
             f"({bench['trials']} trials, {bench['samples_per_task']} samples) ==",
             f"{'method':<10} {'seconds':>16}"]
    for row in bench["rows"]:
        cell = f"{row['seconds_mean']:0.3f} +- {row['seconds_std']:0.3f}"
        lines.append(f"{row['method']:<10} {cell:>16}")
    return "\n".join(lines)


def report_tables(reports) -> dict:
    """Cross-method comparison with best-mean bolding per task column.

    A cell is marked bold when it holds the best mean, or when a Welch
    t-test cannot reject (at 5%) that its mean equals the best one.
    Returns {"data": ..., "text": ...}; text cells wrap bold entries in
    asterisks.
    """
    reports = list(reports)
    if not reports:
        raise ConfigError("report_tables needs at least one report")

    by_problem: dict[str, list[ExperimentReport]] = {}
    for r in reports:
        by_problem.setdefault(r.config["problem"], []).append(r)
    method_sets = {
        pid: tuple(sorted(r.config["method"] for r in rs))
        for pid, rs in by_problem.items()
    }
    if len(set(method_sets.values())) != 1:
        raise ConfigError(
            f"every problem needs the same method set, got {method_sets}"
        )

    data = {}
    text_blocks = []
    for pid, rs in by_problem.items():
        names = rs[0].task_names
        if any(r.task_names != names for r in rs):
            raise ConfigError(f"task structure differs across reports for {pid}")
        columns = []
        for k, task in enumerate(names):
            samples = {
                r.config["method"]: r.scores[:, k][~np.isnan(r.scores[:, k])]
                for r in rs
            }
            means = {m: float(np.mean(s)) if s.size else float("nan")
                     for m, s in samples.items()}
            best = max(means, key=lambda m: means[m])
            cells = {}
            for r in rs:
                m = r.config["method"]
                p = (1.0 if m == best
                     else welch_t_test(samples[best], samples[m]))
                cells[m] = {
                    "mean": _json_float(means[m]),
                    "std": _json_float(
                        float(np.std(samples[m], ddof=1))
                        if samples[m].size > 1 else 0.0
                    ),
                    "p_vs_best": _json_float(p),
                    "bold": bool(m == best or p >= 0.05),
                }
            columns.append({"task": task, "best": best, "cells": cells})
        data[pid] = columns

        methods = [r.config["method"] for r in rs]
        width = max(10, max(len(m) for m in methods) + 1)
        lines = [f"== {pid} ==",
                 " ".join([f"{'method':<{width}}"] + [f"{n:>16}" for n in names])]
        for m in methods:
            row = [f"{m:<{width}}"]
            for col in columns:
                c = col["cells"][m]
                cell = f"{c['mean']:0.2f} +- {c['std']:0.2f}"
                cell = f"*{cell}*" if c["bold"] else f" {cell} "
                row.append(f"{cell:>16}")
            lines.append(" ".join(row))
        text_blocks.append("\n".join(lines))

    legend = ("cells in *asterisks*: best mean, or Welch p >= 0.05 against "
              "the best (mean equality not rejected at 5%)")
    return {
        "schema_version": SCHEMA_VERSION,
        "legend": legend,
        "data": data,
        "text": "\n\n".join(text_blocks + [legend]),
    }
