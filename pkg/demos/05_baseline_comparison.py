"""
Map learner versus n-gram lexicon
=================================

The lexicon baseline nails short deterministic chains almost instantly,
but long dwell times starve it of repeating n-grams. The map is slower
per trial yet keeps its accuracy there. Both sides of that trade show up
in one comparison table plus a timing run.
"""

from chunklab.harness import (
    ExperimentConfig,
    bench_table,
    report_tables,
    run_bench,
    run_experiment,
)

reports = [
    run_experiment(ExperimentConfig(
        problem=problem,
        method=method,
        trials=5,
        samples_per_task=30000,
    ))
    for problem in ("fixed_chunks", "long_chunks")
    for method in ("syncmap", "parser")
]

# asterisks mark the best mean per column and any statistical ties with it
print(report_tables(reports)["text"])

bench = run_bench(trials=5, samples_per_task=30000)
print()
print(bench_table(bench))
