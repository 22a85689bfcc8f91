"""chunklab: self-organizing temporal chunking and its benchmark suite.

The library half: a streaming learner that embeds co-activating states
close together on a bounded map (`SyncMap`), a density readout that
turns map geometry into chunk labels, an n-gram baseline, and the
generative problems they are scored on.  The harness half: experiment
batches, parameter sweeps, timing comparisons, and map exports, all
reachable from the `chunklab` command line tool.
"""

from .clustering import ChunkAssignment, ClusteringConfig, assign_chunks, dbscan
from .dynamics import NEGATIVE_RULES, DynamicsConfig, SyncMap, SyncMapState, fit
from .encoding import EncoderConfig, encode_step
from .errors import (
    ChunkLabError,
    ConfigError,
    GraphFormatError,
    InputError,
    NumericFailure,
)
from .export import export_map, map_csv, map_svg
from .harness import (
    ExperimentConfig,
    ExperimentReport,
    report_tables,
    run_bench,
    run_experiment,
    run_sweep,
    run_trial,
)
from .metrics import nmi, welch_t_test
from .parser_baseline import ParserConfig, PerceptLexicon, parser_chunks, parser_fit
from .problems import (
    ChunkedSequence,
    ContinualSchedule,
    Problem,
    TransitionGraph,
    generate,
    get_problem,
    list_problems,
    load_graph,
    random_walk,
)

__version__ = "0.1.0"

__all__ = [
    "ChunkAssignment",
    "ChunkLabError",
    "ChunkedSequence",
    "ClusteringConfig",
    "ConfigError",
    "ContinualSchedule",
    "DynamicsConfig",
    "EncoderConfig",
    "ExperimentConfig",
    "ExperimentReport",
    "GraphFormatError",
    "InputError",
    "NEGATIVE_RULES",
    "NumericFailure",
    "ParserConfig",
    "PerceptLexicon",
    "Problem",
    "SyncMap",
    "SyncMapState",
    "TransitionGraph",
    "assign_chunks",
    "dbscan",
    "encode_step",
    "export_map",
    "fit",
    "generate",
    "get_problem",
    "list_problems",
    "load_graph",
    "map_csv",
    "map_svg",
    "nmi",
    "parser_chunks",
    "parser_fit",
    "random_walk",
    "report_tables",
    "run_bench",
    "run_experiment",
    "run_sweep",
    "run_trial",
    "welch_t_test",
    "__version__",
]
