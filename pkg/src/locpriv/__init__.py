"""Dummy-based location privacy toolkit.

Grid/history side-information model, entropy-based privacy metrics, five
dummy-generation algorithms, a most-likely-path attack, and a seeded
benchmark harness.
"""

from .attack import AttackResult, brute_force_path, protection_rate, viterbi_attack
from .config import build_config, load_config
from .errors import (
    AllZeroPriors,
    CellOutOfGrid,
    ConfigError,
    EmptyHistory,
    FileUnreadable,
    HeaderTooShort,
    InstanceTooLarge,
    KTooLarge,
    LengthMismatch,
    LocPrivError,
    PoolTooLarge,
    WriteFailed,
)
from .generators import (
    GeneratorContext,
    dls_gen,
    dummy_pool,
    exhaustive_gen,
    greedy_gen,
    random_gen,
    rdg_gen,
)
from .geolife import GpsRecord, bin_trajectories, parse_plt, read_corpus, write_corpus
from .grid import (
    CellId,
    GridSpec,
    HistoryModel,
    LocationSet,
    TrajectoryQuery,
    build_history,
    normalize_transition_rows,
    normalized_priors,
    query_probability,
    transition_probabilities,
)
from .metrics import (
    cell_entropy,
    entropy,
    posterior_from_counts,
    posterior_pair,
    posterior_trajectory,
    transition_entropy_pair,
    transition_entropy_trajectory,
)
from .results import CSV_HEADER, emit_results, format_results, read_results
from .simulation import (
    ALGORITHMS,
    CorpusSource,
    ExperimentConfig,
    ResultRow,
    SynthParams,
    config_history,
    derive_seed,
    generate_trajectory_sets,
    run_experiment,
    sample_trajectory,
    synth_history,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "AllZeroPriors",
    "AttackResult",
    "CSV_HEADER",
    "CellId",
    "CellOutOfGrid",
    "ConfigError",
    "CorpusSource",
    "EmptyHistory",
    "ExperimentConfig",
    "FileUnreadable",
    "GeneratorContext",
    "GpsRecord",
    "GridSpec",
    "HeaderTooShort",
    "HistoryModel",
    "InstanceTooLarge",
    "KTooLarge",
    "LengthMismatch",
    "LocPrivError",
    "LocationSet",
    "PoolTooLarge",
    "ResultRow",
    "SynthParams",
    "TrajectoryQuery",
    "WriteFailed",
    "bin_trajectories",
    "brute_force_path",
    "build_config",
    "build_history",
    "cell_entropy",
    "config_history",
    "derive_seed",
    "dls_gen",
    "dummy_pool",
    "emit_results",
    "entropy",
    "exhaustive_gen",
    "format_results",
    "generate_trajectory_sets",
    "greedy_gen",
    "load_config",
    "normalize_transition_rows",
    "normalized_priors",
    "parse_plt",
    "posterior_from_counts",
    "posterior_pair",
    "posterior_trajectory",
    "protection_rate",
    "query_probability",
    "random_gen",
    "rdg_gen",
    "read_corpus",
    "read_results",
    "run_experiment",
    "sample_trajectory",
    "synth_history",
    "transition_entropy_pair",
    "transition_entropy_trajectory",
    "transition_probabilities",
    "viterbi_attack",
    "write_corpus",
]
