"""Learning random 3-uniform hypergraphs from non-adaptive pooled tests.

Pipeline: sample a hypergraph, build a hierarchical randomized test
design, evaluate pooled outcomes, then decode coarse-to-fine by
eliminating candidate block triples that appear in negative tests.
"""

from .backend import BACKEND_NAME
from .bounds import chebyshev, chernoff_mult, chernoff_poisson, empirical_tail, markov
from .decoder import (
    DecodeResult,
    PDSet,
    assert_pd_bound,
    comp_decode,
    decode,
    init_pd,
    is_eliminated,
    refine,
)
from .errors import ConfigError, HypersplitError, InvariantViolation, ResourceCapError
from .harness import ExperimentConfig, ExperimentReport, run_experiment, sweep, verify_against_comp
from .hypergraph import (
    Hypergraph,
    ModelParams,
    block_of,
    edge_block_signature,
    make_model_params,
    pad_to_power_of_three,
    query,
    read_text,
    sample_er,
    write_text,
)
from .oracle import OutcomeTable, evaluate_outcomes, materialize_test
from .testdesign import DesignParams, LevelDesign, TestDesign, build_design, derive_params
from .typicality import (
    LevelStats,
    TypicalityReport,
    check_typicality,
    compute_level_stats,
    defective_block_p,
    level_block_hypergraph,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME",
    "ConfigError",
    "DecodeResult",
    "DesignParams",
    "ExperimentConfig",
    "ExperimentReport",
    "Hypergraph",
    "HypersplitError",
    "InvariantViolation",
    "LevelDesign",
    "LevelStats",
    "ModelParams",
    "OutcomeTable",
    "PDSet",
    "ResourceCapError",
    "TestDesign",
    "TypicalityReport",
    "assert_pd_bound",
    "block_of",
    "chebyshev",
    "chernoff_mult",
    "chernoff_poisson",
    "check_typicality",
    "comp_decode",
    "compute_level_stats",
    "decode",
    "defective_block_p",
    "derive_params",
    "edge_block_signature",
    "empirical_tail",
    "evaluate_outcomes",
    "init_pd",
    "is_eliminated",
    "level_block_hypergraph",
    "make_model_params",
    "markov",
    "materialize_test",
    "pad_to_power_of_three",
    "query",
    "read_text",
    "refine",
    "run_experiment",
    "sample_er",
    "sweep",
    "build_design",
    "verify_against_comp",
    "write_text",
]
