from .compare import Comparison, compare, least_squares_slope, write_comparison
from .experiment import (
    ALL_VERSIONS,
    EvalReport,
    ExperimentConfig,
    FixtureMatrices,
    PER_CLASS_VERSIONS,
    RANKING_VERSIONS,
    fixture_hash,
    run_experiment,
    stratified_split,
)
from .synth import SynthConfig, generate, signup_probability

__all__ = [
    "ALL_VERSIONS",
    "Comparison",
    "EvalReport",
    "ExperimentConfig",
    "FixtureMatrices",
    "PER_CLASS_VERSIONS",
    "RANKING_VERSIONS",
    "SynthConfig",
    "compare",
    "fixture_hash",
    "generate",
    "least_squares_slope",
    "run_experiment",
    "signup_probability",
    "stratified_split",
    "write_comparison",
]
