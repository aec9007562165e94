"""choqfuse: score-level decision fusion with Choquet integrals.

Builds Sugeno lambda-fuzzy measures from singleton densities, fuses
per-matcher similarity scores with the Choquet integral (or classical
rules: mean, product, min, max, weighted sum, AND/OR/majority vote),
evaluates fused scores with FAR/FRR curves and the equal error rate,
and learns the measure densities with a real-coded genetic algorithm
that minimizes EER on labeled client/impostor data.
"""

from .aggregate import (
    FusionRule,
    RULE_TAGS,
    choquet_fuse,
    choquet_fuse_batch,
    rule_fuse,
    rule_fuse_batch,
)
from .data import (
    DataFormatError,
    ScoreRecord,
    load_csv,
    synthetic_csv_path,
    synthetic_dataset,
    write_csv,
)
from .ga import (
    Chromosome,
    GaConfig,
    GenerationRecord,
    Population,
    evolve,
    fitness,
    init_population,
    linear_crossover,
    mutation_offsets,
    nonuniform_mutation,
    select_parents,
)
from .measures import (
    ConvergenceError,
    LambdaMeasure,
    MeasureViolation,
    TableMeasure,
    solve_lambda,
    subset_measure,
    validate_measure,
)
from .metrics import (
    EvalReport,
    LabeledScoreSet,
    eer,
    error_rate_at,
    evaluate_scores,
    far_frr,
    normalize_minmax,
    write_roc_csv,
)

__version__ = "0.1.0"

__all__ = [
    "Chromosome",
    "ConvergenceError",
    "DataFormatError",
    "EvalReport",
    "FusionRule",
    "GaConfig",
    "GenerationRecord",
    "LabeledScoreSet",
    "LambdaMeasure",
    "MeasureViolation",
    "Population",
    "RULE_TAGS",
    "ScoreRecord",
    "TableMeasure",
    "choquet_fuse",
    "choquet_fuse_batch",
    "eer",
    "error_rate_at",
    "evaluate_scores",
    "evolve",
    "far_frr",
    "fitness",
    "init_population",
    "linear_crossover",
    "load_csv",
    "mutation_offsets",
    "nonuniform_mutation",
    "normalize_minmax",
    "rule_fuse",
    "rule_fuse_batch",
    "select_parents",
    "solve_lambda",
    "subset_measure",
    "synthetic_csv_path",
    "synthetic_dataset",
    "validate_measure",
    "write_csv",
    "write_roc_csv",
]
