"""Query selection measures over version-space partitions: evaluation, DPO checks, synthesis."""

from .core import (
    Answer,
    Distribution,
    InfeasibleError,
    Partition,
    QueryClass,
    Scenario,
    ValidationError,
    answer_probabilities,
    answer_probability,
    bayes_update,
    classify_partition,
    load_scenario,
    running_example,
)
from .qsm import Kind, MeasureSpec, evaluate, parse_measure, select_best

__all__ = [
    "Answer", "Distribution", "InfeasibleError", "Kind", "MeasureSpec", "Partition",
    "QueryClass", "Scenario", "ValidationError", "answer_probabilities",
    "answer_probability", "bayes_update", "classify_partition", "evaluate",
    "load_scenario", "parse_measure", "select_best", "running_example",
]
