"""Experiment harness: trial matrix, timing table and plot data."""

from src.bench.artifacts import (
    apply_overrides,
    input_hash,
    load_experiment_config,
    plot_data,
    write_trace_csv,
)
from src.bench.experiment import ExperimentRunner, run_experiment, summarize_algorithm
from src.bench.timing import ordered_algorithms, timing_table

__all__ = [
    "ExperimentRunner",
    "apply_overrides",
    "input_hash",
    "load_experiment_config",
    "ordered_algorithms",
    "plot_data",
    "run_experiment",
    "summarize_algorithm",
    "timing_table",
    "write_trace_csv",
]
