"""Median wall time and iteration count per algorithm, laid out like a timing table."""

import logging
from pathlib import Path
from typing import List, Tuple

import pandas as pd

from src.bench.experiment import run_experiment
from src.config import bench_settings
from src.models import Algorithm, ExperimentConfig, TimingRow, TimingTable
from src.utils.errors import ConfigError

logger = logging.getLogger(__name__)

TIMING_FILE = "timing.csv"
TIMING_COLUMNS = ["size", "algorithm", "trials", "median_wall_time_s", "median_iterations"]


def ordered_algorithms(algorithms: List[Algorithm]) -> List[Algorithm]:
    """Algorithms in the canonical column order (als, als-a, rals, rals-a, rals-l, rals-al)."""
    order = {name: i for i, name in enumerate(bench_settings.algorithm_order)}
    return sorted(set(algorithms), key=lambda a: order.get(a.value, len(order)))


def _size_label(size: Tuple[int, int, int]) -> str:
    return "x".join(str(d) for d in size)


def _size_configs(cfg: ExperimentConfig) -> List[Tuple[Tuple[int, int, int], ExperimentConfig]]:
    if not cfg.sizes:
        return [(tuple(cfg.problem.dims), cfg)]
    if cfg.problem.path:
        raise ConfigError("sizes cannot be combined with a tensor file problem")

    configs = []
    for n in cfg.sizes:
        raw = cfg.model_dump()
        raw["problem"]["dims"] = (n, n, n)
        raw["output_dir"] = str(Path(cfg.output_dir) / f"size_{n}")
        raw["sizes"] = None
        configs.append(((n, n, n), ExperimentConfig.model_validate(raw)))
    return configs


def timing_table(cfg: ExperimentConfig) -> TimingTable:
    """Run the experiment (once per size) and tabulate medians.

    Writes timing.csv into ``cfg.output_dir`` with one row per size and
    algorithm. Medians come from converged trials; a trial count below the
    configured minimum is reported in ``warnings``.
    """
    warnings = []
    min_trials = int(bench_settings.timing["min_trials_for_median"])
    if cfg.trials == 1:
        warnings.append("trials=1: medians equal single samples")
    elif cfg.trials < min_trials:
        warnings.append(f"trials={cfg.trials}: fewer than {min_trials} samples per median")
    for message in warnings:
        logger.warning(message)

    algorithms = ordered_algorithms(cfg.algorithms)
    rows = []
    failed = False
    for size, size_cfg in _size_configs(cfg):
        report = run_experiment(size_cfg)
        failed = failed or report.failed
        summaries = {s.algorithm: s for s in report.summaries}
        for algorithm in algorithms:
            summary = summaries[algorithm]
            rows.append(TimingRow(
                size=size,
                algorithm=algorithm,
                trials=size_cfg.trials,
                median_wall_time_s=summary.median_wall_time_s,
                median_iterations=summary.median_iterations,
            ))

    table = TimingTable(algorithms=algorithms, rows=rows, warnings=warnings, failed=failed)
    write_timing_csv(table, Path(cfg.output_dir) / TIMING_FILE)
    return table


def write_timing_csv(table: TimingTable, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(
        [
            {
                "size": _size_label(row.size),
                "algorithm": row.algorithm.value,
                "trials": row.trials,
                "median_wall_time_s": row.median_wall_time_s,
                "median_iterations": row.median_iterations,
            }
            for row in table.rows
        ],
        columns=TIMING_COLUMNS,
    )
    frame.to_csv(path, index=False, float_format="%.17g")
    logger.info("Wrote %s", path)
    return path
