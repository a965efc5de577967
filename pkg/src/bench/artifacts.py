"""Experiment files: config loading, trace CSVs, report hashing and plot data."""

import hashlib
import json
import logging
import re
from pathlib import Path
from typing import Iterable, List, Optional, Tuple, Union

import pandas as pd
import yaml
from pydantic import ValidationError

from src.models import ExperimentConfig
from src.solvers.trace import ConvergenceTrace
from src.utils.errors import ConfigError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

PLOT_COLUMNS = ["algorithm", "iteration", "err_sq"]
FLOAT_FORMAT = "%.17g"

_TRACE_NAME = re.compile(r"trace_(?P<algorithm>.+)_(?P<trial>\d+)\.csv$")


def load_experiment_config(path: PathLike) -> ExperimentConfig:
    """Parse a JSON (or YAML) experiment config file.

    Raises:
        OSError: if the file cannot be read
        ConfigError: if it is not valid JSON/YAML or fails validation
    """
    path = Path(path)
    with open(path, 'r', encoding='utf-8') as f:
        text = f.read()
    try:
        if path.suffix.lower() in (".yaml", ".yml"):
            raw = yaml.safe_load(text) or {}
        else:
            raw = json.loads(text)
        return ExperimentConfig.model_validate(raw)
    except (json.JSONDecodeError, yaml.YAMLError, ValidationError) as e:
        raise ConfigError(f"invalid experiment config {path}: {e}") from e


def apply_overrides(
    cfg: ExperimentConfig,
    seed: Optional[int] = None,
    out_dir: Optional[str] = None,
    max_iter: Optional[int] = None,
    tol: Optional[float] = None,
) -> ExperimentConfig:
    """Return a revalidated copy of cfg with CLI overrides applied."""
    raw = cfg.model_dump()
    if seed is not None:
        raw["problem"]["seed"] = seed
    if out_dir is not None:
        raw["output_dir"] = out_dir
    if max_iter is not None:
        raw["solver"]["max_iter"] = max_iter
    if tol is not None:
        raw["solver"]["tol"] = tol
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"invalid override: {e}") from e


def input_hash(cfg: ExperimentConfig) -> str:
    """sha256 over the config echo and, for file problems, the tensor file bytes."""
    digest = hashlib.sha256(cfg.model_dump_json().encode("utf-8"))
    if cfg.problem.path:
        digest.update(Path(cfg.problem.path).read_bytes())
    return digest.hexdigest()


def trace_filename(algorithm: str, trial: int) -> str:
    return f"trace_{algorithm}_{trial}.csv"


def write_trace_csv(trace: ConvergenceTrace, path: PathLike) -> Path:
    """Write a trace with columns iter,err_sq,f_val,grad_norm,lambda,accel_applied,elapsed_ms."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trace.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def _trace_order(path: Path) -> Tuple[str, int, str]:
    match = _TRACE_NAME.search(path.name)
    if match is None:
        return path.stem, -1, path.name
    return match.group("algorithm"), int(match.group("trial")), path.name


def plot_data(trace_files: Iterable[PathLike], out: PathLike) -> Path:
    """Concatenate trace CSVs into one long-format CSV (algorithm, iteration, err_sq).

    err_sq values are copied as text, so they match the sources exactly.

    Raises:
        FileNotFoundError: if the list is empty or a file is missing
    """
    files = sorted((Path(p) for p in trace_files), key=_trace_order)
    if not files:
        raise FileNotFoundError("no trace files to combine")

    frames: List[pd.DataFrame] = []
    for path in files:
        match = _TRACE_NAME.search(path.name)
        algorithm = match.group("algorithm") if match else path.stem
        source = pd.read_csv(path, dtype={"err_sq": str})
        frames.append(pd.DataFrame({
            "algorithm": algorithm,
            "iteration": source["iter"],
            "err_sq": source["err_sq"],
        }, columns=PLOT_COLUMNS))

    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    pd.concat(frames, ignore_index=True).to_csv(out, index=False)
    logger.info("Wrote %d trace(s) to %s", len(files), out)
    return out
