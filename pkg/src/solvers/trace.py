"""Convergence trace returned by the iteration loop."""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import pandas as pd

from src.models import IterRecord, TerminationStatus
from src.tensor.core import FactorSet

TRACE_COLUMNS = ["iter", "err_sq", "f_val", "grad_norm", "lambda", "accel_applied", "elapsed_ms"]


@dataclass
class ConvergenceTrace:
    """Per-iteration records of one run.

    ``iterates`` holds x(0), ..., x(n) when the run kept snapshots; record n
    describes the step from ``iterates[n - 1]`` to ``iterates[n]``.
    """
    records: List[IterRecord]
    status: TerminationStatus
    final_factors: FactorSet
    f_initial: Optional[float] = None
    iterates: Optional[List[FactorSet]] = None
    wall_time: float = 0.0
    failure: str = ""

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def err_sq(self) -> np.ndarray:
        return np.array([rec.err_sq for rec in self.records])

    @property
    def f_vals(self) -> np.ndarray:
        return np.array([rec.f_val for rec in self.records])

    @property
    def accelerated_iterations(self) -> List[int]:
        return [rec.n for rec in self.records if rec.accel_applied]

    @property
    def rejected_accelerations(self) -> List[int]:
        return [rec.n for rec in self.records if rec.accel_rejected]

    def to_frame(self) -> pd.DataFrame:
        """Trace as a DataFrame with the stable CSV column schema."""
        return pd.DataFrame(
            {
                "iter": [rec.n for rec in self.records],
                "err_sq": self.err_sq,
                "f_val": self.f_vals,
                "grad_norm": [rec.grad_norm for rec in self.records],
                "lambda": [rec.lambda_used for rec in self.records],
                "accel_applied": [int(rec.accel_applied) for rec in self.records],
                "elapsed_ms": [rec.elapsed * 1000.0 for rec in self.records],
            },
            columns=TRACE_COLUMNS,
        )
