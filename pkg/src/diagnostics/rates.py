"""Empirical convergence rates and swamp (plateau) detection on err_sq series."""

import logging
import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from src.config import bench_settings
from src.models import RateEstimate
from src.solvers.trace import ConvergenceTrace
from src.utils.errors import TraceError

logger = logging.getLogger(__name__)

TraceLike = Union[ConvergenceTrace, Sequence[float], np.ndarray]


def _err_series(trace: TraceLike) -> Tuple[np.ndarray, np.ndarray]:
    """(iteration indices, err_sq values) of a trace or a raw err_sq sequence starting at n=1."""
    if isinstance(trace, ConvergenceTrace):
        n = np.array([rec.n for rec in trace.records], dtype=float)
        return n, trace.err_sq
    err = np.asarray(trace, dtype=float)
    return np.arange(1, err.size + 1, dtype=float), err


def _fit_window(
    n: np.ndarray, err: np.ndarray, window_fraction: float, min_records: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Trailing stretch of the series used by the log-linear fit.

    The last window_fraction of the records, shortened to start at the last
    err_sq increase when at least min_records remain after it. Series shorter
    than 2 * min_records are used whole.
    """
    if n.size < 2 * min_records:
        return n, err
    start = n.size - max(1, math.ceil(window_fraction * n.size))
    rises = np.flatnonzero(err[1:] > err[:-1]) + 1
    if rises.size and n.size - rises[-1] >= min_records:
        start = max(start, int(rises[-1]))
    return n[start:], err[start:]


def estimate_rate(
    trace: TraceLike,
    window_fraction: Optional[float] = None,
    min_records: Optional[int] = None,
) -> RateEstimate:
    """Fit log(err_sq) = a + b n over the trailing linear regime of a trace.

    q_fit = exp(b / 2) is the per-iteration contraction of ||X(n) - X(n-1)||.

    Args:
        trace: ConvergenceTrace or err_sq sequence
        window_fraction: Largest fraction of the iterations (taken from the end) to fit
        min_records: Minimum number of usable points in the window

    Raises:
        TraceError: if the window holds fewer than min_records positive values
    """
    if window_fraction is None:
        window_fraction = bench_settings.diagnostic("rate_window_fraction")
    if min_records is None:
        min_records = bench_settings.diagnostic("rate_min_records")
    if not 0 < window_fraction <= 1:
        raise ValueError(f"window_fraction must lie in (0, 1], got {window_fraction}")

    n, err = _fit_window(*_err_series(trace), window_fraction, min_records)
    keep = err > 0
    n, err = n[keep], err[keep]
    if n.size < min_records:
        raise TraceError(f"rate window has {n.size} usable records, need at least {min_records}")

    y = np.log(err)
    slope, intercept = np.polyfit(n, y, 1)
    ss_res = float(np.sum((y - (slope * n + intercept)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))

    return RateEstimate(
        q_fit=float(np.exp(slope / 2.0)),
        r_squared=r_squared,
        window=(int(n[0]), int(n[-1])),
        slope=float(slope),
    )


def detect_swamp(
    trace: TraceLike,
    plateau_ratio: Optional[float] = None,
    min_len: Optional[int] = None,
) -> List[Tuple[int, int]]:
    """Find long stretches of near-stagnant err_sq.

    A plateau is a maximal run of iterations whose reduction factor
    err_sq(n) / err_sq(n-1) is at least ``plateau_ratio``, lasting at least
    ``min_len`` iterations, after which err_sq eventually drops below its
    value at the end of the run.

    Returns:
        (start, end) iteration indices of every plateau, inclusive
    """
    if plateau_ratio is None:
        plateau_ratio = bench_settings.diagnostic("plateau_ratio")
    if min_len is None:
        min_len = bench_settings.diagnostic("plateau_min_len")

    n, err = _err_series(trace)
    if err.size < 2:
        return []

    prev = err[:-1]
    ratios = np.divide(err[1:], prev, out=np.zeros_like(prev), where=prev > 0)
    stagnant = ratios >= plateau_ratio

    plateaus = []
    i = 0
    while i < stagnant.size:
        if not stagnant[i]:
            i += 1
            continue
        j = i
        while j + 1 < stagnant.size and stagnant[j + 1]:
            j += 1
        # ratio index k describes record k + 1
        start, end = i + 1, j + 1
        later = err[end + 1:]
        if end - start + 1 >= min_len and later.size and later.min() < err[end]:
            plateaus.append((int(n[start]), int(n[end])))
        i = j + 1

    if plateaus:
        logger.info("Detected %d plateau(s) covering %d iterations",
                    len(plateaus), sum(e - s + 1 for s, e in plateaus))
    return plateaus
