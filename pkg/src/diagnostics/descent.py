"""Runtime checks of the proximal sweep's convergence inequalities.

- sufficient decrease:  f(x(n)) - f(x(n+1)) >= (lambda_n / 2) ||x(n+1) - x(n)||^2
- staggered stationarity of each block update
- gradient control:     ||grad f(x(n+1))|| <= d ||x(n+1) - x(n)||
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.config import bench_settings
from src.models import GradientBoundProfile, LambdaSchedule
from src.solvers.trace import ConvergenceTrace
from src.tensor.core import FactorSet, Tensor3, gradient_f, gradient_norm
from src.utils.errors import TraceError

logger = logging.getLogger(__name__)


def check_descent(
    trace: ConvergenceTrace,
    schedule: Optional[LambdaSchedule] = None,
    slack: float = 1e-10,
) -> List[int]:
    """Iterations where the sufficient-decrease inequality fails.

    Accelerated iterations are not proximal sweeps and are skipped.

    Args:
        trace: Trace of a rals / rals-l style run
        schedule: Schedule to take lambda_n from; defaults to each record's lambda_used
        slack: Relative tolerance, scaled by 1 + f(x(0))

    Returns:
        Iteration indices n whose step x(n-1) -> x(n) violates the inequality
    """
    if trace.f_initial is None:
        raise TraceError("trace has no f_initial; cannot check the first step")

    tolerance = slack * (1.0 + trace.f_initial)
    violations = []
    f_prev = trace.f_initial
    for rec in trace.records:
        if not rec.accel_applied:
            lam = schedule.value(rec.n - 1) if schedule is not None else rec.lambda_used
            if f_prev - rec.f_val < 0.5 * lam * rec.err_sq - tolerance:
                violations.append(rec.n)
        f_prev = rec.f_val

    if violations:
        logger.warning("Descent inequality violated at %d iteration(s), first at n=%d",
                       len(violations), violations[0])
    return violations


def check_stationarity(
    t: Tensor3,
    x_prev: FactorSet,
    x_next: FactorSet,
    lam: float,
) -> Tuple[float, float, float]:
    """Norms of the three first-order conditions of one proximal sweep.

    grad_A f(A+, B, C)   + lam (A+ - A)
    grad_B f(A+, B+, C)  + lam (B+ - B)
    grad_C f(A+, B+, C+) + lam (C+ - C)

    All three vanish (up to rounding) when x_next = S(x_prev) with the
    A, B, C update order.
    """
    a, b, c = x_prev.blocks
    a1, b1, c1 = x_next.blocks
    ra = gradient_f(t, FactorSet(a1, b, c)).A + lam * (a1 - a)
    rb = gradient_f(t, FactorSet(a1, b1, c)).B + lam * (b1 - b)
    rc = gradient_f(t, FactorSet(a1, b1, c1)).C + lam * (c1 - c)
    return tuple(float(np.linalg.norm(m)) for m in (ra, rb, rc))


def bound_profile(
    grad_norms: Sequence[float],
    displacements: Sequence[float],
    floor: float = 1e-10,
    factor: Optional[float] = None,
) -> GradientBoundProfile:
    """Summarize the ratios grad_norm / displacement.

    Steps with displacement <= floor have no meaningful ratio and are
    reported as None.

    Args:
        grad_norms: ||grad f(x(n))|| for n = 1..N
        displacements: ||x(n) - x(n-1)|| for n = 1..N
        floor: Displacements at or below this are not applicable
        factor: The ratio is bounded when its max is at most this factor
            times the median over the second half
    """
    if factor is None:
        factor = bench_settings.diagnostic("gradient_ratio_factor")
    ratios: List[Optional[float]] = [
        float(g / d) if d > floor else None for g, d in zip(grad_norms, displacements)
    ]
    valid = np.array([x for x in ratios if x is not None])
    if valid.size == 0:
        return GradientBoundProfile(ratios=ratios)

    second_half = valid[valid.size // 2:]
    second_median = float(np.median(second_half))
    max_ratio = float(valid.max())
    growing = bool(valid.size >= 3 and np.all(np.diff(valid) > 0) and valid[-1] >= factor * valid[0])
    bounded = max_ratio <= factor * second_median and not growing

    return GradientBoundProfile(
        ratios=ratios,
        max_ratio=max_ratio,
        median_ratio=float(np.median(valid)),
        second_half_median=second_median,
        bounded=bounded,
        growing=growing,
    )


def gradient_bound_profile(trace: ConvergenceTrace, t: Tensor3) -> GradientBoundProfile:
    """Gradient-control ratios along a run that kept its iterates.

    The displacement floor is scaled by 1 + ||x|| of each iterate.
    """
    if trace.iterates is None or len(trace.iterates) != len(trace.records) + 1:
        raise TraceError("gradient_bound_profile needs a trace run with keep_iterates=True")

    floor = bench_settings.diagnostic("displacement_floor")
    grads, steps = [], []
    for prev, cur in zip(trace.iterates[:-1], trace.iterates[1:]):
        grads.append(gradient_norm(t, cur))
        step = np.sqrt(cur.distance_sq(prev))
        scale = 1.0 + np.linalg.norm(cur.flat)
        grads[-1] /= scale
        steps.append(step / scale)
    return bound_profile(grads, steps, floor=floor)
