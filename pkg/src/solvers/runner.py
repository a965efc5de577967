"""Outer iteration loop for the six algorithm variants."""

import logging
import time
from typing import List, Optional

from scipy.linalg import LinAlgError

from src.accel.aitken import accel_step
from src.config import bench_settings
from src.models import Algorithm, IterRecord, LambdaSchedule, SolverConfig, TerminationStatus
from src.solvers.sweeps import make_sweep
from src.solvers.trace import ConvergenceTrace
from src.tensor.core import FactorSet, Tensor3, gradient_norm, residual_f
from src.utils.errors import NumericalFailure, ShapeMismatchError

logger = logging.getLogger(__name__)

def run(t: Tensor3, x0: FactorSet, cfg: SolverConfig) -> ConvergenceTrace:
    """Iterate the configured variant from x0 until err_sq < tol or max_iter.

    Plain variants take X(n+1) = S_ALS(X(n)) or S(X(n)) with lambda from the
    schedule. Accelerated variants replace the sweep by the matrix
    acceleration step whenever err < accel_alpha and n mod accel_q == 0,
    where err starts at accel_alpha and is remeasured after every update.
    With accel_safeguard on, an accelerated iterate whose f exceeds
    f(S(X(n))) is dropped and S(X(n)) is taken instead, so a rejected step
    leaves the trajectory of the plain variant unchanged.

    Args:
        t: Tensor to approximate
        x0: Initial factors
        cfg: Solver configuration

    Returns:
        ConvergenceTrace; a NaN/Inf or a failed solve ends the run with
        status numerical-failure instead of raising
    """
    if t.dims != x0.dims:
        raise ShapeMismatchError(f"initial factor dims {x0.dims} do not match tensor dims {t.dims}")

    algorithm = cfg.algorithm
    records: List[IterRecord] = []
    iterates: Optional[List[FactorSet]] = [x0] if cfg.keep_iterates else None
    f_initial = residual_f(t, x0)
    x = x0
    err = cfg.accel_alpha
    status = TerminationStatus.MAX_ITER
    failure = ""

    logger.info("Starting %s: dims=%s r=%d tol=%.1e max_iter=%d",
                algorithm.value, t.dims, x0.r, cfg.tol, cfg.max_iter)
    start = time.perf_counter()

    for n in range(1, cfg.max_iter + 1):
        lam = cfg.lambda_at(n)
        sweep = make_sweep(t, lam, cfg.pinv_threshold)
        accelerated = algorithm.accelerated and err < cfg.accel_alpha and n % cfg.accel_q == 0
        rejected = False

        try:
            if accelerated:
                step = accel_step(x, sweep, cfg.pinv_threshold)
                x_new = step.out_factors
                f_new = residual_f(t, x_new)
                if cfg.accel_safeguard:
                    f_plain = residual_f(t, step.s1_factors)
                    if not f_new <= f_plain:
                        logger.debug("Iteration %d: accelerated f=%.3e above plain sweep f=%.3e; rejected",
                                     n, f_new, f_plain)
                        x_new, f_new = step.s1_factors, f_plain
                        accelerated, rejected = False, True
            else:
                x_new = sweep(x)
                f_new = residual_f(t, x_new)
            if not x_new.is_finite():
                raise NumericalFailure("non-finite iterate")
            grad = gradient_norm(t, x_new)
        except (NumericalFailure, LinAlgError) as e:
            logger.error("%s failed at iteration %d: %s", algorithm.value, n, e)
            status = TerminationStatus.NUMERICAL_FAILURE
            failure = str(e)
            break

        err = x_new.distance_sq(x)
        records.append(IterRecord(
            n=n,
            err_sq=err,
            f_val=f_new,
            grad_norm=grad,
            lambda_used=lam,
            accel_applied=accelerated,
            accel_rejected=rejected,
            elapsed=time.perf_counter() - start,
        ))
        if iterates is not None:
            iterates.append(x_new)
        if accelerated or n % cfg.accel_q == 0:
            logger.debug("%s n=%d err_sq=%.3e f=%.6e%s", algorithm.value, n, err, f_new,
                         " (accelerated)" if accelerated else "")

        x = x_new
        if err < cfg.tol:
            status = TerminationStatus.CONVERGED
            break

    wall_time = time.perf_counter() - start
    if status is TerminationStatus.MAX_ITER:
        logger.warning("%s reached max_iter=%d (err_sq=%.3e)", algorithm.value, cfg.max_iter, err)
    else:
        logger.info("%s finished: %s after %d iterations (%.2fs)",
                    algorithm.value, status.value, len(records), wall_time)

    return ConvergenceTrace(
        records=records,
        status=status,
        final_factors=x,
        f_initial=f_initial,
        iterates=iterates,
        wall_time=wall_time,
        failure=failure,
    )


def solver_config_for(
    algorithm: Algorithm,
    lambda0: float = 1.0,
    decreasing: Optional[LambdaSchedule] = None,
    **options,
) -> SolverConfig:
    """Build a SolverConfig with the schedule each variant uses.

    rals / rals-a use the constant lambda0; rals-l / rals-al use the
    decreasing schedule (from the YAML settings unless given); ALS variants
    ignore the schedule.

    Args:
        algorithm: Variant to configure
        lambda0: Constant proximal weight
        decreasing: Schedule for rals-l / rals-al
        **options: Remaining SolverConfig fields
    """
    algorithm = Algorithm(algorithm)
    if algorithm.decreasing:
        if decreasing is None:
            decreasing = LambdaSchedule(**bench_settings.decreasing_schedule)
        schedule = decreasing
    else:
        schedule = LambdaSchedule.constant(lambda0)
    return SolverConfig(algorithm=algorithm, schedule=schedule, **options)
