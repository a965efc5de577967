"""JSON-ready diagnostics bundle for one run."""

import logging
from typing import Any, Dict

from src.diagnostics.descent import check_descent, gradient_bound_profile
from src.diagnostics.rates import detect_swamp, estimate_rate
from src.diagnostics.spectral import predict_contraction
from src.models import SolverConfig, TerminationStatus
from src.solvers.trace import ConvergenceTrace
from src.tensor.core import Tensor3
from src.utils.errors import NumericalFailure, TraceError

logger = logging.getLogger(__name__)


def summarize(
    t: Tensor3,
    trace: ConvergenceTrace,
    cfg: SolverConfig,
    spectral: bool = False,
) -> Dict[str, Any]:
    """Run every applicable diagnostic on a finished run.

    Args:
        t: Tensor the run approximated
        trace: The run's trace
        cfg: The run's configuration
        spectral: Also compute the Hessian-based rate prediction (regularized,
            converged runs only; costs r(I+J+K) gradient pairs)

    Returns:
        Dictionary of plain JSON types
    """
    summary: Dict[str, Any] = {
        "algorithm": cfg.algorithm.value,
        "status": trace.status.value,
        "iterations": trace.iterations,
        "accelerated_iterations": trace.accelerated_iterations,
    }

    if cfg.algorithm.regularized:
        violations = check_descent(trace)
        summary["descent"] = {"violations": violations, "holds": not violations}

    try:
        summary["rate"] = estimate_rate(trace).model_dump(mode="json")
    except TraceError as e:
        summary["rate"] = {"error": str(e)}

    summary["plateaus"] = [list(p) for p in detect_swamp(trace)]

    if trace.iterates is not None:
        summary["gradient_bound"] = gradient_bound_profile(trace, t).model_dump(
            mode="json", exclude={"ratios"})

    if spectral and cfg.algorithm.regularized and trace.status is TerminationStatus.CONVERGED:
        lam = trace.records[-1].lambda_used
        try:
            summary["spectral"] = predict_contraction(t, trace.final_factors, lam).model_dump(mode="json")
        except NumericalFailure as e:
            logger.error("Spectral prediction failed: %s", e)
            summary["spectral"] = {"error": str(e)}

    return summary
