"""Run the algorithm x trial matrix of an experiment and write its artifacts."""

import logging
import statistics
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional

from src.bench.artifacts import input_hash, trace_filename, write_trace_csv
from src.config import bench_settings
from src.diagnostics.rates import detect_swamp, estimate_rate
from src.models import (
    Algorithm,
    AlgorithmSummary,
    ExperimentConfig,
    ExperimentReport,
    SolverConfig,
    TerminationStatus,
    TrialResult,
)
from src.solvers.runner import run, solver_config_for
from src.tensor.core import Tensor3
from src.tensor.io import read_tensor
from src.tensor.problems import CPProblem, initial_guess, random_cp_problem
from src.utils.errors import ShapeMismatchError, TraceError

logger = logging.getLogger(__name__)

REPORT_FILE = "report.json"


def _median(values: List[float]) -> Optional[float]:
    return float(statistics.median(values)) if values else None


class ExperimentRunner:
    """Runs every configured algorithm on every trial of one experiment.

    Trial k draws its problem from seed ``problem.seed + k``; within a trial
    all algorithms start from the same tensor and the same initial factors.
    """

    def __init__(self, cfg: ExperimentConfig):
        """Initialize the runner.

        Args:
            cfg: Validated experiment configuration
        """
        self.cfg = cfg
        self.output_dir = Path(cfg.output_dir)
        self._file_tensor: Optional[Tensor3] = None
        if cfg.problem.path:
            self._file_tensor = read_tensor(cfg.problem.path)

    # -------------------------------------------------------------------------
    # Problems and solver configs
    # -------------------------------------------------------------------------

    def trial_seed(self, trial: int) -> int:
        return self.cfg.problem.seed + trial

    def problem_for(self, trial: int) -> CPProblem:
        """Tensor and initial guess shared by all algorithms of a trial."""
        problem_spec = self.cfg.problem
        seed = self.trial_seed(trial)
        if self._file_tensor is not None:
            tensor = self._file_tensor
            return CPProblem(tensor, initial_guess(tensor.dims, problem_spec.r, seed))

        problem = random_cp_problem(
            problem_spec.dims, problem_spec.r, problem_spec.kind, seed, problem_spec.collinearity
        )
        if problem_spec.start_at_solution:
            return CPProblem(problem.tensor, problem.generating, problem.generating)
        return problem

    def solver_config(self, algorithm: Algorithm, seed: int, max_iter: Optional[int] = None) -> SolverConfig:
        opts = self.cfg.solver
        return solver_config_for(
            algorithm,
            lambda0=opts.lambda0,
            decreasing=opts.decreasing_schedule,
            tol=opts.tol,
            max_iter=max_iter or opts.max_iter,
            accel_alpha=opts.accel_alpha,
            accel_q=opts.accel_q,
            pinv_threshold=opts.pinv_threshold,
            accel_safeguard=opts.accel_safeguard,
            seed=seed,
        )

    # -------------------------------------------------------------------------
    # Execution
    # -------------------------------------------------------------------------

    def warm_up(self) -> None:
        """Short untimed solve per algorithm so first-trial timings exclude start-up cost."""
        problem = self.problem_for(0)
        cap = int(bench_settings.timing["warmup_max_iter"])
        for algorithm in self.cfg.algorithms:
            run(problem.tensor, problem.initial, self.solver_config(algorithm, self.trial_seed(0), cap))
        logger.debug("Warm-up finished (%d iterations per algorithm)", cap)

    def run_trial(self, trial: int) -> List[TrialResult]:
        """Run all algorithms on one trial and write their trace CSVs."""
        problem = self.problem_for(trial)
        if problem.tensor.dims != problem.initial.dims:
            raise ShapeMismatchError(
                f"initial factors {problem.initial.dims} do not fit tensor {problem.tensor.dims}")
        seed = self.trial_seed(trial)

        results = []
        for algorithm in self.cfg.algorithms:
            trace = run(problem.tensor, problem.initial, self.solver_config(algorithm, seed))
            name = trace_filename(algorithm.value, trial)
            write_trace_csv(trace, self.output_dir / name)

            try:
                rate = estimate_rate(trace)
            except TraceError:
                rate = None

            last = trace.records[-1] if trace.records else None
            results.append(TrialResult(
                algorithm=algorithm,
                trial=trial,
                seed=seed,
                status=trace.status,
                iterations=trace.iterations,
                final_err_sq=last.err_sq if last else None,
                final_f=last.f_val if last else None,
                q_fit=rate.q_fit if rate else None,
                r_squared=rate.r_squared if rate else None,
                plateaus=detect_swamp(trace),
                trace_file=name,
                wall_time_s=trace.wall_time,
            ))

        logger.info("Trial %d: %s", trial,
                    ", ".join(f"{r.algorithm.value}={r.iterations}" for r in results))
        return results

    def run(self) -> ExperimentReport:
        """Run every trial, then write report.json."""
        cfg = self.cfg
        self.output_dir.mkdir(parents=True, exist_ok=True)
        logger.info("Running %d trial(s) of %s into %s",
                    cfg.trials, [a.value for a in cfg.algorithms], self.output_dir)

        if cfg.warmup:
            self.warm_up()

        trials = range(cfg.trials)
        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                per_trial = list(pool.map(self.run_trial, trials))
        else:
            per_trial = [self.run_trial(k) for k in trials]

        results = [r for batch in per_trial for r in batch]
        report = ExperimentReport(
            config=cfg,
            seed=cfg.problem.seed,
            input_hash=input_hash(cfg),
            summaries=[summarize_algorithm(a, results) for a in cfg.algorithms],
            trials=results,
        )

        path = self.output_dir / REPORT_FILE
        with open(path, 'w', encoding='utf-8') as f:
            f.write(report.model_dump_json(indent=2))
            f.write("\n")
        logger.info("Wrote %s", path)
        if report.failed:
            logger.error("At least one trial ended in numerical failure")
        return report


def summarize_algorithm(algorithm: Algorithm, results: List[TrialResult]) -> AlgorithmSummary:
    """Aggregate one algorithm's trials; medians use converged trials only."""
    own = [r for r in results if r.algorithm is algorithm]
    converged = [r for r in own if r.status is TerminationStatus.CONVERGED]
    plateaus = [p for r in own for p in r.plateaus]
    return AlgorithmSummary(
        algorithm=algorithm,
        trials_converged=len(converged),
        median_iterations=_median([r.iterations for r in converged]),
        median_wall_time_s=_median([r.wall_time_s for r in converged]),
        median_q_fit=_median([r.q_fit for r in converged if r.q_fit is not None]),
        plateau_count=len(plateaus),
        plateau_total_length=sum(end - start + 1 for start, end in plateaus),
        status_counts={s.value: sum(1 for r in own if r.status is s) for s in TerminationStatus},
    )


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Run an experiment and write trace_<alg>_<trial>.csv files plus report.json."""
    return ExperimentRunner(cfg).run()
