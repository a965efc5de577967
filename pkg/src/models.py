"""Data models for the RALS benchmark toolkit."""

from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Algorithm(str, Enum):
    """Algorithm variant enumeration."""
    ALS = "als"
    ALS_A = "als-a"
    RALS = "rals"
    RALS_A = "rals-a"
    RALS_L = "rals-l"
    RALS_AL = "rals-al"

    @property
    def accelerated(self) -> bool:
        return self in (Algorithm.ALS_A, Algorithm.RALS_A, Algorithm.RALS_AL)

    @property
    def regularized(self) -> bool:
        return self not in (Algorithm.ALS, Algorithm.ALS_A)

    @property
    def decreasing(self) -> bool:
        """Uses the decreasing regularization schedule."""
        return self in (Algorithm.RALS_L, Algorithm.RALS_AL)


class ScheduleKind(str, Enum):
    """Regularization schedule enumeration."""
    CONSTANT = "constant"
    GEOMETRIC = "geometric"
    HARMONIC = "harmonic"


class ProblemKind(str, Enum):
    """Test problem enumeration."""
    RANDOM_DENSE = "random-dense"
    EXACT_RANK = "exact-rank"
    SWAMP = "swamp"


class TerminationStatus(str, Enum):
    """Run termination enumeration."""
    CONVERGED = "converged"
    MAX_ITER = "max-iter"
    NUMERICAL_FAILURE = "numerical-failure"


# =============================================================================
# Solver models
# =============================================================================

class LambdaSchedule(BaseModel):
    """Proximal weight schedule lambda_n, positive and nonincreasing in n."""
    model_config = ConfigDict(frozen=True)

    kind: ScheduleKind = ScheduleKind.CONSTANT
    lambda0: float = Field(1.0, gt=0)
    gamma: float = Field(0.99, gt=0, lt=1)
    lambda_min: float = Field(0.0, ge=0)

    @model_validator(mode="after")
    def _geometric_needs_floor(self):
        # lambda0 * gamma**n underflows to 0.0 after about a thousand steps
        if self.kind is ScheduleKind.GEOMETRIC and self.lambda_min <= 0:
            raise ValueError("geometric schedules need lambda_min > 0")
        return self

    @classmethod
    def constant(cls, value: float) -> "LambdaSchedule":
        return cls(kind=ScheduleKind.CONSTANT, lambda0=value)

    def value(self, n: int) -> float:
        """lambda_n for n = 0, 1, 2, ..."""
        if self.kind is ScheduleKind.CONSTANT:
            return self.lambda0
        if self.kind is ScheduleKind.GEOMETRIC:
            return max(self.lambda_min, self.lambda0 * self.gamma ** n)
        return max(self.lambda_min, self.lambda0 / (1.0 + n))


class SolverConfig(BaseModel):
    """Parameters of a single solver run."""
    model_config = ConfigDict(frozen=True)

    algorithm: Algorithm = Algorithm.RALS
    schedule: LambdaSchedule = Field(default_factory=LambdaSchedule)
    tol: float = Field(1e-12, gt=0)
    max_iter: int = Field(50000, gt=0)
    accel_alpha: float = Field(1e-6, gt=0)
    accel_q: int = Field(100, gt=0)
    pinv_threshold: float = Field(1e-12, gt=0)
    seed: int = 0
    accel_safeguard: bool = True
    keep_iterates: bool = False

    def lambda_at(self, n: int) -> float:
        """Proximal weight of the sweep that produces iteration n (1-based); 0 for ALS."""
        if not self.algorithm.regularized:
            return 0.0
        return self.schedule.value(n - 1)


class IterRecord(BaseModel):
    """One row of a convergence trace."""
    n: int = Field(ge=1)
    err_sq: float = Field(ge=0)
    f_val: float = Field(ge=0)
    grad_norm: float = Field(ge=0)
    lambda_used: float = Field(ge=0)
    accel_applied: bool = False
    accel_rejected: bool = False
    elapsed: float = Field(0.0, ge=0)  # seconds since the run started


# =============================================================================
# Diagnostics models
# =============================================================================

class RateEstimate(BaseModel):
    """Log-linear fit of err_sq against the iteration index."""
    q_fit: float = Field(gt=0)
    r_squared: float = Field(ge=0, le=1)
    window: Tuple[int, int]
    slope: float


class SpectralPrediction(BaseModel):
    """Local contraction factor predicted from the Hessian splitting."""
    rho: float = Field(ge=0)
    hessian_dim: int
    lam: float
    null_dim: int = 0


class GradientBoundProfile(BaseModel):
    """Ratios ||grad f(x(n))|| / ||x(n) - x(n-1)||; None where the step vanished."""
    ratios: List[Optional[float]]
    max_ratio: Optional[float] = None
    median_ratio: Optional[float] = None
    second_half_median: Optional[float] = None
    bounded: bool = True
    growing: bool = False


# =============================================================================
# Experiment models
# =============================================================================

class ProblemSpec(BaseModel):
    """Where the tensor of an experiment comes from."""
    kind: ProblemKind = ProblemKind.RANDOM_DENSE
    dims: Tuple[int, int, int] = (10, 10, 10)
    r: int = Field(10, ge=1)
    collinearity: float = Field(0.99, ge=0, lt=1)
    seed: int = 0
    path: Optional[str] = None
    start_at_solution: bool = False

    @field_validator("dims")
    @classmethod
    def _positive_dims(cls, dims):
        if any(d < 1 for d in dims):
            raise ValueError(f"dims must be positive, got {dims}")
        return dims

    @model_validator(mode="after")
    def _solution_needs_generator(self):
        if self.start_at_solution and (self.path or self.kind is ProblemKind.RANDOM_DENSE):
            raise ValueError("start_at_solution needs a generated exact-rank or swamp problem")
        return self


class SolverOptions(BaseModel):
    """Solver parameters shared by all algorithms of an experiment."""
    tol: float = Field(1e-12, gt=0)
    max_iter: int = Field(50000, gt=0)
    lambda0: float = Field(1.0, gt=0)
    accel_alpha: float = Field(1e-6, gt=0)
    accel_q: int = Field(100, gt=0)
    pinv_threshold: float = Field(1e-12, gt=0)
    accel_safeguard: bool = True
    decreasing_schedule: Optional[LambdaSchedule] = None


class ExperimentConfig(BaseModel):
    """A full benchmark experiment."""
    problem: ProblemSpec = Field(default_factory=ProblemSpec)
    algorithms: List[Algorithm] = Field(default_factory=lambda: list(Algorithm), min_length=1)
    solver: SolverOptions = Field(default_factory=SolverOptions)
    trials: int = Field(20, ge=1)
    output_dir: str = "data/results"
    workers: int = Field(1, ge=1)
    sizes: Optional[List[int]] = None
    warmup: bool = True

    @field_validator("sizes")
    @classmethod
    def _positive_sizes(cls, sizes):
        if sizes is not None and (not sizes or any(s < 1 for s in sizes)):
            raise ValueError(f"sizes must be a non-empty list of positive integers, got {sizes}")
        return sizes


class TrialResult(BaseModel):
    """Outcome of one algorithm on one trial."""
    algorithm: Algorithm
    trial: int
    seed: int
    status: TerminationStatus
    iterations: int
    final_err_sq: Optional[float] = None
    final_f: Optional[float] = None
    q_fit: Optional[float] = None
    r_squared: Optional[float] = None
    plateaus: List[Tuple[int, int]] = []
    trace_file: str
    wall_time_s: float = 0.0


class AlgorithmSummary(BaseModel):
    """Aggregate of one algorithm over all trials."""
    algorithm: Algorithm
    trials_converged: int
    median_iterations: Optional[float] = None
    median_wall_time_s: Optional[float] = None
    median_q_fit: Optional[float] = None
    plateau_count: int = 0
    plateau_total_length: int = 0
    status_counts: Dict[str, int] = {}


class ExperimentReport(BaseModel):
    """Everything written to report.json."""
    config: ExperimentConfig
    seed: int
    input_hash: str
    summaries: List[AlgorithmSummary]
    trials: List[TrialResult]

    @property
    def failed(self) -> bool:
        return any(t.status is TerminationStatus.NUMERICAL_FAILURE for t in self.trials)


class TimingRow(BaseModel):
    """Median cost of one algorithm at one problem size."""
    size: Tuple[int, int, int]
    algorithm: Algorithm
    trials: int
    median_wall_time_s: Optional[float] = None
    median_iterations: Optional[float] = None


class TimingTable(BaseModel):
    """Timing rows of all sizes plus any caveats about the medians."""
    algorithms: List[Algorithm]
    rows: List[TimingRow]
    warnings: List[str] = []
    failed: bool = False  # some trial ended in numerical failure
