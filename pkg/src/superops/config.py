"""
Configuration module for superops.

Contains the configuration dataclasses, shared constants and the exception
hierarchy used throughout the package.
"""

from dataclasses import dataclass, field


DEFAULT_TOL = 1e-9
UNIT_MODULUS_TOL = 1e-12
MAX_LEVEL = 4
MAX_DUAL_PRODUCT_DIM = 16
MAX_GROUP_ORDER = 4
MAX_DIAGONAL_POWER = 3
SUITES = ("core", "norms", "tensor", "group", "all")


class SuperopsError(ValueError):
    """Base class for all library errors."""


class DimensionMismatchError(SuperopsError):
    """Operands live on different graded spaces or have incompatible shapes."""


class NotSelfAdjointError(SuperopsError):
    """An input that must be self-adjoint is not."""


class UnknownKindError(SuperopsError):
    """A sampler or command was asked for a kind it does not know."""


class BudgetExceededError(SuperopsError):
    """The requested computation is beyond the desk-scale caps."""


class GradingMetadataError(SuperopsError):
    """A tensor operation needs factor gradings that were not supplied."""


class InputError(SuperopsError):
    """Malformed JSON or shape errors in user input."""


class ComputationError(SuperopsError):
    """A numerical routine failed on valid input."""


class ConvergenceError(ComputationError):
    """An iterative bound did not reach the requested tolerance within its budget."""


@dataclass
class NormConfig:
    """Configuration for numerical-radius based norms."""
    tol: float = 1e-10
    radius_grid: int = 64
    radius_refinements: int = 256
    omega_grid: int = 128

    def __post_init__(self):
        if self.tol <= 0:
            raise SuperopsError("tol must be positive")
        if self.radius_grid < 64:
            raise SuperopsError("radius_grid must be at least 64")
        if self.omega_grid < 16:
            raise SuperopsError("omega_grid must be at least 16")


@dataclass
class OptimizerConfig:
    """Configuration for the restart optimizers behind the tensor norms."""
    restarts: int = 32
    iterations: int = 500
    padding: int = 0
    seed: int = 0
    sdp_warm_start: bool = True
    dual_samples: int = 64

    def __post_init__(self):
        if self.restarts < 1:
            raise SuperopsError("restarts must be at least 1")
        if self.iterations < 1:
            raise SuperopsError("iterations must be at least 1")
        if self.padding < 0:
            raise SuperopsError("padding must be nonnegative")


@dataclass
class FastOptimizerConfig(OptimizerConfig):
    """Reduced budgets used by the verification suites."""
    restarts: int = 4      # the SDP start already lands on the optimum
    iterations: int = 200
    dual_samples: int = 16


@dataclass
class SearchConfig:
    """Budgets for the sampled contractivity checks."""
    num_eta: int = 200
    xi_budget: int = 200
    num_samples: int = 1000
    radius_angles: int = 16
    step: float = 0.1

    def __post_init__(self):
        if self.num_eta < 1 or self.num_samples < 1:
            raise SuperopsError("sample counts must be positive")
        if self.xi_budget < 1:
            raise SuperopsError("xi_budget must be positive")


@dataclass
class SuiteConfig:
    """Configuration of one `verify` run."""
    suite: str = "all"
    seed: int = 0
    samples: int = 100
    tol: float = DEFAULT_TOL
    optimizer: OptimizerConfig = field(default_factory=FastOptimizerConfig)
    jobs: int = 1
    progress: bool = False

    def __post_init__(self):
        if self.suite not in SUITES:
            raise SuperopsError(f"unknown suite {self.suite!r}; expected one of {', '.join(SUITES)}")
        if self.samples < 1:
            raise SuperopsError("samples must be at least 1")
        if self.tol <= 0:
            raise SuperopsError("tol must be positive")
        if self.jobs < 1:
            raise SuperopsError("jobs must be at least 1")
        if isinstance(self.optimizer, dict):
            self.optimizer = FastOptimizerConfig(**self.optimizer)
