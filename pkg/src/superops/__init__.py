"""
superops Package

Numerical tools for super operator systems on Z2-graded Hilbert spaces:
graded operators and their cones, strong matrix norms, operator-space tensor
norms and diagonal norms of finite cyclic group algebras.
"""

from .config import (
    ComputationError,
    ConvergenceError,
    FastOptimizerConfig,
    InputError,
    NormConfig,
    OptimizerConfig,
    SearchConfig,
    SuiteConfig,
    SuperopsError,
)
from .core import (
    AmplifiedOperator,
    GradedDim,
    GradedOperator,
    OmegaUnitary,
    graded_abs,
    graded_spectrum,
    iota,
    is_epsilon_positive,
    is_hermitian,
    is_superpositive,
    is_superunitary,
    superinvolve,
    twisted_product,
)
from .group import CyclicGroupElement, delta_k_norm
from .maps import LinearMapSpec
from .norms import numerical_radius, sigma_strong_norm, strong_norm
from .tensor import NormBracket, TensorElement, haagerup_norm, injective_norm, projective_norm

__version__ = "0.1.0"
__all__ = [
    "AmplifiedOperator", "ComputationError", "ConvergenceError", "CyclicGroupElement", "FastOptimizerConfig",
    "InputError", "GradedDim", "GradedOperator",
    "LinearMapSpec", "NormBracket", "NormConfig", "OmegaUnitary", "OptimizerConfig", "SearchConfig",
    "SuiteConfig", "SuperopsError", "TensorElement", "delta_k_norm", "graded_abs", "graded_spectrum",
    "haagerup_norm", "injective_norm", "iota", "is_epsilon_positive", "is_hermitian", "is_superpositive",
    "is_superunitary", "numerical_radius", "projective_norm", "sigma_strong_norm", "strong_norm",
    "superinvolve", "twisted_product", "run_verification",
]


def run_verification(suite: str = "all", seed: int = 0, samples: int = 100) -> bool:
    """
    Convenience function running a verification suite.

    Args:
        suite: core, norms, tensor, group or all
        seed: seed of every sampled property
        samples: base sample count per property

    Returns:
        True if every property passed
    """
    from .verify import run_suite

    return all(r.passed for r in run_suite(SuiteConfig(suite=suite, seed=seed, samples=samples)))
