"""Optimal single-shot Bayesian phase estimation with arbitrary circular priors."""

from .core import (
    OffDiagonalBlock,
    PhaseMeasurement,
    StrategyReport,
    build_r10,
    conditional_probabilities,
    evaluate_strategy,
    optimal_cost,
    optimal_measurement,
    optimal_strategy,
    qfi_pure,
    trace_norm,
)
from .optimizer import OptimizerConfig, OptimizerResult, fidelity_operator, optimize_probe
from .prior import CircularPrior, density_at, diffusive_prior, from_coefficients, prior_uncertainty, uniform_prior
from .states import (
    DensityMatrix,
    ProbeState,
    basis_state,
    berry_wiseman,
    classical_binomial,
    flat,
    from_amplitudes,
    noon,
    pure_to_density,
)

__all__ = [
    "CircularPrior", "DensityMatrix", "OffDiagonalBlock", "OptimizerConfig", "OptimizerResult",
    "PhaseMeasurement", "ProbeState", "StrategyReport", "basis_state", "berry_wiseman", "build_r10",
    "classical_binomial", "conditional_probabilities", "density_at", "diffusive_prior",
    "evaluate_strategy", "fidelity_operator", "flat", "from_amplitudes", "from_coefficients", "noon",
    "optimal_cost", "optimal_measurement", "optimal_strategy", "optimize_probe", "prior_uncertainty",
    "pure_to_density", "qfi_pure", "trace_norm", "uniform_prior",
]
