"""Age-of-information analysis for random-access wireless networks.

Simulate per-link update ages on a conflict graph with unreliable channels,
evaluate policies in closed form, and compute age-optimal attempt
probabilities with a distributed dual ascent, certified against brute-force
oracles.
"""

from agenet._backend import available_backends, kernel_backend
from agenet.analytics import (
    ActivationProfile,
    activation_frequency,
    closed_form_age,
    fixed_point_residual,
    heuristic_sqrt_policy,
    is_single_collision_domain,
)
from agenet.network import (
    ConfigError,
    Issue,
    Network,
    ValidationReport,
    parse_network,
    serialize_network,
    validate,
)
from agenet.optimizer import (
    DualState,
    OptimizerConfig,
    OptimizerResult,
    dual_gradient,
    dual_objective,
    entropy,
    recover_policy,
    run_frames,
)
from agenet.oracle import OracleResult, grid_search, refine
from agenet.sim import (
    DivergenceWarning,
    Policy,
    SimState,
    TraceStats,
    bernoulli_draws,
    simulate,
    step,
    transmission_success,
)

__version__ = "0.1.0"

__all__ = [
    "ActivationProfile",
    "ConfigError",
    "DivergenceWarning",
    "DualState",
    "Issue",
    "Network",
    "OptimizerConfig",
    "OptimizerResult",
    "OracleResult",
    "Policy",
    "SimState",
    "TraceStats",
    "ValidationReport",
    "activation_frequency",
    "available_backends",
    "bernoulli_draws",
    "closed_form_age",
    "dual_gradient",
    "dual_objective",
    "entropy",
    "fixed_point_residual",
    "grid_search",
    "heuristic_sqrt_policy",
    "is_single_collision_domain",
    "kernel_backend",
    "parse_network",
    "recover_policy",
    "refine",
    "run_frames",
    "serialize_network",
    "simulate",
    "step",
    "transmission_success",
    "validate",
]
