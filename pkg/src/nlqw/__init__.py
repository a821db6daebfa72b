"""Simulator and numerical toolkit for nonlinear discrete-time quantum
walks on the one-dimensional integer lattice.

The package is organized around a small set of concepts: two-component
lattice states, intensity-dependent coin families, the walk step (coin then
component shift), Fourier-side analysis of the linear walk, and the
scattering machinery that compares nonlinear runs against their linear
asymptotics.
"""

from .state import (
    LatticeState,
    ProbabilityDistribution,
    argmax_position,
    combine,
    delta_state,
    finding_probability,
    inner_product,
    l2_distance,
    load_state_csv,
    lp_norm,
    save_state_csv,
    scaled,
    sup_distance,
    threshold_positions,
    weak_lp_norm,
)
from .coins import (
    GALTON_LINEAR,
    UNITARITY_TOL,
    CoinSpec,
    ComposedCoin,
    ConstantCoin,
    GaltonCoin,
    GrossNeveuCoin,
    QuinticExponentialCoin,
    RotationPowerCoin,
    ThirringCoin,
    apply_coin,
    c0_from_ab,
    coin_from_json,
    coin_to_json,
    evaluate_coin,
    linear_part,
    nonlinear_deviation,
    nonlinear_partial_derivatives,
    rotation,
    unitarity_defect,
)
from .evolution import (
    Recorder,
    Trajectory,
    edge_recovery_trace,
    evolve,
    g_scaling_check,
    instability_trace,
    inverse_shift,
    linear_step,
    linear_step_inverse,
    period4_amplitude,
    shift,
    soliton_amplitude,
    step,
)
from .spectral import (
    DecayFit,
    DensityCurve,
    SymbolData,
    curvature_lower_bound,
    curvature_minimum,
    decay_fit,
    dispersion,
    eigenprojections,
    empirical_scaled_cdf,
    kolmogorov_distance,
    konno_density,
    oscillatory_integral,
    spectral_propagate,
    strichartz_ratio,
    symbol,
    weak_l4_decay_check,
    weak_limit_cdf,
    weak_limit_density,
)
from .scattering import (
    NonConvergenceError,
    RecoveryReport,
    RecoveryResult,
    ScatteringReport,
    dlambda,
    l5_decay_check,
    nonlinear_residual,
    recover_derivatives,
    recovery_ladder,
    recovery_probe,
    scattering_series,
    wave_operator,
)

__version__ = "0.1.0"

__all__ = [
    "LatticeState",
    "ProbabilityDistribution",
    "argmax_position",
    "combine",
    "delta_state",
    "finding_probability",
    "inner_product",
    "l2_distance",
    "load_state_csv",
    "lp_norm",
    "save_state_csv",
    "scaled",
    "sup_distance",
    "threshold_positions",
    "weak_lp_norm",
    "GALTON_LINEAR",
    "UNITARITY_TOL",
    "CoinSpec",
    "ComposedCoin",
    "ConstantCoin",
    "GaltonCoin",
    "GrossNeveuCoin",
    "QuinticExponentialCoin",
    "RotationPowerCoin",
    "ThirringCoin",
    "apply_coin",
    "c0_from_ab",
    "coin_from_json",
    "coin_to_json",
    "evaluate_coin",
    "linear_part",
    "nonlinear_deviation",
    "nonlinear_partial_derivatives",
    "rotation",
    "unitarity_defect",
    "Recorder",
    "Trajectory",
    "edge_recovery_trace",
    "evolve",
    "g_scaling_check",
    "instability_trace",
    "inverse_shift",
    "linear_step",
    "linear_step_inverse",
    "period4_amplitude",
    "shift",
    "soliton_amplitude",
    "step",
    "DecayFit",
    "DensityCurve",
    "SymbolData",
    "curvature_lower_bound",
    "curvature_minimum",
    "decay_fit",
    "dispersion",
    "eigenprojections",
    "empirical_scaled_cdf",
    "kolmogorov_distance",
    "konno_density",
    "oscillatory_integral",
    "spectral_propagate",
    "strichartz_ratio",
    "symbol",
    "weak_l4_decay_check",
    "weak_limit_cdf",
    "weak_limit_density",
    "NonConvergenceError",
    "RecoveryReport",
    "RecoveryResult",
    "ScatteringReport",
    "dlambda",
    "l5_decay_check",
    "nonlinear_residual",
    "recover_derivatives",
    "recovery_ladder",
    "recovery_probe",
    "scattering_series",
    "wave_operator",
    "__version__",
]
