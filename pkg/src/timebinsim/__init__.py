"""Simulator and analysis toolkit for time-bin entangled photon-pair sources.

The package splits along the physics: exact two-photon amplitudes
(`quantum`), closed-form counting statistics (`analytic`), a seeded
pulse-level Monte Carlo (`montecarlo`), estimators (`fitting`), experiment
description (`params`), and a CLI (`cli`).
"""

__version__ = "0.1.0"

from .analytic import (
    PairStatistics,
    car_closed_form,
    car_from_means,
    estimate_gamma,
    mu_correlated,
    mu_noise,
    predicted_visibility,
    pump_power_for_mu,
)
from .fitting import (
    CarCurveRow,
    FringeFit,
    ScalingFit,
    car_curve,
    fit_fringe,
    fit_scaling,
    proportional_fit,
)
from .montecarlo import (
    CarEstimate,
    CoincidenceHistogram,
    DetectionRecord,
    InsufficientStatisticsError,
    estimate_car,
    simulate_car_run,
    simulate_fringe_run,
)
from .params import (
    ChannelParams,
    ExperimentConfig,
    SourceParams,
    config_from_dict,
    config_to_dict,
    dark_per_slot,
    default_config,
    effective_alpha,
    validate_config,
)
from .quantum import (
    PhasePair,
    TimeBinState,
    apply_mzi,
    entangled_state,
    fringe,
    ideal_visibility,
    matched_coincidence_probability,
)

__all__ = [
    "__version__",
    "PairStatistics",
    "car_closed_form",
    "car_from_means",
    "estimate_gamma",
    "mu_correlated",
    "mu_noise",
    "predicted_visibility",
    "pump_power_for_mu",
    "CarCurveRow",
    "FringeFit",
    "ScalingFit",
    "car_curve",
    "fit_fringe",
    "fit_scaling",
    "proportional_fit",
    "CarEstimate",
    "CoincidenceHistogram",
    "DetectionRecord",
    "InsufficientStatisticsError",
    "estimate_car",
    "simulate_car_run",
    "simulate_fringe_run",
    "ChannelParams",
    "ExperimentConfig",
    "SourceParams",
    "config_from_dict",
    "config_to_dict",
    "dark_per_slot",
    "default_config",
    "effective_alpha",
    "validate_config",
    "PhasePair",
    "TimeBinState",
    "apply_mzi",
    "entangled_state",
    "fringe",
    "ideal_visibility",
    "matched_coincidence_probability",
]
