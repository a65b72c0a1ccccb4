"""Closed-form pair statistics: means, coincidence-to-accidental ratio,
visibility prediction.

The source model: per pulse and per unit bandwidth-time product, the
correlated-pair mean grows quadratically with pump peak power while the
single-channel noise mean grows linearly,

    mu_pairs = pair_coeff * p^2 * F        F = bandwidth * pulse width
    mu_noise = noise_coeff * p * F

Every function here is algebra on those two means; nothing is sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .params import SourceParams


@dataclass(frozen=True)
class PairStatistics:
    """Per-pulse means: correlated pairs, per-channel noise, channel total."""

    mu_pairs: float
    mu_noise_signal: float
    mu_noise_idler: float
    mu_total: float

    @classmethod
    def from_power(cls, peak_power_w: float, source: SourceParams) -> "PairStatistics":
        mu_c = mu_correlated(peak_power_w, source)
        mu_n = mu_noise(peak_power_w, source)
        return cls(
            mu_pairs=mu_c,
            mu_noise_signal=mu_n,
            mu_noise_idler=mu_n,
            mu_total=mu_c + mu_n,
        )

    @property
    def mu_channel_signal(self) -> float:
        return self.mu_pairs + self.mu_noise_signal

    @property
    def mu_channel_idler(self) -> float:
        return self.mu_pairs + self.mu_noise_idler


def mu_correlated(peak_power_w: float, source: SourceParams) -> float:
    """Correlated-pair mean per pulse, quadratic in pump power."""
    if peak_power_w < 0:
        raise ValueError(f"peak power must be >= 0, got {peak_power_w}")
    return source.pair_coeff * peak_power_w**2 * source.bandwidth_time_product


def mu_noise(peak_power_w: float, source: SourceParams) -> float:
    """Uncorrelated-noise mean per pulse per channel, linear in pump power."""
    if peak_power_w < 0:
        raise ValueError(f"peak power must be >= 0, got {peak_power_w}")
    return source.noise_coeff * peak_power_w * source.bandwidth_time_product


def pump_power_for_mu(mu_total: float, source: SourceParams) -> float:
    """Invert the channel mean mu = (a p + b) p F for the pump power.

    Positive root of the quadratic, written in the cancellation-free form
    p = v / (u + sqrt(u^2 + v)) with u = b/(2a), v = mu/(aF); the textbook
    -u + sqrt(u^2 + v) loses half the mantissa when v << u^2.
    """
    if mu_total < 0:
        raise ValueError(f"mu_total must be >= 0, got {mu_total}")
    if mu_total == 0.0:
        return 0.0
    a = source.pair_coeff
    b = source.noise_coeff
    f = source.bandwidth_time_product
    if a * f <= 0:
        raise ValueError("pair_coeff and bandwidth-time product must be positive")
    u = b / (2.0 * a)
    v = mu_total / (a * f)
    return v / (u + math.sqrt(u * u + v))


def car_from_means(stats: PairStatistics, alpha: float, dark: float) -> float:
    """Coincidence-to-accidental ratio from the per-pulse means.

    True coincidences go as mu_pairs * alpha^2; a click pair in any other
    slot combination goes as the product of the two singles probabilities
    (mu * alpha + dark)^2. Symmetric in the two arms: callers pass the
    geometric-mean alpha and mean dark when the arms differ.
    """
    mu_n = 0.5 * (stats.mu_noise_signal + stats.mu_noise_idler)
    denom = (stats.mu_pairs + mu_n) * alpha + dark
    if denom <= 0.0:
        raise ValueError("no photons and no darks: accidental rate is zero")
    return stats.mu_pairs * alpha**2 / denom**2 + 1.0


def car_closed_form(mu_total: float, source: SourceParams, alpha: float, dark: float) -> float:
    """Coincidence-to-accidental ratio as an explicit function of mu.

    Same quantity as car_from_means after eliminating the pump power, so the
    two routes must agree to float precision; both are kept because the
    mu-explicit form is the one worth reading:

        CAR = (mu a / (mu a + d))^2 * 4A / (F (b + sqrt(b^2 + 4A mu/F))^2) + 1

    with A the pair coefficient, b the noise coefficient, F the
    bandwidth-time product. With d = 0 the ratio climbs to 1 + A/(F b^2) as
    mu -> 0 and falls toward 1 at large mu.
    """
    if mu_total < 0:
        raise ValueError(f"mu_total must be >= 0, got {mu_total}")
    a = source.pair_coeff
    b = source.noise_coeff
    f = source.bandwidth_time_product
    denom_click = mu_total * alpha + dark
    if denom_click <= 0.0:
        raise ValueError("no photons and no darks: accidental rate is zero")
    prefactor = (mu_total * alpha / denom_click) ** 2
    root = math.sqrt(b * b + 4.0 * a * mu_total / f)
    return prefactor * 4.0 * a / (f * (b + root) ** 2) + 1.0


def predicted_visibility(
    stats: PairStatistics,
    alpha_signal: float,
    alpha_idler: float,
    dark_signal: float,
    dark_idler: float,
    n_slots: int,
) -> float:
    """Raw two-photon fringe visibility including noise and darks.

    The fringe-averaged true-coincidence level is mu_pairs * alpha_s *
    alpha_i / 8 (each photon keeps 1/2 at its interferometer, and the
    matched-slot sum averages to half of that product); accidentals pair the
    two singles streams, each carrying the interferometer's 1/2. With
    C = mu_pairs alpha_s alpha_i / 4 and A the singles product,

        V = (n-1)/n * C / (C + 2 A)

    The alphas here exclude the 1/2 post-selection (it is explicit in the
    formula) but include any interferometer excess loss.
    """
    if n_slots < 2:
        raise ValueError(f"n_slots must be >= 2, got {n_slots}")
    c = stats.mu_pairs * alpha_signal * alpha_idler / 4.0
    a_acc = (stats.mu_channel_signal * alpha_signal / 2.0 + dark_signal) * (
        stats.mu_channel_idler * alpha_idler / 2.0 + dark_idler
    )
    if c + 2.0 * a_acc <= 0.0:
        raise ValueError("no coincidences at all: visibility undefined")
    return (n_slots - 1) / n_slots * c / (c + 2.0 * a_acc)


def estimate_gamma(pair_coeff: float, device_length_m: float) -> float:
    """Effective nonlinear coefficient, 1/(W m), from the pair yield.

    The quadratic coefficient scales as (gamma L)^2, so gamma is recovered
    as sqrt(pair_coeff)/L. Order-of-magnitude tool: it ignores the exact
    phase-matching and envelope factors absorbed into pair_coeff.
    """
    if pair_coeff <= 0:
        raise ValueError(f"pair_coeff must be > 0, got {pair_coeff}")
    if device_length_m <= 0:
        raise ValueError(f"device_length_m must be > 0, got {device_length_m}")
    return math.sqrt(pair_coeff) / device_length_m
