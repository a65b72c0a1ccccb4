"""Shared test helpers.

Monte Carlo checks run on a lossless-channel variant of the baseline
config: with the experimentally realistic alphas (~6e-3) no desk-scale
pulse count populates the histogram, and the quantities under test (ratio
estimates against their own analytic form, raw visibility) do not depend
on the alpha scale.
"""

from dataclasses import replace

import pytest

from timebinsim import ChannelParams, ExperimentConfig, default_config, pump_power_for_mu


def lossless_channel(ch: ChannelParams, dark_rate_hz: float | None = None) -> ChannelParams:
    return replace(
        ch,
        out_coupling_db=0.0,
        channel_loss_db=0.0,
        interferometer_loss_db=0.0,
        detector_efficiency=1.0,
        dark_rate_hz=ch.dark_rate_hz if dark_rate_hz is None else dark_rate_hz,
    )


def lossless_config(
    mu_total: float,
    num_pulses: int,
    seed: int = 20_001,
    dark_rate_hz: float | None = None,
    interferometers: bool = False,
) -> ExperimentConfig:
    """Baseline source at the requested channel mean, perfect detection."""
    cfg = default_config()
    power = pump_power_for_mu(mu_total, cfg.source)
    return replace(
        cfg,
        source=replace(cfg.source, peak_power_w=power),
        signal=lossless_channel(cfg.signal, dark_rate_hz),
        idler=lossless_channel(cfg.idler, dark_rate_hz),
        num_pulses=num_pulses,
        seed=seed,
        interferometers_present=interferometers,
    )


def pairs_only_config(
    mu_pairs: float, n_slots: int, num_pulses: int, seed: int = 31_003
) -> ExperimentConfig:
    """Noiseless, dark-free, lossless fringe run: every emitted pair is seen."""
    cfg = lossless_config(mu_pairs, num_pulses, seed=seed, dark_rate_hz=0.0)
    src = replace(cfg.source, noise_coeff=0.0)
    power = pump_power_for_mu(mu_pairs, src)
    return replace(
        cfg,
        source=replace(src, peak_power_w=power),
        coherence_slots=n_slots,
        interferometers_present=True,
    )


@pytest.fixture
def baseline() -> ExperimentConfig:
    return default_config()
