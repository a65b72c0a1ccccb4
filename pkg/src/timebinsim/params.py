"""Experiment parameters: source, detection channels, run configuration.

Unit conventions used throughout the package: pump power in W, bandwidth in
GHz, pulse width in ns, so the bandwidth-time product is dimensionless.
Per-pulse photon numbers and per-slot probabilities are dimensionless.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict


@dataclass(frozen=True)
class SourceParams:
    """Pulsed pair source with a quadratic pair yield and linear noise yield.

    pair_coeff : float
        Quadratic coefficient of the correlated-pair mean per pulse,
        in 1/W^2 (per unit bandwidth-time product).
    noise_coeff : float
        Linear coefficient of the uncorrelated-noise mean per pulse, 1/W.
    bandwidth_ghz : float
        Detection filter bandwidth, GHz.
    pulse_width_ns : float
        Pump pulse duration, ns.
    rep_rate_ghz : float
        Pump repetition rate, GHz (slots per ns).
    peak_power_w : float
        Coupled pump peak power, W.
    """

    pair_coeff: float
    noise_coeff: float
    bandwidth_ghz: float
    pulse_width_ns: float
    rep_rate_ghz: float
    peak_power_w: float

    @property
    def bandwidth_time_product(self) -> float:
        return self.bandwidth_ghz * self.pulse_width_ns


@dataclass(frozen=True)
class ChannelParams:
    """One detection arm: losses in dB, detector efficiency, dark rate."""

    out_coupling_db: float
    channel_loss_db: float
    detector_efficiency: float
    dark_rate_hz: float
    interferometer_loss_db: float = 0.0


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one simulated run."""

    source: SourceParams
    signal: ChannelParams
    idler: ChannelParams
    coherence_slots: int = 1000
    num_pulses: int = 10_000_000
    phase_signal: float = 0.0
    phase_idler: float = 0.0
    seed: int = 12345
    interferometers_present: bool = False


def effective_alpha(channel: ChannelParams, include_interferometer: bool = False) -> float:
    """Overall detection probability for a photon entering this arm.

    Combines the dB loss terms with the detector efficiency. The factor-1/2
    interferometer post-selection is not included here; it is modeled
    explicitly where interferometers appear. Only the interferometer's
    excess (component) loss enters, and only when requested.
    """
    loss_db = channel.out_coupling_db + channel.channel_loss_db
    if include_interferometer:
        loss_db += channel.interferometer_loss_db
    return 10.0 ** (-loss_db / 10.0) * channel.detector_efficiency


def dark_per_slot(channel: ChannelParams, rep_rate_ghz: float) -> float:
    """Dark-count probability in one time slot of the pulse train."""
    return channel.dark_rate_hz / (rep_rate_ghz * 1e9)


def default_config() -> ExperimentConfig:
    """Baseline configuration of the reference pair-source experiment.

    1 GHz train of 60 ps pulses, 12.5 GHz detection bandwidth, pump set to
    the mu = 0.004 operating point.
    """
    source = SourceParams(
        pair_coeff=5.78,
        noise_coeff=1.03,
        bandwidth_ghz=12.5,
        pulse_width_ns=0.060,
        rep_rate_ghz=1.0,
        peak_power_w=5.037e-3,
    )
    signal = ChannelParams(
        out_coupling_db=9.0,
        channel_loss_db=6.0,
        detector_efficiency=0.2,
        dark_rate_hz=50.0,
    )
    idler = ChannelParams(
        out_coupling_db=9.0,
        channel_loss_db=6.7,
        detector_efficiency=0.2,
        dark_rate_hz=10.0,
    )
    return ExperimentConfig(source=source, signal=signal, idler=idler)


# ----------------------------------------------------------------------
# validation
# ----------------------------------------------------------------------

def validate_config(cfg: ExperimentConfig) -> list[str]:
    """Return a list of human-readable violations; empty list means valid.

    Violations are data, not exceptions, so callers can report all of them
    at once (the CLI prints the full list before exiting).
    """
    bad: list[str] = []
    src = cfg.source
    if src.pair_coeff <= 0:
        bad.append(f"source.pair_coeff must be > 0, got {src.pair_coeff}")
    if src.noise_coeff < 0:
        bad.append(f"source.noise_coeff must be >= 0, got {src.noise_coeff}")
    if src.bandwidth_ghz <= 0:
        bad.append(f"source.bandwidth_ghz must be > 0, got {src.bandwidth_ghz}")
    if src.pulse_width_ns <= 0:
        bad.append(f"source.pulse_width_ns must be > 0, got {src.pulse_width_ns}")
    if src.rep_rate_ghz <= 0:
        bad.append(f"source.rep_rate_ghz must be > 0, got {src.rep_rate_ghz}")
    if src.peak_power_w < 0:
        bad.append(f"source.peak_power_w must be >= 0, got {src.peak_power_w}")

    for name, ch in (("signal", cfg.signal), ("idler", cfg.idler)):
        if ch.out_coupling_db < 0:
            bad.append(f"{name}.out_coupling_db must be >= 0, got {ch.out_coupling_db}")
        if ch.channel_loss_db < 0:
            bad.append(f"{name}.channel_loss_db must be >= 0, got {ch.channel_loss_db}")
        if not 0.0 <= ch.detector_efficiency <= 1.0:
            bad.append(
                f"{name}.detector_efficiency must be in [0, 1], got {ch.detector_efficiency}"
            )
        if ch.dark_rate_hz < 0:
            bad.append(f"{name}.dark_rate_hz must be >= 0, got {ch.dark_rate_hz}")
        if ch.interferometer_loss_db < 0:
            bad.append(
                f"{name}.interferometer_loss_db must be >= 0, got {ch.interferometer_loss_db}"
            )

    if cfg.coherence_slots < 2:
        bad.append(f"coherence_slots must be >= 2, got {cfg.coherence_slots}")
    if cfg.num_pulses < 1:
        bad.append(f"num_pulses must be >= 1, got {cfg.num_pulses}")
    if cfg.seed < 0:
        bad.append(f"seed must be >= 0, got {cfg.seed}")
    return bad


# ----------------------------------------------------------------------
# JSON-facing dict conversion
# ----------------------------------------------------------------------

_SOURCE_KEYS = {f.name for f in SourceParams.__dataclass_fields__.values()}
_CHANNEL_KEYS = {f.name for f in ChannelParams.__dataclass_fields__.values()}
_TOP_KEYS = {f.name for f in ExperimentConfig.__dataclass_fields__.values()}


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Plain-dict form of the config; keys mirror the dataclass fields."""
    return asdict(cfg)


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build a config from a parsed JSON object.

    Unknown keys are rejected at every level, naming the offender: silent
    typos in config files have burned enough runs already.
    """
    if not isinstance(data, dict):
        raise ValueError(f"config must be a JSON object, got {type(data).__name__}")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for section in ("source", "signal", "idler"):
        if section not in data:
            raise ValueError(f"config is missing required section '{section}'")

    def _section(raw: dict, allowed: set[str], where: str) -> dict:
        if not isinstance(raw, dict):
            raise ValueError(f"'{where}' must be a JSON object")
        extra = set(raw) - allowed
        if extra:
            raise ValueError(f"unknown keys in '{where}': {sorted(extra)}")
        return raw

    src = SourceParams(**_section(data["source"], _SOURCE_KEYS, "source"))
    sig = ChannelParams(**_section(data["signal"], _CHANNEL_KEYS, "signal"))
    idl = ChannelParams(**_section(data["idler"], _CHANNEL_KEYS, "idler"))
    scalars = {k: v for k, v in data.items() if k not in ("source", "signal", "idler")}
    return ExperimentConfig(source=src, signal=sig, idler=idl, **scalars)
