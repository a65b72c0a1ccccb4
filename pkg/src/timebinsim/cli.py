"""Command-line front end.

Four subcommands: `analytic` (closed-form sweeps), `mc-car` (histogram run
plus coincidence-ratio estimate), `mc-fringe` (phase sweep plus visibility
fit), `fit` (re-fit a CSV produced here or elsewhere). Every run writes its
outputs into --out-dir together with a manifest recording the semantic
invocation: config hash, seed, and the flags that affect the numbers.
Location (--out-dir) and execution detail (--workers) are left out of the
manifest so a re-run reproduces every file byte for byte.

CSV files carry a header row and LF line endings; JSON outputs are single
objects with sorted keys.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import (
    PairStatistics,
    car_closed_form,
    predicted_visibility,
    pump_power_for_mu,
)
from .fitting import fit_fringe, fit_scaling
from .montecarlo import (
    InsufficientStatisticsError,
    estimate_car,
    simulate_car_run,
    simulate_fringe_run,
)
from .params import (
    ExperimentConfig,
    config_from_dict,
    config_to_dict,
    dark_per_slot,
    default_config,
    effective_alpha,
    validate_config,
)
from .quantum import PhasePair


@dataclass(frozen=True)
class RunManifest:
    """What produced the files in this directory, minus where and how fast."""

    tool_version: str
    command: str
    arguments: dict
    config_hash: str
    seed: int
    outputs: list[str]


def config_hash(cfg: ExperimentConfig) -> str:
    canonical = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(canonical.encode()).hexdigest()


def load_config(path: str | None) -> ExperimentConfig:
    """Config from a JSON file, or the built-in baseline when omitted."""
    if path is None:
        return default_config()
    with open(path, encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _finish(
    out_dir: Path, command: str, arguments: dict, cfg: ExperimentConfig, outputs: list[str]
) -> None:
    manifest = RunManifest(
        tool_version=__version__,
        command=command,
        arguments=arguments,
        config_hash=config_hash(cfg),
        seed=cfg.seed,
        outputs=outputs,
    )
    _write_json(out_dir / "manifest.json", asdict(manifest))


def _parse_phase(token: str) -> float:
    if token.strip() == "pi/2":
        return math.pi / 2.0
    try:
        return float(token)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"phase must be a float or the token 'pi/2', got {token!r}"
        ) from None


def _prepare(ns) -> tuple[ExperimentConfig, Path]:
    cfg = load_config(ns.config)
    if getattr(ns, "seed", None) is not None:
        cfg = replace(cfg, seed=ns.seed)
    if getattr(ns, "pulses", None) is not None:
        cfg = replace(cfg, num_pulses=ns.pulses)
    bad = validate_config(cfg)
    if bad:
        for line in bad:
            print(f"invalid config: {line}", file=sys.stderr)
        raise SystemExit(1)
    out_dir = Path(ns.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return cfg, out_dir


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def cmd_analytic(ns) -> int:
    """Closed-form sweep: means, coincidence ratio, predicted visibility."""
    cfg, out_dir = _prepare(ns)
    if ns.steps < 1:
        print("error: --steps must be >= 1", file=sys.stderr)
        return 1
    if ns.start <= 0 or ns.stop <= 0:
        print("error: sweep range must be positive", file=sys.stderr)
        return 1
    values = np.linspace(ns.start, ns.stop, ns.steps)

    src = cfg.source
    alpha_sym = math.sqrt(effective_alpha(cfg.signal) * effective_alpha(cfg.idler))
    dark_mean = 0.5 * (
        dark_per_slot(cfg.signal, src.rep_rate_ghz)
        + dark_per_slot(cfg.idler, src.rep_rate_ghz)
    )
    als = effective_alpha(cfg.signal, include_interferometer=True)
    ali = effective_alpha(cfg.idler, include_interferometer=True)
    ds = dark_per_slot(cfg.signal, src.rep_rate_ghz)
    di = dark_per_slot(cfg.idler, src.rep_rate_ghz)

    rows = []
    for value in values:
        if ns.sweep == "mu":
            source = src
            power = pump_power_for_mu(value, source)
            mu = value
        elif ns.sweep == "power":
            source = src
            power = value
            mu = None
        else:  # dfdt: hold the operating mu, re-solve the pump power
            mu = PairStatistics.from_power(src.peak_power_w, src).mu_total
            source = replace(src, bandwidth_ghz=value / src.pulse_width_ns)
            power = pump_power_for_mu(mu, source)
        stats = PairStatistics.from_power(power, source)
        if mu is None:
            mu = stats.mu_total
        car = car_closed_form(mu, source, alpha_sym, dark_mean)
        vis = predicted_visibility(stats, als, ali, ds, di, cfg.coherence_slots)
        rows.append(
            [
                value,
                stats.mu_pairs,
                0.5 * (stats.mu_noise_signal + stats.mu_noise_idler),
                car,
                vis,
            ]
        )

    _write_csv(out_dir / "sweep.csv", [ns.sweep, "mu_pairs", "mu_noise", "car", "predicted_visibility"], rows)
    _finish(
        out_dir,
        "analytic",
        {"sweep": ns.sweep, "start": ns.start, "stop": ns.stop, "steps": ns.steps},
        cfg,
        ["sweep.csv"],
    )
    return 0


def cmd_mc_car(ns) -> int:
    """Histogram run at the config's operating point, with the estimate."""
    cfg, out_dir = _prepare(ns)
    hist = simulate_car_run(cfg, workers=ns.workers)
    rows = [[delay, hist.counts[delay]] for delay in sorted(hist.counts)]
    _write_csv(out_dir / "histogram.csv", ["delay", "counts"], rows)
    outputs = ["histogram.csv"]
    status = 0
    try:
        est = estimate_car(hist)
        _write_json(
            out_dir / "car.json",
            {
                "car": est.car,
                "stderr": est.stderr,
                "delay_zero_counts": hist.counts[0],
                "accidental_total": hist.accidental_total,
                "num_pulses": hist.num_pulses,
            },
        )
        outputs.append("car.json")
    except InsufficientStatisticsError as exc:
        _write_json(out_dir / "car.json", {"error": str(exc)})
        status = 1
    _finish(out_dir, "mc-car", {"pulses": cfg.num_pulses}, cfg, outputs)
    return status


def cmd_mc_fringe(ns) -> int:
    """Phase sweep of delay-0 coincidences, then the visibility fit."""
    if ns.steps < 4:
        print("error: --steps must be >= 4 for a fringe sweep", file=sys.stderr)
        return 1
    cfg, out_dir = _prepare(ns)
    cfg = replace(cfg, interferometers_present=True, phase_idler=ns.phi_i)
    phi_s = [2.0 * math.pi * k / ns.steps for k in range(ns.steps)]
    counts = []
    for k, phi in enumerate(phi_s):
        # Each phase point gets its own offset seed so points are
        # statistically independent but the sweep stays reproducible.
        cfg_point = replace(cfg, seed=cfg.seed + k, phase_signal=phi)
        counts.append(
            simulate_fringe_run(cfg_point, PhasePair(phi, ns.phi_i), workers=ns.workers)
        )
    _write_csv(out_dir / "fringe.csv", ["phi_s", "coincidences"], zip(phi_s, counts))
    outputs = ["fringe.csv"]
    status = 0
    try:
        fit = fit_fringe(phi_s, counts)
        _write_json(out_dir / "fringe_fit.json", asdict(fit))
        outputs.append("fringe_fit.json")
    except ValueError as exc:
        _write_json(out_dir / "fringe_fit.json", {"error": str(exc)})
        status = 1
    _finish(
        out_dir,
        "mc-fringe",
        {"pulses": cfg.num_pulses, "steps": ns.steps, "phi_i": ns.phi_i},
        cfg,
        outputs,
    )
    return status


def _read_csv_columns(path: str, required: list[str]) -> dict[str, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        missing = [c for c in required if c not in fields]
        if missing:
            raise ValueError(
                f"{path}: missing columns {missing}; found {fields}"
            )
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return {c: np.array([float(r[c]) for r in rows]) for c in required}


def cmd_fit(ns) -> int:
    """Re-fit a data CSV: fringe visibility or power-scaling coefficients."""
    cfg, out_dir = _prepare(ns)
    if ns.model == "fringe":
        data = _read_csv_columns(ns.data, ["phi_s", "coincidences"])
        fit = fit_fringe(data["phi_s"], data["coincidences"])
        payload = asdict(fit)
    else:
        data = _read_csv_columns(
            ns.data, ["power_w", "mu_pairs", "mu_noise_signal", "mu_noise_idler"]
        )
        fit = fit_scaling(
            data["power_w"],
            data["mu_pairs"],
            data["mu_noise_signal"],
            data["mu_noise_idler"],
            cfg.source.bandwidth_time_product,
        )
        payload = asdict(fit)
    _write_json(out_dir / "fit.json", payload)
    _finish(out_dir, "fit", {"model": ns.model, "data": Path(ns.data).name}, cfg, ["fit.json"])
    return 0


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="timebinsim",
        description="Simulate and analyze a time-bin entangled photon-pair source.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, pulses: bool = False) -> None:
        p.add_argument("--config", help="JSON config file (default: built-in baseline)")
        p.add_argument("--out-dir", required=True, help="directory for run outputs")
        p.add_argument("--seed", type=int, help="override the config seed")
        if pulses:
            p.add_argument("--pulses", type=int, help="override the pulse count")
            p.add_argument("--workers", type=int, default=1, help="parallel block workers")

    p_an = sub.add_parser("analytic", help="closed-form sweep to CSV")
    common(p_an)
    p_an.add_argument("--sweep", choices=["mu", "power", "dfdt"], required=True)
    p_an.add_argument("--start", type=float, required=True)
    p_an.add_argument("--stop", type=float, required=True)
    p_an.add_argument("--steps", type=int, required=True)
    p_an.set_defaults(func=cmd_analytic)

    p_car = sub.add_parser("mc-car", help="histogram run and coincidence ratio")
    common(p_car, pulses=True)
    p_car.set_defaults(func=cmd_mc_car)

    p_fr = sub.add_parser("mc-fringe", help="phase sweep and visibility fit")
    common(p_fr, pulses=True)
    p_fr.add_argument(
        "--phi-i",
        type=_parse_phase,
        default=0.0,
        help="idler interferometer phase: float or 'pi/2'",
    )
    p_fr.add_argument("--steps", type=int, default=16, help="signal phase points")
    p_fr.set_defaults(func=cmd_mc_fringe)

    p_fit = sub.add_parser("fit", help="fit an existing data CSV")
    common(p_fit)
    p_fit.add_argument("--model", choices=["scaling", "fringe"], required=True)
    p_fit.add_argument("--data", required=True, help="input CSV")
    p_fit.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        return ns.func(ns)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
