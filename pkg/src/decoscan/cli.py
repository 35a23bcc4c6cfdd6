"""Batch command-line interface.

    decoscan --config run.toml [--seed N] <subcommand>

Subcommands: rate, evolve, scan, invert, oracle, synth.  Deterministic for a
given config and seed regardless of DECOH_THREADS.  Exit codes: 0 success,
1 validation or configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import csvio
from .config import InvertSettings, RunConfig, load_config
from .constants import BOHR_RADIUS
from .decoherence import coefficients, decoherence_rate_t0, trajectory
from .errors import (
    ConfigError,
    DecoscanError,
    DomainError,
    NumericalError,
    SingularityError,
)
from .fieldscan import dynamic_range, locate_suppression_windows, scan
from .invert import (
    select_branch_flat,
    select_branch_smooth,
    synth_measurements,
    two_branches,
)
from .numerov import (
    NumerovConfig,
    RadialPotential,
    default_config,
    extract_scattering_length,
    well_depth_for,
)
from .scattering import evaluate_model

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


def _require(settings, name: str):
    if settings is None:
        raise ConfigError([f"subcommand '{name}' needs a [{name}] section in the config"])
    return settings


def _fmt(value: float, precision: int) -> str:
    return csvio.format_number(value, precision)


def _out_path(config: RunConfig, filename: str) -> Path:
    directory = Path(config.output.directory)
    directory.mkdir(parents=True, exist_ok=True)
    return directory / filename


def _run_rate(config: RunConfig) -> int:
    settings = _require(config.rate, "rate")
    gas = config.gas
    a_a = evaluate_model(config.states[settings.state_a], settings.field)
    a_b = evaluate_model(config.states[settings.state_b], settings.field)
    coeffs = coefficients(gas, a_a, a_b)
    rate = decoherence_rate_t0(coeffs, gas.temperature, settings.eta0)
    p = config.output.precision
    print(f"field_gauss={_fmt(settings.field, p)}")
    print(f"rate_per_s={_fmt(rate, p)}")
    print(f"abs_rate_per_s={_fmt(abs(rate), p)}")
    print(f"zeta0_per_s={_fmt(coeffs.zeta0, p)}")
    return EXIT_OK


def _run_evolve(config: RunConfig) -> int:
    settings = _require(config.evolve, "evolve")
    gas = config.gas
    a_a = evaluate_model(config.states[settings.state_a], settings.field)
    a_b = evaluate_model(config.states[settings.state_b], settings.field)
    times = np.linspace(0.0, settings.t_max, settings.samples)
    traj = trajectory(
        gas,
        a_a,
        a_b,
        times,
        eta0=settings.eta0,
        rho_ab0=settings.rho_ab0,
        rho_aa0=settings.rho_aa0,
        rho_bb0=settings.rho_bb0,
        epsilon=settings.epsilon,
    )
    path = _out_path(config, "evolve.csv")
    csvio.write_evolve_csv(path, traj, config.output.precision)
    print(f"wrote {path}")
    print(f"validity_time_s={_fmt(traj.validity_time, config.output.precision)}")
    return EXIT_OK


def _run_scan(config: RunConfig) -> int:
    settings = _require(config.scan, "scan")
    gas = config.gas
    model_a = config.states[settings.state_a]
    model_b = config.states[settings.state_b]
    result = scan(
        gas,
        model_a,
        model_b,
        settings.field_lo,
        settings.field_hi,
        settings.base_points,
        eta0=settings.eta0,
        max_depth=settings.max_depth,
    )
    path = _out_path(config, "scan.csv")
    csvio.write_scan_csv(path, result, config.output.precision)
    p = config.output.precision
    print(f"wrote {path}")
    print(f"rows={len(result.rows)}")
    for point in result.skipped:
        print(
            f"skipped field {point.field!r} G: guard band of resonance "
            f"{point.resonance_index} of state {point.state_label!r}",
            file=sys.stderr,
        )
    drange = dynamic_range(result.rows)
    print("dynamic_range=" + ("undefined" if drange is None else _fmt(drange, p)))
    windows = locate_suppression_windows(
        gas, model_a, model_b, result,
        threshold_ratio=settings.threshold_ratio, eta0=settings.eta0,
    )
    for w in windows:
        print(
            f"window field_lo={_fmt(w.field_lo, p)} field_hi={_fmt(w.field_hi, p)} "
            f"argmin={_fmt(w.argmin_field, p)} min_rate={_fmt(w.min_rate, p)}"
        )
    return EXIT_OK


def _synth_series(config: RunConfig, settings: InvertSettings, seed: int):
    gas = config.gas
    grid = np.linspace(settings.field_lo, settings.field_hi, settings.points)
    return synth_measurements(
        gas,
        config.states[settings.reference],
        config.states[settings.unknown],
        grid,
        eta0=settings.eta0,
        noise_sigma=settings.noise_sigma,
        seed=seed,
    )


def _run_synth(config: RunConfig, seed: int) -> int:
    settings = _require(config.invert, "invert")
    series = _synth_series(config, settings, seed)
    path = _out_path(config, "rates.csv")
    csvio.write_rates_csv(path, series, config.output.precision)
    print(f"wrote {path}")
    print(f"points={len(series.fields)}")
    return EXIT_OK


def _run_invert(config: RunConfig, seed: int) -> int:
    settings = _require(config.invert, "invert")
    gas = config.gas
    if settings.rates_csv is not None:
        series = csvio.read_rates_csv(settings.rates_csv)
    else:
        series = _synth_series(config, settings, seed)

    reference = config.states[settings.reference]
    unknown = config.states[settings.unknown]
    ref_values = [evaluate_model(reference, b) for b in series.fields]
    unk_values = [evaluate_model(unknown, b) for b in series.fields]
    branches = two_branches(
        series,
        np.array([v.alpha for v in ref_values]),
        np.array([v.beta for v in ref_values]),
        np.array([v.beta for v in unk_values]),
        gas,
        settings.eta0,
    )
    if settings.selection == "smooth":
        result = select_branch_smooth(branches, settings.anchor)
    else:
        result = select_branch_flat(branches)
    path = _out_path(config, "invert.csv")
    csvio.write_invert_csv(path, branches, result, config.output.precision)
    p = config.output.precision
    print(f"wrote {path}")
    print(f"points={len(series.fields)}")
    print(f"clamped_points={len(result.clamped_points)}")
    print(f"selection_cost_m={_fmt(result.cost, p)}")
    return EXIT_OK


def _run_oracle(config: RunConfig) -> int:
    settings = _require(config.oracle, "oracle")
    reduced_mass = config.gas.reduced_mass
    if settings.depth is not None:
        depth = settings.depth
    else:
        depth = well_depth_for(settings.kappa_r, settings.range, reduced_mass)
    absorber = settings.absorber_fraction * depth
    potential = RadialPotential(
        kind="square-well-with-absorber" if absorber > 0 else "square-well",
        depth=depth,
        range=settings.range,
        reduced_mass=reduced_mass,
        absorber_depth=absorber,
    )
    base = default_config(potential, settings.steps_per_range)
    numerov_config = NumerovConfig(
        step=base.step,
        match_radius=settings.match_factor * settings.range,
        momenta=settings.momenta or base.momenta,
    )
    extracted = extract_scattering_length(potential, numerov_config)
    p = config.output.precision
    print(f"alpha_bohr={_fmt(extracted.alpha / BOHR_RADIUS, p)}")
    print(f"beta_bohr={_fmt(extracted.beta / BOHR_RADIUS, p)}")
    print(f"depth_joule={_fmt(depth, p)}", file=sys.stderr)
    print(f"step_m={_fmt(numerov_config.step, p)}", file=sys.stderr)
    return EXIT_OK


def run_subcommand(name: str, config: RunConfig, *, seed_override: int | None = None) -> int:
    """Dispatch one subcommand against a validated config."""
    seed = seed_override
    if seed is None and config.invert is not None:
        seed = config.invert.seed
    if name == "rate":
        return _run_rate(config)
    if name == "evolve":
        return _run_evolve(config)
    if name == "scan":
        return _run_scan(config)
    if name == "synth":
        return _run_synth(config, seed if seed is not None else 0)
    if name == "invert":
        return _run_invert(config, seed if seed is not None else 0)
    if name == "oracle":
        return _run_oracle(config)
    raise ConfigError([f"unknown subcommand {name!r}"])


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="decoscan",
        description="Collisional-decoherence rate scans and scattering-length recovery",
    )
    parser.add_argument("--config", required=True, help="TOML (or .json) run configuration")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("subcommand", choices=["rate", "evolve", "scan", "invert", "oracle", "synth"])
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
        return run_subcommand(args.subcommand, config, seed_override=args.seed)
    except ConfigError as exc:
        for failure in exc.failures:
            print(f"config error: {failure}", file=sys.stderr)
        return EXIT_VALIDATION
    except DomainError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalError, SingularityError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DecoscanError as exc:  # any remaining package error is a failure
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
