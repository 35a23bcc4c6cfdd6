"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines.
"""

import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

import _catalogs
import _oracles
from decoscan import (
    ComplexScatteringLength,
    analytic_square_well,
    coefficients,
    decoherence_rate,
    decoherence_rate_t0,
    default_config,
    dynamic_range,
    eta_polynomial,
    eta_series,
    evaluate_model,
    extract_scattering_length,
    population_loss_rate,
    population_series,
    rate_polynomial,
    rate_prefactor,
    refine_minimum,
    rho_offdiag_series,
    scan,
    select_branch_flat,
    select_branch_smooth,
    synth_measurements,
    two_branches,
    well_depth_for,
)
from decoscan.numerov import RadialPotential

A0 = _catalogs.A0
csl = _catalogs.csl


class Stopwatch:
    def __init__(self, budget_s: float):
        self.budget = budget_s
        self.start = time.perf_counter()

    def check(self):
        elapsed = time.perf_counter() - self.start
        assert elapsed < self.budget, f"runtime {elapsed:.2f}s exceeds {self.budget}s"
        return elapsed


def report(number: int, name: str, watch: Stopwatch):
    print(f"criterion {number} ({name}): PASS [{watch.check():.2f}s]")


def test_criterion_1_vanishing_rate_law(working_gas):
    watch = Stopwatch(1.0)
    rng = np.random.default_rng(20240817)
    for _ in range(1000):
        alpha = rng.uniform(-150.0, 150.0)
        beta = rng.uniform(0.0, 40.0)
        same = csl(alpha, beta)
        got = coefficients(working_gas, same, same)
        assert got.xi1 == 0.0 and got.xi21 == 0.0 and got.xi22 == 0.0
    for _ in range(1000):
        a_a = csl(rng.uniform(-150.0, 150.0), rng.uniform(0.0, 40.0))
        a_b = csl(rng.uniform(-150.0, 150.0), rng.uniform(0.0, 40.0))
        if a_a == a_b:
            continue
        assert coefficients(working_gas, a_a, a_b).xi1 < 0.0
    report(1, "vanishing-rate law", watch)


def test_criterion_2_ground_state_rule(working_gas):
    watch = Stopwatch(1.0)
    beta_b = 10 * A0
    floor = rate_prefactor(working_gas) * beta_b * beta_b
    a_a = csl(25.0, 0.0)
    smallest = math.inf
    for alpha_b in np.linspace(-200.0, 200.0, 10_000):
        got = coefficients(working_gas, a_a, ComplexScatteringLength(alpha_b * A0, beta_b))
        smallest = min(smallest, abs(got.xi1))
    assert smallest >= floor * (1.0 - 1e-12)
    report(2, "ground-state rule", watch)


def test_criterion_3_coefficient_oracle(working_gas):
    watch = Stopwatch(10.0)
    rng = np.random.default_rng(771702)
    for _ in range(20):
        aa, ab = rng.uniform(-150.0, 150.0, size=2)
        ba, bb = rng.uniform(0.0, 40.0, size=2)
        got = coefficients(working_gas, csl(aa, ba), csl(ab, bb))
        want = _oracles.coefficient_set(
            working_gas.density,
            working_gas.atom_mass,
            working_gas.particle_mass,
            aa * A0, ba * A0, ab * A0, bb * A0,
        )
        for name in ("xi1", "xi21", "xi22", "zeta0", "zeta1"):
            err = _oracles.rel_err(getattr(got, name), want[name])
            assert err < 1e-12, f"{name}: {err}"
    report(3, "coefficient oracle", watch)


def test_criterion_4_series_consistency(working_gas):
    watch = Stopwatch(1.0)
    pair = coefficients(working_gas, csl(-20.0, 3.0), csl(65.0, 14.0))
    temperature = working_gas.temperature

    # exact coefficient comparison: the rate polynomial is the analytic
    # derivative of the eta polynomial, term by term
    for eta0 in (1.0, 0.5):
        p0, p1, p2 = eta_polynomial(pair, temperature, eta0)
        r0, r1 = rate_polynomial(pair, temperature, eta0)
        assert r0 == p1
        assert r1 == 2.0 * p2
        assert decoherence_rate_t0(pair, temperature, eta0) == r0

    # the eta series is an exact quadratic, so its central difference
    # matches the analytic rate at the rounding floor for every h
    steps = (1e-4, 5e-5, 2.5e-5)
    times = np.array([0.01, 0.05, 0.1, 0.5, 1.0])
    for h in steps:
        hi = eta_series(pair, temperature, 1.0, times + h)
        lo = eta_series(pair, temperature, 1.0, times - h)
        finite_difference = (hi - lo) / (2.0 * h)
        analytic = decoherence_rate(pair, temperature, 1.0, times)
        floor = 100.0 * np.finfo(float).eps / h
        assert np.max(np.abs(finite_difference - analytic)) <= max(1e-10, floor)

    # observed second-order convergence, measured where the truncated series
    # is not polynomial: the total-coherence decay
    z0, z1 = pair.zeta0, pair.zeta1
    sqrt_t = math.sqrt(temperature)

    def rho_rate(t):
        return np.exp(z0 * t) * (z0 * (1.0 + sqrt_t * z1 * t) + sqrt_t * z1)

    errors = []
    for h in steps:
        hi = rho_offdiag_series(pair, temperature, 1.0, times + h)
        lo = rho_offdiag_series(pair, temperature, 1.0, times - h)
        finite_difference = (hi - lo) / (2.0 * h)
        errors.append(np.max(np.abs(finite_difference - rho_rate(times))))
    log_h = np.log(steps)
    log_e = np.log(errors)
    slope = np.polyfit(log_h, log_e, 1)[0]
    assert slope >= 1.9
    report(4, "series consistency", watch)


def test_criterion_5_numerov_oracle(working_gas):
    watch = Stopwatch(30.0)
    radius = 10 * A0
    mstar = working_gas.reduced_mass
    for kappa_r in np.linspace(0.105, 1.445, 20):
        depth = well_depth_for(float(kappa_r), radius, mstar)
        potential = RadialPotential("square-well", depth, radius, mstar)
        got = extract_scattering_length(potential, default_config(potential))
        exact = analytic_square_well(depth, radius, mstar)
        assert got.alpha == pytest.approx(exact, rel=1e-6), f"kappa R = {kappa_r}"
    depth = well_depth_for(1.0, radius, mstar)
    for fraction in (0.05, 0.15, 0.40):
        potential = RadialPotential(
            "square-well-with-absorber", depth, radius, mstar,
            absorber_depth=fraction * depth,
        )
        got = extract_scattering_length(potential, default_config(potential))
        assert got.beta > 0.0
    report(5, "radial-solver oracle", watch)


def test_criterion_6_suppression_scenario(working_gas):
    watch = Stopwatch(10.0)
    model_a, model_b, crossing = _catalogs.suppression_pair()
    result = scan(working_gas, model_a, model_b, 460.0, 560.0, 201)
    assert dynamic_range(result.rows) >= 1e4
    field, rate = refine_minimum(
        working_gas, model_a, model_b, (509.0, 509.75, 510.75), rel_tol=1e-7
    )
    assert abs(field - crossing) <= 1e-6
    report(6, "suppression scenario", watch)


def test_criterion_7_degenerate_decay(working_gas):
    watch = Stopwatch(1.0)
    shared = csl(50.0, 10.0)
    pair = coefficients(working_gas, shared, shared)
    target = 1.0 / math.e

    def efold(series):
        lo, hi = 0.0, 10.0
        assert series(hi) < target < series(lo)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if series(mid) > target:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    t_aa = efold(lambda t: float(population_series(working_gas, shared, 1.0, [t])[0]))
    t_bb = efold(lambda t: float(population_series(working_gas, shared, 1.0, [t])[0]))
    t_ab = efold(lambda t: float(rho_offdiag_series(pair, 0.0, 1.0, [t])[0]))
    assert t_aa == pytest.approx(t_bb, rel=1e-12)
    assert t_ab == pytest.approx(t_aa, rel=1e-12)
    assert t_ab == pytest.approx(1.0 / population_loss_rate(working_gas, shared), rel=1e-10)

    eta = eta_series(pair, working_gas.temperature, 1.0, np.linspace(0.0, 5.0, 101))
    assert np.max(np.abs(eta - 1.0)) <= 1e-15
    report(7, "degenerate decay", watch)


def test_criterion_8_inversion_round_trip(working_gas):
    watch = Stopwatch(30.0)

    # noiseless smooth recovery over 500 points, no degenerate points
    reference, unknown, strength = _catalogs.smooth_inversion_catalog()
    grid = np.linspace(250.0, 350.0, 500)
    series = synth_measurements(working_gas, reference, unknown, grid)
    ref_values = [evaluate_model(reference, b) for b in grid]
    unk_values = [evaluate_model(unknown, b) for b in grid]
    alpha_ref = np.array([v.alpha for v in ref_values])
    beta_ref = np.array([v.beta for v in ref_values])
    beta_unknown = np.array([v.beta for v in unk_values])
    truth = np.array([v.alpha for v in unk_values])
    branches = two_branches(series, alpha_ref, beta_ref, beta_unknown, working_gas, 1.0)
    recovered = select_branch_smooth(branches, unknown.background.alpha)
    rel = np.abs(recovered.alpha_recovered - truth) / np.abs(truth)
    assert float(np.max(rel)) <= 1e-9

    # resonance-free unknown comes out flat under total-variation selection
    known, flat, alpha_d = _catalogs.flat_inversion_catalog()
    flat_grid = np.linspace(510.0, 540.0, 500)
    flat_series = synth_measurements(working_gas, known, flat, flat_grid)
    known_values = [evaluate_model(known, b) for b in flat_grid]
    flat_branches = two_branches(
        flat_series,
        np.array([v.alpha for v in known_values]),
        np.array([v.beta for v in known_values]),
        flat.background.beta,
        working_gas,
        1.0,
    )
    flat_result = select_branch_flat(flat_branches)
    variation = float(np.sum(np.abs(np.diff(flat_result.alpha_recovered))))
    assert variation <= 1e-12 * alpha_d * len(flat_grid)

    # 1% Gaussian noise, 20 seeds: pooled median error within 5% of strength
    sigma = 0.01 * float(np.median(series.rates))
    errors = []
    for seed in range(20):
        noisy = synth_measurements(
            working_gas, reference, unknown, grid, noise_sigma=sigma, seed=seed
        )
        noisy_branches = two_branches(noisy, alpha_ref, beta_ref, beta_unknown, working_gas, 1.0)
        noisy_result = select_branch_smooth(noisy_branches, unknown.background.alpha)
        errors.append(np.abs(noisy_result.alpha_recovered - truth))
    assert float(np.median(np.concatenate(errors))) <= 0.05 * strength
    report(8, "inversion round trip", watch)


DETERMINISM_CONFIG = """
[gas]
temperature = 1e-6
density = 1e11
atom_mass = 24.3
particle_mass = 15.0

[states.a]
alpha = 100.0
beta = 0.0
[[states.a.resonances]]
position = 500.0
width = 10.0
strength = 50.0

[states.b]
alpha = 120.0
beta = 10.0

[states.d]
alpha = 60.0
beta = 5.0

[states.x]
alpha = 100.0
beta = 2.0
[[states.x.resonances]]
position = 300.0
width = 8.0
strength = 40.0

[scan]
state_a = "a"
state_b = "b"
field_lo = 460.0
field_hi = 560.0
base_points = 201

[invert]
reference = "d"
unknown = "x"
field_lo = 250.0
field_hi = 350.0
points = 300
selection = "smooth"
anchor = 100.0
noise_sigma = 1e-4
seed = 20240817

[output]
directory = "out"
"""


def test_criterion_9_determinism(tmp_path):
    watch = Stopwatch(30.0)
    config_path = tmp_path / "run.toml"
    config_path.write_text(DETERMINISM_CONFIG, encoding="utf-8")
    outputs = {"scan.csv": set(), "invert.csv": set()}
    for run in (1, 2):
        for threads in (1, 8):
            outdir = tmp_path / f"run{run}-threads{threads}"
            outdir.mkdir(parents=True, exist_ok=True)
            env = dict(os.environ, DECOH_THREADS=str(threads))
            for subcommand in ("scan", "invert"):
                proc = subprocess.run(
                    [sys.executable, "-m", "decoscan.cli",
                     "--config", str(config_path), subcommand],
                    cwd=outdir,
                    env=env,
                    capture_output=True,
                    text=True,
                )
                assert proc.returncode == 0, proc.stderr
            for name in outputs:
                outputs[name].add((outdir / "out" / name).read_bytes())
    for name, contents in outputs.items():
        assert len(contents) == 1, f"{name} differs across runs/thread counts"
    report(9, "determinism", watch)
