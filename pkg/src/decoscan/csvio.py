"""CSV emission and ingestion.

Columns are fixed per artifact; numeric fields are written in scientific
notation with full double precision (17 significant digits by default) so
that every file re-parses to the exact values that produced it.  Lengths are
reported in bohr, rates in s^-1, fields in gauss.
"""

from __future__ import annotations

import numpy as np

from .constants import BOHR_RADIUS
from .decoherence import CoherenceTrajectory
from .errors import ConfigError
from .fieldscan import ScanResult
from .invert import BranchSeries, InversionResult, RateMeasurementSeries

SCAN_COLUMNS = (
    "field_gauss",
    "alpha_a_bohr",
    "beta_a_bohr",
    "alpha_b_bohr",
    "beta_b_bohr",
    "delta_abs_bohr",
    "rate_per_s",
    "zeta0_per_s",
)

EVOLVE_COLUMNS = (
    "time_s",
    "eta",
    "rho_offdiag",
    "rho_aa",
    "rho_bb",
    "within_validity",
)

INVERT_COLUMNS = (
    "field_gauss",
    "q_plus_bohr",
    "q_minus_bohr",
    "branch_choice",
    "alpha_recovered_bohr",
    "discriminant_clamped",
)

RATES_COLUMNS = (
    "field_gauss",
    "rate_per_s",
    "noise_sigma_per_s",
)


def format_number(value, precision: int = 17) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return f"{float(value):.{precision - 1}e}"


def write_rows(path, header, rows, precision: int = 17) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_number(v, precision) for v in row))
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("\n".join(lines))
        handle.write("\n")


def read_rows(path, expected_header=None) -> tuple[list[str], list[list[str]]]:
    with open(path, "r", encoding="utf-8") as handle:
        lines = [line.rstrip("\n") for line in handle if line.strip()]
    if not lines:
        raise ConfigError([f"{path}: empty CSV"])
    header = lines[0].split(",")
    if expected_header is not None and header != list(expected_header):
        raise ConfigError(
            [f"{path}: header {header!r} does not match expected {list(expected_header)!r}"]
        )
    return header, [line.split(",") for line in lines[1:]]


def write_scan_csv(path, result: ScanResult, precision: int = 17) -> None:
    rows = (
        (
            row.field,
            row.a_a.alpha / BOHR_RADIUS,
            row.a_a.beta / BOHR_RADIUS,
            row.a_b.alpha / BOHR_RADIUS,
            row.a_b.beta / BOHR_RADIUS,
            row.delta_abs / BOHR_RADIUS,
            row.rate,
            row.zeta0,
        )
        for row in result.rows
    )
    write_rows(path, SCAN_COLUMNS, rows, precision)


def write_evolve_csv(path, traj: CoherenceTrajectory, precision: int = 17) -> None:
    rows = (
        (
            t,
            eta,
            rho,
            raa,
            rbb,
            int(t <= traj.validity_time),
        )
        for t, eta, rho, raa, rbb in zip(
            traj.times, traj.eta, traj.rho_offdiag, traj.rho_aa, traj.rho_bb
        )
    )
    write_rows(path, EVOLVE_COLUMNS, rows, precision)


def write_invert_csv(
    path, branches: BranchSeries, result: InversionResult, precision: int = 17
) -> None:
    clamped = set(result.clamped_points)
    rows = (
        (
            branches.fields[i],
            branches.q_plus[i] / BOHR_RADIUS,
            branches.q_minus[i] / BOHR_RADIUS,
            int(result.branch_choice[i]),
            result.alpha_recovered[i] / BOHR_RADIUS,
            int(i in clamped),
        )
        for i in range(len(branches.fields))
    )
    write_rows(path, INVERT_COLUMNS, rows, precision)


def write_rates_csv(path, series: RateMeasurementSeries, precision: int = 17) -> None:
    rows = (
        (field, rate, series.noise_sigma)
        for field, rate in zip(series.fields, series.rates)
    )
    write_rows(path, RATES_COLUMNS, rows, precision)


def read_rates_csv(path) -> RateMeasurementSeries:
    _, rows = read_rows(path, RATES_COLUMNS)
    if not rows:
        raise ConfigError([f"{path}: no data rows"])
    fields = np.array([float(row[0]) for row in rows])
    rates = np.array([float(row[1]) for row in rows])
    noise = float(rows[0][2])
    return RateMeasurementSeries(fields=fields, rates=rates, noise_sigma=noise)
