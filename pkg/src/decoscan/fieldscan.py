"""Magnetic-field sweeps of the decoherence rate.

A scan walks a uniform base grid, then adaptively bisects intervals where
the scattering-length difference or the rate changes sharply, which is where
resonances hide from uniform grids.  Suppression windows (intervals where the
rate collapses) are located from the rows and their minima polished with a
golden-section search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import GasParameters
from .decoherence import coefficients, decoherence_rate_t0
from .errors import BracketError, DomainError, SingularityError
from .parallel import ordered_map
from .scattering import ComplexScatteringLength, StateScatteringModel, evaluate_model

_INV_GOLD = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ScanRow:
    """One evaluated field point."""

    field: float
    a_a: ComplexScatteringLength
    a_b: ComplexScatteringLength
    delta_abs: float   # |a_b - a_a|, m
    rate: float        # |t=0 decoherence rate|, s^-1
    zeta0: float       # total-coherence exponent, s^-1


@dataclass(frozen=True)
class SkippedPoint:
    """A grid point that fell inside a resonance guard band."""

    field: float
    state_label: str
    resonance_index: int


@dataclass(frozen=True)
class ScanResult:
    rows: tuple[ScanRow, ...]
    skipped: tuple[SkippedPoint, ...]


@dataclass(frozen=True)
class SuppressionWindow:
    """A field interval where the rate drops below threshold."""

    field_lo: float
    field_hi: float
    min_rate: float
    argmin_field: float


def _row_at(
    gas: GasParameters,
    model_a: StateScatteringModel,
    model_b: StateScatteringModel,
    field: float,
    eta0: float,
) -> ScanRow | SkippedPoint:
    field = float(field)
    try:
        a_a = evaluate_model(model_a, field)
        a_b = evaluate_model(model_b, field)
    except SingularityError as exc:
        return SkippedPoint(field, exc.state_label, exc.resonance_index)
    coeffs = coefficients(gas, a_a, a_b)
    return ScanRow(
        field=field,
        a_a=a_a,
        a_b=a_b,
        delta_abs=math.hypot(a_b.alpha - a_a.alpha, a_b.beta - a_a.beta),
        rate=abs(decoherence_rate_t0(coeffs, gas.temperature, eta0)),
        zeta0=coeffs.zeta0,
    )


def rate_at(
    gas: GasParameters,
    model_a: StateScatteringModel,
    model_b: StateScatteringModel,
    field: float,
    eta0: float = 1.0,
) -> float:
    """|t=0 decoherence rate| of the pair at one field."""
    a_a = evaluate_model(model_a, field)
    a_b = evaluate_model(model_b, field)
    return abs(decoherence_rate_t0(coefficients(gas, a_a, a_b), gas.temperature, eta0))


def _needs_refinement(lo: ScanRow, hi: ScanRow) -> bool:
    d_max = max(lo.delta_abs, hi.delta_abs)
    if d_max > 0 and abs(hi.delta_abs - lo.delta_abs) > 0.1 * d_max:
        return True
    r_lo, r_hi = sorted((lo.rate, hi.rate))
    return r_hi > 0 and r_hi > 10.0 * r_lo


def _refinement_flags(rows: list[ScanRow]) -> list[bool]:
    """Which adjacent intervals to bisect.

    Beyond the per-interval change tests, both intervals around a strict
    interior rate minimum are flagged: a narrow dip straddled symmetrically
    by two grid points changes neither the difference magnitude nor the rate
    ratio between neighbors, yet is exactly the feature the scan is after.
    """
    n = len(rows)
    flags = [False] * (n - 1)
    for i in range(n - 1):
        if _needs_refinement(rows[i], rows[i + 1]):
            flags[i] = True
    for i in range(1, n - 1):
        if rows[i].rate < rows[i - 1].rate and rows[i].rate < rows[i + 1].rate:
            flags[i - 1] = True
            flags[i] = True
    return flags


def scan(
    gas: GasParameters,
    model_a: StateScatteringModel,
    model_b: StateScatteringModel,
    field_lo: float,
    field_hi: float,
    base_points: int,
    *,
    eta0: float = 1.0,
    max_depth: int = 12,
) -> ScanResult:
    """Rate curve of the pair over [field_lo, field_hi].

    A uniform grid of ``base_points`` is refined by interval halving (to
    ``max_depth`` levels) wherever |a_b - a_a| changes by more than 10% or
    the rate by more than a factor 10 between neighbors.  Points inside a
    resonance guard band are recorded as skipped, never silently dropped.
    """
    if not field_lo < field_hi:
        raise DomainError(f"need field_lo < field_hi, got {field_lo!r} >= {field_hi!r}")
    if base_points < 16:
        raise DomainError(f"base_points must be >= 16, got {base_points!r}")

    fields = np.linspace(field_lo, field_hi, base_points)
    results = ordered_map(lambda b: _row_at(gas, model_a, model_b, b, eta0), fields)

    rows = [r for r in results if isinstance(r, ScanRow)]
    skipped = [r for r in results if isinstance(r, SkippedPoint)]

    # adaptive refinement: bisect flagged intervals, pass by pass, tracking
    # each interval's halving depth
    depth = {(lo.field, hi.field): 0 for lo, hi in zip(rows, rows[1:])}
    while True:
        flags = _refinement_flags(rows)
        midfields = []
        parents = []
        for i, flagged in enumerate(flags):
            key = (rows[i].field, rows[i + 1].field)
            if not flagged or depth[key] >= max_depth:
                continue
            mid = 0.5 * (key[0] + key[1])
            if mid <= key[0] or mid >= key[1]:
                continue  # interval collapsed to float resolution
            midfields.append(mid)
            parents.append(key)
        if not midfields:
            break
        evaluated = ordered_map(lambda b: _row_at(gas, model_a, model_b, b, eta0), midfields)
        for key, mid, outcome in zip(parents, midfields, evaluated):
            if isinstance(outcome, SkippedPoint):
                skipped.append(outcome)
                depth[key] = max_depth  # cannot split through a guard band
                continue
            child_depth = depth.pop(key) + 1
            depth[(key[0], mid)] = child_depth
            depth[(mid, key[1])] = child_depth
            rows.append(outcome)
        rows.sort(key=lambda row: row.field)

    skipped.sort(key=lambda point: point.field)
    return ScanResult(rows=tuple(rows), skipped=tuple(skipped))


def refine_minimum(
    gas: GasParameters,
    model_a: StateScatteringModel,
    model_b: StateScatteringModel,
    bracket: tuple[float, float, float],
    *,
    eta0: float = 1.0,
    rel_tol: float = 1e-6,
) -> tuple[float, float]:
    """Golden-section polish of a rate minimum inside a bracketing triple.

    ``bracket`` is (lo, mid, hi) with the middle rate not above either edge.
    Iterates until the interval shrinks below rel_tol * (hi - lo) and returns
    (field, rate) with a rate no higher than at any bracket point.
    """
    f_lo, f_mid, f_hi = bracket
    if not (f_lo < f_mid < f_hi):
        raise BracketError(f"bracket fields must increase strictly, got {bracket!r}")
    r_lo = rate_at(gas, model_a, model_b, f_lo, eta0)
    r_mid = rate_at(gas, model_a, model_b, f_mid, eta0)
    r_hi = rate_at(gas, model_a, model_b, f_hi, eta0)
    if r_mid > r_lo or r_mid > r_hi:
        raise BracketError(
            f"middle bracket point must have the lowest rate, got "
            f"({r_lo!r}, {r_mid!r}, {r_hi!r})"
        )

    best_field, best_rate = f_mid, r_mid
    a, b = f_lo, f_hi
    tol = rel_tol * (f_hi - f_lo)
    c = b - _INV_GOLD * (b - a)
    d = a + _INV_GOLD * (b - a)
    r_c = rate_at(gas, model_a, model_b, c, eta0)
    r_d = rate_at(gas, model_a, model_b, d, eta0)
    # the interval shrinks by the golden ratio per step; 300 steps cover any
    # tolerance representable in double precision
    for _ in range(300):
        if (b - a) <= tol:
            break
        if r_c < best_rate:
            best_field, best_rate = c, r_c
        if r_d < best_rate:
            best_field, best_rate = d, r_d
        if r_c < r_d:
            b, d, r_d = d, c, r_c
            c = b - _INV_GOLD * (b - a)
            r_c = rate_at(gas, model_a, model_b, c, eta0)
        else:
            a, c, r_c = c, d, r_d
            d = a + _INV_GOLD * (b - a)
            r_d = rate_at(gas, model_a, model_b, d, eta0)
    for field, rate in ((c, r_c), (d, r_d)):
        if rate < best_rate:
            best_field, best_rate = field, rate
    return best_field, best_rate


def dynamic_range(rows) -> float | None:
    """max(rate)/max(min(rate), 1e-300) over the rows, or None when every
    rate is zero (range undefined, distinct from an error)."""
    rates = [row.rate for row in rows]
    if not rates:
        raise DomainError("dynamic_range needs at least one row")
    top = max(rates)
    if top == 0:
        return None
    return top / max(min(rates), 1e-300)


def locate_suppression_windows(
    gas: GasParameters,
    model_a: StateScatteringModel,
    model_b: StateScatteringModel,
    result: ScanResult,
    *,
    threshold_ratio: float = 1e-2,
    eta0: float = 1.0,
    rel_tol: float = 1e-6,
) -> list[SuppressionWindow]:
    """Windows where the rate falls below threshold_ratio * median(rate).

    Each window's minimum is polished with :func:`refine_minimum`.  Runs that
    touch the scan edge cannot be bracketed and are dropped.
    """
    rows = result.rows
    if len(rows) < 3:
        return []
    rates = np.array([row.rate for row in rows])
    threshold = threshold_ratio * float(np.median(rates))
    below = rates < threshold

    windows: list[SuppressionWindow] = []
    i = 0
    n = len(rows)
    while i < n:
        if not below[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and below[j + 1]:
            j += 1
        if i > 0 and j < n - 1:
            run_argmin = i + int(np.argmin(rates[i : j + 1]))
            if 0 < run_argmin < n - 1:
                lo_row = rows[run_argmin - 1]
                mid_row = rows[run_argmin]
                hi_row = rows[run_argmin + 1]
                argmin_field, min_rate = refine_minimum(
                    gas,
                    model_a,
                    model_b,
                    (lo_row.field, mid_row.field, hi_row.field),
                    eta0=eta0,
                    rel_tol=rel_tol,
                )
                windows.append(
                    SuppressionWindow(
                        field_lo=rows[i - 1].field,
                        field_hi=rows[j + 1].field,
                        min_rate=min_rate,
                        argmin_field=argmin_field,
                    )
                )
        i = j + 1
    return windows
