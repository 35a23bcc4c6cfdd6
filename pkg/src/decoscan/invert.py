"""Recover scattering lengths from measured decoherence rates.

The leading-order rate magnitude R = C T^(1/2) eta0 |a_x - a_ref|^2 fixes the
modulus of the scattering-length difference but not its sign, so each field
point offers two reconstructions

    q(+-) = alpha_ref +- sqrt( R / (C T^(1/2) eta0) - (beta_x - beta_ref)^2 ).

The physical branch is picked per point by dynamic programming that minimizes
the total variation of the assembled curve, optionally anchored to a known
asymptotic background at the scan edges.  A resonance-free unknown state then
comes out flat, which is the criterion that breaks the sign ambiguity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import GasParameters
from .constants import HBAR
from .decoherence import coefficients, first_order_rate_magnitude, rate_prefactor
from .errors import DomainError, GridError, MeasurementError
from .parallel import ordered_map
from .scattering import StateScatteringModel, evaluate_model


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RateMeasurementSeries:
    """Measured (or synthesized) rate magnitudes R(B) on a field grid."""

    fields: np.ndarray     # gauss, strictly increasing
    rates: np.ndarray      # s^-1, nonnegative magnitudes
    noise_sigma: float = 0.0

    def __post_init__(self):
        fields = _frozen(self.fields)
        rates = _frozen(self.rates)
        object.__setattr__(self, "fields", fields)
        object.__setattr__(self, "rates", rates)
        if fields.ndim != 1 or rates.ndim != 1 or len(fields) != len(rates):
            raise DomainError("fields and rates must be 1-D arrays of equal length")
        if len(fields) == 0:
            raise DomainError("measurement series must be nonempty")
        if np.any(np.diff(fields) <= 0):
            raise DomainError("fields must be strictly increasing")
        if np.any(rates < 0):
            raise DomainError("rates must be nonnegative magnitudes")
        if self.noise_sigma < 0:
            raise DomainError(f"noise_sigma must be >= 0, got {self.noise_sigma!r}")


@dataclass(frozen=True)
class BranchSeries:
    """The two +-branch reconstructions at every field point.

    ``discriminant`` is the clamped argument of the square root (m^2);
    ``clamped`` lists the indices where a negative value was clamped to zero.
    """

    fields: np.ndarray
    q_plus: np.ndarray
    q_minus: np.ndarray
    discriminant: np.ndarray
    clamped: tuple[int, ...] = ()


@dataclass(frozen=True)
class InversionResult:
    """Per-point branch assignment and the assembled curve."""

    fields: np.ndarray
    alpha_recovered: np.ndarray
    branch_choice: np.ndarray        # +1 plus branch, -1 minus branch
    clamped_points: tuple[int, ...]
    cost: float                      # total variation (+ anchor penalty), m


def beta_from_decay(gas: GasParameters, zeta0_measured: float, beta_known: float) -> float:
    """Loss part of the partner state from the measured total-coherence
    exponent: beta_other = -zeta0 m* / (2 pi hbar n) - beta_known."""
    if zeta0_measured > 0:
        raise DomainError(f"zeta0 must be <= 0, got {zeta0_measured!r}")
    if beta_known < 0:
        raise DomainError(f"beta_known must be >= 0, got {beta_known!r}")
    total = -zeta0_measured * gas.reduced_mass / (2.0 * math.pi * HBAR * gas.density)
    other = total - beta_known
    if other < -1e-12:
        raise MeasurementError(
            f"decay rate and known loss part are inconsistent: "
            f"beta_other = {other!r} m"
        )
    return max(other, 0.0)


def synth_measurements(
    gas: GasParameters,
    model_a: StateScatteringModel,
    model_x: StateScatteringModel,
    fields,
    eta0: float = 1.0,
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> RateMeasurementSeries:
    """Leading-order rate magnitudes for the pair on a field grid, plus
    optional Gaussian noise (deterministic for a given seed), floored at 0."""
    if noise_sigma < 0:
        raise DomainError(f"noise_sigma must be >= 0, got {noise_sigma!r}")
    grid = np.asarray(fields, dtype=float)

    def one(field: float) -> float:
        pair = coefficients(gas, evaluate_model(model_a, field), evaluate_model(model_x, field))
        return first_order_rate_magnitude(pair, gas.temperature, eta0)

    rates = np.array(ordered_map(one, grid), dtype=float)
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        rates = np.maximum(rates + rng.normal(0.0, noise_sigma, size=len(rates)), 0.0)
    return RateMeasurementSeries(fields=grid, rates=rates, noise_sigma=noise_sigma)


def _aligned(values, n: int, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        return np.full(n, float(arr))
    if arr.shape != (n,):
        raise GridError(
            f"{name} must be a scalar or align with the {n}-point field grid, "
            f"got shape {arr.shape}"
        )
    return arr


def two_branches(
    series: RateMeasurementSeries,
    alpha_ref,
    beta_ref,
    beta_x,
    gas: GasParameters,
    eta0: float = 1.0,
) -> BranchSeries:
    """Both sign branches of the inversion at every measured point.

    ``alpha_ref``/``beta_ref`` describe the state whose scattering length is
    already known; ``beta_x`` is the loss part of the state being recovered
    (each a scalar or a per-field array).  Negative discriminants, which
    noise can produce, clamp to zero and are recorded.
    """
    if eta0 <= 0:
        raise DomainError(f"eta0 must be > 0, got {eta0!r}")
    n = len(series.fields)
    alpha_ref = _aligned(alpha_ref, n, "alpha_ref")
    beta_ref = _aligned(beta_ref, n, "beta_ref")
    beta_x = _aligned(beta_x, n, "beta_x")

    scale = rate_prefactor(gas) * math.sqrt(gas.temperature) * eta0
    d_beta = beta_x - beta_ref
    disc = series.rates / scale - d_beta * d_beta
    clamped = tuple(int(i) for i in np.nonzero(disc < 0)[0])
    disc = np.maximum(disc, 0.0)
    root = np.sqrt(disc)
    return BranchSeries(
        fields=_frozen(series.fields),
        q_plus=_frozen(alpha_ref + root),
        q_minus=_frozen(alpha_ref - root),
        discriminant=_frozen(disc),
        clamped=clamped,
    )


def _select(branches: BranchSeries, anchor: float | None) -> InversionResult:
    n = len(branches.fields)
    if n < 3:
        raise DomainError(f"branch selection needs at least 3 points, got {n}")
    # row 0 = minus branch, row 1 = plus branch; argmin ties then prefer minus
    q = np.vstack([branches.q_minus, branches.q_plus])

    cost = np.zeros(2)
    if anchor is not None:
        cost = np.abs(q[:, 0] - anchor)
    back = np.zeros((n, 2), dtype=np.intp)
    for i in range(1, n):
        step = np.abs(q[:, i][:, None] - q[:, i - 1][None, :])  # [to, from]
        total = cost[None, :] + step
        back[i] = np.argmin(total, axis=1)
        cost = total[np.arange(2), back[i]]
    if anchor is not None:
        cost = cost + np.abs(q[:, n - 1] - anchor)

    state = int(np.argmin(cost))
    final_cost = float(cost[state])
    choice = np.empty(n, dtype=np.intp)
    for i in range(n - 1, -1, -1):
        choice[i] = state
        state = int(back[i][state])

    alpha = q[choice, np.arange(n)]
    branch = np.where(choice == 1, 1, -1).astype(int)
    return InversionResult(
        fields=_frozen(branches.fields),
        alpha_recovered=_frozen(alpha),
        branch_choice=_frozen(branch, dtype=int),
        clamped_points=branches.clamped,
        cost=final_cost,
    )


def select_branch_flat(branches: BranchSeries) -> InversionResult:
    """Pick the per-point signs minimizing total variation of the assembled
    curve; a genuinely resonance-free unknown state comes out near-constant."""
    return _select(branches, anchor=None)


def select_branch_smooth(branches: BranchSeries, anchor: float) -> InversionResult:
    """Total-variation selection with an extra penalty tying the first and
    last points to the known asymptotic background of the unknown state."""
    return _select(branches, anchor=float(anchor))


def path_cost(branches: BranchSeries, choice, anchor: float | None = None) -> float:
    """Total-variation cost of an arbitrary branch assignment (+1/-1 per
    point), with the same anchor penalty used by the selectors."""
    sel = np.asarray(choice)
    if sel.shape != branches.fields.shape:
        raise GridError("choice must align with the field grid")
    q = np.where(sel > 0, branches.q_plus, branches.q_minus)
    cost = float(np.sum(np.abs(np.diff(q))))
    if anchor is not None:
        cost += abs(q[0] - anchor) + abs(q[-1] - anchor)
    return cost
