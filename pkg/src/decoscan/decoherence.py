"""Decoherence coefficients and coherence time series for a state pair.

For a pair of states with complex scattering lengths a_i = alpha_i - i*beta_i
immersed in a buffer gas, the relative coherence of the particles remaining
trapped evolves as a short-time, low-temperature series

    eta(t) = eta(0) [1 + T^(1/2) xi1 t + T (xi21 t + xi22 t^2 / 2)]

truncated exactly at the displayed order, while the total coherence decays as

    |rho_ab(t)| = |rho_ab(0)| exp(zeta0 t) [1 + T^(1/2) zeta1 t]

with zeta0 the mean of the two population loss rates.  All five coefficients
depend on the pair only through differences, sums and products of alpha_i and
beta_i; in particular every xi vanishes identically when the two scattering
lengths coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import BOLTZMANN, HBAR
from .core import GasParameters
from .errors import DomainError
from .scattering import ComplexScatteringLength


@dataclass(frozen=True)
class DecoherenceCoefficients:
    """Expansion coefficients for one state pair in one gas.

    xi1:   s^-1 K^-1/2, always <= 0, zero iff the scattering lengths match
    xi21:  s^-1 K^-1,   >= 0 for loss-positive states
    xi22:  s^-2 K^-1
    zeta0: s^-1,        <= 0, zero iff both loss parts vanish
    zeta1: s^-1 K^-1/2
    """

    xi1: float
    xi21: float
    xi22: float
    zeta0: float
    zeta1: float


def rate_prefactor(gas: GasParameters) -> float:
    """C = 2^(5/2) pi^(1/2) n k_B^(1/2) / m*^(1/2), the positive factor
    relating the leading decoherence rate to the squared scattering-length
    difference.  Units: m^-2 s^-1 K^-1/2."""
    return (
        2.0 ** 2.5
        * math.sqrt(math.pi)
        * gas.density
        * math.sqrt(BOLTZMANN)
        / math.sqrt(gas.reduced_mass)
    )


def population_loss_rate(gas: GasParameters, a: ComplexScatteringLength) -> float:
    """Trap-loss rate of one state, gamma = 4 pi hbar n beta / m* (s^-1)."""
    return 4.0 * math.pi * HBAR * gas.density * a.beta / gas.reduced_mass


def _mass_ratio_bracket(r: float) -> float:
    return (
        3.0 * math.sqrt(2.0 * r + 1.0)
        + (1.0 + 2.0 * r + 3.0 * r * r) / r * math.asin(r / (r + 1.0))
        - 4.0 * (1.0 + r)
    )


def coefficients(
    gas: GasParameters,
    a_a: ComplexScatteringLength,
    a_b: ComplexScatteringLength,
) -> DecoherenceCoefficients:
    """All five expansion coefficients for the pair (a_a, a_b).

    Exactly symmetric under exchange of the two states.
    """
    d_alpha = a_b.alpha - a_a.alpha
    d_beta = a_b.beta - a_a.beta
    sep2 = d_alpha * d_alpha + d_beta * d_beta  # |a_b - a_a|^2

    n = gas.density
    m_star = gas.reduced_mass
    r = gas.mass_ratio

    pref = rate_prefactor(gas)
    xi1 = -pref * sep2

    beta_sum = a_a.beta + a_b.beta
    xi21 = 12.0 * math.pi * n * BOLTZMANN * r ** 1.5 * beta_sum * sep2 / HBAR

    bracket = _mass_ratio_bracket(r)
    quartic = (
        32.0 * math.pi ** 3 * n * n * BOLTZMANN / m_star
        + 8.0 * math.pi * BOLTZMANN * n * n / gas.atom_mass * bracket
    )
    cross = 64.0 * math.pi * BOLTZMANN * n * n / gas.atom_mass * bracket
    beta_quad = a_a.beta * a_a.beta + a_b.beta * a_b.beta + a_a.beta * a_b.beta
    xi22 = quartic * sep2 * sep2 - cross * beta_quad * sep2

    zeta0 = -0.5 * (population_loss_rate(gas, a_a) + population_loss_rate(gas, a_b))
    zeta1 = pref * (beta_sum * beta_sum - d_alpha * d_alpha)

    return DecoherenceCoefficients(xi1=xi1, xi21=xi21, xi22=xi22, zeta0=zeta0, zeta1=zeta1)


def eta_polynomial(
    coeffs: DecoherenceCoefficients, temperature: float, eta0: float
) -> tuple[float, float, float]:
    """Coefficients (p0, p1, p2) of eta(t) = p0 + p1 t + p2 t^2."""
    if temperature < 0:
        raise DomainError(f"temperature must be >= 0, got {temperature!r}")
    if not 0 < eta0 <= 1:
        raise DomainError(f"eta0 must lie in (0, 1], got {eta0!r}")
    sqrt_t = math.sqrt(temperature)
    p1 = eta0 * (sqrt_t * coeffs.xi1 + temperature * coeffs.xi21)
    p2 = 0.5 * eta0 * temperature * coeffs.xi22
    return eta0, p1, p2


def rate_polynomial(
    coeffs: DecoherenceCoefficients, temperature: float, eta0: float
) -> tuple[float, float]:
    """Coefficients (r0, r1) of d(eta)/dt = r0 + r1 t; the exact analytic
    derivative of :func:`eta_polynomial`."""
    _, p1, p2 = eta_polynomial(coeffs, temperature, eta0)
    return p1, 2.0 * p2


def decoherence_rate_t0(
    coeffs: DecoherenceCoefficients, temperature: float, eta0: float
) -> float:
    """Initial decoherence rate eta0 (T^(1/2) xi1 + T xi21), s^-1.

    Negative for any distinct pair; callers that need the positive measured
    quantity take the magnitude.
    """
    if temperature <= 0:
        raise DomainError(f"temperature must be > 0, got {temperature!r}")
    r0, _ = rate_polynomial(coeffs, temperature, eta0)
    return r0


def first_order_rate_magnitude(
    coeffs: DecoherenceCoefficients, temperature: float, eta0: float
) -> float:
    """|eta0 T^(1/2) xi1|: the leading-order rate magnitude consumed by the
    scattering-length inversion."""
    if temperature < 0:
        raise DomainError(f"temperature must be >= 0, got {temperature!r}")
    if not 0 < eta0 <= 1:
        raise DomainError(f"eta0 must lie in (0, 1], got {eta0!r}")
    return abs(eta0 * math.sqrt(temperature) * coeffs.xi1)


def _times_array(times) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if np.any(t < 0):
        raise DomainError("times must all be >= 0")
    return t


def eta_series(coeffs: DecoherenceCoefficients, temperature: float, eta0: float, times) -> np.ndarray:
    """Relative coherence eta(t) on a time grid; exact polynomial, not
    clamped to [0, 1] so that truncation breakdown stays visible."""
    t = _times_array(times)
    p0, p1, p2 = eta_polynomial(coeffs, temperature, eta0)
    return p0 + t * (p1 + t * p2)


def decoherence_rate(
    coeffs: DecoherenceCoefficients, temperature: float, eta0: float, times
) -> np.ndarray:
    """d(eta)/dt on a time grid."""
    t = _times_array(times)
    r0, r1 = rate_polynomial(coeffs, temperature, eta0)
    return r0 + r1 * t


def rho_offdiag_series(
    coeffs: DecoherenceCoefficients, temperature: float, rho0: float, times
) -> np.ndarray:
    """Total coherence |rho_ab(t)| = rho0 exp(zeta0 t)(1 + T^(1/2) zeta1 t).

    At T -> 0 the decay is the pure exponential of the mean loss rate.
    """
    if temperature < 0:
        raise DomainError(f"temperature must be >= 0, got {temperature!r}")
    if rho0 <= 0:
        raise DomainError(f"rho0 must be > 0, got {rho0!r}")
    t = _times_array(times)
    bracket = 1.0 + math.sqrt(temperature) * coeffs.zeta1 * t
    return rho0 * np.exp(coeffs.zeta0 * t) * bracket


def population_series(gas: GasParameters, a_i: ComplexScatteringLength, rho0: float, times) -> np.ndarray:
    """Population rho_ii(t) = rho0 exp(-gamma_i t); constant when beta_i = 0."""
    if rho0 < 0:
        raise DomainError(f"rho0 must be >= 0, got {rho0!r}")
    t = _times_array(times)
    return rho0 * np.exp(-population_loss_rate(gas, a_i) * t)


def validity_window(
    coeffs: DecoherenceCoefficients, temperature: float, epsilon: float
) -> float:
    """Largest t at which the second-order part of the eta bracket is still
    at most an epsilon-fraction of max(first-order part, epsilon).

    Returns +inf when the inequality holds for all times (in particular when
    every coefficient vanishes).
    """
    if not 0 < epsilon < 1:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    if temperature < 0:
        raise DomainError(f"temperature must be >= 0, got {temperature!r}")

    lin = temperature * coeffs.xi21          # g(t) = lin*t + quad*t^2
    quad = 0.5 * temperature * coeffs.xi22
    slope = epsilon * math.sqrt(temperature) * abs(coeffs.xi1)  # bound slope, regime B
    if lin == 0 and quad == 0:
        return math.inf
    if quad == 0 and abs(lin) <= slope:
        return math.inf

    # crossover between the constant bound eps^2 (regime A) and the linear
    # bound slope*t (regime B)
    t_cross = epsilon * epsilon / slope if slope > 0 else math.inf

    candidates: list[float] = []

    def quad_roots(a: float, b: float, c: float) -> list[float]:
        # real roots of a t^2 + b t + c = 0
        if a == 0:
            return [-c / b] if b != 0 else []
        disc = b * b - 4.0 * a * c
        if disc < 0:
            return []
        s = math.sqrt(disc)
        return [(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)]

    slack = 1.0 + 1e-12
    # regime A boundary: lin t + quad t^2 = +-eps^2 for t <= t_cross
    for sign in (1.0, -1.0):
        for root in quad_roots(quad, lin, -sign * epsilon * epsilon):
            if 0 <= root <= t_cross * slack:
                candidates.append(root)
    # regime B boundary: lin t + quad t^2 = +-slope t for t >= t_cross
    for sign in (1.0, -1.0):
        for root in quad_roots(quad, lin - sign * slope, 0.0):
            if root >= 0 and root * slack >= t_cross:
                candidates.append(root)

    if not candidates:
        # condition holds at t=0 and fails at infinity, so a boundary point
        # exists in exact arithmetic; an empty list means it collapsed to 0
        return 0.0
    return max(candidates)


@dataclass(frozen=True)
class CoherenceTrajectory:
    """Sampled coherence evolution of one state pair.

    ``validity_time`` bounds the window where the eta truncation is
    trustworthy at the epsilon used to build the trajectory.
    """

    times: np.ndarray
    eta: np.ndarray
    rho_offdiag: np.ndarray
    rho_aa: np.ndarray
    rho_bb: np.ndarray
    validity_time: float


def trajectory(
    gas: GasParameters,
    a_a: ComplexScatteringLength,
    a_b: ComplexScatteringLength,
    times,
    *,
    eta0: float = 1.0,
    rho_ab0: float = 1.0,
    rho_aa0: float = 1.0,
    rho_bb0: float = 1.0,
    temperature: float | None = None,
    epsilon: float = 0.1,
) -> CoherenceTrajectory:
    """Evaluate every observable series for one pair on one time grid."""
    t = _times_array(times)
    temp = gas.temperature if temperature is None else temperature
    coeffs = coefficients(gas, a_a, a_b)
    return CoherenceTrajectory(
        times=t,
        eta=eta_series(coeffs, temp, eta0, t),
        rho_offdiag=rho_offdiag_series(coeffs, temp, rho_ab0, t),
        rho_aa=population_series(gas, a_a, rho_aa0, t),
        rho_bb=population_series(gas, a_b, rho_bb0, t),
        validity_time=validity_window(coeffs, temp, epsilon),
    )
