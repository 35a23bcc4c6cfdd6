"""Radial single-channel solver used as a brute-force cross-check.

Integrates the s-wave equation u'' + (k^2 - 2 m* V(r)/hbar^2) u = 0 with the
Numerov recurrence for a (possibly absorbing) square well, matches the
interior solution to sin(kr) + k f exp(ikr) outside the well, and
extrapolates to zero momentum to extract the complex scattering length.
Nothing on the production path imports this module; it exists to validate
the scattering-length conventions against an independent route.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .constants import HBAR
from .errors import AccuracyError, DomainError, NumericalError
from .scattering import ComplexScatteringLength

KINDS = ("square-well", "square-well-with-absorber")


@dataclass(frozen=True)
class RadialPotential:
    """Attractive square well of the given depth (J) and range (m), with an
    optional constant absorbing part -i*absorber_depth inside the well.
    ``reduced_mass`` is the colliding pair's reduced mass (kg)."""

    kind: str
    depth: float
    range: float
    reduced_mass: float
    absorber_depth: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown potential kind {self.kind!r} (known: {KINDS})")
        if self.range <= 0:
            raise DomainError(f"potential range must be > 0, got {self.range!r}")
        if self.depth < 0:
            raise DomainError(f"well depth must be >= 0, got {self.depth!r}")
        if self.absorber_depth < 0:
            raise DomainError(f"absorber depth must be >= 0, got {self.absorber_depth!r}")
        if self.reduced_mass <= 0:
            raise DomainError(f"reduced mass must be > 0, got {self.reduced_mass!r}")
        if self.kind == "square-well" and self.absorber_depth != 0:
            raise DomainError("kind 'square-well' must have absorber_depth = 0")


@dataclass(frozen=True)
class NumerovConfig:
    """Integration step, outer matching radius, and the momentum ladder
    (strictly decreasing, m^-1) used for the k -> 0 extrapolation."""

    step: float
    match_radius: float
    momenta: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "momenta", tuple(self.momenta))
        if self.step <= 0:
            raise DomainError(f"step must be > 0, got {self.step!r}")
        if not self.momenta:
            raise DomainError("momenta must be nonempty")
        for k in self.momenta:
            if k <= 0:
                raise DomainError(f"momenta must all be > 0, got {k!r}")
        for left, right in zip(self.momenta, self.momenta[1:]):
            if right >= left:
                raise DomainError("momenta must be strictly decreasing")


def default_config(potential: RadialPotential, steps_per_range: int = 8000) -> NumerovConfig:
    """Config with step R/steps_per_range, matching at 3R, and a factor-two
    momentum ladder kept in the regime k*R < 1e-3."""
    k_top = min(1e4, 1e-4 / potential.range)
    return NumerovConfig(
        step=potential.range / steps_per_range,
        match_radius=3.0 * potential.range,
        momenta=(k_top, k_top / 2.0, k_top / 4.0),
    )


def _validate(potential: RadialPotential, config: NumerovConfig) -> None:
    if config.step >= potential.range / 100.0:
        raise DomainError("step must be smaller than range/100")
    if config.match_radius <= potential.range:
        raise DomainError("match_radius must exceed the potential range")


def well_depth_for(kappa_r: float, range_: float, reduced_mass: float) -> float:
    """Depth giving the dimensionless well parameter kappa*R, where
    kappa = sqrt(2 m* V0)/hbar."""
    if kappa_r < 0:
        raise DomainError(f"kappa_r must be >= 0, got {kappa_r!r}")
    kappa = kappa_r / range_
    return (HBAR * kappa) ** 2 / (2.0 * reduced_mass)


def solve_swave(potential: RadialPotential, k: float, config: NumerovConfig) -> complex:
    """Scattering amplitude f(k) of the potential at momentum k > 0.

    The regular solution is propagated from the origin with the Numerov
    recurrence and matched to  A sin(kr) + D exp(ikr)  at two well-separated
    exterior radii; f = D/(A k).
    """
    if k <= 0:
        raise DomainError(f"momentum must be > 0, got {k!r}")
    _validate(potential, config)

    h = config.step
    i2 = int(round(config.match_radius / h))
    # matching indices: midway between the well edge and the outer radius,
    # and the outer radius itself
    i1 = int(round(0.5 * (potential.range / h + i2)))
    if i1 * h <= potential.range:
        i1 = int(math.floor(potential.range / h)) + 2
    if i1 >= i2:
        raise DomainError("match_radius leaves no room for two exterior points")

    # G = k^2 - 2 m* V(r)/hbar^2 with V = -(V0 + i W) inside the well.  The
    # cell straddling the well edge takes the volume-weighted average of the
    # two values, which keeps the effective edge at r = range to O(step^2)
    # for any grid alignment.
    r = np.arange(i2 + 1) * h
    inside_fraction = np.clip((potential.range - (r - 0.5 * h)) / h, 0.0, 1.0)
    v_in = complex(-potential.depth, -potential.absorber_depth)
    g = k * k - (2.0 * potential.reduced_mass / (HBAR * HBAR)) * (inside_fraction * v_in)
    c = 1.0 + (h * h / 12.0) * g
    h2g = (h * h) * g

    # propagate w = c*u; adding the curvature increment h^2 g u explicitly
    # keeps its full precision instead of burying it in coefficients near 2
    w_prev = 0j
    w_cur = complex(h, 0.0) * c[1]
    u1 = u2 = 0j
    for n in range(1, i2):
        w_next = 2.0 * w_cur - w_prev - h2g[n] * (w_cur / c[n])
        w_prev, w_cur = w_cur, w_next
        if n + 1 == i1:
            u1 = w_next / c[n + 1]
        if n + 1 == i2:
            u2 = w_next / c[n + 1]

    r1 = i1 * h
    r2 = i2 * h
    s1, e1 = math.sin(k * r1), cmath.exp(1j * k * r1)
    s2, e2 = math.sin(k * r2), cmath.exp(1j * k * r2)
    det = s1 * e2 - s2 * e1
    if abs(det) < 1e-300:
        raise NumericalError(
            f"matching system is singular at k={k!r} (|det|={abs(det):.3e})"
        )
    # solve [s1 e1; s2 e2] [A D]^T = [u1 u2]^T
    amp_a = (u1 * e2 - u2 * e1) / det
    amp_d = (s1 * u2 - s2 * u1) / det
    return amp_d / (amp_a * k)


def _extrapolate_to_zero(xs: list[float], ys: list[complex]) -> complex:
    """Neville polynomial extrapolation of y(x) to x = 0."""
    table = list(ys)
    n = len(table)
    for level in range(1, n):
        for i in range(n - level):
            x_lo, x_hi = xs[i], xs[i + level]
            table[i] = (x_lo * table[i + 1] - x_hi * table[i]) / (x_lo - x_hi)
    return table[0]


def extract_scattering_length(
    potential: RadialPotential, config: NumerovConfig
) -> ComplexScatteringLength:
    """Complex scattering length a = alpha - i*beta from the k -> 0 limit.

    For each momentum on the ladder the amplitude is converted to the
    inverse-amplitude form a_hat(k) = -f/(1 + i k f), which is even in k, and
    a_hat is Richardson-extrapolated in k^2 to zero.  The difference between
    the full extrapolation and the one dropping the largest momentum serves
    as the error estimate; above 1e-4 relative it raises
    :class:`AccuracyError`.
    """
    if len(config.momenta) < 2:
        raise DomainError("extraction needs at least 2 momenta")
    _validate(potential, config)

    xs: list[float] = []
    ys: list[complex] = []
    for k in config.momenta:
        f = solve_swave(potential, k, config)
        ys.append(-f / (1.0 + 1j * k * f))
        xs.append(k * k)

    a_full = _extrapolate_to_zero(xs, ys)
    a_sub = _extrapolate_to_zero(xs[1:], ys[1:])
    scale = max(abs(a_full), 1e-6 * potential.range)
    residual = abs(a_full - a_sub) / scale
    if residual > 1e-4:
        raise AccuracyError(
            f"k->0 extrapolation residual {residual:.3e} exceeds 1e-4; "
            f"per-momentum estimates: {ys!r}"
        )

    alpha = a_full.real
    beta = -a_full.imag
    if beta < 0:
        floor = 1e-9 * max(abs(alpha), potential.range)
        if beta < -floor:
            raise NumericalError(
                f"extracted loss part is negative beyond tolerance: beta={beta!r}"
            )
        beta = 0.0
    return ComplexScatteringLength(alpha, beta)


def analytic_square_well(depth: float, range_: float, reduced_mass: float) -> float:
    """Textbook closed form a = R (1 - tan(kappa R)/(kappa R)) for a real
    attractive square well; the oracle's own oracle."""
    if depth < 0:
        raise DomainError(f"well depth must be >= 0, got {depth!r}")
    if range_ <= 0:
        raise DomainError(f"range must be > 0, got {range_!r}")
    if reduced_mass <= 0:
        raise DomainError(f"reduced mass must be > 0, got {reduced_mass!r}")
    if depth == 0:
        return 0.0
    x = math.sqrt(2.0 * reduced_mass * depth) / HBAR * range_
    if abs(math.cos(x)) < 1e-8:
        raise NumericalError(
            f"scattering length diverges at the bound-state threshold (kappa R = {x!r})"
        )
    if x < 1e-8:
        # tan(x)/x = 1 + x^2/3 + O(x^4)
        return -range_ * x * x / 3.0
    return range_ * (1.0 - math.tan(x) / x)
