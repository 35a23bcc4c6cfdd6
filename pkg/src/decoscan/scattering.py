"""Field-dependent complex s-wave scattering lengths.

Sign convention, used everywhere in this package: the complex scattering
length is a = alpha - i*beta with beta >= 0, so a positive loss part beta
produces decaying populations.  A field-dependent length is a complex
background plus a catalog of resonance terms

    a(B) = a_bg + sum_j  s_j / (2*(B - B0_j)/w_j + i)

whose real part is dispersive and whose imaginary part adds a Lorentzian
peak of height s_j to beta, keeping beta >= 0 for any field.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .constants import HBAR
from .errors import DomainError, SingularityError

# Evaluation closer to a resonance position than this fraction of its width
# raises instead of returning values of uncontrolled size.
POLE_GUARD = 1e-9


@dataclass(frozen=True)
class ComplexScatteringLength:
    """Real part ``alpha`` and loss part ``beta`` (>= 0), both meters."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise DomainError("scattering length components must be finite")
        if self.beta < 0:
            raise DomainError(
                f"loss part must satisfy beta >= 0 in the alpha - i*beta "
                f"convention, got beta={self.beta!r}"
            )

    @property
    def as_complex(self) -> complex:
        return complex(self.alpha, -self.beta)


@dataclass(frozen=True)
class ResonanceTerm:
    """One magnetically tunable resonance: position and width in gauss,
    peak strength in meters."""

    position: float
    width: float
    strength: float

    def __post_init__(self):
        for name in ("position", "width", "strength"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"resonance {name} must be finite")
        if self.width <= 0:
            raise DomainError(f"resonance width must be > 0, got {self.width!r}")
        if self.strength < 0:
            raise DomainError(f"resonance strength must be >= 0, got {self.strength!r}")


@dataclass(frozen=True)
class StateScatteringModel:
    """Scattering length of one internal state over the field axis.

    An empty resonance list means the state is field-independent.
    Resonance positions must be strictly increasing; overlapping widths are
    legal but draw a warning because the additive composition ignores
    interference between them.
    """

    background: ComplexScatteringLength
    resonances: tuple[ResonanceTerm, ...] = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "resonances", tuple(self.resonances))
        positions = [term.position for term in self.resonances]
        for left, right in zip(positions, positions[1:]):
            if right <= left:
                raise DomainError(
                    f"state {self.label!r}: resonance positions must be strictly "
                    f"increasing, got {left!r} then {right!r}"
                )
        for i, (first, second) in enumerate(zip(self.resonances, self.resonances[1:])):
            if second.position - first.position < first.width + second.width:
                warnings.warn(
                    f"state {self.label!r}: resonances {i} and {i + 1} overlap; "
                    f"their additive combination ignores interference",
                    stacklevel=2,
                )


def evaluate_model(model: StateScatteringModel, field: float) -> ComplexScatteringLength:
    """Evaluate a state's complex scattering length at a field (gauss).

    The real and loss parts are accumulated separately;
    each resonance adds strength*2d/(4d^2+1) to alpha and
    strength/(4d^2+1) to beta with d = (B - B0)/width, so beta >= 0 is
    guaranteed term by term.  Raises :class:`SingularityError` inside the
    guard band ``|B - B0| <= POLE_GUARD * width``.
    """
    field = float(field)
    if not math.isfinite(field):
        raise DomainError(f"field must be finite, got {field!r}")
    alpha = model.background.alpha
    beta = model.background.beta
    for index, term in enumerate(model.resonances):
        offset = field - term.position
        if abs(offset) <= POLE_GUARD * term.width:
            raise SingularityError(field, model.label, index)
        d = offset / term.width
        denom = 4.0 * d * d + 1.0
        alpha += term.strength * 2.0 * d / denom
        beta += term.strength / denom
    return ComplexScatteringLength(alpha, beta)


def amplitude(a: ComplexScatteringLength, effective_range: float, k: float) -> complex:
    """s-wave scattering amplitude f(k) = 1 / (g(k^2) - i k).

    The inverse-amplitude function is truncated after its first two terms,
    g(k^2) = -1/a + (r_eff/2) k^2.  At k = 0 this returns exactly -a.
    """
    if k < 0:
        raise DomainError(f"momentum k must be >= 0, got {k!r}")
    a_c = a.as_complex
    if a_c == 0:
        if k == 0:
            raise DomainError("amplitude is degenerate for a = 0 at k = 0")
        return 0j
    if k == 0:
        return -a_c
    g = -1.0 / a_c + 0.5 * effective_range * k * k
    return 1.0 / (g - 1j * k)


@dataclass(frozen=True)
class AmplitudeExpansion:
    """Leading terms of f expanded in linear momentum p = hbar*k:
    f ~= c0 + c1*p + O(p^2).  The quadratic remainder depends on the
    effective range recorded here but is not computed."""

    c0: complex
    c1: complex
    effective_range: float = 0.0


def low_momentum_expansion(
    a: ComplexScatteringLength, effective_range: float = 0.0
) -> AmplitudeExpansion:
    """Expansion coefficients c0 = -a and c1 = i a^2 / hbar."""
    a_c = a.as_complex
    return AmplitudeExpansion(
        c0=-a_c,
        c1=1j * a_c * a_c / HBAR,
        effective_range=effective_range,
    )
