"""Units and buffer-gas parameters.

Everything downstream computes in SI.  Conventional units (kelvin, cm^-3,
g/mol, bohr, nanometer) are converted exactly once, here, at the I/O
boundary.  Magnetic fields are treated as a dimensionless axis labeled in
gauss and are never converted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .constants import ATOMIC_MASS, AVOGADRO, BOHR_RADIUS
from .errors import DomainError, UnitError

LENGTH_FACTORS = {
    "meter": 1.0,
    "bohr": BOHR_RADIUS,
    "nanometer": 1e-9,
}

MASS_FACTORS = {
    "kg": 1.0,
    "g_per_mol": 1e-3 / AVOGADRO,
    "amu": ATOMIC_MASS,
}

DENSITY_FACTORS = {
    "per_m3": 1.0,
    "per_cm3": 1e6,
}

TEMPERATURE_FACTORS = {
    "kelvin": 1.0,
}


def _factor(table: dict[str, float], unit: str, kind: str) -> float:
    try:
        return table[unit]
    except KeyError:
        known = ", ".join(sorted(table))
        raise UnitError(f"unknown {kind} unit {unit!r} (known: {known})") from None


@dataclass(frozen=True)
class UnitContext:
    """Conversion factors to SI for every unit this package accepts."""

    length: dict[str, float] = field(default_factory=lambda: dict(LENGTH_FACTORS))
    mass: dict[str, float] = field(default_factory=lambda: dict(MASS_FACTORS))
    density: dict[str, float] = field(default_factory=lambda: dict(DENSITY_FACTORS))
    temperature: dict[str, float] = field(default_factory=lambda: dict(TEMPERATURE_FACTORS))


def convert_length(value: float, from_unit: str, to_unit: str) -> float:
    """Convert a length between ``bohr``, ``meter`` and ``nanometer``."""
    f_from = _factor(LENGTH_FACTORS, from_unit, "length")
    f_to = _factor(LENGTH_FACTORS, to_unit, "length")
    if from_unit == to_unit:
        return value
    return value * f_from / f_to


def length_to_si(value: float, unit: str) -> float:
    return value * _factor(LENGTH_FACTORS, unit, "length")


def mass_to_si(value: float, unit: str) -> float:
    return value * _factor(MASS_FACTORS, unit, "mass")


def density_to_si(value: float, unit: str) -> float:
    return value * _factor(DENSITY_FACTORS, unit, "density")


def temperature_to_si(value: float, unit: str) -> float:
    return value * _factor(TEMPERATURE_FACTORS, unit, "temperature")


@dataclass(frozen=True)
class GasParameters:
    """Buffer gas and superposed-particle parameters, all SI.

    ``atom_mass`` is the structureless environment atom, ``particle_mass``
    the particle held in the superposition.  The reduced mass and the mass
    ratio are derived, never user-set.
    """

    temperature: float   # K
    density: float       # m^-3
    atom_mass: float     # kg
    particle_mass: float  # kg

    def __post_init__(self):
        for name in ("temperature", "density", "atom_mass", "particle_mass"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise DomainError(f"{name} must be a finite number, got {value!r}")
            if value <= 0:
                raise DomainError(f"{name} must be > 0, got {value!r}")

    @property
    def reduced_mass(self) -> float:
        """m * M / (m + M) of the colliding pair, kg."""
        m, big_m = self.atom_mass, self.particle_mass
        return m * big_m / (m + big_m)

    @property
    def mass_ratio(self) -> float:
        """Environment-atom mass over superposed-particle mass."""
        return self.atom_mass / self.particle_mass


def build_gas_parameters(
    temperature: float,
    density: float,
    atom_mass: float,
    particle_mass: float,
    *,
    temperature_unit: str = "kelvin",
    density_unit: str = "per_cm3",
    mass_unit: str = "g_per_mol",
) -> GasParameters:
    """Build :class:`GasParameters` from conventional experimental units.

    Defaults take the temperature in kelvin, the gas density in cm^-3 and
    both masses in g/mol.  Raises :class:`DomainError` naming the offending
    field for non-positive input.
    """
    for name, value in (
        ("temperature", temperature),
        ("density", density),
        ("atom_mass", atom_mass),
        ("particle_mass", particle_mass),
    ):
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise DomainError(f"{name} must be a positive finite number, got {value!r}")
    return GasParameters(
        temperature=temperature_to_si(temperature, temperature_unit),
        density=density_to_si(density, density_unit),
        atom_mass=mass_to_si(atom_mass, mass_unit),
        particle_mass=mass_to_si(particle_mass, mass_unit),
    )
