"""Geometrized-unit conversions (G = c = 1, lengths in centimeters).

Every solver in this package works in geometrized units in which mass,
length, density and pressure are all powers of the centimeter: mass and
length carry dimension cm, density and pressure carry dimension cm^-2.
Conversions to and from conventional units happen only at the package
boundary (catalog ingestion and the command line).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import DomainError, UnknownUnitError

# CODATA 2018 / IAU nominal values.  c is exact; the solar mass parameter
# GM_sun is the IAU 2015 nominal value, known far better than G or M_sun
# separately, so mass conversions are built from it directly.
SPEED_OF_LIGHT_CGS = 2.99792458e10          # cm / s
GRAVITATIONAL_CONSTANT_CGS = 6.67430e-8     # cm^3 / (g s^2)
SOLAR_MASS_PARAMETER_CGS = 1.3271244e26     # GM_sun, cm^3 / s^2

_C2 = SPEED_OF_LIGHT_CGS**2
_C4 = _C2 * _C2

SOLAR_MASS_G = SOLAR_MASS_PARAMETER_CGS / GRAVITATIONAL_CONSTANT_CGS
SOLAR_MASS_LENGTH_CM = SOLAR_MASS_PARAMETER_CGS / _C2   # ~1.4766e5 cm
KM_CM = 1.0e5
DENSITY_GEOM_PER_CGS = GRAVITATIONAL_CONSTANT_CGS / _C2   # cm^-2 per g/cm^3
PRESSURE_GEOM_PER_CGS = GRAVITATIONAL_CONSTANT_CGS / _C4  # cm^-2 per dyn/cm^2


class Dimension(enum.Enum):
    MASS = "mass"
    LENGTH = "length"
    DENSITY = "density"
    PRESSURE = "pressure"
    DIMENSIONLESS = "dimensionless"


@dataclass(frozen=True)
class GeomQuantity:
    """A value in geometrized units together with its physical dimension."""

    value: float
    dimension: Dimension


# tag -> (dimension, geometrized units per one conventional unit)
_UNIT_TABLE: dict[str, tuple[Dimension, float]] = {
    "msun": (Dimension.MASS, SOLAR_MASS_LENGTH_CM),
    "km": (Dimension.LENGTH, KM_CM),
    "g/cm3": (Dimension.DENSITY, DENSITY_GEOM_PER_CGS),
    "dyn/cm2": (Dimension.PRESSURE, PRESSURE_GEOM_PER_CGS),
    "dimensionless": (Dimension.DIMENSIONLESS, 1.0),
}

_ALIASES = {
    "m_sun": "msun",
    "solar_mass": "msun",
    "solar-mass": "msun",
    "g_per_cm3": "g/cm3",
    "dyn_per_cm2": "dyn/cm2",
}


def _lookup(unit: str) -> tuple[Dimension, float]:
    key = unit.strip().lower()
    key = _ALIASES.get(key, key)
    try:
        return _UNIT_TABLE[key]
    except KeyError:
        raise UnknownUnitError(
            f"unknown unit tag {unit!r}; supported: {sorted(_UNIT_TABLE)}"
        ) from None


def geometrized_factor(unit: str) -> float:
    """Geometrized units per one conventional unit of ``unit``."""
    return _lookup(unit)[1]


def to_geometrized(value: float, unit: str) -> GeomQuantity:
    """Convert ``value`` expressed in ``unit`` into geometrized units."""
    dimension, factor = _lookup(unit)
    return GeomQuantity(value * factor, dimension)


def from_geometrized(quantity: GeomQuantity, unit: str) -> float:
    """Convert a geometrized quantity back to the conventional ``unit``.

    The unit must carry the same dimension the quantity was tagged with;
    a pressure can never silently come back as a mass.
    """
    dimension, factor = _lookup(unit)
    if dimension is not quantity.dimension:
        raise DomainError(
            f"dimension mismatch: quantity is {quantity.dimension.value}, "
            f"unit {unit!r} is {dimension.value}"
        )
    return quantity.value / factor


def polytropic_k_to_geometrized(k_cgs: float, gamma: float) -> float:
    """Convert a polytropic constant from cgs to geometrized units.

    k carries mixed units that depend on gamma (p = k rho^gamma), so it
    does not fit the GeomQuantity dimensions; the factor follows from
    converting p and rho separately.
    """
    return k_cgs * GRAVITATIONAL_CONSTANT_CGS ** (1.0 - gamma) * SPEED_OF_LIGHT_CGS ** (2.0 * gamma - 4.0)


def polytropic_k_from_geometrized(k_geom: float, gamma: float) -> float:
    """Inverse of :func:`polytropic_k_to_geometrized`."""
    return k_geom * GRAVITATIONAL_CONSTANT_CGS ** (gamma - 1.0) * SPEED_OF_LIGHT_CGS ** (4.0 - 2.0 * gamma)
