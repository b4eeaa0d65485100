"""Frozen physical constants and SI <-> Planck-unit conversion.

Values are CODATA 2018, written out by hand so the numbers under test
cannot drift with a library upgrade.  The Stefan-Boltzmann constant is
derived from the frozen quartet (pi^2 k_B^4 / 60 hbar^3 c^2) rather than
stored independently, so the closed-form identity holds to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .errors import ValidationError

__all__ = [
    "HBAR",
    "C",
    "K_B",
    "G",
    "STEFAN_BOLTZMANN",
    "PhysicalConstants",
    "CODATA2018",
    "UnitSystem",
    "planck_scales",
    "convert",
    "DIMENSIONS",
]


HBAR = 1.054571817e-34
"""Reduced Planck constant, J s."""

C = 299792458.0
"""Speed of light in vacuum, m/s (exact)."""

K_B = 1.380649e-23
"""Boltzmann constant, J/K (exact)."""

G = 6.67430e-11
"""Newtonian constant of gravitation, m^3 kg^-1 s^-2."""

STEFAN_BOLTZMANN = math.pi**2 * K_B**4 / (60.0 * HBAR**3 * C**2)
"""Stefan-Boltzmann constant, W m^-2 K^-4, derived from the quartet above."""


@dataclass(frozen=True)
class PhysicalConstants:
    """Immutable bundle of the constants every other module consumes."""

    hbar: float = HBAR
    c: float = C
    k_B: float = K_B
    G: float = G
    stefan_boltzmann: float = STEFAN_BOLTZMANN


CODATA2018 = PhysicalConstants()

#: Dimension tags accepted by :func:`convert`.
DIMENSIONS = ("mass", "length", "time", "temperature", "energy", "density")


def planck_scales(constants: PhysicalConstants = CODATA2018) -> dict[str, float]:
    """SI value of one natural (Planck) unit for each supported dimension.

    ``density`` is an energy density (J/m^3): the Friedmann source terms
    and the saturation scale 1/alpha are energy densities, not mass
    densities.
    """
    hbar, c, k_B, G_ = constants.hbar, constants.c, constants.k_B, constants.G
    energy = math.sqrt(hbar * c**5 / G_)
    return {
        "mass": math.sqrt(hbar * c / G_),
        "length": math.sqrt(hbar * G_ / c**3),
        "time": math.sqrt(hbar * G_ / c**5),
        "temperature": energy / k_B,
        "energy": energy,
        "density": c**7 / (hbar * G_**2),
    }


@dataclass(frozen=True)
class UnitSystem:
    """Either plain SI or natural units anchored to the Planck scales.

    ``scales[dim]`` is the SI magnitude of one unit of ``dim`` in this
    system, so conversion is a single multiply/divide and round-trips
    exactly up to float rounding.
    """

    mode: str
    scales: Mapping[str, float]

    @classmethod
    def si(cls) -> "UnitSystem":
        return cls(mode="SI", scales={dim: 1.0 for dim in DIMENSIONS})

    @classmethod
    def natural(cls, constants: PhysicalConstants = CODATA2018) -> "UnitSystem":
        return cls(mode="Natural", scales=planck_scales(constants))

    def scale(self, dimension: str) -> float:
        if dimension not in self.scales:
            raise ValidationError(
                f"unknown dimension tag {dimension!r}; expected one of {DIMENSIONS}"
            )
        return self.scales[dimension]


def convert(value: float, dimension: str, frm: UnitSystem, to: UnitSystem) -> float:
    """Re-express ``value`` of the given dimension from one system in another."""
    return value * frm.scale(dimension) / to.scale(dimension)
