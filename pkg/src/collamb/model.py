"""Dimensionless parameterization of a driven dense two-level gas.

Conventions used throughout the package:

* every rate/frequency is measured in units of the free-space spontaneous
  linewidth of the transition,
* every length is measured in units of the transition wavelength, so the
  free-space wave number is ``2*pi``,
* the density enters only through the cooperativity
  ``C = wavelength**3 * number_density / (4 pi^2)``,
* a positive detuning means the drive is red of the bare resonance, and a
  positive collective shift is a red shift.

With these choices none of the dimensional constants (dipole moment, hbar,
vacuum permittivity, speed of light) ever appear at runtime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

FOUR_PI_SQUARED = 4.0 * math.pi**2


@dataclass(frozen=True)
class PhysicalInput:
    """Dimensional description of the gas.

    number_density is in atoms per cubic meter, wavelength in meters.
    natural_linewidth (rad/s) is optional and only needed to convert
    dimensionless results back to laboratory rates.
    """

    number_density: float
    wavelength: float
    natural_linewidth: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.number_density) or self.number_density < 0:
            raise ValueError("number_density must be finite and >= 0")
        if not math.isfinite(self.wavelength) or self.wavelength <= 0:
            raise ValueError("wavelength must be finite and > 0")
        if self.natural_linewidth is not None and self.natural_linewidth <= 0:
            raise ValueError("natural_linewidth must be > 0 when given")


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless model knobs: cooperativity, detuning and Rabi drive."""

    cooperativity: float
    detuning: float = 0.0
    rabi: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.cooperativity) or self.cooperativity < 0:
            raise ValueError("cooperativity must be finite and >= 0")
        if not math.isfinite(self.detuning):
            raise ValueError("detuning must be finite")
        if not math.isfinite(self.rabi) or self.rabi < 0:
            raise ValueError("rabi must be finite and >= 0")


def cooperativity(inp: PhysicalInput) -> float:
    """Dimensionless density ``C = wavelength^3 * density / (4 pi^2)``.

    C = 1 corresponds to roughly 40 atoms in a cubic wavelength; rubidium
    at 780 nm reaches C ~= 1 near 8e13 atoms/cm^3.
    """
    return inp.wavelength**3 * inp.number_density / FOUR_PI_SQUARED


def number_density_for(coop: float, wavelength: float) -> float:
    """Inverse of :func:`cooperativity`: density (1/m^3) giving the target C."""
    if coop < 0:
        raise ValueError("cooperativity must be >= 0")
    if wavelength <= 0:
        raise ValueError("wavelength must be > 0")
    return coop * FOUR_PI_SQUARED / wavelength**3


def atoms_per_cubic_wavelength(coop: float) -> float:
    """Number of atoms in a volume wavelength^3 at cooperativity ``coop``."""
    return FOUR_PI_SQUARED * coop


def require_finite(value: complex, name: str = "value") -> complex:
    """Reject NaN/Inf before a number crosses a public API boundary."""
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValueError(f"{name} is not finite: {value!r}")
    return value
