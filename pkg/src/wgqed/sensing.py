"""
Separation-change sensing with collective resonances.

A change ``dd`` of a deep-subwavelength separation moves the superradiant
resonance (centre ``+Im W``) and the subradiant one (centre ``-Im W``), where
``W = V12 exp(i k_a d)``. Measured shifts are converted back to ``dd`` by
root finding on that exact dependence and then to strain or temperature
with fibre-style length coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import BracketError, DomainError
from .model import WaveguideParams, collective_coupling

#: resolvable shift as a fraction of the probed branch linewidth
DEFAULT_ALPHA = 0.9
#: thermal-vibration floor at room temperature, kelvin
ROOM_TEMPERATURE_FLOOR_K = 0.1


@dataclass(frozen=True)
class SensingConfig:
    """Baseline pair and conversion constants.

    ``d`` is in wavelengths, rates in the reference unit, and the physical
    wavelength and coefficients in metres (per microstrain, per kelvin).
    """

    d: float
    gamma_wg: float
    gamma_free: float
    branch: str = "superradiant"
    wavelength_physical: float = 1.55e-6
    strain_coefficient: float = 1.25e-12
    temperature_coefficient: float = 12.5e-12
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        if not self.d > 0:
            raise DomainError("baseline separation must be positive")
        if self.branch not in ("superradiant", "subradiant"):
            raise DomainError(f"unknown branch {self.branch!r}")
        if not (self.strain_coefficient > 0 and self.temperature_coefficient > 0):
            raise DomainError("conversion coefficients must be positive")
        if not self.wavelength_physical > 0:
            raise DomainError("physical wavelength must be positive")
        if not self.gamma_wg > 0 or self.gamma_free < 0:
            raise DomainError("invalid decay rates")
        if self.alpha < 0:
            raise DomainError("alpha must be non-negative")

    @property
    def sign(self) -> int:
        return 1 if self.branch == "superradiant" else -1


@dataclass(frozen=True)
class SensingReading:
    shift: float
    dd: float
    strain: float
    temperature: float
    resolvable: bool
    note: str = (
        f"thermal vibration limits room-temperature readings to about "
        f"{ROOM_TEMPERATURE_FLOOR_K} K"
    )


def branch_center(d, config: SensingConfig):
    """Centre of the probed collective resonance at separation ``d``."""
    w = collective_coupling(d, config.gamma_wg, config.gamma_free)
    return config.sign * np.imag(w)


def branch_fwhm(config: SensingConfig) -> float:
    """Linewidth ``2 Gamma_pm = (G + g) +/- 2 Re W`` of the probed branch."""
    w = collective_coupling(config.d, config.gamma_wg, config.gamma_free)
    return float(config.gamma_wg + config.gamma_free + 2 * config.sign * np.real(w))


def peak_shift_to_dd(shift: float, config: SensingConfig) -> float:
    """Separation change that moves the probed peak by ``shift``.

    Solves ``center(d + dd) - center(d) = shift`` for ``dd`` in
    ``[-d/2, d/2]``. A positive superradiant shift means the emitters moved
    closer (``dd < 0``).
    """
    if shift == 0:
        return 0.0
    d = config.d
    c0 = branch_center(d, config)
    f = lambda x: branch_center(d + x, config) - c0 - shift
    lo, hi = -0.5 * d, 0.5 * d
    flo, fhi = f(lo), f(hi)
    if np.sign(flo) == np.sign(fhi):
        raise BracketError(
            f"no separation change within +/-{0.5 * d:.3g} produces a shift of {shift:.6g}"
        )
    return float(brentq(f, lo, hi, xtol=1e-15 * d, rtol=1e-13, maxiter=200))


def dd_to_strain_temperature(dd: float, config: SensingConfig):
    """Strain (microstrain) and temperature change (kelvin) for ``dd``."""
    physical = dd * config.wavelength_physical
    return physical / config.strain_coefficient, physical / config.temperature_coefficient


def strain_to_dd(strain: float, config: SensingConfig) -> float:
    return strain * config.strain_coefficient / config.wavelength_physical


def temperature_to_dd(temperature: float, config: SensingConfig) -> float:
    return temperature * config.temperature_coefficient / config.wavelength_physical


def min_detectable(config: SensingConfig):
    """Smallest resolvable ``(|dd|, |shift|)`` on the probed branch.

    A shift counts as resolvable once it reaches ``alpha`` times the branch
    linewidth.
    """
    shift = config.alpha * branch_fwhm(config)
    if shift == 0:
        return 0.0, 0.0
    # move the peak in the direction a shrinking separation moves it
    dd = peak_shift_to_dd(config.sign * shift, config)
    return abs(dd), shift


def read_shift(shift: float, config: SensingConfig) -> SensingReading:
    dd = peak_shift_to_dd(shift, config)
    strain, temperature = dd_to_strain_temperature(dd, config)
    resolvable = abs(shift) >= config.alpha * branch_fwhm(config)
    return SensingReading(shift, dd, strain, temperature, bool(resolvable))


def near_field_shift(d, gamma_free, wavelength=1.0):
    """Static near-field coupling ``3 g / (4 (k_a d)^3)``."""
    x = 2 * math.pi * d / wavelength
    return 0.75 * gamma_free / x**3


def asymptotic_shift(dd, config: SensingConfig):
    """Small-separation estimate ``-3 Omega dd / d`` of the superradiant shift."""
    omega = near_field_shift(config.d, config.gamma_free)
    return -3.0 * omega * dd / config.d


def asymptotic_dd(shift, config: SensingConfig):
    """Inverse of :func:`asymptotic_shift`."""
    omega = near_field_shift(config.d, config.gamma_free)
    return -shift * config.d / (3.0 * omega)


def half_factor_dd(shift, config: SensingConfig):
    """Alternative reference estimate ``shift d / (2 Omega)``.

    Uses a factor 2 where :func:`asymptotic_dd` uses 3; kept for comparison
    only, the root-found :func:`peak_shift_to_dd` is authoritative.
    """
    omega = near_field_shift(config.d, config.gamma_free)
    return shift * config.d / (2.0 * omega)


def fbg_shift(dd, omega_a, wavelength=1.0):
    """Bragg-grating shift ``-omega_a dd / lambda`` for the same length change."""
    return -omega_a * dd / wavelength


def fbg_sensitivity_ratio(config: SensingConfig, omega_a: float, wavelength: float = 1.0) -> float:
    """Sensitivity relative to a Bragg grating, ``3 lambda Omega / (omega_a d)``.

    ``omega_a`` is the transition frequency in the same rate unit as the
    decay rates.
    """
    omega = near_field_shift(config.d, config.gamma_free, wavelength)
    return 3.0 * wavelength * omega / (omega_a * config.d)
