"""Quantum-dot ensemble spectra and the optical pump budget."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

from .constants import C, GHZ, NM, PS, UW, photon_energy

ROOM_TEMPERATURE_K = 300.0
CRYO_TEMPERATURE_K = 8.0


@dataclass(frozen=True)
class QDEnsemble:
    count: int
    center: float  # nm
    inhom_fwhm: float  # nm
    gamma_hom: float  # GHz
    lifetime: float = 100.0  # ps
    dipole: float = 10.0  # atomic units, e*a0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("dot count must be >= 1")
        for name in ("center", "inhom_fwhm", "gamma_hom", "lifetime", "dipole"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.gamma_hom > self.gamma_inh:
            warnings.warn(
                f"homogeneous width {self.gamma_hom} GHz exceeds the inhomogeneous width "
                f"{self.gamma_inh:.4g} GHz; the ensemble picture does not apply",
                stacklevel=3,
            )

    @property
    def gamma_inh(self) -> float:
        return inhomogeneous_width(self.center, self.inhom_fwhm)

    @property
    def coupled_dots(self) -> float:
        return coupled_dot_count(self.count, self.gamma_hom, self.gamma_inh)


@dataclass(frozen=True)
class PumpBudget:
    absorbed_power: float  # uW
    wavelength: float  # nm
    stages: tuple[tuple[str, float], ...]
    overall_efficiency: float
    pair_rate: float  # 1/s

    def as_dict(self) -> dict:
        return {
            "absorbed_power_uW": self.absorbed_power,
            "pump_wavelength_nm": self.wavelength,
            "stages": [{"label": label, "efficiency": eff} for label, eff in self.stages],
            "overall_efficiency": self.overall_efficiency,
            "pair_rate_per_s": self.pair_rate,
        }


def inhomogeneous_width(center: float, fwhm: float) -> float:
    """Wavelength FWHM (nm) around `center` (nm) to a frequency width in GHz."""
    if center <= 0 or fwhm < 0:
        raise ValueError("center must be positive and fwhm non-negative")
    return C * (fwhm * NM) / (center * NM) ** 2 / GHZ


def inhomogeneous_width_nm(center: float, gamma_inh: float) -> float:
    """Inverse of inhomogeneous_width."""
    return gamma_inh * GHZ * (center * NM) ** 2 / C / NM


def homogeneous_width(
    temperature: float,
    gamma_room: float = 2500.0,
    cryo_factor: float = 1000.0,
    room_temperature: float = ROOM_TEMPERATURE_K,
    cryo_temperature: float = CRYO_TEMPERATURE_K,
) -> float:
    """Homogeneous linewidth (GHz) at `temperature` (K).

    Only two anchors are known: gamma_room at room_temperature and
    gamma_room / cryo_factor at cryo_temperature. In between, log(gamma) is
    interpolated linearly in T; outside, the nearest anchor is held. The
    interpolation law is a placeholder, see homogeneous_regime().
    """
    if not temperature > 0:
        raise ValueError("temperature must be positive")
    if cryo_factor <= 0 or gamma_room <= 0:
        raise ValueError("gamma_room and cryo_factor must be positive")
    if temperature >= room_temperature:
        return gamma_room
    gamma_cryo = gamma_room / cryo_factor
    if temperature <= cryo_temperature:
        return gamma_cryo
    frac = (temperature - cryo_temperature) / (room_temperature - cryo_temperature)
    return math.exp(math.log(gamma_cryo) + frac * (math.log(gamma_room) - math.log(gamma_cryo)))


def homogeneous_regime(
    temperature: float,
    room_temperature: float = ROOM_TEMPERATURE_K,
    cryo_temperature: float = CRYO_TEMPERATURE_K,
) -> str:
    if temperature >= room_temperature:
        return "room-temperature anchor" if temperature == room_temperature else "held at room-temperature anchor"
    if temperature <= cryo_temperature:
        return "cryogenic anchor" if temperature == cryo_temperature else "held at cryogenic anchor"
    return "log-linear interpolation (placeholder law)"


def coupled_dot_count(count: float, gamma_hom: float, gamma_inh: float) -> float:
    """Dots resonant with one mode, N * gamma_hom / gamma_inh, capped at N."""
    if count <= 0 or gamma_hom <= 0 or gamma_inh <= 0:
        raise ValueError("inputs must be positive")
    return min(count * gamma_hom / gamma_inh, float(count))


def coupled_dot_count_gaussian(count: float, gamma_hom: float, gamma_inh: float) -> float:
    """Cross-check of coupled_dot_count: dots of a Gaussian ensemble (FWHM gamma_inh)
    falling inside a gamma_hom-wide band at line centre."""
    if count <= 0 or gamma_hom <= 0 or gamma_inh <= 0:
        raise ValueError("inputs must be positive")
    return count * math.erf(math.sqrt(math.log(2)) * gamma_hom / gamma_inh)


def fsr_coverage(gamma_inh: float, fsr: float) -> float:
    """Number of free spectral ranges inside the inhomogeneous band."""
    if gamma_inh <= 0 or fsr <= 0:
        raise ValueError("inputs must be positive")
    return gamma_inh / fsr


def expected_mode_count(gamma_inh: float, gamma_hom: float) -> float:
    # one winning mode per homogeneous bandwidth
    if gamma_inh <= 0 or gamma_hom <= 0:
        raise ValueError("inputs must be positive")
    return gamma_inh / gamma_hom


def layer_absorption_efficiency(thickness: float, absorption_length: float, beer_lambert: bool = False) -> float:
    """Fraction of the absorbed pump deposited in the active layer.

    Linearized by default (thickness / absorption_length, capped at 1);
    beer_lambert=True gives 1 - exp(-thickness / absorption_length).
    """
    if thickness <= 0 or absorption_length <= 0:
        raise ValueError("thickness and absorption length must be positive")
    x = thickness / absorption_length
    if beer_lambert:
        return -math.expm1(-x)
    return min(x, 1.0)


def pump_chain(absorbed_power: float, wavelength: float, stages: Sequence[tuple[str, float]]) -> PumpBudget:
    """Electron-hole pair rate produced by `absorbed_power` (uW) at `wavelength` (nm)."""
    if absorbed_power < 0:
        raise ValueError("absorbed power must be >= 0")
    stages = tuple((str(label), float(eff)) for label, eff in stages)
    for label, eff in stages:
        if not 0.0 <= eff <= 1.0:
            raise ValueError(f"stage {label!r} efficiency {eff} outside [0, 1]")
    overall = math.prod(eff for _, eff in stages)
    rate = absorbed_power * UW * overall / photon_energy(wavelength * NM)
    return PumpBudget(absorbed_power, wavelength, stages, overall, rate)


def pump_sufficiency(pair_rate: float, count: float, lifetime: float) -> float:
    """Pairs delivered per dot per lifetime (lifetime in ps); >= 1 saturates the dots."""
    if pair_rate <= 0 or count <= 0 or lifetime <= 0:
        raise ValueError("inputs must be positive")
    return pair_rate * lifetime * PS / count
