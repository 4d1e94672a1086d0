"""Cavity-QED lasing threshold and a minimal single-mode rate-equation model.

Linewidths and Rabi frequencies cross the API as ordinary frequencies in
GHz (Gamma/2pi, gamma_hom/2pi, Omega_R/2pi). Rates (W, Gamma in ll_curve,
pump rates) are angular, in 1/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import bisect

from .constants import DIPOLE_AU, EPSILON_0, GHZ, HBAR, PS, UM, C

GOOD_CAVITY_RATIO = 10.0
RABI_CONVENTIONS = ("splitting", "g")


class NumericalError(RuntimeError):
    """Steady-state solve failed or produced an inconsistent curve."""


@dataclass(frozen=True)
class CavityQEDParams:
    rabi: float  # GHz, Omega_R / 2pi at field maximum
    gamma_hom: float  # GHz
    linewidth: float  # GHz, Gamma / 2pi
    coupled_dots: float
    field_ratio: float = 1.0

    def __post_init__(self):
        for name in ("rabi", "gamma_hom", "linewidth", "coupled_dots"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.field_ratio <= 1.0:
            raise ValueError("field_ratio must lie in [0, 1]")

    @property
    def good_cavity(self) -> bool:
        return self.gamma_hom / self.linewidth >= GOOD_CAVITY_RATIO

    @property
    def effective_rabi(self) -> float:
        return self.rabi * self.field_ratio


@dataclass(frozen=True)
class FrequencyHierarchy:
    gamma_inh: float
    gamma_hom: float
    fsr: float
    linewidth: float

    @property
    def ordering_ok(self) -> bool:
        return self.gamma_inh > self.gamma_hom > self.fsr > self.linewidth

    @property
    def ratios(self) -> tuple[float, float, float]:
        return (
            self.gamma_inh / self.gamma_hom,
            self.gamma_hom / self.fsr,
            self.fsr / self.linewidth,
        )


class ThresholdParameter(NamedTuple):
    per_qd: float
    total: float


@dataclass(frozen=True)
class LLCurve:
    pump_rate: np.ndarray  # 1/s per dot
    n_mean: np.ndarray
    rho: np.ndarray
    threshold_estimate: float | None

    def __len__(self):
        return len(self.pump_rate)

    def rows(self):
        return zip(self.pump_rate, self.n_mean, self.rho)


def vacuum_rabi(
    dipole: float,
    wavelength: float,
    volume: float,
    index: float,
    field_ratio: float = 1.0,
    convention: str = "splitting",
) -> float:
    """Vacuum Rabi frequency Omega_R/2pi in GHz.

    g = (d / hbar) sqrt(hbar omega / (2 eps0 N^2 V)); the "splitting"
    convention returns 2g, "g" returns g. dipole in e*a0, wavelength in um,
    volume in um^3.
    """
    if convention not in RABI_CONVENTIONS:
        raise ValueError(f"convention must be one of {RABI_CONVENTIONS}")
    if dipole <= 0 or wavelength <= 0 or volume <= 0 or index <= 0:
        raise ValueError("dipole, wavelength, volume and index must be positive")
    if not 0.0 <= field_ratio <= 1.0:
        raise ValueError("field_ratio must lie in [0, 1]")
    omega = 2 * math.pi * C / (wavelength * UM)
    field = math.sqrt(HBAR * omega / (2 * EPSILON_0 * index**2 * volume * UM**3))
    g = dipole * DIPOLE_AU * field / HBAR
    factor = 2.0 if convention == "splitting" else 1.0
    return factor * g * field_ratio / (2 * math.pi) / GHZ


def _angular(f_ghz: float) -> float:
    return 2 * math.pi * f_ghz * GHZ


def emission_rate(rabi: float, gamma_hom: float, linewidth: float) -> float:
    """Spontaneous emission rate into the mode, W = Omega_R^2 / (gamma_hom + Gamma), in 1/s."""
    if rabi < 0 or gamma_hom <= 0 or linewidth <= 0:
        raise ValueError("rabi must be >= 0 and widths positive")
    return _angular(rabi) ** 2 / (_angular(gamma_hom) + _angular(linewidth))


def threshold_parameter(coupled_dots: float, rabi: float, gamma_hom: float, linewidth: float) -> ThresholdParameter:
    """Omega_R^2 / (gamma_hom Gamma) per dot and times N_c; lasing needs total ~ 1.

    The 2pi factors cancel, so GHz inputs are used as is.
    """
    if coupled_dots <= 0 or rabi < 0 or gamma_hom <= 0 or linewidth <= 0:
        raise ValueError("invalid threshold inputs")
    per_qd = rabi**2 / (gamma_hom * linewidth)
    return ThresholdParameter(per_qd, coupled_dots * per_qd)


def frequency_hierarchy(gamma_inh: float, gamma_hom: float, fsr: float, linewidth: float) -> FrequencyHierarchy:
    for v in (gamma_inh, gamma_hom, fsr, linewidth):
        if not v > 0:
            raise ValueError("hierarchy frequencies must be positive")
    return FrequencyHierarchy(gamma_inh, gamma_hom, fsr, linewidth)


def upper_occupation(n: float, pump: float, w: float, tau: float) -> float:
    """Steady-state occupation rho for photon number n (tau in s)."""
    return (pump + w * n) / (pump + 1.0 / tau + w * (2 * n + 1))


def photon_balance(n: float, pump: float, coupled_dots: float, w: float, cavity_rate: float, tau: float) -> float:
    """N_c W [rho (2n+1) - n] - Gamma n; zero at steady state."""
    rho = upper_occupation(n, pump, w, tau)
    return coupled_dots * w * (rho * (2 * n + 1) - n) - cavity_rate * n


def _solve_photon_number(pump, coupled_dots, w, cavity_rate, tau) -> float:
    if pump == 0:
        return 0.0
    # gain term is bounded by N_c * R, so the root lies below N_c R / Gamma
    hi = coupled_dots * pump / cavity_rate * (1 + 1e-9) + 1e-300
    f = lambda n: photon_balance(n, pump, coupled_dots, w, cavity_rate, tau)
    if f(hi) >= 0:
        raise NumericalError(
            f"no sign change for photon number at R={pump:g}: N_c={coupled_dots}, W={w}, Gamma={cavity_rate}, tau={tau}"
        )
    try:
        return bisect(f, 0.0, hi, xtol=1e-300, rtol=1e-14, maxiter=200)
    except (ValueError, RuntimeError) as exc:
        raise NumericalError(f"photon-number bisection failed at R={pump:g}: {exc}") from exc


def ll_curve(coupled_dots: float, w: float, cavity_rate: float, lifetime: float, pump_grid) -> LLCurve:
    """Steady-state mean photon number and occupation versus per-dot pump rate.

    Two-level dots pumped at rate R, decaying at 1/tau and exchanging photons
    with one mode at rate W; the mode decays at Gamma (= cavity_rate, angular,
    1/s). lifetime is in ps. The threshold estimate is the pump rate where
    d log n / d log R peaks.
    """
    if coupled_dots <= 0 or w <= 0 or cavity_rate <= 0 or lifetime <= 0:
        raise ValueError("ll_curve parameters must be positive")
    grid = np.asarray(pump_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("pump grid is empty")
    if grid[0] < 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("pump grid must be non-negative and strictly ascending")
    tau = lifetime * PS
    n = np.array([_solve_photon_number(r, coupled_dots, w, cavity_rate, tau) for r in grid])
    rho = np.array([upper_occupation(ni, r, w, tau) for ni, r in zip(n, grid)])
    if np.any(np.diff(n) <= 0):
        raise NumericalError("photon number is not increasing along the pump grid")
    return LLCurve(grid, n, rho, _kink(grid, n))


def _kink(pump: np.ndarray, n: np.ndarray) -> float | None:
    mask = pump > 0
    if mask.sum() < 3:
        return None
    x = np.log(pump[mask])
    y = np.log(n[mask])
    slope = np.gradient(y, x)
    return float(pump[mask][int(np.argmax(slope))])


def log_slopes(curve: LLCurve) -> np.ndarray:
    mask = curve.pump_rate > 0
    return np.gradient(np.log(curve.n_mean[mask]), np.log(curve.pump_rate[mask]))


def kink_contrast(curve: LLCurve) -> float:
    """Slope efficiency dn/dR above the kink over that below it.

    Uses the secants through the two highest and the two lowest positive pump
    points, so the grid should extend well past threshold on both sides.
    """
    mask = curve.pump_rate > 0
    r, n = curve.pump_rate[mask], curve.n_mean[mask]
    if r.size < 4:
        raise ValueError("need at least four positive pump points")
    below = (n[1] - n[0]) / (r[1] - r[0])
    above = (n[-1] - n[-2]) / (r[-1] - r[-2])
    return float(above / below)


def steady_state_residuals(curve: LLCurve, coupled_dots: float, w: float, cavity_rate: float) -> np.ndarray:
    """|Gamma n - N_c W [rho (2n+1) - n]| / (Gamma n) at each positive-n point."""
    n, rho = curve.n_mean, curve.rho
    mask = n > 0
    loss = cavity_rate * n[mask]
    gain = coupled_dots * w * (rho[mask] * (2 * n[mask] + 1) - n[mask])
    return np.abs(loss - gain) / loss


def pump_grid(start: float, stop: float, points: int) -> np.ndarray:
    """R = 0 followed by `points` log-spaced rates from start to stop."""
    return np.concatenate(([0.0], np.geomspace(start, stop, points)))
