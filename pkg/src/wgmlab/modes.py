"""Microsphere whispering-gallery-mode structure.

Lengths are in micrometres, frequencies in GHz (ordinary, i.e. already
divided by 2*pi) unless a name says otherwise. Only the exterior evanescent
tail of the radial function is modelled; the polar profile uses the
Hermite-Gauss form valid near the equator for large angular number.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np
from numpy.polynomial.hermite import hermval
from scipy.optimize import minimize_scalar

from .constants import C, GHZ, UM, wavelength_to_frequency

RADIUS_RANGE_UM = (10.0, 200.0)
MAX_POLAR_ORDER = 20

# mode-volume estimator anchor: a 70 um silica sphere at 1.06 um with
# polar order 5 has a volume of about 5000 um^3
VOLUME_ANCHOR = dict(radius=70.0, wavelength=1.06, index=1.45, polar_order=5, volume=5.0e3)
DEFAULT_RADIAL_WIDTH_UM = 1.0


class UnguidedModeError(ValueError):
    """Raised when a requested mode has effective index <= 1."""


@dataclass(frozen=True)
class SphereGeometry:
    radius: float  # um
    index: float = 1.45

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"sphere radius must be positive, got {self.radius!r}")
        if not self.index > 1:
            raise ValueError(f"sphere index must exceed 1, got {self.index!r}")
        lo, hi = RADIUS_RANGE_UM
        if not lo <= self.radius <= hi:
            warnings.warn(
                f"radius {self.radius} um outside the {lo}-{hi} um range where the "
                "large-l approximations are reasonable",
                stacklevel=3,
            )


@dataclass(frozen=True)
class ModeIndex:
    l: int
    m: int
    n: int = 1
    polarization: str = "TE"

    def __post_init__(self):
        if self.polarization not in ("TE", "TM"):
            raise ValueError(f"polarization must be TE or TM, got {self.polarization!r}")
        if self.n < 1:
            raise ValueError(f"radial order n must be >= 1, got {self.n}")
        if self.l < 1:
            raise ValueError(f"angular number l must be >= 1, got {self.l}")
        if abs(self.m) > self.l:
            raise ValueError(f"|m| = {abs(self.m)} exceeds l = {self.l}")

    @property
    def polar_order(self) -> int:
        return self.l - abs(self.m)


@dataclass(frozen=True)
class ModeDescriptor:
    index: ModeIndex
    wavelength: float  # um
    frequency: float  # Hz
    n_eff: float
    fsr: float  # GHz
    kappa: float  # 1/um
    decay_length: float  # nm
    transverse_extent: float  # um
    mode_volume: float  # um^3
    linewidth: float | None = None  # GHz

    @property
    def quality_factor(self) -> float | None:
        if self.linewidth is None:
            return None
        return quality_factor(self.frequency, self.linewidth)

    def with_linewidth(self, linewidth: float) -> "ModeDescriptor":
        return replace(self, linewidth=linewidth)


@dataclass(frozen=True)
class LinewidthBudget:
    components: tuple[tuple[str, float], ...]
    total: float

    @property
    def weights(self) -> dict[str, float]:
        if self.total == 0:
            return {label: 0.0 for label, _ in self.components}
        return {label: value / self.total for label, value in self.components}

    def component(self, label: str) -> float:
        return sum(v for name, v in self.components if name == label)


class AngularNumber(NamedTuple):
    l: int
    unrounded: float


def effective_index(l: int, radius: float, wavelength: float, index: float | None = None) -> float:
    """N_eff = l * lambda / (2 pi a).

    Raises UnguidedModeError when the result is not above 1. If the material
    index is given and exceeded, a warning is issued (first radial order
    modes sit just below it).
    """
    if l <= 0 or radius <= 0 or wavelength <= 0:
        raise ValueError("l, radius and wavelength must all be positive")
    n_eff = l * wavelength / (2 * math.pi * radius)
    if n_eff <= 1.0 + 1e-12:
        raise UnguidedModeError(f"N_eff = {n_eff:.6g} <= 1: mode is not guided")
    if index is not None and n_eff > index:
        warnings.warn(f"N_eff = {n_eff:.6g} exceeds material index {index}", stacklevel=2)
    return n_eff


def angular_number(radius: float, wavelength: float, n_eff: float) -> AngularNumber:
    """Angular number from 2 pi a = l lambda / N_eff, rounded and raw."""
    if radius <= 0 or wavelength <= 0:
        raise ValueError("radius and wavelength must be positive")
    if not n_eff > 1:
        raise ValueError(f"N_eff must exceed 1, got {n_eff!r}")
    raw = 2 * math.pi * radius * n_eff / wavelength
    return AngularNumber(int(round(raw)), raw)


def free_spectral_range(radius: float, n_eff: float) -> float:
    """FSR in GHz, c / (2 pi N_eff a)."""
    if radius <= 0 or n_eff <= 0:
        raise ValueError("radius and N_eff must be positive")
    return C / (2 * math.pi * n_eff * radius * UM) / GHZ


def evanescent_decay(n_eff: float, wavelength: float) -> float:
    """Exterior field decay constant kappa (1/um); the decay length is 1/kappa."""
    if not n_eff > 1:
        raise ValueError(f"evanescent decay needs N_eff > 1, got {n_eff!r}")
    if not wavelength > 0:
        raise ValueError("wavelength must be positive")
    return math.sqrt(n_eff**2 - 1) * 2 * math.pi / wavelength


def decay_length_nm(kappa: float) -> float:
    return 1e3 / kappa


def transverse_extent(radius: float, kappa: float) -> float:
    """Transverse field extension sqrt(a / kappa), in um."""
    if radius <= 0 or kappa <= 0:
        raise ValueError("radius and kappa must be positive")
    return math.sqrt(radius / kappa)


def _check_polar(l: int, p: int) -> None:
    if p < 0:
        raise ValueError(f"polar order must be >= 0, got {p}")
    if p >= l or p > MAX_POLAR_ORDER:
        raise ValueError(
            f"polar order p={p} unsupported for l={l}: the Hermite-Gauss "
            f"approximation needs p < l and p <= {MAX_POLAR_ORDER}"
        )


def _hermite_intensity(u, p: int):
    coeffs = np.zeros(p + 1)
    coeffs[p] = 1.0
    return hermval(u, coeffs) ** 2 * np.exp(-np.square(u))


@lru_cache(maxsize=None)
def _hermite_peak(p: int) -> float:
    # outermost lobe of a Hermite function is the tallest
    u_max = math.sqrt(2 * p + 1) + 3.0
    u = np.linspace(0.0, u_max, 20001)
    vals = _hermite_intensity(u, p)
    i = int(np.argmax(vals))
    step = u[1] - u[0]
    res = minimize_scalar(
        lambda x: -_hermite_intensity(x, p),
        bounds=(max(u[i] - step, 0.0), u[i] + step),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(max(-res.fun, vals[i]))


def polar_intensity(l: int, p: int, z, radius: float):
    """Relative intensity (peak 1) along the arc distance z (um) from the equator.

    |H_p(u)|^2 exp(-u^2) with u = z sqrt(l) / a, which has p + 1 antinodes.
    """
    _check_polar(l, p)
    u = np.asarray(z, dtype=float) * math.sqrt(l) / radius
    out = _hermite_intensity(u, p) / _hermite_peak(p)
    return float(out) if np.ndim(out) == 0 else out


def _raw_volume(radius: float, wavelength: float, index: float, p: int, radial_width: float) -> float:
    kappa = evanescent_decay(index, wavelength)
    return 2 * math.pi * radius * transverse_extent(radius, kappa) * math.sqrt(p + 1) * radial_width


VOLUME_CALIBRATION = VOLUME_ANCHOR["volume"] / _raw_volume(
    VOLUME_ANCHOR["radius"],
    VOLUME_ANCHOR["wavelength"],
    VOLUME_ANCHOR["index"],
    VOLUME_ANCHOR["polar_order"],
    DEFAULT_RADIAL_WIDTH_UM,
)


def mode_volume(
    radius: float,
    wavelength: float,
    index: float,
    p: int,
    radial_width: float = DEFAULT_RADIAL_WIDTH_UM,
    volume: float | None = None,
) -> float:
    """Mode volume estimate in um^3.

    V = C_cal * 2 pi a * sqrt(a / kappa) * sqrt(p + 1) * radial_width, where
    C_cal (VOLUME_CALIBRATION) pins the VOLUME_ANCHOR case to 5000 um^3.
    Pass `volume` to bypass the estimator.
    """
    if volume is not None:
        if not volume > 0:
            raise ValueError("explicit mode volume must be positive")
        return float(volume)
    if radius <= 0 or wavelength <= 0 or radial_width <= 0 or p < 0:
        raise ValueError("mode volume inputs must be positive")
    return VOLUME_CALIBRATION * _raw_volume(radius, wavelength, index, p, radial_width)


def quality_factor(frequency: float, linewidth: float) -> float:
    """Q = nu / (Gamma/2pi); frequency in Hz, linewidth in GHz."""
    if frequency <= 0 or linewidth <= 0:
        raise ValueError("frequency and linewidth must be positive")
    return frequency / (linewidth * GHZ)


def linewidth_from_q(frequency: float, q: float) -> float:
    """Inverse of quality_factor; returns GHz."""
    if frequency <= 0 or q <= 0:
        raise ValueError("frequency and Q must be positive")
    return frequency / q / GHZ


def compose_linewidth(components: Sequence[tuple[str, float]]) -> LinewidthBudget:
    """Add independent loss channels into a total linewidth (GHz)."""
    comps = tuple((str(label), float(value)) for label, value in components)
    for label, value in comps:
        if value < 0 or math.isnan(value):
            raise ValueError(f"linewidth component {label!r} must be >= 0, got {value}")
    return LinewidthBudget(comps, math.fsum(v for _, v in comps))


def describe_mode(
    sphere: SphereGeometry,
    index: ModeIndex,
    wavelength: float,
    radial_width: float = DEFAULT_RADIAL_WIDTH_UM,
    volume: float | None = None,
    linewidth: float | None = None,
) -> ModeDescriptor:
    """Derive every structural quantity of one mode at `wavelength` (um)."""
    n_eff = effective_index(index.l, sphere.radius, wavelength)
    if n_eff > sphere.index:
        raise UnguidedModeError(
            f"N_eff = {n_eff:.6g} exceeds sphere index {sphere.index}; choose a smaller l"
        )
    kappa = evanescent_decay(n_eff, wavelength)
    return ModeDescriptor(
        index=index,
        wavelength=wavelength,
        frequency=wavelength_to_frequency(wavelength * UM),
        n_eff=n_eff,
        fsr=free_spectral_range(sphere.radius, n_eff),
        kappa=kappa,
        decay_length=decay_length_nm(kappa),
        transverse_extent=transverse_extent(sphere.radius, kappa),
        mode_volume=mode_volume(
            sphere.radius, wavelength, sphere.index, index.polar_order, radial_width, volume
        ),
        linewidth=linewidth,
    )


def auto_angular_number(sphere: SphereGeometry, wavelength: float) -> int:
    """Largest l whose effective index does not exceed the sphere index."""
    return math.floor(angular_number(sphere.radius, wavelength, sphere.index).unrounded)
