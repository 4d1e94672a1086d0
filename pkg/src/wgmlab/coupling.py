"""Dielectric bodies in the evanescent field of a WGM.

Covers the evanescent-wave Fresnel coefficient, the resulting resonance
shift and broadening, exponential gap scaling, cavity loading, and
synthetic alignment scans of a square mesa across the mode.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import find_peaks
from scipy.special import erf, erfc

from .modes import LinewidthBudget, ModeDescriptor, SphereGeometry, compose_linewidth, polar_intensity, quality_factor

DEFAULT_GAMMA_CAL_GHZ = 10.0
_GL_NODES = 128


class UnsupportedPolarizationError(NotImplementedError):
    pass


class InconsistentRatioError(ValueError):
    pass


@dataclass(frozen=True)
class DielectricMedium:
    name: str
    index: complex

    def __post_init__(self):
        n = complex(self.index)
        if not n.real > 0:
            raise ValueError(f"{self.name}: real part of index must be positive")
        if n.imag < 0:
            raise ValueError(f"{self.name}: imaginary part of index must be >= 0 (absorption)")
        object.__setattr__(self, "index", n)


@dataclass(frozen=True)
class MesaPerturber:
    medium: DielectricMedium
    width: float = 4.0  # um, square side
    height: float = 200.0  # nm
    gap: float = 0.0  # nm
    offset_y: float = 0.0  # um
    offset_z: float = 0.0  # um

    def __post_init__(self):
        if self.width < 0 or self.height < 0:
            raise ValueError("mesa width and height must be >= 0")
        if self.gap < 0:
            raise ValueError(f"gap must be >= 0 nm, got {self.gap}")

    def is_tall(self, kappa: float) -> bool:
        """Height exceeds the evanescent decay length (small-area sample picture holds)."""
        return self.height * 1e-3 * kappa > 1.0


@dataclass(frozen=True)
class PerturbationResult:
    r: complex
    shift: float  # GHz, magnitude
    broadening: float  # GHz
    ideal_ratio: float

    @property
    def shift_sign(self) -> int:
        """Sign of Re(r); only magnitudes are observable in the scans."""
        return 1 if self.r.real > 0 else (-1 if self.r.real < 0 else 0)


@dataclass(frozen=True)
class LoadingReport:
    budget: LinewidthBudget
    q: float
    critical: bool
    imbalance: float


@dataclass(frozen=True)
class ScanProfile:
    axis: str
    positions: np.ndarray  # um
    coupling: np.ndarray
    broadening: np.ndarray  # GHz
    shift: np.ndarray  # GHz

    def rows(self):
        return zip(self.positions, self.coupling, self.broadening, self.shift)

    @property
    def fwhm(self) -> float:
        return profile_fwhm(self)

    @property
    def multi_peak(self) -> bool:
        return count_peaks(self.coupling) > 1


def _sqrt_branch(z: complex) -> complex:
    # principal root has Re >= 0; force +i on the negative real axis
    z = complex(z)
    if z.imag == 0.0:
        z = complex(z.real, 0.0)
    return cmath.sqrt(z)


def fresnel_evanescent_te(n_eff: float, n_d: complex) -> complex:
    """Fresnel coefficient of the evanescent TE wave on a dielectric of index n_d."""
    if not n_eff > 1:
        raise ValueError(f"N_eff must exceed 1 for an evanescent wave, got {n_eff!r}")
    a = 1j * math.sqrt(n_eff**2 - 1)
    b = _sqrt_branch(complex(n_d) ** 2 - n_eff**2)
    return (a - b) / (a + b)


def fresnel_evanescent(n_eff: float, n_d: complex, polarization: str = "TE") -> complex:
    if polarization == "TE":
        return fresnel_evanescent_te(n_eff, n_d)
    raise UnsupportedPolarizationError(
        f"evanescent Fresnel coefficient is only available for TE modes, not {polarization!r}"
    )


def gap_factor(kappa: float, delta_gap: float) -> float:
    """Intensity attenuation exp(-2 kappa dg); kappa in 1/um, gap in nm."""
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    return math.exp(-2.0 * kappa * delta_gap * 1e-3)


def gap_scaling(value, kappa: float, delta_gap: float):
    return value * gap_factor(kappa, delta_gap)


def shift_and_broadening(r: complex, gamma_cal: float, kappa: float, gap: float) -> PerturbationResult:
    """Resonance shift and broadening (GHz) induced by a half-space at `gap` nm.

    gamma_cal is the broadening a zero-gap half-space with Im(r) = 1 would give.
    """
    if gamma_cal < 0:
        raise ValueError("gamma_cal must be >= 0")
    r = complex(r)
    scale = gamma_cal * gap_factor(kappa, gap)
    ratio = r.imag / abs(r.real) if r.real != 0 else math.inf
    return PerturbationResult(r=r, shift=scale * abs(r.real), broadening=scale * r.imag, ideal_ratio=ratio)


def scattering_efficiency(observed_ratio: float, ideal_ratio: float) -> float:
    """Fraction of the sample-induced loss that is absorption rather than edge scattering."""
    if not observed_ratio > 0 or not ideal_ratio > 0:
        raise ValueError("ratios must be positive")
    if observed_ratio > ideal_ratio:
        raise InconsistentRatioError(
            f"observed ratio {observed_ratio} exceeds the ideal {ideal_ratio}: no extra loss to attribute"
        )
    return observed_ratio / ideal_ratio


def _box_gaussian(y: np.ndarray, width: float, alpha: float) -> np.ndarray:
    """Integral of exp(-alpha s^2) over [|y| - w/2, |y| + w/2] (up to a constant factor)."""
    y = np.abs(y)
    if width == 0:
        return np.exp(-alpha * y**2)
    s = math.sqrt(alpha)
    lo = s * (y - width / 2)
    hi = s * (y + width / 2)
    # erfc form keeps precision in the far tails
    out = np.where(lo > 0, erfc(lo) - erfc(hi), erf(hi) - erf(lo))
    return out * (math.sqrt(math.pi) / (2 * s)) / width


@lru_cache(maxsize=8)
def _gl(n: int):
    return np.polynomial.legendre.leggauss(n)


def _box_polar(z: np.ndarray, width: float, l: int, p: int, radius: float, alpha: float) -> np.ndarray:
    """Box-averaged polar intensity times the parabolic evanescent envelope."""
    z = np.abs(np.asarray(z, dtype=float))

    def f(s):
        return polar_intensity(l, p, s, radius) * np.exp(-alpha * s**2)

    if width == 0:
        return f(z)
    x, w = _gl(_GL_NODES)
    half = width / 2
    nodes = z[:, None] + half * x[None, :]
    return (f(nodes) * w[None, :]).sum(axis=1) / 2


def _polar_peak(width, l, p, radius, alpha) -> float:
    extent = radius / math.sqrt(l) * (math.sqrt(2 * p + 1) + 4) + width
    grid = np.linspace(0.0, extent, 4001)
    vals = _box_polar(grid, width, l, p, radius, alpha)
    return float(vals.max())


def mesa_scan_profile(
    mesa: MesaPerturber,
    sphere: SphereGeometry,
    mode: ModeDescriptor,
    axis: str,
    positions,
    gamma_cal: float = DEFAULT_GAMMA_CAL_GHZ,
) -> ScanProfile:
    """Synthesize coupling, broadening and shift traces as the mesa is moved along y or z.

    Positions are mesa-centre coordinates in um with the field maximum at the
    origin; the other coordinate stays at the mesa's offset. Along y the
    intensity is the Gaussian exp(-kappa y^2 / a) convolved with the mesa
    width; along z the polar Hermite-Gauss profile multiplies that envelope.
    """
    if axis not in ("y", "z"):
        raise ValueError(f"axis must be 'y' or 'z', got {axis!r}")
    pos = np.asarray(positions, dtype=float)
    if pos.ndim != 1 or pos.size == 0:
        raise ValueError("scan grid is empty")
    if np.any(np.diff(pos) <= 0):
        raise ValueError("scan grid must be strictly increasing")
    r = fresnel_evanescent(mode.n_eff, mesa.medium.index, mode.index.polarization)
    if not mesa.is_tall(mode.kappa):
        warnings.warn(
            f"mesa height {mesa.height} nm is below the decay length {mode.decay_length:.1f} nm; "
            "small-area approximation is questionable",
            stacklevel=2,
        )
    alpha = mode.kappa / sphere.radius
    l, p = mode.index.l, mode.index.polar_order
    w = mesa.width

    y_peak = _box_gaussian(np.zeros(1), w, alpha)[0]
    z_peak = _polar_peak(w, l, p, sphere.radius, alpha)

    def along_y(y):
        return _box_gaussian(y, w, alpha) / y_peak

    def along_z(z):
        return _box_polar(z, w, l, p, sphere.radius, alpha) / z_peak

    if axis == "y":
        coupling = along_y(pos) * along_z(np.array([mesa.offset_z]))[0]
    else:
        coupling = along_z(pos) * along_y(np.array([mesa.offset_y]))[0]

    pert = shift_and_broadening(r, gamma_cal, mode.kappa, mesa.gap)
    return ScanProfile(
        axis=axis,
        positions=pos,
        coupling=coupling,
        broadening=coupling * pert.broadening,
        shift=coupling * pert.shift,
    )


def count_peaks(values) -> int:
    v = np.asarray(values, dtype=float)
    if v.size == 0 or v.max() <= 0:
        return 0
    padded = np.concatenate(([-np.inf], v, [-np.inf]))
    peaks, _ = find_peaks(padded, prominence=1e-6 * v.max())
    return len(peaks)


def fwhm(x, y) -> float:
    """Half-maximum support width of y(x), linearly interpolated at both outer crossings."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.size == 0 or not np.any(y > 0):
        raise ValueError("profile is empty or all zero")
    half = y.max() / 2
    above = np.nonzero(y >= half)[0]
    i, j = above[0], above[-1]
    if i == 0 or j == y.size - 1:
        raise ValueError("profile does not drop below half maximum inside the grid")

    def cross(k0, k1):
        return x[k0] + (half - y[k0]) * (x[k1] - x[k0]) / (y[k1] - y[k0])

    return float(cross(j, j + 1) - cross(i - 1, i))


def profile_fwhm(profile: ScanProfile) -> float:
    """FWHM (um) of the coupling trace; for multi-peak traces this is the outer support width."""
    return fwhm(profile.positions, profile.coupling)


def gaussian_fwhm(radius: float, kappa: float) -> float:
    """Closed-form FWHM of exp(-kappa y^2 / a)."""
    return 2 * math.sqrt(radius * math.log(2) / kappa)


def _loss(x) -> float:
    return x.broadening if isinstance(x, PerturbationResult) else float(x)


def loading_report(intrinsic: float, prism, sample, frequency: float, tolerance: float = 0.1) -> LoadingReport:
    """Total linewidth, loaded Q and near-critical-coupling flag.

    prism and sample may be PerturbationResults (their broadening is used)
    or plain linewidths in GHz.
    """
    budget = compose_linewidth([("intrinsic", intrinsic), ("prism", _loss(prism)), ("sample", _loss(sample))])
    if budget.total <= 0:
        raise ValueError("total linewidth must be positive")
    other = budget.component("intrinsic") + budget.component("sample")
    imbalance = abs(budget.component("prism") - other) / budget.total
    return LoadingReport(
        budget=budget,
        q=quality_factor(frequency, budget.total),
        critical=imbalance < tolerance,
        imbalance=imbalance,
    )
