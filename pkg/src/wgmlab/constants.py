"""Physical constants (CODATA 2018) and the two unit helpers everything else uses.

All values are SI. Module-level names are treated as read-only.
"""

import math
from typing import Final

# Speed of light in vacuum (m/s), exact
C: Final[float] = 299_792_458.0

# Planck constant (J s), exact
H: Final[float] = 6.62607015e-34

# Reduced Planck constant (J s)
HBAR: Final[float] = H / (2 * math.pi)

# Vacuum permittivity (F/m)
EPSILON_0: Final[float] = 8.8541878128e-12

# Elementary charge (C), exact
E_CHARGE: Final[float] = 1.602176634e-19

# Bohr radius (m)
BOHR_RADIUS: Final[float] = 5.29177210903e-11

# Atomic unit of electric dipole moment, e * a0 (C m)
DIPOLE_AU: Final[float] = E_CHARGE * BOHR_RADIUS

# unit scale factors
UM: Final[float] = 1e-6
NM: Final[float] = 1e-9
PS: Final[float] = 1e-12
GHZ: Final[float] = 1e9
UW: Final[float] = 1e-6


def _check_wavelength(wavelength: float) -> None:
    if not wavelength > 0:
        raise ValueError(f"wavelength must be positive, got {wavelength!r}")


def wavelength_to_frequency(wavelength: float) -> float:
    """Vacuum wavelength (m) to frequency (Hz)."""
    _check_wavelength(wavelength)
    return C / wavelength


def frequency_to_wavelength(frequency: float) -> float:
    if not frequency > 0:
        raise ValueError(f"frequency must be positive, got {frequency!r}")
    return C / frequency


def photon_energy(wavelength: float) -> float:
    """Photon energy (J) at vacuum wavelength `wavelength` (m)."""
    _check_wavelength(wavelength)
    return H * C / wavelength


def joule_to_ev(energy: float) -> float:
    return energy / E_CHARGE
