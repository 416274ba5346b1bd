"""Physical constants, unit conversions, ion species and RF drive parameters.

All internal computation is in SI with angular frequencies (rad/s).
MHz, amu, dB and friends are accepted only at I/O boundaries through the
conversion helpers below.
"""

import math
import os
from dataclasses import dataclass

# CODATA 2018 values, SI
EPSILON_0 = 8.8541878128e-12    # vacuum permittivity, F/m
MU_0 = 1.25663706212e-6         # vacuum permeability, H/m
HBAR = 1.054571817e-34          # reduced Planck constant, J s
K_BOLTZMANN = 1.380649e-23      # Boltzmann constant, J/K (exact)
ELEMENTARY_CHARGE = 1.602176634e-19  # elementary charge, C (exact)
ATOMIC_MASS_UNIT = 1.66053906660e-27  # unified atomic mass unit, kg
SPEED_OF_LIGHT = 2.99792458e8   # m/s (exact)

TWO_PI = 2.0 * math.pi


class ValidationError(ValueError):
    """Bad input values (violated precondition or malformed data)."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to converge.

    ``last_iterate`` carries the best estimate reached before giving up.
    """

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


@dataclass(frozen=True)
class Constants:
    """Immutable bundle of the physical constants used by the toolkit."""

    epsilon0: float = EPSILON_0
    mu0: float = MU_0
    hbar: float = HBAR
    k_boltzmann: float = K_BOLTZMANN
    elementary_charge: float = ELEMENTARY_CHARGE
    amu: float = ATOMIC_MASS_UNIT
    speed_of_light: float = SPEED_OF_LIGHT


CONSTANTS = Constants()


@dataclass(frozen=True)
class IonSpecies:
    """A trapped-ion species: mass in kg, charge in C, display label."""

    mass: float
    charge: float
    label: str = ""

    def __post_init__(self):
        if not self.mass > 0:
            raise ValidationError(f"ion mass must be positive, got {self.mass}")
        if self.charge == 0:
            raise ValidationError("ion charge must be nonzero")


@dataclass(frozen=True)
class RfDrive:
    """RF drive: angular frequency (rad/s), amplitude (V), phase offset (deg)."""

    omega_rf: float
    v_rf: float
    phase_deg: float = 0.0

    def __post_init__(self):
        if not self.omega_rf > 0:
            raise ValidationError(f"omega_rf must be positive, got {self.omega_rf}")
        if self.v_rf < 0:
            raise ValidationError(f"v_rf must be nonnegative, got {self.v_rf}")


def make_species(mass_amu, charge_e, label=""):
    """Build an :class:`IonSpecies` from atomic mass units and charge number.

    Parameters
    ----------
    mass_amu : float
        Ion mass in unified atomic mass units, > 0.
    charge_e : int
        Charge in units of the elementary charge, nonzero (sign kept).
    label : str
        Display name, e.g. ``"24Mg+"``.
    """
    if not mass_amu > 0:
        raise ValidationError(f"mass must be positive, got {mass_amu} amu")
    if charge_e == 0:
        raise ValidationError("charge number must be nonzero")
    return IonSpecies(mass=mass_amu * ATOMIC_MASS_UNIT,
                      charge=charge_e * ELEMENTARY_CHARGE,
                      label=label)


# A few species that appear throughout the worked examples.
MG24 = make_species(24, +1, "24Mg+")
BE9 = make_species(9, +1, "9Be+")


def db_power_ratio(db):
    """Convert a power level in dB to a linear power ratio, 10^(dB/10)."""
    return 10.0 ** (db / 10.0)


def power_ratio_db(ratio):
    """Inverse of :func:`db_power_ratio`; requires ratio > 0."""
    if ratio <= 0:
        raise ValidationError(f"power ratio must be positive, got {ratio}")
    return 10.0 * math.log10(ratio)


def amu_to_kg(mass_amu):
    return mass_amu * ATOMIC_MASS_UNIT


def kg_to_amu(mass_kg):
    return mass_kg / ATOMIC_MASS_UNIT


def mhz_to_angular(f_mhz):
    """Ordinary frequency in MHz -> angular frequency in rad/s."""
    return TWO_PI * f_mhz * 1e6


def angular_to_mhz(omega):
    """Angular frequency in rad/s -> ordinary frequency in MHz."""
    return omega / (TWO_PI * 1e6)


def um_to_m(x_um):
    return x_um * 1e-6


def m_to_um(x_m):
    return x_m * 1e6


def max_threads():
    """Internal-parallelism cap from the PAULTRAP_THREADS env var (>= 1)."""
    raw = os.environ.get("PAULTRAP_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return os.cpu_count() or 1
    return max(1, n)
