"""Micromotion amplitudes, laser modulation index and sideband spectra.

Covers excess micromotion driven by stray static fields, intrinsic
micromotion from an RF phase imbalance between electrodes, and the
Bessel-sideband fluorescence spectrum seen by a Doppler probe laser in
the low intensity limit.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import jv

from .core import TWO_PI, ValidationError

BESSEL_SUM_TARGET = 1.0 - 1e-9
N_MAX_CAP = 64


@dataclass(frozen=True)
class MicromotionState:
    displacement: float       # x_d, m
    amplitude: float          # x_um, m
    beta: float
    geometry_angle_deg: float

    def __post_init__(self):
        if self.amplitude < 0 or self.beta < 0:
            raise ValidationError("micromotion amplitude and beta must be >= 0")


@dataclass(frozen=True)
class LineParams:
    """Transition linewidth, probe detuning scale and trap RF frequency."""

    gamma: float              # transition linewidth, rad/s
    omega_rf: float           # trap drive, rad/s
    wavelength: float         # probe laser wavelength, m

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValidationError("linewidth must be positive")
        if not self.wavelength > 0:
            raise ValidationError("wavelength must be positive")


def displacement_from_field(species, omega_r, e_dc):
    """Static displacement x_d = q E_dc / (m w_r^2) of the ion from the null."""
    if not omega_r > 0:
        raise ValidationError("omega_r must be positive")
    return species.charge * e_dc / (species.mass * omega_r ** 2)


def micromotion_amplitude(omega_r, omega_rf, x_d):
    """Excess micromotion amplitude x_um = sqrt(2) (w_r / Omega_RF) x_d."""
    if not omega_rf > 0:
        raise ValidationError("omega_rf must be positive")
    return math.sqrt(2.0) * (omega_r / omega_rf) * x_d


def modulation_index(wavelength, x_um, angle_deg=0.0):
    """Laser phase-modulation index beta = (2 pi / lambda) x_um cos(theta)."""
    if not wavelength > 0:
        raise ValidationError("wavelength must be positive")
    return TWO_PI / wavelength * x_um * math.cos(math.radians(angle_deg))


def amplitude_for_index(wavelength, beta, angle_deg=0.0):
    """Micromotion amplitude that produces a given modulation index."""
    c = math.cos(math.radians(angle_deg))
    if abs(c) < 1e-9:
        raise ValidationError("beam perpendicular to micromotion: any amplitude "
                              "gives beta = 0")
    return beta * wavelength / (TWO_PI * c)


def default_n_max(beta):
    """Smallest sideband order with sum of J_n^2 above 1 - 1e-9, capped."""
    for n in range(1, N_MAX_CAP + 1):
        if _bessel_weight(beta, n) > BESSEL_SUM_TARGET:
            return n
    return N_MAX_CAP


def _bessel_weight(beta, n_max):
    orders = np.arange(-n_max, n_max + 1)
    return float(np.sum(jv(orders, beta) ** 2))


def fluorescence_spectrum(line, beta, n_max=None):
    """Fluorescence rate vs detuning for an ion with micromotion index beta.

    Returns a vectorized function of the detuning Delta (rad/s)
    proportional to the steady-state excited population

        sum_n J_n(beta)^2 / ((Delta + n Omega_RF)^2 + (gamma/2)^2),

    normalized so the beta = 0 on-resonance value is 1.  ``n_max`` must
    keep the Bessel weight sum above 1 - 1e-9 (the default picks the
    smallest adequate order).
    """
    if beta < 0:
        raise ValidationError("beta must be >= 0")
    if n_max is None:
        n_max = default_n_max(beta)
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    if _bessel_weight(beta, n_max) <= BESSEL_SUM_TARGET:
        raise ValidationError(
            f"n_max={n_max} truncates the sideband sum below {BESSEL_SUM_TARGET} "
            f"for beta={beta}; need at least {default_n_max(beta)}")
    orders = np.arange(-n_max, n_max + 1)
    weights = jv(orders, beta) ** 2
    half_gamma_sq = (line.gamma / 2.0) ** 2

    def rate(detuning):
        d = np.asarray(detuning, dtype=float)
        terms = weights / ((d[..., None] + orders * line.omega_rf) ** 2
                           + half_gamma_sq)
        out = half_gamma_sq * np.sum(terms, axis=-1)
        return out if out.shape else float(out)

    return rate


def sideband_equal_beta(tol=1e-6):
    """Modulation index where carrier and first sideband are equal,
    i.e. the first positive root of J0(b)^2 = J1(b)^2, by bisection."""
    def f(b):
        return jv(0, b) ** 2 - jv(1, b) ** 2

    lo, hi = 1.0, 2.0
    if not (f(lo) > 0 > f(hi)):
        raise RuntimeError("bisection bracket lost")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def phase_from_path_difference(delta_d, omega_rf):
    """RF phase difference (deg) from a feed path length difference.

    phi = 360 deg * delta_d / lambda_RF with lambda_RF = c / f_RF.
    """
    from .core import SPEED_OF_LIGHT
    if not omega_rf > 0:
        raise ValidationError("omega_rf must be positive")
    lambda_rf = SPEED_OF_LIGHT / (omega_rf / TWO_PI)
    return 360.0 * delta_d / lambda_rf


def phase_imbalance_micromotion(species, e0, phi_deg, omega_rf):
    """Micromotion amplitude from an RF phase imbalance phi between electrodes.

    With field amplitude E0 at the ion from each RF electrode (V/m, at
    the actual drive amplitude), a small phase difference phi leaves a
    residual drive field E0 * phi and the ion responds with amplitude
    |x0| = q E0 phi / (m Omega^2).  Warns when phi exceeds 0.2 rad, where
    the small-phase expansion degrades.
    """
    phi = math.radians(phi_deg)
    if abs(phi) > 0.2:
        warnings.warn(f"phase imbalance {phi_deg} deg exceeds the small-angle "
                      "range (0.2 rad); result is an extrapolation",
                      stacklevel=2)
    return abs(species.charge * e0 * phi) / (species.mass * omega_rf ** 2)


def rc_phase_shift(z_series, z_shunt):
    """Magnitude and phase (deg) of a complex impedance divider.

    The divider output is V1 = V0 * Z_shunt / (Z_series + Z_shunt) =
    V0 * Z * exp(i phi); returns (Z, phi in degrees).
    """
    z_series = complex(z_series)
    z_shunt = complex(z_shunt)
    total = z_series + z_shunt
    if total == 0:
        raise ValidationError("divider impedances sum to zero")
    h = z_shunt / total
    return abs(h), math.degrees(math.atan2(h.imag, h.real))
