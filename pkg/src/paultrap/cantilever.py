"""Passive RF cooling of a micromechanical cantilever.

A conducting cantilever forms one plate of a capacitor inside a driven
RF resonant circuit.  The finite response time of the circuit phase
shifts the RF force relative to the cantilever motion, damping it (for
drive below resonance) and shifting its spring constant.  This module
evaluates the mode-shape integrals, force, damping and frequency shift,
the series equivalent circuit of the charged cantilever, and the
resulting effective temperature.
"""

import math
from dataclasses import dataclass

from scipy.integrate import quad
from scipy.optimize import brentq

from .core import EPSILON_0, HBAR, K_BOLTZMANN, ValidationError


class StaticInstabilityError(RuntimeError):
    """Spring-constant reduction kappa >= 1: the RF force pulls the
    cantilever in faster than the flexural restoring force."""


def mode_eigenvalue():
    """First clamped-free Euler-Bernoulli eigenvalue x = beta*L,
    the smallest positive root of cos(x) cosh(x) = -1."""
    return brentq(lambda x: math.cos(x) * math.cosh(x) + 1.0, 1.5, 2.2,
                  xtol=1e-12)


def mode_shape(h_c):
    """First flexural mode f(z) of a clamped-free beam of length h_c,
    normalized to unit displacement at the free end (f(h_c) = 1)."""
    k = mode_eigenvalue() / h_c
    kl = mode_eigenvalue()
    sigma = (math.cosh(kl) + math.cos(kl)) / (math.sinh(kl) + math.sin(kl))

    def raw(z):
        kz = k * z
        return (math.cosh(kz) - math.cos(kz)
                - sigma * (math.sinh(kz) - math.sin(kz)))

    tip = raw(h_c)

    def f(z):
        return raw(z) / tip

    return f


def mode_integrals(h_c, h):
    """Mode-shape integrals over the RF-electrode overlap region.

    Returns (xi', xi'', xi_c'') where xi' and xi'' average f and f^2
    over the overlap [h_c - h, h_c] nearest the free end, and xi_c''
    averages f^2 over the whole beam (the effective-mass factor, 0.250
    for a rectangular beam).
    """
    if not 0 < h <= h_c:
        raise ValidationError(f"overlap must satisfy 0 < h <= h_c, got h={h}")
    f = mode_shape(h_c)
    xi_p = quad(f, h_c - h, h_c, epsabs=1e-10, epsrel=1e-8)[0] / h
    xi_pp = quad(lambda z: f(z) ** 2, h_c - h, h_c,
                 epsabs=1e-10, epsrel=1e-8)[0] / h
    xi_c = quad(lambda z: f(z) ** 2, 0.0, h_c,
                epsabs=1e-10, epsrel=1e-8)[0] / h_c
    return xi_p, xi_pp, xi_c


@dataclass(frozen=True)
class CantileverDevice:
    """Cantilever geometry and mechanics; derived quantities filled in."""

    h_c: float            # length, m
    s: float              # thickness, m
    w: float              # width, m
    rho: float            # density, kg/m^3
    d0: float             # equilibrium gap to the RF electrode, m
    h: float              # RF-electrode overlap length, m
    omega_c: float        # flexural mode frequency, rad/s
    q_c_mech: float       # mechanical quality factor
    xi_prime: float = None
    xi_dprime: float = None
    xi_c_dprime: float = None
    effective_mass: float = None

    def __post_init__(self):
        for name in ("h_c", "s", "w", "rho", "d0", "h", "omega_c", "q_c_mech"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")
        xi_p, xi_pp, xi_c = mode_integrals(self.h_c, self.h)
        object.__setattr__(self, "xi_prime", xi_p)
        object.__setattr__(self, "xi_dprime", xi_pp)
        object.__setattr__(self, "xi_c_dprime", xi_c)
        object.__setattr__(self, "effective_mass",
                           self.rho * xi_c * self.w * self.h_c * self.s)

    @property
    def gamma_mech(self):
        """Intrinsic damping rate omega_c / Q_c, rad/s."""
        return self.omega_c / self.q_c_mech


@dataclass(frozen=True)
class RfCircuit:
    """Resonant RF circuit: L0, C0 in parallel with the coupling C_c."""

    l0: float
    c0: float
    c_c: float
    omega0: float
    q_rf: float

    def __post_init__(self):
        if min(self.l0, self.c0, self.c_c, self.omega0, self.q_rf) <= 0:
            raise ValidationError("circuit parameters must be positive")
        w_check = 1.0 / math.sqrt(self.l0 * (self.c0 + self.c_c))
        if abs(w_check - self.omega0) > 1e-6 * self.omega0:
            raise ValidationError("inconsistent circuit: "
                                  "omega0 != 1/sqrt(L0 (C0 + Cc))")

    @property
    def gamma(self):
        """RF energy damping rate Omega0 / Q_RF, rad/s."""
        return self.omega0 / self.q_rf


def circuit_from_components(l0, c0, c_c, q_rf):
    omega0 = 1.0 / math.sqrt(l0 * (c0 + c_c))
    return RfCircuit(l0=l0, c0=c0, c_c=c_c, omega0=omega0, q_rf=q_rf)


def circuit_from_resonance(l0, omega0, c_c, q_rf):
    """Back out C0 from the measured resonance frequency."""
    c_total = 1.0 / (omega0 ** 2 * l0)
    if c_total <= c_c:
        raise ValidationError("resonance implies a negative C0")
    return RfCircuit(l0=l0, c0=c_total - c_c, c_c=c_c, omega0=omega0, q_rf=q_rf)


def parallel_plate_capacitance(width, overlap, gap):
    """C_c = eps0 w h / d of the cantilever-electrode capacitor."""
    if min(width, overlap, gap) <= 0:
        raise ValidationError("capacitor dimensions must be positive")
    return EPSILON_0 * width * overlap / gap


def lorentzian(delta_omega, omega0, q_rf):
    """Resonator power response L = 1 / (1 + (2 Q_RF dW / W0)^2)."""
    x = 2.0 * q_rf * delta_omega / omega0
    return 1.0 / (1.0 + x * x)


def rf_force(c_c, v_rf, gap):
    """Time-averaged attractive RF force F = C_c V_RF^2 / (4 d)."""
    if gap <= 0:
        raise ValidationError("gap must be positive")
    return c_c * v_rf ** 2 / (4.0 * gap)


def v_max_squared_from_power(power, circuit):
    """On-resonance squared RF amplitude for a given input power.

    Uses V_max^2 = 2 P (Q_RF Omega0 L0), the matched parallel-resonator
    relation; the source this reproduces never states its coupling
    convention, so absolute damping-per-watt numbers inherit a
    tens-of-percent uncertainty from this choice.
    """
    if power < 0:
        raise ValidationError("power must be >= 0")
    return 2.0 * power * circuit.q_rf * circuit.omega0 * circuit.l0


@dataclass(frozen=True)
class DampingResult:
    gamma_prime: float      # RF-induced damping rate, rad/s
    kappa: float            # fractional spring-constant reduction
    omega_shifted: float    # omega_c sqrt(1 - kappa), rad/s
    phase: float            # force phase lag omega_c * tau, rad


def damping_and_shift(device, circuit, v_max_squared, delta_omega):
    """RF-induced damping Gamma' and spring softening kappa.

    delta_omega = Omega0 - Omega_RF > 0 gives damping (cooling);
    detuning below resonance drives the cantilever (Gamma' < 0).
    Raises :class:`StaticInstabilityError` when kappa >= 1.
    """
    m = device.effective_mass
    d0 = device.d0
    cc, c0 = circuit.c_c, circuit.c0
    gam = circuit.gamma
    lor = lorentzian(delta_omega, circuit.omega0, circuit.q_rf)
    tau = 4.0 * lor / gam
    phase = device.omega_c * tau
    xi_p2 = device.xi_prime ** 2

    kappa = (cc * v_max_squared * lor / (2.0 * m * device.omega_c ** 2 * d0 ** 2)
             * (device.xi_dprime
                + 2.0 * xi_p2 * circuit.q_rf * delta_omega * lor / gam
                * cc / (cc + c0)))
    gamma_prime = (circuit.q_rf * v_max_squared * cc ** 2
                   / (m * device.omega_c * d0 ** 2 * (cc + c0))
                   * xi_p2 * delta_omega * lor ** 2 / gam * math.sin(phase))
    if kappa >= 1.0:
        raise StaticInstabilityError(
            f"kappa = {kappa:.3f} >= 1: static pull-in, no restoring force")
    omega_shifted = device.omega_c * math.sqrt(1.0 - kappa)
    return DampingResult(gamma_prime=gamma_prime, kappa=kappa,
                         omega_shifted=omega_shifted, phase=phase)


@dataclass(frozen=True)
class EquivalentCircuit:
    """Series-circuit picture of the biased cantilever."""

    l_eq: float
    c_eq: float
    r_eq: float
    r_rf: float


def equivalent_circuit(device, q_charge, gamma_prime=0.0):
    """Series equivalent circuit of the charged cantilever.

    L_eq = m d0^2 / (q_c xi')^2, C_eq = 1/(w_c^2 L_eq), R_eq = L_eq Gamma
    (intrinsic damping) and R_RF = L_eq Gamma' (RF-induced damping).
    """
    if q_charge == 0:
        raise ValidationError("cantilever charge must be nonzero")
    l_eq = device.effective_mass * device.d0 ** 2 / (q_charge * device.xi_prime) ** 2
    return EquivalentCircuit(l_eq=l_eq,
                             c_eq=1.0 / (device.omega_c ** 2 * l_eq),
                             r_eq=l_eq * device.gamma_mech,
                             r_rf=l_eq * gamma_prime)


def charge_from_equivalent_inductance(device, l_eq):
    """Invert L_eq = m d0^2/(q_c xi')^2 for the average cantilever charge."""
    if l_eq <= 0:
        raise ValidationError("L_eq must be positive")
    return math.sqrt(device.effective_mass * device.d0 ** 2 / l_eq) / device.xi_prime


def effective_temperature(noise_voltages, resistances):
    """Cantilever effective temperature from the equivalent circuit.

    T_eff = sum(e_n^2) / (4 k_B (R_eq + R_RF + R_s)) with noise_voltages
    the squared noise spectral densities (V^2/Hz) of the thermal, source
    and RF terms, and resistances the corresponding (R_eq, R_RF, R_s).
    """
    e_sq = sum(noise_voltages)
    r_total = sum(resistances)
    if r_total <= 0:
        raise ValidationError("total damping resistance must be positive")
    if e_sq < 0:
        raise ValidationError("noise powers must be >= 0")
    return e_sq / (4.0 * K_BOLTZMANN * r_total)


def thermal_noise_voltage_sq(temperature, r_eq):
    """Johnson form of the cantilever's intrinsic thermal noise, V^2/Hz."""
    return 4.0 * K_BOLTZMANN * temperature * r_eq


def ground_state_ratio(t_c, omega0, q_rf, q_c):
    """Heating-to-cooling rate ratio R = 2 k_B T_c Q_RF / (hbar W0 Q_c).

    R << 1 is the condition for ground-state cooling in the resolved
    sideband limit.
    """
    if min(omega0, q_rf, q_c) <= 0:
        raise ValidationError("omega0, Q_RF, Q_c must be positive")
    if t_c < 0:
        raise ValidationError("temperature must be >= 0")
    return 2.0 * K_BOLTZMANN * t_c * q_rf / (HBAR * omega0 * q_c)
