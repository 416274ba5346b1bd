"""Lumped-circuit models of the RF step-up resonator.

A resonator is modeled as a parallel RLC with W0^2 = 1/(LC) and loaded
quality factor Q_L = R C W0.  Attaching a lossy trap chip lowers Q_L;
the chip's effective parallel resistance and dissipation follow from
the parallel-resistor decomposition.
"""

import math
from dataclasses import dataclass

from .core import MU_0, ValidationError


@dataclass(frozen=True)
class RlcModel:
    """Parallel RLC resonator: L (H), C (F), R (ohm), w0 (rad/s), Q."""

    l: float
    c: float
    r_parallel: float
    omega0: float
    q: float

    def __post_init__(self):
        if min(self.l, self.c, self.r_parallel, self.omega0, self.q) <= 0:
            raise ValidationError("RLC parameters must be positive")
        w_check = 1.0 / math.sqrt(self.l * self.c)
        if abs(w_check - self.omega0) > 1e-9 * self.omega0:
            raise ValidationError("inconsistent RLC: omega0^2 != 1/(LC)")
        q_check = self.r_parallel * self.c * self.omega0
        if abs(q_check - self.q) > 1e-9 * self.q:
            raise ValidationError("inconsistent RLC: Q != R C omega0")


def rlc_from_measurement(omega0, q, inductance):
    """Parallel RLC parameters from resonance frequency, loaded Q and L.

    C = 1/(W0^2 L), R = Q/(C W0).
    """
    if omega0 <= 0 or inductance <= 0:
        raise ValidationError("omega0 and L must be positive")
    if q <= 0:
        raise ValidationError("Q must be positive")
    c = 1.0 / (omega0 ** 2 * inductance)
    r = q / (c * omega0)
    return RlcModel(l=inductance, c=c, r_parallel=r, omega0=omega0, q=q)


@dataclass(frozen=True)
class ChipLossResult:
    r_chip: float          # effective parallel resistance of the chip, ohm
    dissipated: float      # power burned in the chip at the given drive, W
    r_combined: float      # R of resonator and chip in parallel, ohm


def chip_loss(model_before, q_after, v_rf):
    """Infer trap-chip loss from the Q drop when the chip is attached.

    With the resonant frequency unchanged, the combined parallel
    resistance is R_p = Q_after/(C W0); the chip resistance R_t follows
    from 1/R_p = 1/R + 1/R_t and dissipates P = V^2/(2 R_t) at drive
    amplitude V.
    """
    if not 0 < q_after < model_before.q:
        raise ValidationError(
            f"chip must lower the Q: need 0 < q_after < {model_before.q}, "
            f"got {q_after}")
    r_p = q_after / (model_before.c * model_before.omega0)
    r_t = model_before.r_parallel * r_p / (model_before.r_parallel - r_p)
    return ChipLossResult(r_chip=r_t, dissipated=0.5 * v_rf ** 2 / r_t,
                          r_combined=r_p)


def loaded_q(q0, kappa):
    """Loaded quality factor Q_L = Q_0 / (1 + kappa).

    kappa = N^2 R_s / R is the source coupling coefficient; kappa = 1 is
    the impedance-matched case with Q_L = Q_0/2.
    """
    if q0 <= 0:
        raise ValidationError("Q0 must be positive")
    if kappa < 0:
        raise ValidationError("kappa must be >= 0")
    return q0 / (1.0 + kappa)


def coupling_from_q(q0, q_loaded):
    """Invert :func:`loaded_q`: kappa = Q0/Q_L - 1."""
    if not 0 < q_loaded <= q0:
        raise ValidationError("need 0 < Q_L <= Q0")
    return q0 / q_loaded - 1.0


def q_from_linewidth(omega0, delta_omega_fwhm):
    """Q_L = w0 / FWHM from a reflected-power linewidth measurement."""
    if delta_omega_fwhm <= 0:
        raise ValidationError("linewidth must be positive")
    if omega0 <= 0:
        raise ValidationError("omega0 must be positive")
    return omega0 / delta_omega_fwhm


def lead_inductance(length, wire_radius, plane_distance):
    """Rough inductance of a straight lead above a conducting plane.

    L = mu0 * l * (ln(2 d / a) + 1/4).  Note the prefactor: the common
    textbook form for a wire over a ground plane carries mu0/(2 pi);
    this helper keeps the mu0 convention of the estimate it reproduces
    (10 cm of 0.5 mm wire 1 cm above a plane -> 495 nH), so treat
    results as order-of-magnitude.
    """
    if min(length, wire_radius, plane_distance) <= 0:
        raise ValidationError("lead geometry must be positive")
    return MU_0 * length * (math.log(2.0 * plane_distance / wire_radius) + 0.25)
