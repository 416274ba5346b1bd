"""Electric-field-noise to motional-heating budget.

Converts voltage/field noise spectral densities into quanta/s heating
rates: direct S_E coupling, Johnson noise behind RC filters, the RF
resonator's filtered Johnson noise, RF amplitude-noise heating of the
axial and radial modes, and the stray field of charged exposed
dielectric.  All spectral densities are one-sided.

Relative RF noise convention: rates take r = S_En/E0^2 (1/Hz) as the
primitive input, i.e. the single-sideband noise PSD relative to carrier
power *after* any resonator attenuation.  The paper this reproduces
defines alpha^2 = 2 S_En/E0^2 in one place but its worked numbers follow
r = alpha^2 (with rates in 1/s); `relative_psd_from_dbc` implements the
dBc reading used by those numbers.  Only one sideband is counted unless
``two_sideband=True`` doubles the rate.
"""

import math
import warnings
from dataclasses import dataclass, field

from .core import HBAR, K_BOLTZMANN, ValidationError, db_power_ratio

DBM_REFERENCE_OHMS = 50.0


@dataclass(frozen=True)
class NoiseSpec:
    """A one-sided spectral density sample at a frequency.

    kind: 'voltage_psd' (V^2/Hz), 'field_psd' ((V/m)^2/Hz) or
    'relative_psd' (1/Hz).
    """

    kind: str
    value: float
    frequency: float     # rad/s

    def __post_init__(self):
        if self.kind not in ("voltage_psd", "field_psd", "relative_psd"):
            raise ValidationError(f"unknown noise kind {self.kind!r}")
        if self.value < 0:
            raise ValidationError("spectral density must be >= 0")


@dataclass(frozen=True)
class CouplingConstants:
    """Field-per-volt couplings of a trap zone.

    c_e: field at the ion for 1 V on a named control electrode, V/m.
    d_e: field at the ion for 1 V on the RF electrodes, V/m.
    de_dz: axial gradient of the axial RF basis field, V/m^2 per volt.
    """

    c_e: tuple
    d_e: tuple
    de_dz: float

    def __post_init__(self):
        for name in ("c_e", "d_e"):
            vec = tuple(float(v) for v in getattr(self, name))
            if len(vec) != 3 or not all(math.isfinite(v) for v in vec):
                raise ValidationError(f"{name} must be a finite 3-vector")
            object.__setattr__(self, name, vec)
        if not math.isfinite(self.de_dz):
            raise ValidationError("de_dz must be finite")


def couplings_from_model(model, point, electrode_label, axis=(1.0, 0.0, 0.0)):
    """Extract a zone's coupling constants from a planar trap model.

    c_e is the field at ``point`` for 1 V on ``electrode_label``, d_e
    the field for 1 V on the RF electrodes, and de_dz the gradient of
    the axial RF field component along the trap axis.  These are the
    numbers a heating budget needs once per zone.
    """
    import numpy as np

    from .fields import jacobian_of_field

    p = np.asarray(point, dtype=float)
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    c_e = np.asarray(model.field_basis(p, electrode_label), dtype=float)
    d_e = np.asarray(model.field_rf_basis(p), dtype=float)
    jac = jacobian_of_field(model.field_rf_basis, p)
    de_dz = float(a @ jac @ a)
    return CouplingConstants(c_e=tuple(c_e), d_e=tuple(d_e), de_dz=de_dz)


# ---------------------------------------------------------------------
# elementary conversions
# ---------------------------------------------------------------------

def heating_rate_from_se(species, omega, s_e):
    """Quanta/s from electric-field noise: Gamma = q^2 S_E(w) / (4 m hbar w)."""
    if not omega > 0:
        raise ValidationError("omega must be positive")
    if s_e < 0:
        raise ValidationError("S_E must be >= 0")
    return species.charge ** 2 * s_e / (4.0 * species.mass * HBAR * omega)


def se_from_heating_rate(species, omega, rate):
    """Inverse of :func:`heating_rate_from_se`."""
    if not omega > 0:
        raise ValidationError("omega must be positive")
    return rate * 4.0 * species.mass * HBAR * omega / species.charge ** 2


def johnson_voltage_psd(resistance, temperature):
    """One-sided Johnson voltage noise S_V = 4 k_B T R in V^2/Hz."""
    if resistance < 0 or temperature < 0:
        raise ValidationError("resistance and temperature must be >= 0")
    return 4.0 * K_BOLTZMANN * temperature * resistance


def rc_attenuation(omega, resistance, capacitance):
    """Low-pass power attenuation A_LP = 1 / (1 + (w R C)^2), in (0, 1].

    The attenuation *factor* quoted for filters (e.g. "240") is 1/A_LP.
    """
    x = omega * resistance * capacitance
    return 1.0 / (1.0 + x * x)


def resonator_filter_attenuation(omega, omega0, q_loaded):
    """Resonator line-shape power attenuation in dB (0 on resonance, < 0 off).

    P/Pmax = (1 + 4 Q_L^2 ((w - W0)/W0)^2)^-1.
    """
    if not omega0 > 0:
        raise ValidationError("omega0 must be positive")
    ratio = 1.0 + 4.0 * q_loaded ** 2 * ((omega - omega0) / omega0) ** 2
    return -10.0 * math.log10(ratio)


def resonator_johnson_psd(omega, omega0, q_loaded, r_parallel, temperature):
    """Johnson noise of the resonator's parallel resistance, filtered by
    its own line shape: S_V(w) = 4 k_B T R / (1 + 4 Q_L^2 ((w-W0)/W0)^2)."""
    s0 = johnson_voltage_psd(r_parallel, temperature)
    return s0 * db_power_ratio(resonator_filter_attenuation(omega, omega0,
                                                            q_loaded))


def dbm_per_hz(s_v, impedance=DBM_REFERENCE_OHMS):
    """Report a voltage PSD (V^2/Hz) as dBm/Hz into a reference impedance."""
    if s_v <= 0:
        raise ValidationError("need a positive PSD to express in dBm")
    return 10.0 * math.log10(s_v / impedance / 1e-3)


def relative_psd_from_dbc(dbc):
    """Single-sideband relative noise PSD r = 10^(dBc/10) in 1/Hz."""
    return db_power_ratio(dbc)


# ---------------------------------------------------------------------
# heating mechanisms
# ---------------------------------------------------------------------

def electrode_noise_heating(species, omega, s_v_at_source, coupling,
                            filter_rc=None, n_electrodes=1):
    """Heating from voltage noise on control electrodes, quanta/s.

    Gamma = n * q^2/(4 m hbar w) * S_V * C_E^2 * A_LP with C_E the
    field-per-volt coupling of one electrode (V/m per V) and A_LP the RC
    filter power attenuation (1 when ``filter_rc`` is None, meaning
    ``s_v_at_source`` is already the PSD at the trap).
    """
    if n_electrodes < 1:
        raise ValidationError("n_electrodes must be >= 1")
    a_lp = 1.0
    if filter_rc is not None:
        r, c = filter_rc
        a_lp = rc_attenuation(omega, r, c)
    s_e = s_v_at_source * a_lp * coupling ** 2
    return n_electrodes * heating_rate_from_se(species, omega, s_e)


def rfam_axial_heating(species, omega_z, omega_rf, e0_axial, de0_dz,
                       relative_psd, two_sideband=False):
    """Axial heating from RF amplitude noise, quanta/s.

    ndot = 1/(4 m hbar w_z) * [q^2/(m W^2) E0 dE0/dz]^2 * r with E0 and
    dE0/dz the axial RF field and gradient at the actual drive amplitude
    and r the relative noise PSD at W_RF +/- w_z after resonator
    filtering.  Requires a nonzero axial RF field: micromotion along z.
    """
    if not (omega_z > 0 and omega_rf > 0):
        raise ValidationError("frequencies must be positive")
    if relative_psd < 0:
        raise ValidationError("relative PSD must be >= 0")
    force = (species.charge ** 2 / (species.mass * omega_rf ** 2)
             * e0_axial * de0_dz)
    rate = force ** 2 * relative_psd / (4.0 * species.mass * HBAR * omega_z)
    return 2.0 * rate if two_sideband else rate


def rfam_radial_heating(species, omega_x, displacement, relative_psd,
                        two_sideband=False):
    """Radial heating from RF amplitude noise on a displaced ion, quanta/s.

    ndot = 1/(4 m hbar w_x) * [2 m w_x^2 x]^2 * r; vanishes for an ion
    sitting on the RF null (x = 0).
    """
    if not omega_x > 0:
        raise ValidationError("omega_x must be positive")
    if displacement < 0:
        raise ValidationError("displacement must be >= 0")
    if relative_psd < 0:
        raise ValidationError("relative PSD must be >= 0")
    force = 2.0 * species.mass * omega_x ** 2 * displacement
    rate = force ** 2 * relative_psd / (4.0 * species.mass * HBAR * omega_x)
    return 2.0 * rate if two_sideband else rate


def patch_field(v_s, strip_width, thickness, distance):
    """Vertical stray field of an exposed charged dielectric strip.

    E = (4 V_s / pi^2) (a / R^2) exp(-pi t / a) for a strip of width a at
    potential V_s recessed below electrodes of thickness t, seen at
    distance R.  Valid for R >> a and pi t >= a; warns outside that
    regime.
    """
    a, t, r = strip_width, thickness, distance
    if a <= 0 or r <= 0 or t < 0:
        raise ValidationError("geometry parameters must be positive")
    if r < 5.0 * a:
        warnings.warn(f"patch-field model assumes R >> a; R/a = {r / a:.2f}",
                      stacklevel=2)
    if math.pi * t < a:
        warnings.warn("patch-field model assumes pi t >= a; thin-electrode "
                      "result is an extrapolation", stacklevel=2)
    return (4.0 * v_s / math.pi ** 2) * (a / r ** 2) * math.exp(-math.pi * t / a)


# ---------------------------------------------------------------------
# itemized budget
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class ControlElectrodeNoise:
    """Voltage noise on control electrodes coupling through C_E."""

    label: str
    s_v: float                 # V^2/Hz at the source (or at trap if no filter)
    coupling: float            # V/m per volt
    n_electrodes: int = 1
    filter_rc: tuple = None    # (R, C) or None
    omega: float = None        # optional consistency check, rad/s

    def rate(self, species, omega):
        return electrode_noise_heating(species, omega, self.s_v, self.coupling,
                                       self.filter_rc, self.n_electrodes)

    def formula(self):
        return "n q^2/(4 m hbar w) S_V C_E^2 A_LP"


@dataclass(frozen=True)
class FilterJohnsonNoise:
    """Johnson noise of the RC-filter resistor, attenuated by its own filter."""

    label: str
    resistance: float
    capacitance: float
    temperature: float
    coupling: float            # V/m per volt
    n_electrodes: int = 1
    omega: float = None

    def rate(self, species, omega):
        s_v = johnson_voltage_psd(self.resistance, self.temperature)
        return electrode_noise_heating(
            species, omega, s_v, self.coupling,
            (self.resistance, self.capacitance), self.n_electrodes)

    def formula(self):
        return "n q^2/(4 m hbar w) 4kTR C_E^2 A_LP"


@dataclass(frozen=True)
class ResonatorJohnsonNoise:
    """Resonator Johnson noise at the secular frequency through D_E."""

    label: str
    omega0: float
    q_loaded: float
    r_parallel: float
    temperature: float
    coupling: float            # V/m per volt on the RF electrodes
    omega: float = None

    def rate(self, species, omega):
        s_v = resonator_johnson_psd(omega, self.omega0, self.q_loaded,
                                    self.r_parallel, self.temperature)
        return heating_rate_from_se(species, omega, s_v * self.coupling ** 2)

    def formula(self):
        return "q^2/(4 m hbar w) S_V(w) D_E^2"


@dataclass(frozen=True)
class RfAmAxialNoise:
    label: str
    omega_rf: float
    e0_axial: float            # V/m at drive amplitude
    de0_dz: float              # V/m^2 at drive amplitude
    relative_psd: float        # 1/Hz, after resonator attenuation
    two_sideband: bool = False
    omega: float = None

    def rate(self, species, omega):
        return rfam_axial_heating(species, omega, self.omega_rf, self.e0_axial,
                                  self.de0_dz, self.relative_psd,
                                  self.two_sideband)

    def formula(self):
        return "1/(4 m hbar w) [q^2/(m W^2) E0 dE0/dz]^2 r"


@dataclass(frozen=True)
class RfAmRadialNoise:
    label: str
    displacement: float        # m
    relative_psd: float        # 1/Hz, after resonator attenuation
    two_sideband: bool = False
    omega: float = None

    def rate(self, species, omega):
        return rfam_radial_heating(species, omega, self.displacement,
                                   self.relative_psd, self.two_sideband)

    def formula(self):
        return "1/(4 m hbar w) [2 m w^2 x]^2 r"


@dataclass(frozen=True)
class FieldNoise:
    """A direct electric-field PSD at the ion."""

    label: str
    s_e: float                 # (V/m)^2/Hz
    omega: float = None

    def rate(self, species, omega):
        return heating_rate_from_se(species, omega, self.s_e)

    def formula(self):
        return "q^2 S_E/(4 m hbar w)"


@dataclass(frozen=True)
class BudgetLine:
    label: str
    quanta_per_s: float
    s_e_equivalent: float      # (V/m)^2/Hz that reproduces the same rate
    formula: str


@dataclass(frozen=True)
class HeatingBudget:
    omega: float
    lines: tuple
    total_quanta_per_s: float

    def as_dict(self):
        return {
            "omega_rad_per_s": self.omega,
            "frequency_mhz": self.omega / (2.0 * math.pi * 1e6),
            "lines": [
                {"label": l.label, "quanta_per_s": l.quanta_per_s,
                 "quanta_per_ms": l.quanta_per_s / 1e3,
                 "s_e_equivalent_v2m2_per_hz": l.s_e_equivalent,
                 "formula": l.formula}
                for l in self.lines
            ],
            "total_quanta_per_s": self.total_quanta_per_s,
            "total_quanta_per_ms": self.total_quanta_per_s / 1e3,
        }

    def table(self):
        rows = ["%-34s %14s %18s" % ("mechanism", "quanta/s", "S_E equiv")]
        for l in self.lines:
            rows.append("%-34s %14.6g %18.6g" % (l.label, l.quanta_per_s,
                                                 l.s_e_equivalent))
        rows.append("%-34s %14.6g" % ("TOTAL", self.total_quanta_per_s))
        return "\n".join(rows)


def heating_budget(species, omega, sources):
    """Itemize heating mechanisms at one secular frequency.

    Every source computes quanta/s; each line also carries the S_E that
    would give the same rate through the direct conversion.  Sources
    that declare their own ``omega`` must agree with the budget's.
    """
    if not omega > 0:
        raise ValidationError("omega must be positive")
    lines = []
    for src in sources:
        src_omega = getattr(src, "omega", None)
        if src_omega is not None and not math.isclose(src_omega, omega,
                                                      rel_tol=1e-9):
            raise ValidationError(
                f"source {src.label!r} is specified at omega={src_omega}, "
                f"budget is at omega={omega}: mixed frequencies")
        rate = src.rate(species, omega)
        lines.append(BudgetLine(label=src.label, quanta_per_s=rate,
                                s_e_equivalent=se_from_heating_rate(
                                    species, omega, rate),
                                formula=src.formula()))
    total = sum(l.quanta_per_s for l in lines)
    return HeatingBudget(omega=omega, lines=tuple(lines),
                         total_quanta_per_s=total)
