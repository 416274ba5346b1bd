"""Analytic electrostatics for planar (surface-electrode) trap models.

Electrodes are unions of axis-aligned rectangles in the z = 0 plane,
embedded in an infinite grounded plane with zero-width gaps.  The basis
potential of a rectangle held at 1 V is its solid angle at the field
point divided by 2*pi; it has a closed form built from four arctangent
corner terms, and the electric field follows analytically.  Potentials
and fields for arbitrary electrode voltages are linear superpositions of
these one-volt basis solutions.

Also provides the ideal linear-quadrupole potential used as a
cross-validation oracle, the pseudopotential map, and JSON/CSV I/O.
"""

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (ELEMENTARY_CHARGE, TWO_PI, RfDrive, ValidationError,
                   mhz_to_angular, angular_to_mhz)

GEOMETRY_SCHEMA = "paultrap-kit/1"

ROLE_RF = "RF"
ROLE_DC = "DC"


def _as_point(point):
    p = np.asarray(point, dtype=float)
    if p.shape != (3,):
        raise ValidationError(f"point must be a 3-vector, got shape {p.shape}")
    return p


def _require_above_plane(z):
    if np.any(z <= 0):
        raise ValidationError("field point must lie strictly above the "
                              "electrode plane (z > 0)")


@dataclass(frozen=True)
class PlanarElectrode:
    """One electrode: a union of axis-aligned rectangles in the z=0 plane.

    Rectangles are (x1, y1, x2, y2) tuples in meters with x1 < x2 and
    y1 < y2.
    """

    label: str
    role: str
    rects: tuple

    def __post_init__(self):
        if self.role not in (ROLE_RF, ROLE_DC):
            raise ValidationError(f"electrode role must be RF or DC, got {self.role!r}")
        if not self.rects:
            raise ValidationError(f"electrode {self.label!r} has no rectangles")
        norm = []
        for r in self.rects:
            x1, y1, x2, y2 = (float(v) for v in r)
            if not (x1 < x2 and y1 < y2):
                raise ValidationError(
                    f"degenerate rectangle {r} on electrode {self.label!r}: "
                    "need x1 < x2 and y1 < y2")
            norm.append((x1, y1, x2, y2))
        object.__setattr__(self, "rects", tuple(norm))


def _rects_overlap(a, b):
    # open-interior overlap test; shared edges are allowed
    ax1, ay1, ax2, ay2 = a
    bx1, by1, bx2, by2 = b
    return ax1 < bx2 and bx1 < ax2 and ay1 < by2 and by1 < ay2


@dataclass(frozen=True)
class PlanarTrapModel:
    """A planar trap: electrodes, RF drive, and DC voltage assignments.

    DC electrodes not named in ``dc_voltages`` sit at 0 V.  Everything
    is immutable; sampling functions are pure.
    """

    electrodes: tuple
    drive: RfDrive
    dc_voltages: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "electrodes", tuple(self.electrodes))
        labels = [e.label for e in self.electrodes]
        if len(set(labels)) != len(labels):
            raise ValidationError("electrode labels must be unique")
        if not any(e.role == ROLE_RF for e in self.electrodes):
            raise ValidationError("model needs at least one RF electrode")
        dc_labels = {e.label for e in self.electrodes if e.role == ROLE_DC}
        for name in self.dc_voltages:
            if name not in dc_labels:
                raise ValidationError(f"dc_voltages names unknown DC electrode {name!r}")
        all_rects = [(e.label, r) for e in self.electrodes for r in e.rects]
        for i in range(len(all_rects)):
            for j in range(i + 1, len(all_rects)):
                la, ra = all_rects[i]
                lb, rb = all_rects[j]
                if la != lb and _rects_overlap(ra, rb):
                    raise ValidationError(
                        f"electrodes {la!r} and {lb!r} have overlapping rectangles")
        object.__setattr__(self, "dc_voltages",
                           {k: float(v) for k, v in self.dc_voltages.items()})

    def dc_labels(self):
        return [e.label for e in self.electrodes if e.role == ROLE_DC]

    def with_dc_voltages(self, dc_voltages):
        return PlanarTrapModel(self.electrodes, self.drive, dict(dc_voltages))

    # -- one-volt basis solutions -------------------------------------

    def potential_basis(self, point, label):
        """Potential (per volt) of the named electrode at ``point``."""
        e = self._electrode(label)
        pts = np.atleast_2d(np.asarray(point, dtype=float))
        out = _rects_potential(pts, e.rects)
        return float(out[0]) if np.shape(point) == (3,) else out

    def field_basis(self, point, label):
        """Electric field (V/m per volt) of the named electrode at ``point``."""
        e = self._electrode(label)
        pts = np.atleast_2d(np.asarray(point, dtype=float))
        out = _rects_field(pts, e.rects)
        return out[0] if np.shape(point) == (3,) else out

    def _electrode(self, label):
        for e in self.electrodes:
            if e.label == label:
                return e
        raise ValidationError(f"no electrode named {label!r}")

    # -- assembled solutions ------------------------------------------

    def potential_static(self, point):
        pts = np.atleast_2d(np.asarray(point, dtype=float))
        total = np.zeros(pts.shape[0])
        for e in self.electrodes:
            if e.role != ROLE_DC:
                continue
            v = self.dc_voltages.get(e.label, 0.0)
            if v != 0.0:
                total += v * _rects_potential(pts, e.rects)
        return float(total[0]) if np.shape(point) == (3,) else total

    def field_static(self, point):
        pts = np.atleast_2d(np.asarray(point, dtype=float))
        total = np.zeros((pts.shape[0], 3))
        for e in self.electrodes:
            if e.role != ROLE_DC:
                continue
            v = self.dc_voltages.get(e.label, 0.0)
            if v != 0.0:
                total += v * _rects_field(pts, e.rects)
        return total[0] if np.shape(point) == (3,) else total

    def potential_rf_basis(self, point):
        """Potential for 1 V on every RF electrode, 0 V elsewhere."""
        pts = np.atleast_2d(np.asarray(point, dtype=float))
        total = np.zeros(pts.shape[0])
        for e in self.electrodes:
            if e.role == ROLE_RF:
                total += _rects_potential(pts, e.rects)
        return float(total[0]) if np.shape(point) == (3,) else total

    def field_rf_basis(self, point):
        """Field for 1 V on every RF electrode, 0 V elsewhere (V/m per V)."""
        pts = np.atleast_2d(np.asarray(point, dtype=float))
        total = np.zeros((pts.shape[0], 3))
        for e in self.electrodes:
            if e.role == ROLE_RF:
                total += _rects_field(pts, e.rects)
        return total[0] if np.shape(point) == (3,) else total


@dataclass(frozen=True)
class FieldSample:
    """Potential (V), field (V/m) and field gradient (V/m^2) at a point.

    ``gradient[i, j]`` is dE_i/dx_j; it is symmetric (curl-free field)
    and traceless (Laplace) up to numerical tolerance.
    """

    potential: float
    e_field: np.ndarray
    gradient: np.ndarray


# ---------------------------------------------------------------------
# rectangle basis solution
# ---------------------------------------------------------------------

def rect_basis_potential(point, rect):
    """Potential per volt of a single rectangle in a grounded plane.

    The value equals the solid angle subtended by the rectangle at the
    field point, divided by 2*pi.  It is 1 on the plate as z -> 0+, 0 on
    the surrounding ground plane, and decays to 0 far away.

    Parameters
    ----------
    point : 3-vector (m), z > 0 strictly.
    rect : (x1, y1, x2, y2) rectangle in the z = 0 plane (m).
    """
    p = _as_point(point)
    _require_above_plane(p[2])
    return float(_rects_potential(p[None, :], [tuple(map(float, rect))])[0])


def rect_basis_field(point, rect):
    """Electric field (V/m per volt) of a single grounded-plane rectangle."""
    p = _as_point(point)
    _require_above_plane(p[2])
    return _rects_field(p[None, :], [tuple(map(float, rect))])[0]


def _rects_potential(points, rects):
    """Vectorized basis potential for a union of rectangles. points: (N,3).

    Corner terms are grouped two at a time so that mirror-image
    geometries evaluate to exactly mirrored values in floating point.
    """
    x, y, z = points[:, 0], points[:, 1], points[:, 2]
    _require_above_plane(z)
    total = np.zeros_like(x)
    for (x1, y1, x2, y2) in rects:
        u1, u2 = x1 - x, x2 - x
        v1, v2 = y1 - y, y2 - y

        def g(u, v):
            r = np.sqrt(u * u + v * v + z * z)
            return np.arctan((u * v) / (z * r))

        total += (g(u2, v2) - g(u1, v2)) - (g(u2, v1) - g(u1, v1))
    return total / TWO_PI


def _rects_field(points, rects):
    """Vectorized E = -grad(phi) for a union of rectangles. points: (N,3).

    Same corner grouping as :func:`_rects_potential`, keeping the field
    exactly (anti)symmetric under mirror reflections of the geometry.
    """
    x, y, z = points[:, 0], points[:, 1], points[:, 2]
    _require_above_plane(z)
    ex = np.zeros_like(x)
    ey = np.zeros_like(x)
    ez = np.zeros_like(x)
    for (x1, y1, x2, y2) in rects:
        u1, u2 = x1 - x, x2 - x
        v1, v2 = y1 - y, y2 - y

        def r_of(u, v):
            return np.sqrt(u * u + v * v + z * z)

        # d/du atan(uv/(zr)) = z v / (r (u^2+z^2)) and du/dx = -1;
        # E = -grad(phi)
        def ex_pair(v):
            return (v / (r_of(u2, v) * (u2 * u2 + z * z))
                    - v / (r_of(u1, v) * (u1 * u1 + z * z)))

        def ey_pair(u):
            return (u / (r_of(u, v2) * (v2 * v2 + z * z))
                    - u / (r_of(u, v1) * (v1 * v1 + z * z)))

        def ez_term(u, v):
            r2 = u * u + v * v + z * z
            return (u * v * (r2 + z * z)
                    / (np.sqrt(r2) * (u * u + z * z) * (v * v + z * z)))

        ex += z * (ex_pair(v2) - ex_pair(v1))
        ey += z * (ey_pair(u2) - ey_pair(u1))
        ez += (ez_term(u2, v2) - ez_term(u1, v2)) - (ez_term(u2, v1)
                                                     - ez_term(u1, v1))
    return np.stack([ex, ey, ez], axis=1) / TWO_PI


# ---------------------------------------------------------------------
# numerical derivatives (Richardson-extrapolated central differences)
# ---------------------------------------------------------------------

def gradient_step(point):
    """Default differentiation step: 1e-6 of the height above the plane."""
    z = float(np.asarray(point, dtype=float)[2])
    return max(1e-6 * abs(z), 1e-12)


def jacobian_of_field(field_fn, point, h=None):
    """(dE_i/dx_j) of a vector field by Richardson-extrapolated central
    differences of the (analytic) field function."""
    p = _as_point(point)
    if h is None:
        h = gradient_step(p)
    jac = np.empty((3, 3))
    for j in range(3):
        step = np.zeros(3)
        step[j] = h
        d1 = (np.asarray(field_fn(p + step)) - np.asarray(field_fn(p - step))) / (2 * h)
        step[j] = h / 2
        d2 = (np.asarray(field_fn(p + step)) - np.asarray(field_fn(p - step))) / h
        jac[:, j] = (4.0 * d2 - d1) / 3.0
    return jac


def hessian_of_scalar(f, point, h):
    """Symmetric 3x3 Hessian of a scalar function, Richardson extrapolated."""
    p = _as_point(point)

    def second(hh):
        # stencil terms are grouped so that mirror-image inputs produce
        # exactly mirrored results in floating point
        out = np.empty((3, 3))
        f0 = f(p)
        for i in range(3):
            ei = np.zeros(3)
            ei[i] = hh
            out[i, i] = ((f(p + ei) + f(p - ei)) - 2.0 * f0) / (hh * hh)
        for i in range(3):
            for j in range(i + 1, 3):
                ei = np.zeros(3)
                ej = np.zeros(3)
                ei[i] = hh
                ej[j] = hh
                out[i, j] = out[j, i] = (
                    (f(p + ei + ej) + f(p - ei - ej))
                    - (f(p + ei - ej) + f(p - ei + ej))
                ) / (4.0 * hh * hh)
        return out

    return (4.0 * second(h / 2) - second(h)) / 3.0


# ---------------------------------------------------------------------
# assembled samples
# ---------------------------------------------------------------------

def sample_static(model, point):
    """Sample the DC (control) potential, field and gradient at a point."""
    p = _as_point(point)
    _require_above_plane(p[2])
    return FieldSample(potential=model.potential_static(p),
                       e_field=np.asarray(model.field_static(p), dtype=float),
                       gradient=jacobian_of_field(model.field_static, p))


def sample_rf_basis(model, point):
    """Sample the 1 V RF basis solution (potential, field, gradient)."""
    p = _as_point(point)
    _require_above_plane(p[2])
    return FieldSample(potential=model.potential_rf_basis(p),
                       e_field=np.asarray(model.field_rf_basis(p), dtype=float),
                       gradient=jacobian_of_field(model.field_rf_basis, p))


def pseudopotential_from_rf_field(species, omega_rf, e_amplitude):
    """Pseudopotential energy q^2 |E0|^2 / (4 m Omega^2) in joules.

    ``e_amplitude`` is the RF electric-field amplitude (V/m), scalar
    magnitude or 3-vector.
    """
    e2 = float(np.sum(np.square(e_amplitude)))
    return species.charge ** 2 * e2 / (4.0 * species.mass * omega_rf ** 2)


def pseudopotential(model, species, point):
    """Pseudopotential energy (J) of the model's RF drive at a point."""
    p = _as_point(point)
    e_basis = model.field_rf_basis(p)
    return pseudopotential_from_rf_field(
        species, model.drive.omega_rf, np.asarray(e_basis) * model.drive.v_rf)


def pseudopotential_ev(model, species, point):
    """Pseudopotential expressed in electron-volts."""
    return pseudopotential(model, species, point) / ELEMENTARY_CHARGE


# ---------------------------------------------------------------------
# ideal linear quadrupole (cross-validation oracle)
# ---------------------------------------------------------------------

def quadrupole_potential(r_scale, v0, vdc, point):
    """Instantaneous-amplitude potential of the ideal linear quadrupole.

    (1/2)(v0 + vdc)(1 + (x^2 - y^2)/R^2); the trap axis is z.  Used as a
    closed-form oracle against the planar-electrode machinery.
    """
    if not r_scale > 0:
        raise ValidationError(f"R must be positive, got {r_scale}")
    p = _as_point(point)
    v = v0 + vdc
    return 0.5 * v * (1.0 + (p[0] ** 2 - p[1] ** 2) / r_scale ** 2)


@dataclass(frozen=True)
class IdealQuadrupole:
    """Ideal linear-quadrupole trap model (radial plane x-y, axis z).

    Duck-type compatible with :class:`PlanarTrapModel` for the analysis
    routines: exposes ``drive``, RF basis potential/field and the static
    solution generated by a DC offset on the RF electrodes.
    """

    r_scale: float
    drive: RfDrive
    v_dc: float = 0.0

    def __post_init__(self):
        if not self.r_scale > 0:
            raise ValidationError(f"R must be positive, got {self.r_scale}")

    def potential_rf_basis(self, point):
        p = np.asarray(point, dtype=float)
        return 0.5 * (1.0 + (p[..., 0] ** 2 - p[..., 1] ** 2) / self.r_scale ** 2)

    def field_rf_basis(self, point):
        p = np.asarray(point, dtype=float)
        e = np.zeros_like(p)
        e[..., 0] = -p[..., 0] / self.r_scale ** 2
        e[..., 1] = p[..., 1] / self.r_scale ** 2
        return e

    def potential_static(self, point):
        return self.v_dc * self.potential_rf_basis(point)

    def field_static(self, point):
        return self.v_dc * self.field_rf_basis(point)


def quadrupole_secular_frequency(species, drive, r_scale):
    """Closed-form radial secular frequency q V0 / (sqrt(2) m Omega R^2)."""
    return (species.charge * drive.v_rf
            / (math.sqrt(2.0) * species.mass * drive.omega_rf * r_scale ** 2))


# ---------------------------------------------------------------------
# field maps
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class FieldMap:
    """Row-major lattice of potential/field/pseudopotential samples."""

    points: np.ndarray      # (N, 3) m
    phi_dc: np.ndarray      # (N,) V
    e_static: np.ndarray    # (N, 3) V/m
    phi_pp_ev: np.ndarray   # (N,) eV

    def to_csv(self, path_or_buf):
        """Write the map with header x,y,z,phi_dc,ex,ey,ez,phi_pp_ev.

        Coordinates are written in micrometers; a units comment line
        precedes the header.
        """
        own = isinstance(path_or_buf, (str, bytes))
        f = open(path_or_buf, "w") if own else path_or_buf
        try:
            f.write("# units: x,y,z um; phi_dc V; ex,ey,ez V/m; phi_pp_ev eV\n")
            f.write("x,y,z,phi_dc,ex,ey,ez,phi_pp_ev\n")
            for p, phi, e, pp in zip(self.points, self.phi_dc,
                                     self.e_static, self.phi_pp_ev):
                f.write("%.9g,%.9g,%.9g,%.12g,%.12g,%.12g,%.12g,%.12g\n"
                        % (p[0] * 1e6, p[1] * 1e6, p[2] * 1e6,
                           phi, e[0], e[1], e[2], pp))
        finally:
            if own:
                f.close()

    def to_csv_string(self):
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()


def field_map(model, species, xs, ys, zs):
    """Evaluate DC potential, static field and pseudopotential on a lattice.

    ``xs``, ``ys``, ``zs`` are 1-D coordinate arrays in meters; the
    lattice is their Cartesian product in row-major (x, y, z) order.
    All z must be > 0 and the grid nonempty.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    zs = np.atleast_1d(np.asarray(zs, dtype=float))
    if xs.size == 0 or ys.size == 0 or zs.size == 0:
        raise ValidationError("field map grid is empty")
    _require_above_plane(zs)
    gx, gy, gz = np.meshgrid(xs, ys, zs, indexing="ij")
    pts = np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=1)
    phi = model.potential_static(pts)
    e_static = model.field_static(pts)
    e_rf = model.field_rf_basis(pts) * model.drive.v_rf
    pp = (species.charge ** 2 * np.sum(e_rf * e_rf, axis=1)
          / (4.0 * species.mass * model.drive.omega_rf ** 2))
    return FieldMap(points=pts, phi_dc=np.asarray(phi, dtype=float),
                    e_static=np.asarray(e_static, dtype=float),
                    phi_pp_ev=pp / ELEMENTARY_CHARGE)


# ---------------------------------------------------------------------
# geometry JSON I/O (lengths in um, frequencies in MHz at the boundary)
# ---------------------------------------------------------------------

def model_from_dict(doc):
    """Build a PlanarTrapModel from the geometry JSON document schema."""
    unit = doc.get("length_unit", "um")
    if unit != "um":
        raise ValidationError(f"unsupported length_unit {unit!r} (expected 'um')")
    scale = 1e-6
    electrodes = []
    for e in doc.get("electrodes", []):
        rects = [tuple(scale * float(v) for v in r) for r in e["rects"]]
        electrodes.append(PlanarElectrode(label=e["label"], role=e["role"],
                                          rects=tuple(rects)))
    d = doc.get("drive", {})
    drive = RfDrive(omega_rf=mhz_to_angular(float(d["freq_mhz"])),
                    v_rf=float(d.get("v_rf", 0.0)),
                    phase_deg=float(d.get("phase_deg", 0.0)))
    return PlanarTrapModel(electrodes=tuple(electrodes), drive=drive,
                           dc_voltages=doc.get("dc_voltages", {}))


def model_to_dict(model):
    return {
        "schema": GEOMETRY_SCHEMA,
        "length_unit": "um",
        "electrodes": [
            {"label": e.label, "role": e.role,
             "rects": [[v * 1e6 for v in r] for r in e.rects]}
            for e in model.electrodes
        ],
        "drive": {"freq_mhz": angular_to_mhz(model.drive.omega_rf),
                  "v_rf": model.drive.v_rf,
                  "phase_deg": model.drive.phase_deg},
        "dc_voltages": dict(model.dc_voltages),
    }


def load_geometry(path):
    with open(path) as f:
        return model_from_dict(json.load(f))


def save_geometry(model, path):
    with open(path, "w") as f:
        json.dump(model_to_dict(model), f, indent=2, sort_keys=True)
        f.write("\n")
