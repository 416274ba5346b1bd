"""Trap characterization: RF null, secular frequencies, depth, stability.

Works on any model object exposing the small field interface of
:mod:`paultrap.fields` (``drive``, ``potential_static``, ``field_static``,
``potential_rf_basis``, ``field_rf_basis``); both ``PlanarTrapModel``
and ``IdealQuadrupole`` qualify.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import (ELEMENTARY_CHARGE, EPSILON_0, ConvergenceError,
                   ValidationError)
from .fields import hessian_of_scalar, jacobian_of_field, pseudopotential


class NotConfiningError(RuntimeError):
    """Total-potential Hessian is not positive semidefinite at equilibrium."""

    def __init__(self, message, eigenvalues=None):
        super().__init__(message)
        self.eigenvalues = eigenvalues


@dataclass(frozen=True)
class NullResult:
    """Location of an RF-field minimum and the residual |E| there.

    A residual well above numerical noise flags intrinsic micromotion:
    the RF field has no true zero near this point.
    """

    point: np.ndarray
    residual: float        # |E_rf| at the minimum, V/m per volt of drive
    iterations: int


@dataclass(frozen=True)
class SecularResult:
    null_point: np.ndarray   # equilibrium of q*Phi_dc + Phi_pp, m
    omegas: np.ndarray       # angular secular frequencies, sorted ascending
    axes: np.ndarray         # axes[:, i] is the unit eigenvector for omegas[i]
    tilt_deg: float          # None when the radial pair is degenerate


@dataclass(frozen=True)
class MathieuParams:
    a: float
    q: float


@dataclass(frozen=True)
class StabilityResult:
    stable: bool
    beta: float              # Floquet characteristic exponent (nan if unstable)
    beta_smallq: float       # sqrt(a + q^2/2) small-parameter approximation
    monodromy_trace: float


@dataclass(frozen=True)
class TrapDepthResult:
    depth_ev: float
    escape_point: np.ndarray
    barrier_direction: np.ndarray


def total_potential_energy(model, species, point):
    """q*Phi_dc + Phi_pp at a point, in joules."""
    p = np.asarray(point, dtype=float)
    return (species.charge * model.potential_static(p)
            + pseudopotential(model, species, p))


def _potential_gradient(model, species, point):
    """Gradient of the total potential energy (J/m)."""
    p = np.asarray(point, dtype=float)
    e_dc = np.asarray(model.field_static(p), dtype=float)
    e_rf = np.asarray(model.field_rf_basis(p), dtype=float)
    jac = jacobian_of_field(model.field_rf_basis, p)
    c = (species.charge * model.drive.v_rf) ** 2 / (2.0 * species.mass
                                                    * model.drive.omega_rf ** 2)
    return -species.charge * e_dc + c * (jac.T @ e_rf)


def _length_scale(point):
    return max(abs(float(point[2])), 1e-6)


# ---------------------------------------------------------------------
# RF null
# ---------------------------------------------------------------------

def find_rf_null(model, guess, max_iter=200, rel_tol=1e-12):
    """Locate a local minimum of |E_rf| near ``guess``.

    Damped Gauss-Newton on the squared RF basis field, with a
    coordinate-descent fallback; raises :class:`ConvergenceError`
    carrying the last iterate if neither converges.
    """
    x = np.asarray(guess, dtype=float).copy()
    if x[2] <= 0:
        raise ValidationError("initial guess must lie above the electrode plane")
    lam = 1e-3
    e = np.asarray(model.field_rf_basis(x), dtype=float)
    norm = float(np.linalg.norm(e))
    e_scale = max(norm, 1e-300)
    for it in range(1, max_iter + 1):
        scale = _length_scale(x)
        jac = jacobian_of_field(model.field_rf_basis, x)
        a = jac.T @ jac
        g = jac.T @ e
        reg = lam * max(np.trace(a) / 3.0, 1e-300)
        try:
            step = np.linalg.solve(a + reg * np.eye(3), -g)
        except np.linalg.LinAlgError:
            step = -g / max(np.linalg.norm(g), 1e-300) * 0.01 * scale
        limit = 0.5 * scale
        step_len = np.linalg.norm(step)
        if step_len > limit:
            step *= limit / step_len
            step_len = limit
        x_new = x + step
        if x_new[2] <= 0:
            x_new[2] = 0.5 * x[2]
        e_new = np.asarray(model.field_rf_basis(x_new), dtype=float)
        norm_new = float(np.linalg.norm(e_new))
        if norm_new <= norm:
            improved = norm - norm_new
            x, e, norm = x_new, e_new, norm_new
            e_scale = max(e_scale, norm)
            lam = max(lam / 3.0, 1e-12)
            if (norm <= rel_tol * e_scale
                    or improved <= rel_tol * max(norm, 1e-300)
                    or step_len < 1e-12 * scale):
                return NullResult(point=x, residual=norm, iterations=it)
        else:
            lam *= 10.0
            if lam > 1e12:
                break
    x, norm, ok = _coordinate_descent(model, x, scale)
    if ok:
        return NullResult(point=x, residual=norm, iterations=max_iter)
    raise ConvergenceError(
        f"find_rf_null did not converge within {max_iter} iterations "
        f"(residual {norm:.3e} V/m per volt)", last_iterate=x)


def _coordinate_descent(model, x, scale, sweeps=40):
    from scipy.optimize import minimize_scalar

    def f1(x_):
        e = model.field_rf_basis(x_)
        return float(np.dot(e, e))

    x = x.copy()
    prev = f1(x)
    for _ in range(sweeps):
        for axis in range(3):
            def along(t, axis=axis):
                x_try = x.copy()
                x_try[axis] += t
                if x_try[2] <= 0:
                    return 1e300
                return f1(x_try)

            res = minimize_scalar(along, bounds=(-0.3 * scale, 0.3 * scale),
                                  method="bounded",
                                  options={"xatol": 1e-16 * scale})
            x[axis] += res.x
        cur = f1(x)
        if prev - cur <= 1e-12 * max(cur, 1e-300):
            return x, math.sqrt(cur), True
        prev = cur
    return x, math.sqrt(prev), False


def find_equilibrium(model, species, guess, max_iter=200):
    """Equilibrium of the total potential q*Phi_dc + Phi_pp near ``guess``."""
    x = np.asarray(guess, dtype=float).copy()
    scale = _length_scale(x)
    for it in range(1, max_iter + 1):
        g = _potential_gradient(model, species, x)
        h = hessian_of_scalar(lambda p: total_potential_energy(model, species, p),
                              x, 1e-3 * _length_scale(x))
        step, *_ = np.linalg.lstsq(h, -g, rcond=None)
        step_len = np.linalg.norm(step)
        limit = 0.2 * scale
        if step_len > limit:
            step *= limit / step_len
        # backtrack if the step increases the energy
        u0 = total_potential_energy(model, species, x)
        alpha = 1.0
        for _ in range(30):
            x_try = x + alpha * step
            if x_try[2] > 0 and total_potential_energy(model, species, x_try) <= u0:
                break
            alpha *= 0.5
        x = x + alpha * step
        if np.linalg.norm(alpha * step) < 1e-12 * scale:
            return x
    raise ConvergenceError("equilibrium search did not converge", last_iterate=x)


# ---------------------------------------------------------------------
# secular frequencies
# ---------------------------------------------------------------------

def secular_frequencies(model, species, guess=None, degenerate_rel_tol=1e-6):
    """Secular frequencies and principal axes at the trap equilibrium.

    Diagonalizes the Hessian of the total potential energy; omega_i =
    sqrt(lambda_i / m).  Raises :class:`NotConfiningError` when any
    eigenvalue is significantly negative.  A zero eigenvalue (an
    unconfined direction, e.g. the axis of an ideal quadrupole) is
    reported as omega = 0.

    The tilt angle is the rotation of the radial principal axes in the
    plane transverse to the weakest (axial) direction, measured from the
    projection of the vertical; ``None`` when the radial pair is
    degenerate.
    """
    if guess is None:
        if not hasattr(model, "electrodes"):
            raise ValidationError(
                "no starting point: pass guess= for models without an "
                "electrode layout to scan")
        start = default_start_point(model)
        guess = find_rf_null(model, start).point
    x0 = find_equilibrium(model, species, guess)
    h = hessian_of_scalar(lambda p: total_potential_energy(model, species, p),
                          x0, 1e-3 * _length_scale(x0))
    h = 0.5 * (h + h.T)
    lam, vec = np.linalg.eigh(h)
    tol = 1e-9 * float(np.max(np.abs(lam))) if np.max(np.abs(lam)) > 0 else 0.0
    if np.any(lam < -tol):
        raise NotConfiningError(
            f"total potential is not confining at {x0}: Hessian eigenvalues {lam}",
            eigenvalues=lam)
    lam = np.clip(lam, 0.0, None)
    omegas = np.sqrt(lam / species.mass)
    order = np.argsort(omegas)
    omegas = omegas[order]
    axes = vec[:, order]
    tilt = _radial_tilt_deg(omegas, axes, degenerate_rel_tol)
    return SecularResult(null_point=x0, omegas=omegas, axes=axes, tilt_deg=tilt)


def _radial_tilt_deg(omegas, axes, degenerate_rel_tol):
    w1, w2 = omegas[1], omegas[2]
    if w2 <= 0:
        return None
    if abs(w2 - w1) <= degenerate_rel_tol * w2:
        return None
    axial = axes[:, 0]
    zhat = np.array([0.0, 0.0, 1.0])
    vref = zhat - np.dot(zhat, axial) * axial
    if np.linalg.norm(vref) < 1e-6:
        xhat = np.array([1.0, 0.0, 0.0])
        vref = xhat - np.dot(xhat, axial) * axial
    vref /= np.linalg.norm(vref)
    href = np.cross(axial, vref)
    # radial axis closest to the reference (vertical) direction
    r1, r2 = axes[:, 1], axes[:, 2]
    r = r1 if abs(np.dot(r1, vref)) >= abs(np.dot(r2, vref)) else r2
    ang = math.degrees(math.atan2(np.dot(r, href), np.dot(r, vref)))
    if ang > 90.0:
        ang -= 180.0
    elif ang <= -90.0:
        ang += 180.0
    return ang


def default_start_point(model):
    """Heuristic starting point: coarse |E_rf| scan over the transverse
    plane above the RF structure's lengthwise center.

    The scan extent follows the transverse size of the RF electrodes
    (the ion-height scale for a linear surface trap), not their length.
    """
    rf_rects = [r for e in model.electrodes if e.role == "RF" for r in e.rects]
    if not rf_rects:
        raise ValidationError("model has no RF electrodes")
    x_lo = min(r[0] for r in rf_rects)
    x_hi = max(r[2] for r in rf_rects)
    y_lo = min(r[1] for r in rf_rects)
    y_hi = max(r[3] for r in rf_rects)
    cx = 0.5 * (x_lo + x_hi)
    span = min(y_hi - y_lo, x_hi - x_lo)
    ys = np.linspace(y_lo, y_hi, 81)
    zs = np.linspace(0.05 * span, 2.0 * span, 81)
    gy, gz = np.meshgrid(ys, zs, indexing="ij")
    pts = np.stack([np.full(gy.size, cx), gy.ravel(), gz.ravel()], axis=1)
    e = model.field_rf_basis(pts)
    mags = np.linalg.norm(e, axis=1)
    return pts[int(np.argmin(mags))]


# ---------------------------------------------------------------------
# trap depth
# ---------------------------------------------------------------------

def trap_depth(model, species, guess=None, box_scale=10.0, n_ray=400):
    """Depth of the trapping well in eV and the escape saddle point.

    Marches outward from the equilibrium along the weak principal
    directions (and the vertical) to bracket the lowest barrier, then
    refines the saddle with Newton iterations on the potential gradient.
    The search box extends ``box_scale`` times the ion height in every
    direction.
    """
    from .core import ELEMENTARY_CHARGE

    sec = secular_frequencies(model, species, guess=guess)
    x0 = sec.null_point
    u0 = total_potential_energy(model, species, x0)
    height = _length_scale(x0)
    box = box_scale * height

    def u(p):
        p = np.asarray(p, dtype=float)
        if p[2] <= 0:
            return np.inf
        return total_potential_energy(model, species, p)

    directions = [sec.axes[:, 0], -sec.axes[:, 0],
                  sec.axes[:, 1], -sec.axes[:, 1],
                  sec.axes[:, 2], -sec.axes[:, 2],
                  np.array([0.0, 0.0, 1.0])]
    best = None
    for d in directions:
        d = d / np.linalg.norm(d)
        ts = np.linspace(box / n_ray, box, n_ray)
        prev = u0
        for t in ts:
            val = u(x0 + t * d)
            if not np.isfinite(val):
                break
            if val < prev:  # passed a maximum along this ray
                t_lo = max(t - 2 * box / n_ray, box / n_ray / 2)
                t_hi = t
                saddle_t = _ray_max(u, x0, d, t_lo, t_hi)
                cand_p = x0 + saddle_t * d
                cand_u = u(cand_p)
                if best is None or cand_u < best[0]:
                    best = (cand_u, cand_p, d)
                break
            prev = val
    if best is None:
        raise ConvergenceError(
            f"no escape saddle found within a box of {box:.3e} m "
            f"({box_scale} x ion height {height:.3e} m) around {x0}")
    cand_u, cand_p, d = best
    refined = _refine_saddle(model, species, cand_p, height, box, x0)
    if refined is not None and u0 < refined[0] < cand_u + abs(cand_u) * 1e-6:
        cand_u, cand_p = refined
    depth_j = cand_u - u0
    return TrapDepthResult(depth_ev=depth_j / ELEMENTARY_CHARGE,
                           escape_point=cand_p, barrier_direction=d)


def _ray_max(u, x0, d, t_lo, t_hi):
    from scipy.optimize import minimize_scalar
    res = minimize_scalar(lambda t: -u(x0 + t * d), bounds=(t_lo, t_hi),
                          method="bounded", options={"xatol": 1e-12})
    return res.x


def _refine_saddle(model, species, p, height, box, x0):
    x = np.asarray(p, dtype=float).copy()
    for _ in range(60):
        g = _potential_gradient(model, species, x)
        h = hessian_of_scalar(
            lambda q_: total_potential_energy(model, species, q_),
            x, 1e-3 * _length_scale(x))
        try:
            step = np.linalg.solve(h, -g)
        except np.linalg.LinAlgError:
            return None
        lim = 0.05 * height
        if np.linalg.norm(step) > lim:
            step *= lim / np.linalg.norm(step)
        x = x + step
        if x[2] <= 0 or np.linalg.norm(x - x0) > 1.5 * box:
            return None
        if np.linalg.norm(step) < 1e-12 * height:
            return total_potential_energy(model, species, x), x
    return None


# ---------------------------------------------------------------------
# Mathieu stability
# ---------------------------------------------------------------------

def mathieu_params(r_scale, v0, vdc, drive, species):
    """Mathieu a and q for the ideal quadrupole of distance scale R.

    a = 4 q_ion V_dc / (m Omega^2 R^2), q = 2 q_ion V_0 / (m Omega^2 R^2).
    """
    if not r_scale > 0:
        raise ValidationError(f"R must be positive, got {r_scale}")
    omega = drive.omega_rf if hasattr(drive, "omega_rf") else float(drive)
    denom = species.mass * omega ** 2 * r_scale ** 2
    return MathieuParams(a=4.0 * species.charge * vdc / denom,
                         q=2.0 * species.charge * v0 / denom)


def mathieu_stability(params, steps_per_period=2000):
    """Stability and characteristic exponent by one-period Floquet analysis.

    Integrates x'' + (a - 2q cos 2 xi) x = 0 over one coefficient period
    (xi in [0, pi]) with a fixed-step 4th-order Runge-Kutta scheme and
    forms the monodromy matrix; stable iff |trace| <= 2 (+1e-9 slack).
    beta comes from the monodromy eigenphase, cos(pi beta) = trace/2.
    """
    a, q = params.a, params.q

    def rhs(xi, y):
        return np.array([y[1], -(a - 2.0 * q * math.cos(2.0 * xi)) * y[0]])

    h = math.pi / steps_per_period
    y1 = np.array([1.0, 0.0])
    y2 = np.array([0.0, 1.0])
    xi = 0.0
    for _ in range(steps_per_period):
        y1 = _rk4_step(rhs, xi, y1, h)
        y2 = _rk4_step(rhs, xi, y2, h)
        xi += h
    trace = float(y1[0] + y2[1])
    stable = bool(abs(trace) <= 2.0 + 1e-9)
    if stable:
        beta = math.acos(min(1.0, max(-1.0, trace / 2.0))) / math.pi
    else:
        beta = math.nan
    arg = a + q * q / 2.0
    beta_smallq = math.sqrt(arg) if arg >= 0 else math.nan
    return StabilityResult(stable=stable, beta=beta, beta_smallq=beta_smallq,
                           monodromy_trace=trace)


def _rk4_step(rhs, t, y, h):
    k1 = rhs(t, y)
    k2 = rhs(t + h / 2, y + h / 2 * k1)
    k3 = rhs(t + h / 2, y + h / 2 * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


# ---------------------------------------------------------------------
# secular frequency from crystal spacing
# ---------------------------------------------------------------------

def secular_from_spacing(spacing_3ion, species):
    """Axial secular frequency from the adjacent spacing of a 3-ion crystal.

    Inverts s3 = (5/4)^(1/3) s with s the characteristic Coulomb length:
    omega_z = (q/2) (pi epsilon0 m s^3)^(-1/2).
    """
    if not spacing_3ion > 0:
        raise ValidationError(f"spacing must be positive, got {spacing_3ion}")
    s = spacing_3ion / (5.0 / 4.0) ** (1.0 / 3.0)
    return (abs(species.charge) / 2.0
            / math.sqrt(math.pi * EPSILON_0 * species.mass * s ** 3))
