"""Control-voltage waveform synthesis for moving an axial well.

Each waveform step solves a small bound-constrained least-squares
problem in the electrode (or shared-channel) voltages: zero total static
field at the target point (the ion sits at the well center) and the
requested axial curvature, with Tikhonov regularization toward small
voltages.  The constraint system is linear in the voltages because
every electrode contributes its one-volt basis solution; the RF
pseudopotential enters only as a fixed offset on the targets.
"""

import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import lsq_linear

from .core import ValidationError, max_threads
from .fields import hessian_of_scalar, jacobian_of_field, pseudopotential

DEFAULT_STEP_SIZE = 10e-6        # m, along the transport path
DEFAULT_REGULARIZATION = 1e-6    # relative to the largest singular value


class InfeasibleWaveformError(RuntimeError):
    """A step's constraints cannot be met within the voltage bounds."""

    def __init__(self, message, step_index, constraint):
        super().__init__(message)
        self.step_index = step_index
        self.constraint = constraint


@dataclass(frozen=True)
class WaveformSpec:
    """Targets for a transport waveform.

    path: (N, 3) target points in meters, typically on the RF null line.
    target_omega_z: axial secular frequency to hold at every step, rad/s.
    voltage_bounds: (v_min, v_max) in volts applied to every channel.
    regularization: Tikhonov weight, relative to the largest singular
    value of the (row-equilibrated) constraint matrix.
    """

    path: np.ndarray
    target_omega_z: float
    voltage_bounds: tuple = (-10.0, 10.0)
    regularization: float = DEFAULT_REGULARIZATION

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.path, dtype=float))
        if p.size == 0:
            raise ValidationError("waveform path is empty")
        if p.shape[1] != 3:
            raise ValidationError("path must be a list of 3-vectors")
        if np.any(p[:, 2] <= 0):
            raise ValidationError("every path point must lie above the plane")
        object.__setattr__(self, "path", p)
        if not self.target_omega_z > 0:
            raise ValidationError("target omega_z must be positive")
        lo, hi = self.voltage_bounds
        if not lo < hi:
            raise ValidationError("voltage bounds must satisfy v_min < v_max")
        if self.regularization < 0:
            raise ValidationError("regularization must be >= 0")


@dataclass(frozen=True)
class WaveformStep:
    position: np.ndarray            # target point, m
    voltages: dict                  # channel -> V
    electrode_voltages: dict        # electrode label -> V
    residual_field: np.ndarray      # achieved static+pp field residual, V/m
    achieved_omega_z: float         # from the solved linear system, rad/s


@dataclass(frozen=True)
class Waveform:
    steps: tuple
    channels: tuple

    def voltage_matrix(self):
        """(n_steps, n_channels) array of channel voltages."""
        return np.array([[s.voltages[c] for c in self.channels]
                         for s in self.steps])

    def to_csv(self, path_or_buf, axis_index=0):
        own = isinstance(path_or_buf, (str, bytes))
        f = open(path_or_buf, "w") if own else path_or_buf
        try:
            f.write("# units: z_um um; voltages V\n")
            f.write("step,z_um," + ",".join(self.channels) + "\n")
            for i, s in enumerate(self.steps):
                pos_um = s.position[axis_index] * 1e6
                volts = ",".join("%.9g" % s.voltages[c] for c in self.channels)
                f.write(f"{i},{pos_um:.6g},{volts}\n")
        finally:
            if own:
                f.close()

    def to_csv_string(self, axis_index=0):
        buf = io.StringIO()
        self.to_csv(buf, axis_index=axis_index)
        return buf.getvalue()


def _channel_basis(model, channel_map):
    """Resolve the channel -> electrode-labels map (default: one per DC)."""
    dc = model.dc_labels()
    if channel_map is None:
        return {label: [label] for label in dc}
    seen = set()
    for ch, labels in channel_map.items():
        for lbl in labels:
            if lbl not in dc:
                raise ValidationError(f"channel {ch!r} names unknown DC "
                                      f"electrode {lbl!r}")
            if lbl in seen:
                raise ValidationError(f"electrode {lbl!r} assigned to "
                                      "multiple channels")
            seen.add(lbl)
    return {ch: list(labels) for ch, labels in channel_map.items()}


def _basis_hessian(model, label, point, h):
    """Full second-derivative tensor of one electrode's basis potential."""
    def fn(p, _l=label):
        return model.potential_basis(p, _l)
    return hessian_of_scalar(fn, point, h)


def _transverse_frame(axis):
    helper = np.array([0.0, 0.0, 1.0])
    if abs(np.dot(helper, axis)) > 0.9:
        helper = np.array([0.0, 1.0, 0.0])
    t1 = np.cross(axis, helper)
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(axis, t1)
    return t1, t2


def solve_waveform(model, species, spec, axis=(1.0, 0.0, 0.0),
                   channel_map=None, include_pseudopotential=True,
                   field_tolerance=None, curvature_rel_tolerance=0.02):
    """Solve per-step control voltages that hold a well along a path.

    At every path point the solved voltages satisfy, in the least-squares
    sense within the bounds: (i) zero total field (static plus the
    pseudopotential's equivalent field) in all three directions, (ii)
    axial curvature q d2(Phi)/dz_axis^2 = m w_z^2, and (iii) zero total
    axial-transverse cross curvature, which keeps the well's weak
    principal axis aligned with the path so the achieved axial frequency
    matches the constrained curvature.  Curvature rows are weighted by
    1/(m w_z^2) so their residuals are commensurate with the field rows.
    Raises :class:`InfeasibleWaveformError` naming the violated
    constraint and step when the bounded solution misses the targets by
    more than the tolerances.
    """
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    t1, t2 = _transverse_frame(axis)
    channels = _channel_basis(model, channel_map)
    names = tuple(sorted(channels))
    target_curv = species.mass * spec.target_omega_z ** 2
    if field_tolerance is None:
        field_tolerance = 1e-3 * max(1.0, model.drive.v_rf)

    def curv_rows(hess):
        return np.array([axis @ hess @ axis, axis @ hess @ t1,
                         axis @ hess @ t2])

    def solve_step(i_point):
        i, point = i_point
        h = max(1e-3 * point[2], 1e-9)
        cols = []
        for ch in names:
            e_total = np.zeros(3)
            curv = np.zeros(3)
            for lbl in channels[ch]:
                e_total += np.asarray(model.field_basis(point, lbl), dtype=float)
                curv += curv_rows(_basis_hessian(model, lbl, point, h))
            cols.append(np.concatenate([e_total,
                                        species.charge * curv / target_curv]))
        a = np.stack(cols, axis=1)

        if include_pseudopotential and model.drive.v_rf > 0:
            grad_pp = _pseudopotential_gradient(model, species, point)
            hess_pp = hessian_of_scalar(
                lambda p: pseudopotential(model, species, p), point, h)
            pp_curv = curv_rows(hess_pp)
        else:
            grad_pp = np.zeros(3)
            pp_curv = np.zeros(3)
        # total force zero: q E_dc = grad(Phi_pp); axial curvature:
        # q c_dc = m w^2 - c_pp; cross curvature: q c_dc = -c_pp
        b = np.concatenate([grad_pp / species.charge,
                            (np.array([target_curv, 0.0, 0.0]) - pp_curv)
                            / target_curv])

        v = _tikhonov_solve(a, b, spec.regularization)
        lo, hi = spec.voltage_bounds
        if v is None or np.any(v < lo) or np.any(v > hi):
            smax = np.linalg.svd(a, compute_uv=False)[0]
            mu = spec.regularization * smax
            a_aug = np.vstack([a, mu * np.eye(len(names))])
            b_aug = np.concatenate([b, np.zeros(len(names))])
            res = lsq_linear(a_aug, b_aug, bounds=spec.voltage_bounds,
                             method="bvls" if len(names) <= 60 else "trf",
                             tol=1e-14)
            v = res.x
        resid = a @ v - b
        if np.linalg.norm(resid[:3]) > field_tolerance:
            raise InfeasibleWaveformError(
                f"step {i}: residual static field "
                f"{np.linalg.norm(resid[:3]):.3e} V/m exceeds "
                f"{field_tolerance:.3e} V/m at the voltage bounds",
                step_index=i, constraint="field-zero")
        if abs(resid[3]) > curvature_rel_tolerance:
            raise InfeasibleWaveformError(
                f"step {i}: axial curvature misses target by "
                f"{abs(resid[3]) * 100:.2f}% (allowed "
                f"{curvature_rel_tolerance * 100:.2f}%)",
                step_index=i, constraint="axial-curvature")
        if np.linalg.norm(resid[4:6]) > curvature_rel_tolerance:
            raise InfeasibleWaveformError(
                f"step {i}: axial-transverse cross curvature residual "
                f"{np.linalg.norm(resid[4:6]):.3e} (relative to m w_z^2) "
                f"exceeds {curvature_rel_tolerance:.3e}",
                step_index=i, constraint="axis-alignment")
        achieved_curv = (a[3] @ v) * target_curv + pp_curv[0]
        omega_ach = math.sqrt(max(achieved_curv, 0.0) / species.mass)
        volts = dict(zip(names, v))
        elec = {}
        for ch, lbls in channels.items():
            for lbl in lbls:
                elec[lbl] = volts[ch]
        return WaveformStep(position=point, voltages=volts,
                            electrode_voltages=elec,
                            residual_field=resid[:3] * 1.0,
                            achieved_omega_z=omega_ach)

    items = list(enumerate(spec.path))
    n_workers = min(max_threads(), len(items))
    if n_workers > 1 and len(items) > 4:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            steps = list(pool.map(solve_step, items))
    else:
        steps = [solve_step(it) for it in items]
    return Waveform(steps=tuple(steps), channels=names)


def _tikhonov_solve(a, b, regularization):
    """Regularized least squares through the dual (row-space) system.

    v = A^T (A A^T + mu^2 I)^-1 b equals the Tikhonov minimizer; with
    row equilibration the dual Gram matrix stays well conditioned even
    for tiny regularization, which keeps solutions accurate and
    preserves geometric symmetries of the constraint system to near
    machine precision.  Returns None when the dual system is singular.
    """
    scale = np.linalg.norm(a, axis=1)
    scale[scale == 0] = 1.0
    a_eq = a / scale[:, None]
    b_eq = b / scale
    gram0 = a_eq @ a_eq.T
    s2max = float(np.max(np.linalg.eigvalsh(gram0))) if a.shape[0] else 1.0
    gram = gram0 + regularization ** 2 * s2max * np.eye(a.shape[0])
    try:
        w = np.linalg.solve(gram, b_eq)
        for _ in range(2):   # refinement: the small system is cheap
            w = w + np.linalg.solve(gram, b_eq - gram @ w)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(w)):
        return None
    return a_eq.T @ w


def _pseudopotential_gradient(model, species, point):
    p = np.asarray(point, dtype=float)
    e_rf = np.asarray(model.field_rf_basis(p), dtype=float)
    jac = jacobian_of_field(model.field_rf_basis, p)
    c = (species.charge * model.drive.v_rf) ** 2 / (2.0 * species.mass
                                                    * model.drive.omega_rf ** 2)
    return c * (jac.T @ e_rf)


@dataclass(frozen=True)
class ContinuityResult:
    passed: bool
    offenders: tuple   # (step gap index, channel, |delta V|)


def waveform_continuity_check(waveform, max_step_v):
    """Flag voltage jumps between consecutive steps larger than max_step_v."""
    if max_step_v < 0:
        raise ValidationError("max_step_v must be >= 0")
    offenders = []
    v = waveform.voltage_matrix()
    for i in range(1, v.shape[0]):
        for j, ch in enumerate(waveform.channels):
            delta = abs(v[i, j] - v[i - 1, j])
            if delta > max_step_v:
                offenders.append((i, ch, delta))
    return ContinuityResult(passed=not offenders, offenders=tuple(offenders))


def path_points(start, stop, step_size=DEFAULT_STEP_SIZE):
    """Evenly spaced 3D path points from start to stop (inclusive)."""
    start = np.asarray(start, dtype=float)
    stop = np.asarray(stop, dtype=float)
    dist = np.linalg.norm(stop - start)
    n = max(2, int(round(dist / step_size)) + 1)
    ts = np.linspace(0.0, 1.0, n)
    return start[None, :] + ts[:, None] * (stop - start)[None, :]
