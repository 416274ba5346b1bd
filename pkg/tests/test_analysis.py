import math
from dataclasses import dataclass

import numpy as np
import pytest

from paultrap import analysis, fields
from paultrap.core import (ConvergenceError, RfDrive, ValidationError,
                           mhz_to_angular)
from conftest import grid_minimax_depth

RNG = np.random.default_rng(42)

QUAD_DRIVE = RfDrive(mhz_to_angular(100.0), 50.0)
QUAD_R = 50e-6


@dataclass(frozen=True)
class QuadrupoleWithAxialWell:
    """Ideal quadrupole pseudopotential plus a static axial saddle well.

    The static part (kappa/2)(z^2 - alpha x^2 - (1-alpha) y^2) obeys
    Laplace for any split fraction alpha; kappa = m omega_z^2 / q gives
    axial frequency omega_z.
    """

    quad: fields.IdealQuadrupole
    curvature: float   # V/m^2
    alpha: float = 0.5

    @property
    def drive(self):
        return self.quad.drive

    def potential_rf_basis(self, point):
        return self.quad.potential_rf_basis(point)

    def field_rf_basis(self, point):
        return self.quad.field_rf_basis(point)

    def potential_static(self, point):
        p = np.asarray(point, dtype=float)
        return 0.5 * self.curvature * (
            p[..., 2] ** 2 - self.alpha * p[..., 0] ** 2
            - (1.0 - self.alpha) * p[..., 1] ** 2)

    def field_static(self, point):
        p = np.asarray(point, dtype=float)
        e = np.empty_like(p)
        e[..., 0] = self.curvature * self.alpha * p[..., 0]
        e[..., 1] = self.curvature * (1.0 - self.alpha) * p[..., 1]
        e[..., 2] = -self.curvature * p[..., 2]
        return e


class TestFindRfNull:
    def test_five_wire_null_on_symmetry_line(self, five_wire):
        start = analysis.default_start_point(five_wire)
        res = analysis.find_rf_null(five_wire, start)
        assert abs(res.point[1]) < 1e-12
        assert res.point[2] == pytest.approx(math.sqrt(25 * 75) * 1e-6,
                                             rel=0.01)
        assert res.residual < 1e-8

    def test_ideal_quadrupole_null_at_origin(self):
        quad = fields.IdealQuadrupole(r_scale=QUAD_R, drive=QUAD_DRIVE)
        res = analysis.find_rf_null(quad, np.array([5e-6, -7e-6, 10e-6]))
        assert abs(res.point[0]) < 1e-12
        assert abs(res.point[1]) < 1e-12

    def test_translation_covariance(self, five_wire):
        shift = 37e-6
        moved = fields.PlanarTrapModel(
            tuple(fields.PlanarElectrode(
                e.label, e.role,
                tuple((r[0] + shift, r[1], r[2] + shift, r[3])
                      for r in e.rects))
                for e in five_wire.electrodes),
            five_wire.drive, {})
        base = analysis.find_rf_null(five_wire,
                                     analysis.default_start_point(five_wire))
        res = analysis.find_rf_null(moved,
                                    base.point + np.array([shift, 0, 0]))
        assert np.allclose(res.point, base.point + np.array([shift, 0, 0]),
                           atol=1e-12)

    def test_guess_below_plane_rejected(self, five_wire):
        with pytest.raises(ValidationError):
            analysis.find_rf_null(five_wire, [0, 0, -1e-6])


class TestSecularFrequencies:
    def test_quadrupole_closed_form(self, mg24):
        quad = fields.IdealQuadrupole(r_scale=QUAD_R, drive=QUAD_DRIVE)
        omega_r = fields.quadrupole_secular_frequency(mg24, QUAD_DRIVE, QUAD_R)
        sec = analysis.secular_frequencies(quad, mg24,
                                           guess=np.array([1e-6, 1e-6, 1e-5]))
        assert sec.omegas[0] == pytest.approx(0.0, abs=1e-3 * omega_r)
        assert sec.omegas[1] == pytest.approx(omega_r, rel=1e-6)
        assert sec.omegas[2] == pytest.approx(omega_r, rel=1e-6)

    def test_degenerate_radials_flag_tilt_undefined(self, mg24):
        quad = fields.IdealQuadrupole(r_scale=QUAD_R, drive=QUAD_DRIVE)
        sec = analysis.secular_frequencies(quad, mg24,
                                           guess=np.array([1e-6, 1e-6, 1e-5]))
        assert sec.tilt_deg is None

    def test_axes_orthonormal(self, mg24, five_wire):
        model = five_wire.with_dc_voltages({"t4": 1.2, "b4": 0.8,
                                            "t10": 1.0, "b10": 1.0})
        sec = analysis.secular_frequencies(model, mg24)
        assert np.allclose(sec.axes.T @ sec.axes, np.eye(3), atol=1e-9)

    def test_axial_well_splits_radials_per_laplace(self, mg24):
        # static saddle leaves omega_z as designed and splits the radial
        # pair; the static eigenvalue sum stays zero (Laplace)
        quad = fields.IdealQuadrupole(r_scale=QUAD_R, drive=QUAD_DRIVE)
        omega_r = fields.quadrupole_secular_frequency(mg24, QUAD_DRIVE, QUAD_R)
        omega_z = 0.15 * omega_r
        curv = mg24.mass * omega_z ** 2 / mg24.charge
        alpha = 0.75
        model = QuadrupoleWithAxialWell(quad=quad, curvature=curv, alpha=alpha)
        sec = analysis.secular_frequencies(model, mg24,
                                           guess=np.array([1e-7, 1e-7, 1e-7]))
        w_z, w_lo, w_hi = sec.omegas[0], sec.omegas[1], sec.omegas[2]
        assert w_z == pytest.approx(omega_z, rel=1e-6)
        assert w_lo == pytest.approx(
            math.sqrt(omega_r ** 2 - alpha * omega_z ** 2), rel=1e-6)
        assert w_hi == pytest.approx(
            math.sqrt(omega_r ** 2 - (1 - alpha) * omega_z ** 2), rel=1e-6)
        assert w_lo < w_hi

    def test_static_hessian_is_traceless(self, mg24, five_wire):
        # Laplace: eigenvalues of the static Hessian sum to ~0 anywhere
        model = five_wire.with_dc_voltages({"t2": 1.0, "b11": -0.6,
                                            "c5": 0.4})
        for _ in range(10):
            p = np.array([RNG.uniform(-300e-6, 300e-6),
                          RNG.uniform(-100e-6, 100e-6),
                          RNG.uniform(15e-6, 120e-6)])
            h = fields.hessian_of_scalar(model.potential_static, p,
                                         1e-3 * p[2])
            lam = np.linalg.eigvalsh(h)
            assert abs(lam.sum()) < 1e-5 * np.abs(lam).max()

    def test_tilt_antisymmetric_under_mirrored_bias(self, mg24, five_wire):
        top = five_wire.with_dc_voltages({"t4": 1.0, "t10": 1.0})
        bottom = five_wire.with_dc_voltages({"b4": 1.0, "b10": 1.0})
        sec_t = analysis.secular_frequencies(top, mg24)
        sec_b = analysis.secular_frequencies(bottom, mg24)
        assert sec_t.tilt_deg is not None
        assert abs(sec_t.tilt_deg) > 0.5
        assert sec_b.tilt_deg == pytest.approx(-sec_t.tilt_deg, rel=1e-3)

    def test_not_confining_error_lists_eigenvalues(self, mg24):
        # static saddle strong enough to overcome the pseudopotential
        quad = fields.IdealQuadrupole(r_scale=QUAD_R, drive=QUAD_DRIVE,
                                      v_dc=40.0)
        with pytest.raises(analysis.NotConfiningError) as err:
            analysis.secular_frequencies(quad, mg24,
                                         guess=np.array([1e-7, 1e-7, 1e-7]))
        assert err.value.eigenvalues is not None
        assert np.min(err.value.eigenvalues) < 0


class TestTrapDepth:
    def test_quadratic_scaling_in_drive(self, mg24, four_wire):
        null = analysis.find_rf_null(four_wire,
                                     analysis.default_start_point(four_wire))
        d1 = analysis.trap_depth(four_wire, mg24, guess=null.point)
        boosted = fields.PlanarTrapModel(
            four_wire.electrodes,
            RfDrive(four_wire.drive.omega_rf, 2.0 * four_wire.drive.v_rf), {})
        d2 = analysis.trap_depth(boosted, mg24, guess=null.point)
        assert d1.depth_ev > 0
        assert d2.depth_ev == pytest.approx(4.0 * d1.depth_ev, rel=1e-4)

    def test_against_grid_minimax_oracle(self, mg24, four_wire):
        null = analysis.find_rf_null(four_wire,
                                     analysis.default_start_point(four_wire))
        depth = analysis.trap_depth(four_wire, mg24, guess=null.point)

        # brute-force oracle: dense (y, z) energy grid, minimax flood fill
        ny, nz = 481, 481
        ys = np.linspace(-300e-6, 340e-6, ny)
        zs = np.linspace(1e-6, 641e-6, nz)
        gy, gz = np.meshgrid(ys, zs, indexing="ij")
        pts = np.stack([np.zeros(gy.size), gy.ravel(), gz.ravel()], axis=1)
        e = four_wire.field_rf_basis(pts) * four_wire.drive.v_rf
        u = (mg24.charge ** 2 * np.sum(e * e, axis=1)
             / (4 * mg24.mass * four_wire.drive.omega_rf ** 2)).reshape(ny, nz)
        start = (int(np.argmin(np.abs(ys - null.point[1]))),
                 int(np.argmin(np.abs(zs - null.point[2]))))
        depth_j, _ = grid_minimax_depth(u, start)
        oracle_ev = depth_j / 1.602176634e-19
        assert depth.depth_ev == pytest.approx(oracle_ev, rel=0.05)

    def test_unbounded_potential_raises(self, mg24):
        quad = fields.IdealQuadrupole(r_scale=QUAD_R, drive=QUAD_DRIVE)
        with pytest.raises(ConvergenceError):
            analysis.trap_depth(quad, mg24, guess=np.array([1e-6, 1e-6, 1e-5]),
                                box_scale=3.0)


class TestMathieuParams:
    def test_zero_dc_gives_zero_a(self, mg24):
        mp = analysis.mathieu_params(QUAD_R, 50.0, 0.0, QUAD_DRIVE, mg24)
        assert mp.a == 0.0

    def test_worked_example(self, mg24):
        mp = analysis.mathieu_params(50e-6, 50.0, 0.0, QUAD_DRIVE, mg24)
        assert mp.q == pytest.approx(0.407, rel=2e-3)

    def test_doubling_r_quarters_both(self, mg24):
        mp1 = analysis.mathieu_params(QUAD_R, 50.0, 5.0, QUAD_DRIVE, mg24)
        mp2 = analysis.mathieu_params(2 * QUAD_R, 50.0, 5.0, QUAD_DRIVE, mg24)
        assert mp2.a == pytest.approx(mp1.a / 4, rel=1e-12)
        assert mp2.q == pytest.approx(mp1.q / 4, rel=1e-12)

    def test_consistency_with_secular_frequency(self, mg24):
        # omega_r = q_x Omega / (2 sqrt(2)) for a = 0
        mp = analysis.mathieu_params(QUAD_R, 50.0, 0.0, QUAD_DRIVE, mg24)
        omega_r = fields.quadrupole_secular_frequency(mg24, QUAD_DRIVE, QUAD_R)
        assert mp.q * QUAD_DRIVE.omega_rf / (2 * math.sqrt(2)) == pytest.approx(
            omega_r, rel=1e-12)


class TestMathieuStability:
    def test_small_q(self):
        res = analysis.mathieu_stability(analysis.MathieuParams(0.0, 0.2))
        assert res.stable
        assert res.beta == pytest.approx(math.sqrt(0.02), rel=0.01)

    def test_unstable_at_q_1(self):
        res = analysis.mathieu_stability(analysis.MathieuParams(0.0, 1.0))
        assert not res.stable
        assert math.isnan(res.beta)

    def test_zero_is_stable(self):
        res = analysis.mathieu_stability(analysis.MathieuParams(0.0, 0.0))
        assert res.stable
        assert res.beta == 0.0

    def test_boundary_near_0p908(self):
        lo = analysis.mathieu_stability(analysis.MathieuParams(0.0, 0.90))
        hi = analysis.mathieu_stability(analysis.MathieuParams(0.0, 0.92))
        assert lo.stable and not hi.stable

    def test_approximation_tracks_in_small_q_regime(self):
        # the small-parameter formula holds to 1% out to q ~ 0.2 and
        # degrades beyond; acceptance documents the wider-range behavior
        for q in np.linspace(0.02, 0.20, 10):
            for a in (-0.01, 0.0, 0.01):
                res = analysis.mathieu_stability(analysis.MathieuParams(a, q))
                if res.beta_smallq > 0:
                    assert res.beta == pytest.approx(res.beta_smallq, rel=0.01)

    def test_diverges_near_stability_boundary(self):
        res = analysis.mathieu_stability(analysis.MathieuParams(0.0, 0.89))
        assert abs(res.beta - res.beta_smallq) / res.beta > 0.2


class TestSecularFromSpacing:
    def test_round_trip_with_characteristic_length(self, mg24):
        from paultrap import crystal
        omega = mhz_to_angular(1.7)
        s = crystal.characteristic_length(mg24, omega)
        s3 = (5.0 / 4.0) ** (1.0 / 3.0) * s
        assert analysis.secular_from_spacing(s3, mg24) == pytest.approx(
            omega, rel=1e-9)

    def test_worked_example(self, mg24):
        omega = analysis.secular_from_spacing(5.68e-6, mg24)
        assert omega / (2 * math.pi) == pytest.approx(1.0e6, rel=1e-3)

    def test_monotone_decreasing(self, mg24):
        w1 = analysis.secular_from_spacing(4e-6, mg24)
        w2 = analysis.secular_from_spacing(6e-6, mg24)
        assert w1 > w2

    def test_positive_spacing_required(self, mg24):
        with pytest.raises(ValidationError):
            analysis.secular_from_spacing(0.0, mg24)
