import math

import pytest

from paultrap import noise, resonator
from paultrap.core import ValidationError, mhz_to_angular

W40 = mhz_to_angular(40.0)


class TestRlcFromMeasurement:
    def test_worked_example(self):
        m = resonator.rlc_from_measurement(W40, 170.0, 1e-6)
        assert m.c == pytest.approx(15.8e-12, rel=0.005)
        assert m.r_parallel == pytest.approx(42.7e3, rel=0.005)

    def test_invariants_hold(self):
        m = resonator.rlc_from_measurement(W40, 170.0, 1e-6)
        assert 1.0 / math.sqrt(m.l * m.c) == pytest.approx(m.omega0, rel=1e-9)
        assert m.r_parallel * m.c * m.omega0 == pytest.approx(m.q, rel=1e-9)

    def test_inductance_tradeoff(self):
        m1 = resonator.rlc_from_measurement(W40, 170.0, 1e-6)
        m2 = resonator.rlc_from_measurement(W40, 170.0, 2e-6)
        assert m2.c == pytest.approx(m1.c / 2, rel=1e-12)
        assert m2.r_parallel == pytest.approx(2 * m1.r_parallel, rel=1e-12)

    def test_degenerate_q_rejected(self):
        with pytest.raises(ValidationError):
            resonator.rlc_from_measurement(W40, 0.0, 1e-6)


class TestChipLoss:
    def test_worked_example(self):
        m = resonator.rlc_from_measurement(W40, 170.0, 1e-6)
        loss = resonator.chip_loss(m, 80.0, 50.0)
        assert loss.r_combined == pytest.approx(20e3, rel=0.01)
        assert loss.r_chip == pytest.approx(38e3, rel=0.01)
        assert loss.dissipated == pytest.approx(33e-3, rel=0.01)

    def test_half_q_means_equal_resistances(self):
        m = resonator.rlc_from_measurement(W40, 170.0, 1e-6)
        loss = resonator.chip_loss(m, 85.0, 50.0)
        assert loss.r_chip == pytest.approx(m.r_parallel, rel=1e-9)

    def test_zero_drive_means_zero_power(self):
        m = resonator.rlc_from_measurement(W40, 170.0, 1e-6)
        assert resonator.chip_loss(m, 80.0, 0.0).dissipated == 0.0

    def test_monotone_in_q_drop(self):
        m = resonator.rlc_from_measurement(W40, 170.0, 1e-6)
        worse = resonator.chip_loss(m, 40.0, 50.0)
        better = resonator.chip_loss(m, 120.0, 50.0)
        assert worse.r_chip < better.r_chip
        assert worse.dissipated > better.dissipated

    def test_q_increase_rejected(self):
        m = resonator.rlc_from_measurement(W40, 170.0, 1e-6)
        with pytest.raises(ValidationError):
            resonator.chip_loss(m, 171.0, 50.0)


class TestLoadedQ:
    def test_matched_coupling_halves_q(self):
        assert resonator.loaded_q(400.0, 1.0) == 200.0

    def test_limits(self):
        assert resonator.loaded_q(400.0, 0.0) == 400.0
        assert resonator.loaded_q(400.0, 1e9) < 1e-5

    def test_round_trip_with_coupling(self):
        q0, kappa = 320.0, 0.63
        q_l = resonator.loaded_q(q0, kappa)
        assert resonator.coupling_from_q(q0, q_l) == pytest.approx(kappa,
                                                                   rel=1e-12)


class TestQFromLinewidth:
    def test_direct_ratio(self):
        q = resonator.q_from_linewidth(mhz_to_angular(100.0),
                                       mhz_to_angular(1.0))
        assert q == pytest.approx(100.0, rel=1e-12)

    def test_zero_linewidth_rejected(self):
        with pytest.raises(ValidationError):
            resonator.q_from_linewidth(mhz_to_angular(100.0), 0.0)

    def test_consistent_with_line_shape(self):
        # -3 dB points of the resonator line at w0 +/- FWHM/2
        w0 = mhz_to_angular(100.0)
        fwhm = mhz_to_angular(1.0)
        q = resonator.q_from_linewidth(w0, fwhm)
        att = noise.resonator_filter_attenuation(w0 + fwhm / 2, w0, q)
        assert att == pytest.approx(-10 * math.log10(2.0), rel=5e-3)


def test_lead_inductance_worked_example():
    val = resonator.lead_inductance(0.10, 0.5e-3, 1e-2)
    assert val == pytest.approx(495e-9, rel=0.01)
