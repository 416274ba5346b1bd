import math

import numpy as np
import pytest

from paultrap import cantilever
from paultrap.core import ValidationError, mhz_to_angular


def make_device(**overrides):
    kw = dict(h_c=1.5e-3, s=14e-6, w=200e-6, rho=2330.0, d0=16e-6, h=1.5e-3,
              omega_c=2 * math.pi * 7e3, q_c_mech=20000.0)
    kw.update(overrides)
    return cantilever.CantileverDevice(**kw)


def make_circuit(c_c=None):
    if c_c is None:
        c_c = cantilever.parallel_plate_capacitance(200e-6, 1.5e-3, 16e-6)
    return cantilever.circuit_from_resonance(330e-9, mhz_to_angular(100.0),
                                             c_c, 234.0)


class TestModeShape:
    def test_first_eigenvalue(self):
        assert cantilever.mode_eigenvalue() == pytest.approx(1.8751,
                                                             abs=1e-4)

    def test_full_beam_integrals(self):
        xi_p, xi_pp, xi_c = cantilever.mode_integrals(1.5e-3, 1.5e-3)
        assert xi_p == pytest.approx(0.392, abs=3e-3)
        assert xi_pp == pytest.approx(0.250, abs=2e-3)
        assert xi_c == pytest.approx(0.250, abs=2e-3)

    def test_tip_limit(self):
        xi_p, xi_pp, _ = cantilever.mode_integrals(1.5e-3, 1e-9)
        assert xi_p == pytest.approx(1.0, abs=1e-5)
        assert xi_pp == pytest.approx(1.0, abs=1e-5)

    def test_xi_dprime_below_xi_prime(self):
        # f <= 1 on the first mode, so the f^2 average never exceeds the
        # f average over any overlap window
        for frac in np.linspace(0.05, 1.0, 12):
            xi_p, xi_pp, _ = cantilever.mode_integrals(1.0, frac)
            assert xi_pp <= xi_p + 1e-12

    def test_mode_normalized_at_tip(self):
        f = cantilever.mode_shape(2.3e-3)
        assert f(2.3e-3) == pytest.approx(1.0, rel=1e-12)
        assert f(0.0) == pytest.approx(0.0, abs=1e-12)

    def test_overlap_validation(self):
        with pytest.raises(ValidationError):
            cantilever.mode_integrals(1e-3, 2e-3)


class TestLorentzianAndForce:
    def test_lorentzian_values(self):
        w0, q = mhz_to_angular(100.0), 234.0
        assert cantilever.lorentzian(0.0, w0, q) == 1.0
        assert cantilever.lorentzian(w0 / (2 * q), w0, q) == pytest.approx(
            0.5, rel=1e-12)
        assert cantilever.lorentzian(1e5, w0, q) == cantilever.lorentzian(
            -1e5, w0, q)

    def test_rf_force(self):
        assert cantilever.rf_force(1e-13, 0.0, 16e-6) == 0.0
        f1 = cantilever.rf_force(1e-13, 5.0, 16e-6)
        f2 = cantilever.rf_force(1e-13, 10.0, 16e-6)
        assert f2 == pytest.approx(4 * f1, rel=1e-12)

    def test_parallel_plate_capacitance(self):
        c = cantilever.parallel_plate_capacitance(200e-6, 1.5e-3, 16e-6)
        assert c == pytest.approx(0.166e-12, rel=0.005)


class TestDampingAndShift:
    def test_zero_detuning_no_damping(self):
        dev, circ = make_device(), make_circuit()
        res = cantilever.damping_and_shift(dev, circ, 100.0, 0.0)
        assert res.gamma_prime == 0.0

    def test_damping_sign_follows_detuning(self):
        dev, circ = make_device(), make_circuit()
        above = cantilever.damping_and_shift(dev, circ, 100.0, 2 * math.pi * 9e4)
        below = cantilever.damping_and_shift(dev, circ, 100.0, -2 * math.pi * 9e4)
        assert above.gamma_prime > 0
        assert below.gamma_prime < 0

    def test_linear_in_drive_power(self):
        dev, circ = make_device(), make_circuit()
        d1 = cantilever.damping_and_shift(dev, circ, 50.0, 2 * math.pi * 9e4)
        d2 = cantilever.damping_and_shift(dev, circ, 100.0, 2 * math.pi * 9e4)
        assert d2.gamma_prime == pytest.approx(2 * d1.gamma_prime, rel=1e-12)
        assert d2.kappa == pytest.approx(2 * d1.kappa, rel=1e-12)

    def test_demonstration_slopes(self):
        # damping and spring-softening per watt under the documented
        # matched-resonator power convention V^2 = 2 P Q W0 L0
        dev, circ = make_device(), make_circuit()
        power = 1e-3
        v2 = cantilever.v_max_squared_from_power(power, circ)
        res = cantilever.damping_and_shift(dev, circ, v2, 2 * math.pi * 90e3)
        assert res.gamma_prime / power == pytest.approx(3970.0, rel=0.15)
        assert res.kappa / power == pytest.approx(3.45, rel=0.25)

    def test_spring_softening_shifts_down(self):
        dev, circ = make_device(), make_circuit()
        v2 = cantilever.v_max_squared_from_power(1e-3, circ)
        res = cantilever.damping_and_shift(dev, circ, v2, 2 * math.pi * 90e3)
        assert res.omega_shifted == pytest.approx(
            dev.omega_c * math.sqrt(1 - res.kappa), rel=1e-12)
        assert res.omega_shifted < dev.omega_c

    def test_static_instability_raises(self):
        dev, circ = make_device(), make_circuit()
        v2 = cantilever.v_max_squared_from_power(1.0, circ)   # a full watt
        with pytest.raises(cantilever.StaticInstabilityError):
            cantilever.damping_and_shift(dev, circ, v2, 2 * math.pi * 90e3)


class TestEquivalentCircuit:
    def test_inductance_round_trip(self):
        dev = make_device()
        q_c = cantilever.charge_from_equivalent_inductance(dev, 27000.0)
        eq = cantilever.equivalent_circuit(dev, q_c)
        assert eq.l_eq == pytest.approx(27000.0, rel=1e-9)

    def test_resonance_identity(self):
        dev = make_device()
        eq = cantilever.equivalent_circuit(dev, 1e-11)
        assert eq.c_eq * eq.l_eq * dev.omega_c ** 2 == pytest.approx(1.0,
                                                                     rel=1e-12)

    def test_resistance_proportional_to_damping(self):
        dev = make_device(q_c_mech=1e30)   # gamma -> 0
        eq = cantilever.equivalent_circuit(dev, 1e-11)
        assert eq.r_eq == pytest.approx(eq.l_eq * dev.gamma_mech, rel=1e-12)
        assert eq.r_eq < 1e-15 * eq.l_eq   # vanishes with the damping

    def test_rf_damping_resistance(self):
        dev = make_device()
        eq = cantilever.equivalent_circuit(dev, 1e-11, gamma_prime=2.5)
        assert eq.r_rf == pytest.approx(eq.l_eq * 2.5, rel=1e-12)


class TestEffectiveTemperature:
    def test_thermal_equilibrium(self):
        r_eq = 3.0e6
        e2 = cantilever.thermal_noise_voltage_sq(300.0, r_eq)
        t = cantilever.effective_temperature((e2, 0.0, 0.0), (r_eq, 0.0, 0.0))
        assert t == pytest.approx(300.0, rel=1e-12)

    def test_cooling_factor_structure(self):
        r_eq = 1.0
        e2 = cantilever.thermal_noise_voltage_sq(300.0, r_eq)
        t = cantilever.effective_temperature((e2, 0.0, 0.0),
                                             (r_eq, 5.9 * r_eq, 0.0))
        assert t == pytest.approx(300.0 / 6.9, rel=1e-6)

    def test_monotone_in_rf_resistance(self):
        r_eq = 1.0
        e2 = cantilever.thermal_noise_voltage_sq(300.0, r_eq)
        t1 = cantilever.effective_temperature((e2, 0, 0), (r_eq, 1.0, 0))
        t2 = cantilever.effective_temperature((e2, 0, 0), (r_eq, 2.0, 0))
        assert t2 < t1

    def test_matches_damping_ratio_form(self):
        # with thermal noise only, T_eff = T_c Gamma / (Gamma + Gamma')
        dev = make_device()
        eq = cantilever.equivalent_circuit(dev, 1e-11, gamma_prime=1.7)
        e2 = cantilever.thermal_noise_voltage_sq(310.0, eq.r_eq)
        t = cantilever.effective_temperature((e2, 0.0, 0.0),
                                             (eq.r_eq, eq.r_rf, 0.0))
        gamma = dev.gamma_mech
        assert t == pytest.approx(310.0 * gamma / (gamma + 1.7), rel=1e-12)


class TestGroundStateRatio:
    def test_worked_example(self):
        r = cantilever.ground_state_ratio(0.1, 2 * math.pi * 20e9, 5000.0,
                                          20000.0)
        assert r == pytest.approx(0.052, rel=0.05)

    def test_zero_temperature(self):
        assert cantilever.ground_state_ratio(0.0, 1e9, 100.0, 100.0) == 0.0

    def test_linear_in_q_ratio(self):
        r1 = cantilever.ground_state_ratio(0.1, 1e9, 100.0, 1000.0)
        r2 = cantilever.ground_state_ratio(0.1, 1e9, 200.0, 1000.0)
        assert r2 == pytest.approx(2 * r1, rel=1e-12)
