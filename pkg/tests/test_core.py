import math

import pytest
from hypothesis import given, strategies as st

from paultrap import core


def test_species_si_conversion():
    mg = core.make_species(24, +1, "24Mg+")
    assert mg.mass == pytest.approx(24 * 1.66054e-27, rel=1e-5)
    assert mg.charge == pytest.approx(1.602176634e-19, rel=1e-12)
    be = core.make_species(9, +1, "9Be+")
    assert be.mass == pytest.approx(9 * 1.66054e-27, rel=1e-5)


def test_species_validation():
    with pytest.raises(core.ValidationError):
        core.make_species(1, 0, "x")
    with pytest.raises(core.ValidationError):
        core.make_species(-24, 1, "bad")


def test_negative_charge_allowed():
    anion = core.make_species(16, -1, "O-")
    assert anion.charge < 0


def test_rf_drive_validation():
    with pytest.raises(core.ValidationError):
        core.RfDrive(omega_rf=-1.0, v_rf=10.0)
    with pytest.raises(core.ValidationError):
        core.RfDrive(omega_rf=1.0, v_rf=-0.1)
    d = core.RfDrive(omega_rf=1.0, v_rf=0.0)
    assert d.phase_deg == 0.0


def test_constants_codata():
    c = core.CONSTANTS
    assert c.epsilon0 == pytest.approx(8.8541878128e-12, rel=1e-10)
    assert c.hbar == pytest.approx(1.054571817e-34, rel=1e-9)
    assert c.k_boltzmann == pytest.approx(1.380649e-23, rel=1e-12)
    assert c.elementary_charge == pytest.approx(1.602176634e-19, rel=1e-12)
    assert c.amu == pytest.approx(1.66053906660e-27, rel=1e-9)


def test_constants_immutable():
    with pytest.raises(Exception):
        core.CONSTANTS.hbar = 1.0


def test_db_power_ratio():
    assert core.db_power_ratio(0.0) == 1.0
    assert core.db_power_ratio(-147.0) == pytest.approx(2.0e-15, rel=0.01)
    assert core.db_power_ratio(16.8) == pytest.approx(47.9, rel=0.01)


@given(st.floats(-200, 200))
def test_db_round_trip(db):
    assert core.power_ratio_db(core.db_power_ratio(db)) == pytest.approx(
        db, rel=1e-12, abs=1e-12)


@given(st.floats(1e-3, 1e6))
def test_amu_round_trip(amu):
    assert core.kg_to_amu(core.amu_to_kg(amu)) == pytest.approx(amu, rel=1e-12)


@given(st.floats(1e-6, 1e5))
def test_mhz_round_trip(mhz):
    assert core.angular_to_mhz(core.mhz_to_angular(mhz)) == pytest.approx(
        mhz, rel=1e-12)


def test_mhz_to_angular_value():
    assert core.mhz_to_angular(100.0) == pytest.approx(2 * math.pi * 1e8,
                                                       rel=1e-12)


def test_max_threads_env(monkeypatch):
    monkeypatch.setenv("PAULTRAP_THREADS", "3")
    assert core.max_threads() == 3
    monkeypatch.setenv("PAULTRAP_THREADS", "0")
    assert core.max_threads() == 1
    monkeypatch.delenv("PAULTRAP_THREADS")
    assert core.max_threads() >= 1
