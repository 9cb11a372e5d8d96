import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from icsrs.units import (
    AttenuationCoeff,
    CouplingCoeff,
    Power,
    Wavelength,
    bandwidth_ghz_to_nm,
    db_per_km_to_linear,
    dbm_to_mw,
    linear_to_db_per_km,
    mw_to_dbm,
    nm_to_thz,
    thz_to_nm,
)


def test_db_per_km_to_linear_quoted_value():
    # 0.2 dB/km is quoted as 0.046 km^-1
    assert db_per_km_to_linear(0.2) == pytest.approx(0.046, abs=5e-4)
    assert db_per_km_to_linear(0.2) == pytest.approx(0.046052, rel=1e-5)


def test_db_per_km_to_linear_matches_high_precision():
    mpmath.mp.dps = 30
    expected = float(mpmath.mpf("0.21") * mpmath.log(10) / 10)
    assert float(db_per_km_to_linear(0.21)) == pytest.approx(expected, rel=1e-15)
    assert float(db_per_km_to_linear(0.21)) == pytest.approx(0.048354, abs=5e-7)


def test_zero_and_negative_attenuation():
    assert db_per_km_to_linear(0) == 0.0
    with pytest.raises(ValueError):
        db_per_km_to_linear(-0.1)
    with pytest.raises(ValueError):
        AttenuationCoeff(-1e-9)
    with pytest.raises(ValueError):
        AttenuationCoeff(float("nan"))


@pytest.mark.parametrize("dbm, mw", [(0, 1.0), (10, 10.0), (-60, 1e-6)])
def test_dbm_to_mw(dbm, mw):
    assert dbm_to_mw(dbm) == pytest.approx(mw, rel=1e-15)


def test_mw_to_dbm_zero_is_minus_inf():
    assert mw_to_dbm(0.0) == -math.inf


def test_bandwidth_ghz_to_nm():
    # lambda^2 B / c with exact c
    assert bandwidth_ghz_to_nm(100, 1550) == pytest.approx(0.8013877387135603, rel=1e-14)
    assert bandwidth_ghz_to_nm(200, 1550) == pytest.approx(1.6027754774271206, rel=1e-14)
    assert bandwidth_ghz_to_nm(1e-12, 1550) < 1e-14
    for bad in (0, -1):
        with pytest.raises(ValueError):
            bandwidth_ghz_to_nm(bad, 1550)


@given(st.floats(1e-3, 1e4), st.floats(1260, 1675))
def test_bandwidth_linear_in_b(b, lam):
    assert bandwidth_ghz_to_nm(2 * b, lam) == pytest.approx(2 * bandwidth_ghz_to_nm(b, lam), rel=1e-14)


def test_coupling_from_per_m_is_exact_times_1000():
    assert float(CouplingCoeff.from_per_m(1e-6)) == 1e-6 * 1000.0
    assert CouplingCoeff.from_per_m(2.5e-7).per_m == pytest.approx(2.5e-7, rel=1e-15)


def test_wavelength_window():
    Wavelength(1260)
    Wavelength(1675)
    for bad in (1259.9, 1675.1):
        with pytest.raises(ValueError):
            Wavelength(bad)


@given(st.floats(0.0, 10.0))
def test_attenuation_round_trip(a_db):
    back = linear_to_db_per_km(db_per_km_to_linear(a_db))
    assert back == pytest.approx(a_db, rel=1e-12, abs=1e-300)


@given(st.floats(-80.0, 40.0))
def test_power_round_trip(p_dbm):
    assert mw_to_dbm(dbm_to_mw(p_dbm)) == pytest.approx(p_dbm, rel=1e-12, abs=1e-12)
    assert Power.from_dbm(p_dbm).dbm == pytest.approx(p_dbm, rel=1e-12, abs=1e-12)


@given(st.floats(1260.0, 1675.0))
def test_frequency_round_trip(lam):
    assert thz_to_nm(nm_to_thz(lam)) == pytest.approx(lam, rel=1e-9)
    assert Wavelength.from_thz(Wavelength(lam).thz) == pytest.approx(lam, rel=1e-9)


def test_193_5_thz():
    assert thz_to_nm(193.5) == pytest.approx(299792458 / 193.5e12 * 1e9, rel=1e-15)


def test_value_types_behave_as_floats():
    a = AttenuationCoeff(0.05)
    assert a * 2 == pytest.approx(0.1)
    assert isinstance(a + 1, float)
