"""Engineering-unit conversions.

Everything downstream works in km, km^-1, mW and nm.  The value types below are
thin ``float`` subclasses: they validate on construction and otherwise behave
like plain numbers, so formulas stay readable.
"""

from __future__ import annotations

import math

# CODATA exact values
PLANCK = 6.62607015e-34  # J s
SPEED_OF_LIGHT = 299_792_458.0  # m/s

_DB_TO_NEPER = math.log(10.0) / 10.0

WAVELENGTH_MIN_NM = 1260.0
WAVELENGTH_MAX_NM = 1675.0


class AttenuationCoeff(float):
    """Linear attenuation coefficient in km^-1."""

    def __new__(cls, value):
        value = float(value)
        if not value >= 0.0:
            raise ValueError(f"attenuation coefficient must be >= 0 km^-1, got {value!r}")
        return super().__new__(cls, value)

    @classmethod
    def from_db_per_km(cls, a_db):
        return db_per_km_to_linear(a_db)

    @property
    def db_per_km(self) -> float:
        return float(self) / _DB_TO_NEPER

    def __repr__(self):
        return f"AttenuationCoeff({float(self)!r})"


class CouplingCoeff(float):
    """Power coupling coefficient between adjacent cores in km^-1."""

    def __new__(cls, value):
        value = float(value)
        if not value >= 0.0:
            raise ValueError(f"coupling coefficient must be >= 0 km^-1, got {value!r}")
        return super().__new__(cls, value)

    @classmethod
    def from_per_m(cls, h_per_m):
        return cls(float(h_per_m) * 1000.0)

    @property
    def per_m(self) -> float:
        return float(self) / 1000.0

    def __repr__(self):
        return f"CouplingCoeff({float(self)!r})"


class Power(float):
    """Optical power in mW."""

    def __new__(cls, value):
        value = float(value)
        if not value >= 0.0:
            raise ValueError(f"optical power must be >= 0 mW, got {value!r}")
        return super().__new__(cls, value)

    @classmethod
    def from_dbm(cls, p_dbm):
        return dbm_to_mw(p_dbm)

    @property
    def dbm(self) -> float:
        return mw_to_dbm(self)

    def __repr__(self):
        return f"Power({float(self)!r})"


class Wavelength(float):
    """Vacuum wavelength in nm, restricted to the 1260-1675 nm telecom window."""

    def __new__(cls, value):
        value = float(value)
        if not WAVELENGTH_MIN_NM <= value <= WAVELENGTH_MAX_NM:
            raise ValueError(
                f"wavelength {value!r} nm outside [{WAVELENGTH_MIN_NM}, {WAVELENGTH_MAX_NM}] nm"
            )
        return super().__new__(cls, value)

    @classmethod
    def from_thz(cls, f_thz):
        return cls(thz_to_nm(f_thz))

    @property
    def thz(self) -> float:
        return nm_to_thz(self)

    @property
    def photon_energy(self) -> float:
        """Photon energy in J."""
        return PLANCK * SPEED_OF_LIGHT / (float(self) * 1e-9)

    def __repr__(self):
        return f"Wavelength({float(self)!r})"


def db_per_km_to_linear(a_db) -> AttenuationCoeff:
    """Convert a fiber loss in dB/km to a linear coefficient in km^-1."""
    a_db = float(a_db)
    if a_db < 0.0:
        raise ValueError(f"attenuation must be >= 0 dB/km, got {a_db!r}")
    return AttenuationCoeff(a_db * _DB_TO_NEPER)


def linear_to_db_per_km(a) -> float:
    return float(AttenuationCoeff(a)) / _DB_TO_NEPER


def dbm_to_mw(p_dbm) -> Power:
    return Power(10.0 ** (float(p_dbm) / 10.0))


def mw_to_dbm(p_mw) -> float:
    """mW -> dBm.  Zero power maps to ``-inf``."""
    p_mw = float(Power(p_mw))
    if p_mw == 0.0:
        return -math.inf
    return 10.0 * math.log10(p_mw)


def thz_to_nm(f_thz) -> float:
    f_thz = float(f_thz)
    if f_thz <= 0.0:
        raise ValueError(f"frequency must be > 0 THz, got {f_thz!r}")
    return SPEED_OF_LIGHT / (f_thz * 1e12) * 1e9


def nm_to_thz(lambda_nm) -> float:
    lambda_nm = float(lambda_nm)
    if lambda_nm <= 0.0:
        raise ValueError(f"wavelength must be > 0 nm, got {lambda_nm!r}")
    return SPEED_OF_LIGHT / (lambda_nm * 1e-9) / 1e12


def bandwidth_ghz_to_nm(b_ghz, center) -> float:
    """Optical bandwidth in GHz expressed as a wavelength span (nm) around ``center``.

    Uses the small-bandwidth relation d(lambda) = lambda^2 df / c.
    """
    b_ghz = float(b_ghz)
    if not b_ghz > 0.0:
        raise ValueError(f"bandwidth must be > 0 GHz, got {b_ghz!r}")
    lam_m = float(Wavelength(center)) * 1e-9
    return lam_m * lam_m * (b_ghz * 1e9) / SPEED_OF_LIGHT * 1e9
