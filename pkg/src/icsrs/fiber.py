"""Power evolution along one multicore-fiber span.

Only one interfering core pair is modelled: the classical signal launched in
core i and the power it couples into core j, using the averaged coupled-power
description (deterministic, no crosstalk fluctuations).  All functions accept
scalar or array positions ``z``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .units import AttenuationCoeff, CouplingCoeff, Power

C_BAND_ALPHA_RANGE = (0.03, 0.12)  # km^-1


@dataclass(frozen=True)
class FiberLink:
    """One MCF span.

    Attributes:
        length_km: span length L.
        alpha_c: classical-channel attenuation, km^-1.
        alpha_q: quantum-channel attenuation, km^-1.
        h_ij: power coupling coefficient between the two cores, km^-1.
    """

    length_km: float
    alpha_c: AttenuationCoeff
    alpha_q: AttenuationCoeff
    h_ij: CouplingCoeff

    def __post_init__(self):
        length = float(self.length_km)
        if not length > 0.0 or not np.isfinite(length):
            raise ValueError(f"fiber length must be a positive finite number of km, got {self.length_km!r}")
        object.__setattr__(self, "length_km", length)
        object.__setattr__(self, "alpha_c", AttenuationCoeff(self.alpha_c))
        object.__setattr__(self, "alpha_q", AttenuationCoeff(self.alpha_q))
        object.__setattr__(self, "h_ij", CouplingCoeff(self.h_ij))

    @classmethod
    def from_engineering(cls, length_km, alpha_c_db, alpha_q_db, h_per_m):
        """Build a link from dB/km losses and a per-metre coupling coefficient."""
        return cls(
            length_km=length_km,
            alpha_c=AttenuationCoeff.from_db_per_km(alpha_c_db),
            alpha_q=AttenuationCoeff.from_db_per_km(alpha_q_db),
            h_ij=CouplingCoeff.from_per_m(h_per_m),
        )

    def with_length(self, length_km) -> "FiberLink":
        return dataclasses.replace(self, length_km=length_km)

    def replace(self, **changes) -> "FiberLink":
        return dataclasses.replace(self, **changes)

    def check_c_band(self) -> None:
        """Raise ValueError unless both attenuations lie in the C-band range."""
        lo, hi = C_BAND_ALPHA_RANGE
        for name in ("alpha_c", "alpha_q"):
            value = float(getattr(self, name))
            if not lo <= value <= hi:
                raise ValueError(f"{name}={value:g} km^-1 outside C-band range [{lo}, {hi}] km^-1")


def _positions(link: FiberLink, z):
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr < 0.0) or np.any(z_arr > link.length_km) or np.any(np.isnan(z_arr)):
        raise ValueError(f"position z={z!r} km outside the span [0, {link.length_km}] km")
    return z_arr


def _out(value):
    return float(value) if np.ndim(value) == 0 else value


def classical_power_at(link: FiberLink, p0, z):
    """Classical-signal power remaining in the launch core at position ``z`` (mW)."""
    z = _positions(link, z)
    h = float(link.h_ij)
    # exp(-hz) cosh(hz) written as (1 + exp(-2hz)) / 2 so large hz cannot overflow
    p = float(Power(p0)) * 0.5 * (1.0 + np.exp(-2.0 * h * z)) * np.exp(-float(link.alpha_c) * z)
    return _out(p)


def icxt_power_at(link: FiberLink, p0, z):
    """Crosstalk power coupled into the adjacent core at position ``z`` (mW)."""
    z = _positions(link, z)
    h = float(link.h_ij)
    # exp(-hz) sinh(hz) == -expm1(-2hz) / 2, exact near hz = 0
    p = float(Power(p0)) * -0.5 * np.expm1(-2.0 * h * z) * np.exp(-float(link.alpha_c) * z)
    return _out(p)


def icxt_transfer(link: FiberLink, z):
    """Fraction of power generated in core i at ``z`` that ends up in core j: tanh(h z)."""
    z = _positions(link, z)
    return _out(np.tanh(float(link.h_ij) * z))
