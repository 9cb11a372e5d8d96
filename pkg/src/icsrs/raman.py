"""Spontaneous Raman noise reaching the quantum core.

Closed forms for intercore SRS (forward and backward), the G/F distance
factors shared with multi-channel aggregation, single-core SRS for comparison,
and a quadrature oracle that integrates the per-segment generation terms
directly from the pointwise power models in :mod:`icsrs.fiber`.

Noise results are spectral densities in mW per nm of receiver bandwidth.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from . import fiber
from .fiber import FiberLink
from .quadrature import QuadratureError, integrate
from .units import Power

__all__ = [
    "RamanEfficiency", "NoiseDensity", "Process", "QuadratureError",
    "g_factor", "f_factor", "forward_icsrs", "backward_icsrs",
    "forward_icsrs_processes", "backward_icsrs_processes",
    "forward_srs_singlecore", "backward_srs_singlecore", "quadrature_oracle",
]


class RamanEfficiency(float):
    """Raman efficiency eta in (km nm)^-1."""

    def __new__(cls, value):
        value = float(value)
        if not value >= 0.0:
            raise ValueError(f"Raman efficiency must be >= 0 (km nm)^-1, got {value!r}")
        return super().__new__(cls, value)

    def __repr__(self):
        return f"RamanEfficiency({float(self)!r})"


class NoiseDensity(float):
    """Noise power spectral density in mW/nm."""

    def __new__(cls, value):
        value = float(value)
        if not value >= 0.0:
            raise ValueError(f"noise density must be >= 0 mW/nm, got {value!r}")
        return super().__new__(cls, value)

    def __repr__(self):
        return f"NoiseDensity({float(self)!r})"


# ---------------------------------------------------------------------------
# Cancellation-free kernels
#
# Every closed form here is L times one of
#   exp_window(beta)          = int_0^1 exp(beta t) dt
#   coupled_window(beta, d)   = int_0^1 exp(beta t) (1 - exp(-d t)) dt
# with beta, d dimensionless (rate * L).  Writing them this way removes the
# 0/0 points at alpha_q == alpha_c and alpha_q == alpha_c + 2h, and the
# difference-of-near-equal-terms loss when h L is small.

_SMALL_BETA = 1.0
_SERIES_DELTA = 1e-3


def _exp_window(beta: float) -> float:
    if beta == 0.0:
        return 1.0
    return math.expm1(beta) / beta


def _moments(beta: float, kmax: int) -> list[float]:
    """[M_0..M_kmax] with M_k = int_0^1 t^k exp(beta t) dt."""
    if abs(beta) <= _SMALL_BETA:
        out = []
        for k in range(kmax + 1):
            term, total, n = 1.0, 1.0 / (k + 1), 0
            while True:
                n += 1
                term *= beta / n
                add = term / (n + k + 1)
                total += add
                if abs(add) <= 1e-17 * abs(total):
                    break
            out.append(total)
        return out
    # upward recurrence; error growth per step is k/|beta| < k
    e = math.exp(beta)
    out = [_exp_window(beta)]
    for k in range(1, kmax + 1):
        out.append((e - k * out[-1]) / beta)
    return out


def _coupled_window(beta: float, delta: float) -> float:
    if delta == 0.0:
        return 0.0
    if delta >= _SERIES_DELTA:
        return _exp_window(beta) - _exp_window(beta - delta)
    # 1 - exp(-d t) = sum_{k>=1} (-1)^(k+1) (d t)^k / k!
    kmax = 8
    m = _moments(beta, kmax)
    total, coef = 0.0, 1.0
    for k in range(1, kmax + 1):
        coef *= delta / k
        total += (coef if k % 2 else -coef) * m[k]
    return total


def _rates(link: FiberLink):
    return float(link.alpha_c), float(link.alpha_q), float(link.h_ij), link.length_km


# ---------------------------------------------------------------------------
# Distance factors


def g_factor(link: FiberLink) -> float:
    """Forward distance factor G (km): forward ICSRS = eta * P0 * G."""
    ac, aq, h, L = _rates(link)
    return math.exp(-aq * L) * L * _coupled_window((aq - ac) * L, 2.0 * h * L)


def f_factor(link: FiberLink) -> float:
    """Backward distance factor F (km): backward ICSRS = eta * P0 * F.

    Bounded above by its long-span limit 2h / [(aq + ac)(aq + ac + 2h)].
    """
    ac, aq, h, L = _rates(link)
    if aq + ac + 2.0 * h == 0.0:
        raise ValueError("backward factor undefined for a lossless, uncoupled link")
    return L * _coupled_window(-(aq + ac) * L, 2.0 * h * L)


# ---------------------------------------------------------------------------
# Intercore SRS


def forward_icsrs_processes(link: FiberLink, p0, eta) -> tuple[NoiseDensity, NoiseDensity]:
    """The two forward contributions: SRS of the crosstalk, and crosstalk of the SRS.

    Both integrate to the same expression, so they are returned equal by construction.
    """
    half = NoiseDensity(0.5 * float(RamanEfficiency(eta)) * float(Power(p0)) * g_factor(link))
    return half, half


def backward_icsrs_processes(link: FiberLink, p0, eta) -> tuple[NoiseDensity, NoiseDensity]:
    half = NoiseDensity(0.5 * float(RamanEfficiency(eta)) * float(Power(p0)) * f_factor(link))
    return half, half


def forward_icsrs(link: FiberLink, p0, eta) -> NoiseDensity:
    """Co-propagating ICSRS density at the span output (z = L) in the quantum core."""
    first, second = forward_icsrs_processes(link, p0, eta)
    return NoiseDensity(first + second)


def backward_icsrs(link: FiberLink, p0, eta) -> NoiseDensity:
    """Counter-propagating ICSRS density at the span input (z = 0) in the quantum core."""
    first, second = backward_icsrs_processes(link, p0, eta)
    return NoiseDensity(first + second)


# ---------------------------------------------------------------------------
# Single-core SRS (same core carries pump and probe)


def forward_srs_singlecore(alpha_c, alpha_q, length_km, p0, eta) -> NoiseDensity:
    """eta P0 [exp(-ac L) - exp(-aq L)] / (aq - ac), evaluated without the 0/0 at aq == ac."""
    ac, aq, L = float(alpha_c), float(alpha_q), float(length_km)
    _check_srs_args(ac, aq, L)
    scale = float(RamanEfficiency(eta)) * float(Power(p0))
    return NoiseDensity(scale * math.exp(-aq * L) * L * _exp_window((aq - ac) * L))


def backward_srs_singlecore(alpha_c, alpha_q, length_km, p0, eta) -> NoiseDensity:
    """eta P0 [1 - exp(-(aq + ac) L)] / (aq + ac); saturates at eta P0 / (aq + ac)."""
    ac, aq, L = float(alpha_c), float(alpha_q), float(length_km)
    _check_srs_args(ac, aq, L)
    if ac + aq == 0.0:
        raise ValueError("backward SRS undefined for alpha_c + alpha_q == 0")
    scale = float(RamanEfficiency(eta)) * float(Power(p0))
    return NoiseDensity(scale * L * _exp_window(-(aq + ac) * L))


def _check_srs_args(ac, aq, L):
    if ac < 0.0 or aq < 0.0:
        raise ValueError("attenuation coefficients must be >= 0 km^-1")
    if not L > 0.0:
        raise ValueError(f"fiber length must be > 0 km, got {L!r}")


# ---------------------------------------------------------------------------
# Quadrature oracle


class Process(enum.Enum):
    ICXT_FSRS = "1"   # forward SRS generated by the crosstalk in core j
    FSRS_ICXT = "2"   # forward SRS in core i, then coupled into core j
    ICXT_BSRS = "3"   # backward SRS generated by the crosstalk in core j
    BSRS_ICXT = "4"   # backward SRS in core i, then coupled into core j
    FSRS = "fwd-srs"  # single-core forward SRS
    BSRS = "bwd-srs"  # single-core backward SRS


def _integrand(process: Process, link: FiberLink, p0: float, eta: float):
    aq, L = float(link.alpha_q), link.length_km
    if process is Process.ICXT_FSRS:
        return lambda z: eta * fiber.icxt_power_at(link, p0, z) * np.exp(-aq * (L - z))
    if process is Process.FSRS_ICXT:
        return lambda z: (eta * fiber.classical_power_at(link, p0, z)
                          * fiber.icxt_transfer(link, z) * np.exp(-aq * (L - z)))
    if process is Process.ICXT_BSRS:
        return lambda z: eta * fiber.icxt_power_at(link, p0, z) * np.exp(-aq * z)
    if process is Process.BSRS_ICXT:
        return lambda z: (eta * fiber.classical_power_at(link, p0, z)
                          * fiber.icxt_transfer(link, z) * np.exp(-aq * z))
    # single core: no coupling, the pump simply decays
    ac = float(link.alpha_c)
    if process is Process.FSRS:
        return lambda z: eta * p0 * np.exp(-ac * z) * np.exp(-aq * (L - z))
    return lambda z: eta * p0 * np.exp(-ac * z) * np.exp(-aq * z)


def quadrature_oracle(process, link: FiberLink, p0, eta, rtol: float = 1e-10,
                      max_depth: int = 60) -> NoiseDensity:
    """Integrate one generation process over the span by adaptive quadrature.

    ``process`` is a :class:`Process` or its value ("1".."4", "fwd-srs", "bwd-srs").
    For the single-core processes ``link.h_ij`` is ignored.

    Raises:
        QuadratureError: refinement did not reach ``rtol`` within ``max_depth`` bisections.
    """
    process = Process(process)
    f = _integrand(process, link, float(Power(p0)), float(RamanEfficiency(eta)))
    result = integrate(f, 0.0, link.length_km, rtol=rtol, max_depth=max_depth)
    # rounding can leave a -1e-30 residue on an identically-zero integrand
    return NoiseDensity(max(result.value, 0.0))
