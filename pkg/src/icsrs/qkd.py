"""Decoy-state BB84 key rate with Raman noise folded into the vacuum yield.

Asymptotic (infinite-decoy) bound:

    R = q * { -Q_mu f H2(E_mu) + Q_1 [1 - H2(e_1)] }

with Y_1 = Y_0 + t_l, Q_1 = Y_1 mu exp(-mu), e_1 = (Y_0/2 + e_d t_l) / Y_1,
Q_mu = Y_0 + 1 - exp(-t_l mu) and E_mu Q_mu = Y_0/2 + e_d (1 - exp(-t_l mu)).
Rates are per gate (per sent pulse).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Callable

from .fiber import FiberLink
from .raman import NoiseDensity, RamanEfficiency, backward_icsrs, forward_icsrs
from .units import Power, Wavelength, bandwidth_ghz_to_nm

CLICK_PROB_WARN = 0.1


class DeadLinkError(ValueError):
    """Single-photon yield is zero: no signal and no noise ever reaches the detector."""


class NoSecureKeyError(RuntimeError):
    """No distance in the search bracket gives a positive key rate."""


class RegimeWarning(RuntimeWarning):
    """Noise click probability is large enough that the linear photon-count model is doubtful."""


@dataclass(frozen=True)
class QuantumReceiver:
    """Detector and protocol parameters at Bob's side.

    Defaults: 10 % efficiency, 1e-6 dark count per gate, 1 ns gate, 100 GHz
    filter at 1550 nm, 1.5 % misalignment, mu = 0.5, f = 1.15, q = 1/2.
    """

    det_efficiency: float = 0.10
    dark_count_prob: float = 1e-6
    gate_width: float = 1e-9  # s
    rx_bandwidth: float = 100.0  # GHz
    wavelength: Wavelength = 1550.0
    misalignment: float = 0.015
    mean_photon_number: float = 0.5
    ec_efficiency: float = 1.15
    protocol_factor: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "wavelength", Wavelength(self.wavelength))
        checks = [
            ("det_efficiency", 0.0 <= self.det_efficiency <= 1.0, "in [0, 1]"),
            ("dark_count_prob", 0.0 <= self.dark_count_prob <= 1.0, "in [0, 1]"),
            ("gate_width", self.gate_width > 0.0, "> 0 s"),
            ("rx_bandwidth", self.rx_bandwidth > 0.0, "> 0 GHz"),
            ("misalignment", 0.0 <= self.misalignment <= 0.5, "in [0, 0.5]"),
            ("mean_photon_number", self.mean_photon_number > 0.0, "> 0"),
            ("ec_efficiency", self.ec_efficiency >= 1.0, ">= 1"),
            ("protocol_factor", 0.0 < self.protocol_factor <= 1.0, "in (0, 1]"),
        ]
        for name, ok, rule in checks:
            if not ok:
                raise ValueError(f"{name}={getattr(self, name)!r} must be {rule}")

    @property
    def bandwidth_nm(self) -> float:
        return bandwidth_ghz_to_nm(self.rx_bandwidth, self.wavelength)


@dataclass(frozen=True)
class LinkBudget:
    """Total transmissivity (channel x detector) and vacuum yield per gate."""

    t_l: float
    y0: float

    def __post_init__(self):
        if not 0.0 <= self.t_l <= 1.0:
            raise ValueError(f"transmissivity t_l={self.t_l!r} must be in [0, 1]")
        if not 0.0 <= self.y0 <= 1.0:
            raise ValueError(f"vacuum yield y0={self.y0!r} must be in [0, 1]")


@dataclass(frozen=True)
class KeyRate:
    rate: float  # bits per gate, floored at 0
    qber: float  # E_mu
    raw: float  # pre-floor value, may be negative
    e1: float
    gain: float  # Q_mu

    def per_second(self, clock_hz: float) -> float:
        return self.rate * clock_hz


def binary_entropy(x) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy needs a probability, got {x!r}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def photon_counting(density, rx: QuantumReceiver) -> float:
    """Mean noise photons detected per gate for a density in mW/nm.

    Power inside the receiver passband, times gate width and detector
    efficiency, divided by the photon energy.  Used directly as a click
    probability, which is only sound while the result is << 1.
    """
    watts = float(NoiseDensity(density)) * 1e-3 * rx.bandwidth_nm
    return watts * rx.det_efficiency * rx.gate_width / rx.wavelength.photon_energy


NoiseConversion = Callable[[float, QuantumReceiver], float]


def noise_to_click_prob(density, rx: QuantumReceiver,
                        conversion: NoiseConversion = photon_counting) -> float:
    p = conversion(density, rx)
    if p > CLICK_PROB_WARN:
        warnings.warn(
            f"noise click probability {p:.3g} per gate exceeds {CLICK_PROB_WARN}; "
            "the mean-photon-number approximation is no longer accurate",
            RegimeWarning, stacklevel=2,
        )
    return p


def vacuum_yield(p_icsrs, rx: QuantumReceiver) -> float:
    p_icsrs = float(p_icsrs)
    if p_icsrs < 0.0:
        raise ValueError(f"noise click probability must be >= 0, got {p_icsrs!r}")
    return rx.dark_count_prob + p_icsrs


def transmissivity(link: FiberLink, rx: QuantumReceiver) -> float:
    """Channel loss at the quantum wavelength times detector efficiency."""
    return math.exp(-float(link.alpha_q) * link.length_km) * rx.det_efficiency


def link_budget(link: FiberLink, rx: QuantumReceiver, p_noise: float = 0.0) -> LinkBudget:
    return LinkBudget(t_l=transmissivity(link, rx), y0=min(vacuum_yield(p_noise, rx), 1.0))


def secure_key_rate(budget: LinkBudget, rx: QuantumReceiver) -> KeyRate:
    y0, t_l, mu, e_d = budget.y0, budget.t_l, rx.mean_photon_number, rx.misalignment
    y1 = y0 + t_l
    if y1 == 0.0:
        raise DeadLinkError("single-photon yield Y1 = Y0 + t_l is zero")
    q1 = y1 * mu * math.exp(-mu)
    e1 = min((0.5 * y0 + e_d * t_l) / y1, 0.5)
    signal_clicks = -math.expm1(-t_l * mu)
    gain = y0 + signal_clicks
    qber = min((0.5 * y0 + e_d * signal_clicks) / gain, 0.5)
    gain = min(gain, 1.0)
    raw = rx.protocol_factor * (
        -gain * rx.ec_efficiency * binary_entropy(qber) + q1 * (1.0 - binary_entropy(e1))
    )
    return KeyRate(rate=max(raw, 0.0), qber=qber, raw=raw, e1=e1, gain=gain)


# ---------------------------------------------------------------------------
# Distance limit


class NoiseMode(str, enum.Enum):
    NONE = "none"
    FORWARD = "forward"
    BACKWARD = "backward"
    BOTH = "both"


def noise_density(link: FiberLink, p0, eta, mode) -> float:
    mode = NoiseMode(mode)
    total = 0.0
    if mode in (NoiseMode.FORWARD, NoiseMode.BOTH):
        total += forward_icsrs(link, p0, eta)
    if mode in (NoiseMode.BACKWARD, NoiseMode.BOTH):
        total += backward_icsrs(link, p0, eta)
    return total


def key_rate_at(link: FiberLink, rx: QuantumReceiver, density,
                conversion: NoiseConversion = photon_counting) -> KeyRate:
    p_noise = noise_to_click_prob(density, rx, conversion)
    return secure_key_rate(link_budget(link, rx, p_noise), rx)


@dataclass(frozen=True)
class SecureDistance:
    distance_km: float
    bracket_limited: bool  # key rate still positive at the far end of the bracket


def max_secure_distance(link: FiberLink, rx: QuantumReceiver, noise_mode="none",
                        p0=Power(1.0), eta=RamanEfficiency(6e-9),
                        conversion: NoiseConversion = photon_counting,
                        bracket=(0.0, 500.0), resolution: float = 0.1,
                        scan_step: float = 1.0) -> SecureDistance:
    """Longest span with a positive key rate.

    The span length of ``link`` is ignored; everything else is the template.
    A coarse scan locates the last positive grid point, then bisection narrows
    the sign change to ``resolution``.  The key rate is assumed to stay at zero
    once it has dropped there.

    Raises:
        NoSecureKeyError: no scanned length in the bracket has a positive rate.
    """
    lo_b, hi_b = float(bracket[0]), float(bracket[1])
    if not 0.0 <= lo_b < hi_b:
        raise ValueError(f"invalid bracket {bracket!r}")
    start = max(lo_b, resolution)

    def positive(length):
        lk = link.with_length(length)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RegimeWarning)
            return key_rate_at(lk, rx, noise_density(lk, p0, eta, noise_mode), conversion).rate > 0.0

    n = max(int(math.ceil((hi_b - start) / scan_step)), 1)
    grid = [start + (hi_b - start) * i / n for i in range(n + 1)]
    last = None
    for i, length in enumerate(grid):
        if positive(length):
            last = i
    if last is None:
        raise NoSecureKeyError(
            f"no positive key rate for lengths in [{start}, {hi_b}] km (noise mode {NoiseMode(noise_mode).value})"
        )
    if last == n:
        return SecureDistance(hi_b, True)
    lo, hi = grid[last], grid[last + 1]
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if positive(mid):
            lo = mid
        else:
            hi = mid
    return SecureDistance(lo, False)
