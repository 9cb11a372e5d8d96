"""Multi-channel launch plans and aggregate ICSRS in the quantum channel.

Co-propagating channels contribute forward ICSRS, counter-propagating ones
backward ICSRS, each weighted by the Raman efficiency at its own detuning from
the quantum wavelength.
"""

from __future__ import annotations

import bisect
import enum
import io
import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .fiber import FiberLink
from .raman import NoiseDensity, RamanEfficiency, backward_icsrs, f_factor, forward_icsrs, g_factor
from .units import AttenuationCoeff, Power, Wavelength, thz_to_nm

C_BAND_NM = (1530.0, 1565.0)

BUNDLED_PROFILES = {
    "flat": "flat_6e-9.txt",
    "illustrative": "illustrative_detuning.txt",
}


class Direction(str, enum.Enum):
    CO = "co"  # travels with the quantum signal -> forward ICSRS at the receiver
    COUNTER = "counter"


class ProfileFormatError(ValueError):
    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = f"{source or '<profile>'}" + (f":{line}" if line is not None else "")
        super().__init__(f"{where}: {message}")


class DetuningRangeError(ValueError):
    """Requested detuning lies outside the tabulated Raman profile."""


class ChannelError(ValueError):
    """Failure evaluating one classical channel; carries its index."""

    def __init__(self, index, channel, cause):
        self.index = index
        self.channel = channel
        super().__init__(f"channel {index} ({float(channel.wavelength):.3f} nm): {cause}")


@dataclass(frozen=True)
class ClassicalChannel:
    wavelength: Wavelength
    launch_power: Power
    direction: Direction = Direction.CO
    alpha_c: Optional[AttenuationCoeff] = None  # overrides the link value when set

    def __post_init__(self):
        object.__setattr__(self, "wavelength", Wavelength(self.wavelength))
        object.__setattr__(self, "launch_power", Power(self.launch_power))
        object.__setattr__(self, "direction", Direction(self.direction))
        if self.alpha_c is not None:
            object.__setattr__(self, "alpha_c", AttenuationCoeff(self.alpha_c))


@dataclass(frozen=True)
class ChannelPlan:
    quantum_wavelength: Wavelength
    channels: tuple[ClassicalChannel, ...] = ()
    grid_spacing: Optional[float] = None  # GHz, informational

    def __post_init__(self):
        object.__setattr__(self, "quantum_wavelength", Wavelength(self.quantum_wavelength))
        object.__setattr__(self, "channels", tuple(self.channels))
        seen = {}
        for i, ch in enumerate(self.channels):
            key = round(float(ch.wavelength), 9)
            if key in seen:
                raise ValueError(f"channels {seen[key]} and {i} share wavelength {float(ch.wavelength)} nm")
            seen[key] = i
            if abs(float(ch.wavelength) - float(self.quantum_wavelength)) < 1e-9:
                raise ValueError(f"channel {i} sits on the quantum wavelength {float(self.quantum_wavelength)} nm")

    def __len__(self):
        return len(self.channels)

    def check_c_band(self) -> None:
        lo, hi = C_BAND_NM
        for i, lam in enumerate([self.quantum_wavelength] + [c.wavelength for c in self.channels]):
            if not lo <= float(lam) <= hi:
                label = "quantum channel" if i == 0 else f"channel {i - 1}"
                raise ValueError(f"{label} at {float(lam)} nm outside C-band [{lo}, {hi}] nm")

    def with_power(self, power) -> "ChannelPlan":
        chans = [ClassicalChannel(c.wavelength, power, c.direction, c.alpha_c) for c in self.channels]
        return ChannelPlan(self.quantum_wavelength, chans, self.grid_spacing)

    def scaled(self, factor: float) -> "ChannelPlan":
        chans = [ClassicalChannel(c.wavelength, c.launch_power * factor, c.direction, c.alpha_c)
                 for c in self.channels]
        return ChannelPlan(self.quantum_wavelength, chans, self.grid_spacing)

    def union(self, other: "ChannelPlan") -> "ChannelPlan":
        if float(other.quantum_wavelength) != float(self.quantum_wavelength):
            raise ValueError("plans target different quantum wavelengths")
        return ChannelPlan(self.quantum_wavelength, self.channels + other.channels, self.grid_spacing)

    @classmethod
    def frequency_grid(cls, quantum_thz=193.5, spacing_ghz=200.0, n_below=8, n_above=8,
                       power=Power(1.0), direction=Direction.CO) -> "ChannelPlan":
        """Equal-power channels on a fixed grid either side of the quantum frequency."""
        step = spacing_ghz / 1000.0
        freqs = [quantum_thz - step * k for k in range(n_below, 0, -1)]
        freqs += [quantum_thz + step * k for k in range(1, n_above + 1)]
        chans = [ClassicalChannel(thz_to_nm(f), power, direction) for f in freqs]
        return cls(thz_to_nm(quantum_thz), chans, spacing_ghz)


@dataclass(frozen=True)
class RamanEfficiencyProfile:
    """Raman efficiency tabulated against signed detuning lambda_q - lambda_c (nm).

    Positive detuning means the quantum channel sits on the Stokes (longer
    wavelength) side of the pump.  Linear interpolation between nodes; no
    extrapolation.
    """

    detunings: tuple[float, ...]
    etas: tuple[float, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        d = tuple(float(x) for x in self.detunings)
        e = tuple(float(RamanEfficiency(x)) for x in self.etas)
        if len(d) != len(e):
            raise ValueError("detunings and etas differ in length")
        if len(d) < 2:
            raise ValueError("a profile needs at least two nodes")
        for i in range(1, len(d)):
            if not d[i] > d[i - 1]:
                raise ValueError(f"detunings must be strictly increasing (node {i}: {d[i]} after {d[i - 1]})")
        object.__setattr__(self, "detunings", d)
        object.__setattr__(self, "etas", e)

    @property
    def span(self) -> tuple[float, float]:
        return self.detunings[0], self.detunings[-1]

    def eta_at(self, detuning_nm) -> RamanEfficiency:
        x = float(detuning_nm)
        lo, hi = self.span
        if not lo <= x <= hi:
            raise DetuningRangeError(f"detuning {x:+.4f} nm outside profile range [{lo:+g}, {hi:+g}] nm")
        i = bisect.bisect_right(self.detunings, x)
        if i == len(self.detunings):
            return RamanEfficiency(self.etas[-1])
        x0, x1 = self.detunings[i - 1], self.detunings[i]
        y0, y1 = self.etas[i - 1], self.etas[i]
        if x == x0:
            return RamanEfficiency(y0)
        w = (x - x0) / (x1 - x0)
        return RamanEfficiency(y0 + w * (y1 - y0))


def eta_lookup(profile: RamanEfficiencyProfile, lambda_c, lambda_q) -> RamanEfficiency:
    return profile.eta_at(float(Wavelength(lambda_q)) - float(Wavelength(lambda_c)))


def load_profile(source, name: str | None = None) -> RamanEfficiencyProfile:
    """Read a two-column ``detuning_nm eta_per_km_nm`` table.

    ``source`` may be a path, an open text file, or the key of a bundled
    profile ("flat", "illustrative").  Columns split on whitespace or commas;
    ``#`` starts a comment; one non-numeric header row is allowed before data.
    """
    if isinstance(source, str) and source in BUNDLED_PROFILES:
        text = resources.files("icsrs.data").joinpath(BUNDLED_PROFILES[source]).read_text()
        label = name or source
    elif isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
        label = name or os.fspath(source)
    elif isinstance(source, io.IOBase) or hasattr(source, "read"):
        text = source.read()
        label = name or getattr(source, "name", "<stream>")
    else:
        raise TypeError(f"cannot read a profile from {type(source).__name__}")
    return parse_profile(text, label)


def parse_profile(text: str, label: str = "<profile>") -> RamanEfficiencyProfile:
    detunings, etas = [], []
    header_allowed = True
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise ProfileFormatError(f"expected 2 columns, found {len(parts)}", lineno, label)
        try:
            x, y = float(parts[0]), float(parts[1])
        except ValueError:
            if header_allowed:
                header_allowed = False
                continue
            raise ProfileFormatError(f"non-numeric row {line!r}", lineno, label) from None
        header_allowed = False
        if y < 0.0:
            raise ProfileFormatError(f"negative Raman efficiency {y!r}", lineno, label)
        if detunings and not x > detunings[-1]:
            raise ProfileFormatError(
                f"detuning {x!r} nm is not above the previous row ({detunings[-1]!r} nm)", lineno, label
            )
        detunings.append(x)
        etas.append(y)
    if not detunings:
        raise ProfileFormatError("profile contains no data rows", None, label)
    if len(detunings) < 2:
        raise ProfileFormatError("profile needs at least two rows", None, label)
    return RamanEfficiencyProfile(tuple(detunings), tuple(etas), name=label)


def flat_profile(eta=6e-9, half_span_nm=200.0) -> RamanEfficiencyProfile:
    return RamanEfficiencyProfile((-half_span_nm, half_span_nm), (eta, eta), name=f"flat {eta:g}")


def _channel_link(link: FiberLink, ch: ClassicalChannel) -> FiberLink:
    return link if ch.alpha_c is None else link.replace(alpha_c=ch.alpha_c)


def channel_noise(plan: ChannelPlan, link: FiberLink, profile: RamanEfficiencyProfile) -> list[float]:
    """Per-channel ICSRS contributions (mW/nm), in plan order."""
    out = []
    for i, ch in enumerate(plan.channels):
        try:
            eta = eta_lookup(profile, ch.wavelength, plan.quantum_wavelength)
            lk = _channel_link(link, ch)
            if ch.direction is Direction.CO:
                out.append(float(forward_icsrs(lk, ch.launch_power, eta)))
            else:
                out.append(float(backward_icsrs(lk, ch.launch_power, eta)))
        except ValueError as exc:
            raise ChannelError(i, ch, exc) from exc
    return out


def aggregate_icsrs(plan: ChannelPlan, link: FiberLink, profile: RamanEfficiencyProfile) -> NoiseDensity:
    """Total ICSRS in the quantum channel from every classical channel in ``plan``."""
    return NoiseDensity(sum(channel_noise(plan, link, profile)))


def aggregate_icsrs_factored(plan: ChannelPlan, link: FiberLink,
                             profile: RamanEfficiencyProfile) -> NoiseDensity:
    """Same total via one G and one F factor shared by all channels.

    Only meaningful when every channel uses the link's attenuation.
    """
    if any(ch.alpha_c is not None for ch in plan.channels):
        raise ValueError("factored aggregation assumes one attenuation for all channels")
    co = counter = 0.0
    for i, ch in enumerate(plan.channels):
        try:
            weight = float(eta_lookup(profile, ch.wavelength, plan.quantum_wavelength)) * float(ch.launch_power)
        except ValueError as exc:
            raise ChannelError(i, ch, exc) from exc
        if ch.direction is Direction.CO:
            co += weight
        else:
            counter += weight
    total = 0.0
    if co:
        total += g_factor(link) * co
    if counter:
        total += f_factor(link) * counter
    return NoiseDensity(total)


def single_channel_plan(quantum_wavelength, channel_wavelength, power, direction=Direction.CO) -> ChannelPlan:
    return ChannelPlan(quantum_wavelength, [ClassicalChannel(channel_wavelength, power, direction)])
