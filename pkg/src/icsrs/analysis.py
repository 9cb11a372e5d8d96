"""Parameter sweeps and peak searches over the noise and key-rate models."""

from __future__ import annotations

import dataclasses
import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import dwdm, qkd, raman
from .dwdm import ChannelPlan, RamanEfficiencyProfile
from .fiber import FiberLink
from .qkd import QuantumReceiver
from .units import AttenuationCoeff, CouplingCoeff


class SweepVariable(str, enum.Enum):
    LENGTH = "length"  # km
    H_IJ = "h_ij"  # m^-1, the unit coupling coefficients are usually quoted in
    ALPHA_C = "alpha_c"  # km^-1
    ALPHA_Q = "alpha_q"  # km^-1
    LAUNCH_POWER = "launch_power"  # mW per channel


ABSCISSA_COLUMN = {
    SweepVariable.LENGTH: "length_km",
    SweepVariable.H_IJ: "h_ij_per_m",
    SweepVariable.ALPHA_C: "alpha_c_per_km",
    SweepVariable.ALPHA_Q: "alpha_q_per_km",
    SweepVariable.LAUNCH_POWER: "launch_power_mw",
}

QUANTITY_COLUMNS = (
    "forward_icsrs",  # mW/nm, every channel treated as co-propagating
    "backward_icsrs",  # mW/nm, every channel treated as counter-propagating
    "forward_srs",  # mW/nm, same launch in a single-core fiber
    "backward_srs",
    "skr",  # bits/gate with the plan's own directions
    "qber",
    "skr_no_noise",
    "qber_no_noise",
    "skr_all_forward",
    "qber_all_forward",
    "skr_all_backward",
    "qber_all_backward",
)


class SweepPointError(RuntimeError):
    def __init__(self, variable, abscissa, cause):
        self.abscissa = abscissa
        super().__init__(f"sweep over {variable} failed at {abscissa!r}: {cause}")


class PeakAtBoundaryError(RuntimeError):
    """Largest value sits at an end of the search bracket."""


class FlatCurveError(RuntimeError):
    """Curve is constant over the bracket; there is no peak to report."""


@dataclass(frozen=True)
class Scenario:
    link: FiberLink
    plan: ChannelPlan
    receiver: QuantumReceiver = QuantumReceiver()
    profile: RamanEfficiencyProfile = field(default_factory=dwdm.flat_profile)

    def at(self, variable, value) -> "Scenario":
        variable = SweepVariable(variable)
        if variable is SweepVariable.LENGTH:
            return dataclasses.replace(self, link=self.link.with_length(value))
        if variable is SweepVariable.H_IJ:
            return dataclasses.replace(self, link=self.link.replace(h_ij=CouplingCoeff.from_per_m(value)))
        if variable is SweepVariable.ALPHA_C:
            return dataclasses.replace(self, link=self.link.replace(alpha_c=AttenuationCoeff(value)))
        if variable is SweepVariable.ALPHA_Q:
            return dataclasses.replace(self, link=self.link.replace(alpha_q=AttenuationCoeff(value)))
        return dataclasses.replace(self, plan=self.plan.with_power(value))


@dataclass(frozen=True)
class SweepSpec:
    variable: SweepVariable
    lo: float
    hi: float
    points: int
    scenario: Scenario
    spacing: str = "linear"

    def __post_init__(self):
        object.__setattr__(self, "variable", SweepVariable(self.variable))
        if self.spacing not in ("linear", "log"):
            raise ValueError(f"spacing must be 'linear' or 'log', got {self.spacing!r}")
        if not int(self.points) == self.points or self.points < 2:
            raise ValueError(f"a sweep needs at least 2 points, got {self.points!r}")
        if not self.lo < self.hi:
            raise ValueError(f"sweep range needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.spacing == "log" and not self.lo > 0:
            raise ValueError("logarithmic spacing needs lo > 0")

    def abscissae(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, int(self.points))
        return np.linspace(self.lo, self.hi, int(self.points))


@dataclass(frozen=True)
class SweepResult:
    variable: SweepVariable
    columns: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]
    metadata: dict = field(default_factory=dict, compare=False)
    regime_warnings: tuple[float, ...] = ()  # abscissae where the click model was stretched

    def column(self, name: str) -> np.ndarray:
        return np.array([row[self.columns.index(name)] for row in self.rows])

    @property
    def abscissa(self) -> np.ndarray:
        return self.column(self.columns[0])

    def __len__(self):
        return len(self.rows)


def _key(link, rx, density, conversion):
    k = qkd.key_rate_at(link, rx, density, conversion)
    return k.rate, k.qber


def evaluate_point(scenario: Scenario, conversion=qkd.photon_counting) -> tuple[float, ...]:
    """All sweep quantities for one scenario, in :data:`QUANTITY_COLUMNS` order."""
    link, plan, rx, profile = scenario.link, scenario.plan, scenario.receiver, scenario.profile
    fwd = bwd = fsrs = bsrs = 0.0
    for i, ch in enumerate(plan.channels):
        try:
            eta = dwdm.eta_lookup(profile, ch.wavelength, plan.quantum_wavelength)
            lk = link if ch.alpha_c is None else link.replace(alpha_c=ch.alpha_c)
            fwd += raman.forward_icsrs(lk, ch.launch_power, eta)
            bwd += raman.backward_icsrs(lk, ch.launch_power, eta)
            fsrs += raman.forward_srs_singlecore(lk.alpha_c, lk.alpha_q, lk.length_km, ch.launch_power, eta)
            bsrs += raman.backward_srs_singlecore(lk.alpha_c, lk.alpha_q, lk.length_km, ch.launch_power, eta)
        except ValueError as exc:
            raise dwdm.ChannelError(i, ch, exc) from exc
    actual = dwdm.aggregate_icsrs(plan, link, profile)
    return (
        fwd, bwd, fsrs, bsrs,
        *_key(link, rx, actual, conversion),
        *_key(link, rx, 0.0, conversion),
        *_key(link, rx, fwd, conversion),
        *_key(link, rx, bwd, conversion),
    )


def run_sweep(spec: SweepSpec, conversion=qkd.photon_counting) -> SweepResult:
    """Evaluate every quantity at each abscissa of ``spec``.

    Points are independent of one another, so the result does not depend on
    evaluation order.  Any failing point aborts the sweep with its abscissa.
    """
    rows, flagged = [], []
    for x in spec.abscissae():
        x = float(x)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", qkd.RegimeWarning)
            try:
                values = evaluate_point(spec.scenario.at(spec.variable, x), conversion)
            except (ValueError, ArithmeticError, RuntimeError) as exc:
                raise SweepPointError(spec.variable.value, x, exc) from exc
        if any(issubclass(w.category, qkd.RegimeWarning) for w in caught):
            flagged.append(x)
        rows.append((x, *values))
    return SweepResult(
        variable=spec.variable,
        columns=(ABSCISSA_COLUMN[spec.variable], *QUANTITY_COLUMNS),
        rows=tuple(rows),
        regime_warnings=tuple(flagged),
    )


# ---------------------------------------------------------------------------
# Peak search


@dataclass(frozen=True)
class Peak:
    location_km: float
    value: float


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f, a, b, tol):
    c, d = b - _INVPHI * (b - a), a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:  # ties keep the left part
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def find_peak(curve: Callable[[float], float], bracket=(0.0, 200.0), step=0.01, tol=1e-4) -> Peak:
    """Maximise a unimodal ``curve`` by grid traversal then golden-section refinement.

    Ties on the grid go to the smaller abscissa.

    Raises:
        FlatCurveError: the curve is constant on the grid.
        PeakAtBoundaryError: the grid maximum is at either end of the bracket.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    n = int(round((hi - lo) / step))
    if n < 2:
        raise ValueError(f"step {step} too coarse for bracket {bracket!r}")
    grid = lo + (hi - lo) * np.arange(n + 1) / n
    values = np.array([curve(float(x)) for x in grid])
    if np.all(values == values[0]):
        raise FlatCurveError(f"curve is constant ({values[0]:g}) over [{lo}, {hi}]")
    i = int(np.argmax(values))
    if i == 0 or i == n:
        raise PeakAtBoundaryError(f"maximum at bracket edge {grid[i]:g} of [{lo}, {hi}]")
    x = _golden_max(curve, float(grid[i - 1]), float(grid[i + 1]), tol)
    peak = curve(x)
    h = (hi - lo) / n
    if not (curve(x - h) <= peak and curve(x + h) <= peak):
        raise RuntimeError(f"refined point {x:g} is not a local maximum; curve is not unimodal there")
    return Peak(x, peak)


def _length_curve(fn):
    # zero-length spans generate no noise
    return lambda L: 0.0 if L <= 0.0 else float(fn(L))


def find_forward_peak(link: FiberLink, p0, eta, bracket=(0.0, 200.0), step=0.01, tol=1e-4) -> Peak:
    """Span length maximising forward ICSRS (``link.length_km`` is ignored)."""
    curve = _length_curve(lambda L: raman.forward_icsrs(link.with_length(L), p0, eta))
    return find_peak(curve, bracket, step, tol)


def find_forward_srs_peak(alpha_c, alpha_q, p0, eta, bracket=(0.0, 200.0), step=0.01, tol=1e-4) -> Peak:
    curve = _length_curve(lambda L: raman.forward_srs_singlecore(alpha_c, alpha_q, L, p0, eta))
    return find_peak(curve, bracket, step, tol)


def forward_srs_peak_closed_form(alpha_c, alpha_q) -> float:
    """ln(aq/ac) / (aq - ac); tends to 1/a when both coefficients equal a."""
    ac, aq = float(alpha_c), float(alpha_q)
    if not (ac > 0.0 and aq > 0.0):
        raise ValueError(f"attenuation coefficients must be > 0, got {ac!r}, {aq!r}")
    x = (aq - ac) / ac
    if x == 0.0:
        return 1.0 / ac
    return math.log1p(x) / x / ac


# ---------------------------------------------------------------------------
# Single-core vs multicore comparison


@dataclass(frozen=True)
class Comparison:
    columns: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]
    l_max: Optional[float]  # forward ICSRS peak, numeric
    l_max_prime: Optional[float]  # forward SRS peak, closed form
    l_max_prime_numeric: Optional[float]

    @property
    def ordering_holds(self) -> Optional[bool]:
        if self.l_max is None or self.l_max_prime is None:
            return None
        return self.l_max >= self.l_max_prime

    def column(self, name: str) -> np.ndarray:
        return np.array([row[self.columns.index(name)] for row in self.rows])


def compare_srs_icsrs(link: FiberLink, p0, eta, lengths=None, step=0.01, strict=True) -> Comparison:
    """Pair the ICSRS and single-core SRS length curves and locate both forward peaks.

    With ``strict`` a ValueError is raised if the ICSRS peak comes before the SRS peak.
    Peaks are ``None`` when the curves are identically zero.
    """
    if lengths is None:
        lengths = np.linspace(1.0, 100.0, 100)
    rows = []
    for L in lengths:
        lk = link.with_length(float(L))
        rows.append((
            float(L),
            float(raman.forward_icsrs(lk, p0, eta)),
            float(raman.backward_icsrs(lk, p0, eta)),
            float(raman.forward_srs_singlecore(lk.alpha_c, lk.alpha_q, lk.length_km, p0, eta)),
            float(raman.backward_srs_singlecore(lk.alpha_c, lk.alpha_q, lk.length_km, p0, eta)),
        ))
    l_max = l_prime_num = None
    l_prime = forward_srs_peak_closed_form(link.alpha_c, link.alpha_q)
    try:
        l_max = find_forward_peak(link, p0, eta, step=step).location_km
        l_prime_num = find_forward_srs_peak(link.alpha_c, link.alpha_q, p0, eta, step=step).location_km
    except FlatCurveError:
        l_max = l_prime = l_prime_num = None
    result = Comparison(
        columns=("length_km", "forward_icsrs", "backward_icsrs", "forward_srs", "backward_srs"),
        rows=tuple(rows), l_max=l_max, l_max_prime=l_prime, l_max_prime_numeric=l_prime_num,
    )
    if strict and result.ordering_holds is False:
        raise ValueError(f"forward ICSRS peak {l_max:.3f} km precedes forward SRS peak {l_prime:.3f} km")
    return result
