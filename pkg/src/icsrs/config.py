"""Scenario files and bundled figure recipes.

A scenario is a TOML document with ``[link]``, ``[receiver]``, ``[plan]``,
``[profile]``, ``[sweep]`` and optional ``[meta]``, ``[output]``, ``[plot]``
tables.  Loading collects every problem it finds (with its key path) before
raising, so one run reports the whole list.
"""

from __future__ import annotations

import math
import os
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import dwdm
from .analysis import Scenario, SweepSpec, SweepVariable
from .dwdm import ChannelPlan, ClassicalChannel, Direction
from .fiber import FiberLink
from .qkd import QuantumReceiver
from .units import AttenuationCoeff, CouplingCoeff, Power, Wavelength, thz_to_nm

RECIPE_NAMES = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7")

SECTIONS = ("meta", "link", "receiver", "plan", "profile", "sweep", "output", "plot")


class ConfigError(ValueError):
    """One or more problems in a scenario document."""

    def __init__(self, errors: list[str], source: str = "<config>"):
        self.errors = list(errors)
        self.source = source
        lines = "\n".join(f"  - {e}" for e in self.errors)
        super().__init__(f"{source}: {len(self.errors)} error(s)\n{lines}")


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    description: str
    scenario: Scenario
    sweep: SweepSpec
    output: Optional[str] = None
    plot: dict = field(default_factory=dict, compare=False)
    source: str = field(default="", compare=False)
    warnings: tuple[str, ...] = field(default=(), compare=False)


_MISSING = object()


class _Table:
    """Typed access to one TOML table that records errors instead of raising."""

    def __init__(self, data, path: str, errors: list, notes: list, strict: bool):
        self.data = data if isinstance(data, dict) else {}
        self.path = path
        self.errors = errors
        self.notes = notes
        self.strict = strict
        self.used: set[str] = set()
        if data is not None and not isinstance(data, dict):
            errors.append(f"{path}: expected a table")

    def key(self, name):
        return f"{self.path}.{name}" if self.path else name

    def has(self, name):
        return name in self.data

    def get(self, name, kind, default=_MISSING):
        self.used.add(name)
        if name not in self.data:
            if default is _MISSING:
                self.errors.append(f"{self.key(name)}: missing required key")
            return None if default is _MISSING else default
        value = self.data[name]
        if kind is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                self.errors.append(f"{self.key(name)}: expected a number, got {type(value).__name__}")
                return None
            if not math.isfinite(value):
                self.errors.append(f"{self.key(name)}: must be finite")
                return None
            return float(value)
        if kind is int:
            if isinstance(value, bool) or not isinstance(value, int):
                self.errors.append(f"{self.key(name)}: expected an integer, got {type(value).__name__}")
                return None
            return value
        if not isinstance(value, kind):
            self.errors.append(f"{self.key(name)}: expected {kind.__name__}, got {type(value).__name__}")
            return None
        return value

    def one_of(self, *names):
        """Exactly one of several alternative spellings must be given; returns its name."""
        present = [n for n in names if n in self.data]
        if len(present) != 1:
            listed = ", ".join(self.key(n) for n in names)
            what = "none" if not present else "more than one"
            self.errors.append(f"{listed}: exactly one required, {what} given")
            self.used.update(names)
            return None
        return present[0]

    def check(self, ok, name, message):
        if not ok:
            self.errors.append(f"{self.key(name)}: {message}")
        return ok

    def finish(self):
        for extra in sorted(set(self.data) - self.used):
            msg = f"{self.key(extra)}: unknown key"
            if self.strict:
                self.errors.append(msg)
            else:
                self.notes.append(msg + " (ignored)")


def _attempt(errors, path, fn):
    try:
        return fn()
    except (ValueError, TypeError) as exc:
        errors.append(f"{path}: {exc}")
        return None
    except OSError as exc:
        errors.append(f"{path}: cannot read {exc.filename or ''}: {exc.strerror or exc}")
        return None


def _parse_link(t: _Table):
    length = t.get("length_km", float)
    if length is not None:
        t.check(length > 0, "length_km", f"must be > 0, got {length}")
    alphas = {}
    for which in ("alpha_c", "alpha_q"):
        spelled = t.one_of(f"{which}_db_per_km", f"{which}_per_km")
        if spelled is None:
            continue
        value = t.get(spelled, float)
        if value is None:
            continue
        if not t.check(value >= 0, spelled, f"must be >= 0, got {value}"):
            continue
        alphas[which] = (AttenuationCoeff.from_db_per_km(value) if spelled.endswith("db_per_km")
                         else AttenuationCoeff(value))
    h = None
    spelled = t.one_of("h_ij_per_m", "h_ij_per_km")
    if spelled is not None:
        value = t.get(spelled, float)
        if value is not None and t.check(value >= 0, spelled, f"must be >= 0, got {value}"):
            h = CouplingCoeff.from_per_m(value) if spelled == "h_ij_per_m" else CouplingCoeff(value)
    c_band = t.get("c_band", bool, default=False)
    t.finish()
    if length is None or length <= 0 or len(alphas) != 2 or h is None:
        return None
    link = _attempt(t.errors, t.path, lambda: FiberLink(length, alphas["alpha_c"], alphas["alpha_q"], h))
    if link is not None and c_band:
        _attempt(t.errors, t.path, link.check_c_band)
    return link


_RECEIVER_KEYS = {
    # config key -> (QuantumReceiver field, scale to SI/internal)
    "det_efficiency": ("det_efficiency", 1.0),
    "dark_count_prob": ("dark_count_prob", 1.0),
    "gate_width_ns": ("gate_width", 1e-9),
    "rx_bandwidth_ghz": ("rx_bandwidth", 1.0),
    "misalignment": ("misalignment", 1.0),
    "mean_photon_number": ("mean_photon_number", 1.0),
    "ec_efficiency": ("ec_efficiency", 1.0),
    "protocol_factor": ("protocol_factor", 1.0),
}


def _parse_receiver(t: _Table, quantum_wavelength):
    kwargs = {}
    for key, (field_name, scale) in _RECEIVER_KEYS.items():
        value = t.get(key, float, default=None)
        if value is not None:
            kwargs[field_name] = value * scale
    wl = t.get("wavelength_nm", float, default=None)
    if wl is not None and quantum_wavelength is not None and abs(wl - float(quantum_wavelength)) > 1e-6:
        t.errors.append(
            f"{t.key('wavelength_nm')}: {wl} nm differs from plan quantum wavelength {float(quantum_wavelength)} nm"
        )
    if wl is None:
        wl = quantum_wavelength
    t.finish()
    if wl is None:
        return None
    kwargs["wavelength"] = wl
    return _attempt(t.errors, t.path, lambda: QuantumReceiver(**kwargs))


def _channel_power(t: _Table):
    spelled = t.one_of("power_dbm", "power_mw")
    if spelled is None:
        return None
    value = t.get(spelled, float)
    if value is None:
        return None
    if spelled == "power_dbm":
        return Power.from_dbm(value)
    return _attempt(t.errors, t.key(spelled), lambda: Power(value))


def _parse_plan(t: _Table, errors, notes, strict):
    q_spelled = t.one_of("quantum_wavelength_nm", "quantum_thz")
    qwl = None
    if q_spelled is not None:
        value = t.get(q_spelled, float)
        if value is not None:
            conv = (lambda: Wavelength(value)) if q_spelled.endswith("nm") else (lambda: Wavelength.from_thz(value))
            qwl = _attempt(errors, t.key(q_spelled), conv)
    spacing = t.get("grid_spacing_ghz", float, default=None)
    c_band = t.get("c_band", bool, default=False)
    channels = []
    if t.has("grid") and t.has("channels"):
        errors.append(f"{t.key('grid')}, {t.key('channels')}: give either a grid or explicit channels, not both")
    if t.has("grid"):
        g = _Table(t.get("grid", dict), t.key("grid"), errors, notes, strict)
        spacing_g = g.get("spacing_ghz", float)
        n_below = g.get("n_below", int)
        n_above = g.get("n_above", int)
        power = _channel_power(g)
        direction = g.get("direction", str, default="co")
        g.finish()
        if q_spelled == "quantum_wavelength_nm" and qwl is not None:
            center = float(qwl.thz)
        elif q_spelled == "quantum_thz":
            center = t.data.get("quantum_thz")
        else:
            center = None
        if None not in (spacing_g, n_below, n_above, power, center):
            plan = _attempt(errors, g.path, lambda: ChannelPlan.frequency_grid(
                center, spacing_g, n_below, n_above, power, Direction(direction)))
            if plan is not None:
                channels = list(plan.channels)
                spacing = spacing if spacing is not None else spacing_g
    elif t.has("channels"):
        raw = t.get("channels", list)
        for i, entry in enumerate(raw or []):
            c = _Table(entry, t.key(f"channels[{i}]"), errors, notes, strict)
            w_spelled = c.one_of("wavelength_nm", "frequency_thz")
            wl = None
            if w_spelled is not None:
                value = c.get(w_spelled, float)
                if value is not None:
                    wl = value if w_spelled == "wavelength_nm" else _attempt(errors, c.key(w_spelled),
                                                                           lambda: thz_to_nm(value))
            power = _channel_power(c)
            direction = c.get("direction", str, default="co")
            alpha = c.get("alpha_c_per_km", float, default=None)
            c.finish()
            if wl is None or power is None:
                continue
            ch = _attempt(errors, c.path, lambda: ClassicalChannel(wl, power, Direction(direction), alpha))
            if ch is not None:
                channels.append(ch)
    else:
        t.used.add("channels")
        errors.append(f"{t.path}: needs 'channels' or 'grid'")
    t.finish()
    if qwl is None:
        return None
    plan = _attempt(errors, t.path, lambda: ChannelPlan(qwl, channels, spacing))
    if plan is not None and c_band:
        _attempt(errors, t.path, plan.check_c_band)
    return plan


def _parse_profile(t: _Table, base_dir: Path):
    spelled = t.one_of("source", "eta_per_km_nm")
    profile = None
    if spelled == "eta_per_km_nm":
        value = t.get(spelled, float)
        if value is not None and t.check(value >= 0, spelled, f"must be >= 0, got {value}"):
            profile = dwdm.flat_profile(value)
    elif spelled == "source":
        src = t.get("source", str)
        if src is not None:
            if src not in dwdm.BUNDLED_PROFILES:
                path = Path(src)
                src = path if path.is_absolute() else base_dir / path
            profile = _attempt(t.errors, t.key("source"), lambda: dwdm.load_profile(src))
    t.finish()
    return profile


def _parse_sweep(t: _Table):
    variable = t.get("variable", str)
    if variable is not None and variable not in {v.value for v in SweepVariable}:
        t.errors.append(f"{t.key('variable')}: unknown sweep variable {variable!r}")
        variable = None
    lo = t.get("lo", float)
    hi = t.get("hi", float)
    points = t.get("points", int)
    spacing = t.get("spacing", str, default="linear")
    t.finish()
    if points is not None:
        t.check(points >= 2, "points", f"must be >= 2, got {points}")
    if lo is not None and hi is not None:
        t.check(lo < hi, "hi", f"must exceed lo ({lo}), got {hi}")
    t.check(spacing in ("linear", "log"), "spacing", f"must be 'linear' or 'log', got {spacing!r}")
    if spacing == "log" and lo is not None:
        t.check(lo > 0, "lo", "logarithmic spacing needs lo > 0")
    if variable == SweepVariable.LENGTH.value and lo is not None:
        t.check(lo > 0, "lo", "fiber length sweeps must start above 0 km")
    return variable, lo, hi, points, spacing


def parse_config(doc: dict, source: str = "<config>", base_dir=None, strict: bool = True) -> ScenarioConfig:
    """Validate a decoded TOML document; raises ConfigError listing every problem."""
    errors: list[str] = []
    notes: list[str] = []
    base_dir = Path(base_dir) if base_dir is not None else Path.cwd()

    top = _Table(doc, "", errors, notes, strict)
    for name in SECTIONS:
        top.used.add(name)
    top.finish()

    def table(name, required=True):
        if name not in doc:
            if required:
                errors.append(f"{name}: missing section")
            return _Table({}, name, errors, notes, strict)
        return _Table(doc[name], name, errors, notes, strict)

    meta = table("meta", required=False)
    name = meta.get("name", str, default=Path(source).stem)
    description = meta.get("description", str, default="")
    meta.finish()

    link = _parse_link(table("link"))
    plan = _parse_plan(table("plan"), errors, notes, strict)
    receiver = _parse_receiver(table("receiver", required=False),
                               plan.quantum_wavelength if plan is not None else None)
    profile = _parse_profile(table("profile"), base_dir)
    variable, lo, hi, points, spacing = _parse_sweep(table("sweep"))

    out = table("output", required=False)
    output = out.get("path", str, default=None)
    out.finish()

    pl = table("plot", required=False)
    plot = {}
    for key, kind in (("columns", list), ("logx", bool), ("logy", bool), ("title", str)):
        value = pl.get(key, kind, default=None)
        if value is not None:
            plot[key] = value
    pl.finish()

    if plan is not None and profile is not None:
        for i, ch in enumerate(plan.channels):
            _attempt(errors, f"plan.channels[{i}]",
                     lambda: dwdm.eta_lookup(profile, ch.wavelength, plan.quantum_wavelength))

    sweep = None
    if not errors:
        scenario = Scenario(link=link, plan=plan, receiver=receiver, profile=profile)
        sweep = _attempt(errors, "sweep", lambda: SweepSpec(variable, lo, hi, points, scenario, spacing))
    if errors:
        raise ConfigError(errors, source)
    return ScenarioConfig(
        name=name, description=description, scenario=sweep.scenario, sweep=sweep,
        output=output, plot=plot, source=source, warnings=tuple(notes),
    )


def load_config(path, strict: bool = True) -> ScenarioConfig:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError([f"cannot read file: {exc.strerror or exc}"], str(path)) from exc
    try:
        doc = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError([f"not valid TOML: {exc}"], str(path)) from exc
    return parse_config(doc, str(path), base_dir=path.parent, strict=strict)


def recipe_path(name: str):
    if name not in RECIPE_NAMES:
        raise KeyError(f"unknown recipe {name!r}; available: {', '.join(RECIPE_NAMES)}")
    return resources.files("icsrs.recipes").joinpath(f"{name}.toml")


def recipe_text(name: str) -> str:
    return recipe_path(name).read_text(encoding="utf-8")


def load_recipe(name: str, strict: bool = True) -> ScenarioConfig:
    """Load one of the bundled figure recipes (fig2 .. fig7)."""
    doc = tomllib.loads(recipe_text(name))
    return parse_config(doc, f"recipe:{name}", strict=strict)


def resolve(target: str, strict: bool = True) -> ScenarioConfig:
    """Treat ``target`` as a config path if it exists, otherwise as a recipe name."""
    if os.path.exists(target):
        return load_config(target, strict=strict)
    if target in RECIPE_NAMES:
        return load_recipe(target, strict=strict)
    raise ConfigError([f"no such config file or recipe (recipes: {', '.join(RECIPE_NAMES)})"], target)


def scenario_metadata(cfg: ScenarioConfig) -> list[tuple[str, str]]:
    """Flattened, deterministic description of everything that went into a run."""
    sc, sw = cfg.scenario, cfg.sweep
    link, rx, plan, prof = sc.link, sc.receiver, sc.plan, sc.profile

    def num(x):
        return f"{float(x):.12g}"

    items = [
        ("name", cfg.name),
        ("description", cfg.description),
        ("link.length_km", num(link.length_km)),
        ("link.alpha_c_per_km", num(link.alpha_c)),
        ("link.alpha_q_per_km", num(link.alpha_q)),
        ("link.h_ij_per_km", num(link.h_ij)),
        ("receiver.det_efficiency", num(rx.det_efficiency)),
        ("receiver.dark_count_prob", num(rx.dark_count_prob)),
        ("receiver.gate_width_s", num(rx.gate_width)),
        ("receiver.rx_bandwidth_ghz", num(rx.rx_bandwidth)),
        ("receiver.wavelength_nm", num(rx.wavelength)),
        ("receiver.misalignment", num(rx.misalignment)),
        ("receiver.mean_photon_number", num(rx.mean_photon_number)),
        ("receiver.ec_efficiency", num(rx.ec_efficiency)),
        ("receiver.protocol_factor", num(rx.protocol_factor)),
        ("plan.quantum_wavelength_nm", num(plan.quantum_wavelength)),
        ("plan.grid_spacing_ghz", "" if plan.grid_spacing is None else num(plan.grid_spacing)),
        ("plan.channel_count", str(len(plan.channels))),
    ]
    for i, ch in enumerate(plan.channels):
        alpha = "" if ch.alpha_c is None else f" alpha_c_per_km={num(ch.alpha_c)}"
        items.append((f"plan.channels[{i}]",
                      f"wavelength_nm={num(ch.wavelength)} power_mw={num(ch.launch_power)} "
                      f"direction={ch.direction.value}{alpha}"))
    items.append(("profile.name", prof.name))
    items.append(("profile.nodes", " ".join(f"{num(d)}:{num(e)}" for d, e in zip(prof.detunings, prof.etas))))
    items += [
        ("sweep.variable", sw.variable.value),
        ("sweep.lo", num(sw.lo)),
        ("sweep.hi", num(sw.hi)),
        ("sweep.points", str(int(sw.points))),
        ("sweep.spacing", sw.spacing),
    ]
    return items
