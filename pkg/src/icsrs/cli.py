"""Command-line entry point: ``icsrs run | list-recipes | validate``.

Exit codes: 0 success, 2 usage, 3 invalid configuration, 4 computation
failure, 5 file I/O failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .analysis import ABSCISSA_COLUMN, QUANTITY_COLUMNS, SweepPointError, SweepResult, run_sweep
from .config import RECIPE_NAMES, ConfigError, ScenarioConfig, load_recipe, resolve, scenario_metadata
from .units import mw_to_dbm

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_COMPUTE = 4
EXIT_IO = 5

NOISE_COLUMNS = ("forward_icsrs", "backward_icsrs", "forward_srs", "backward_srs")


def csv_columns(result: SweepResult) -> list[str]:
    """Output header: noise densities appear twice, in mW/nm and dBm/nm."""
    cols = [result.columns[0]]
    for name in QUANTITY_COLUMNS:
        if name in NOISE_COLUMNS:
            cols += [f"{name}_mw_per_nm", f"{name}_dbm_per_nm"]
        else:
            cols.append(name)
    return cols


def fmt(x: float) -> str:
    if math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return f"{x:.11e}"


def render_csv(cfg: ScenarioConfig, result: SweepResult) -> str:
    lines = [f"# icsrs {__version__}"]
    lines += [f"# {key} = {value}" for key, value in scenario_metadata(cfg)]
    if result.regime_warnings:
        lines.append(f"# warning = noise click probability above 0.1 at {len(result.regime_warnings)} point(s)")
    lines.append(",".join(csv_columns(result)))
    for row in result.rows:
        cells = [fmt(row[0])]
        for name, value in zip(QUANTITY_COLUMNS, row[1:]):
            cells.append(fmt(value))
            if name in NOISE_COLUMNS:
                cells.append(fmt(mw_to_dbm(value)))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def render_gnuplot(cfg: ScenarioConfig, result: SweepResult, csv_name: str) -> str:
    header = csv_columns(result)
    columns = cfg.plot.get("columns") or [header[1]]
    out = [
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set key autotitle columnhead",
        f"set title {cfg.plot.get('title', cfg.name)!r}",
        f"set xlabel {header[0]!r}",
    ]
    if cfg.plot.get("logx"):
        out.append("set logscale x")
    if cfg.plot.get("logy"):
        out.append("set logscale y")
    parts = []
    for name in columns:
        if name not in header:
            raise ValueError(f"plot column {name!r} not in CSV header")
        parts.append(f"{csv_name!r} using 1:{header.index(name) + 1} with lines")
    out.append("plot " + ", \\\n     ".join(parts))
    return "\n".join(out) + "\n"


def write_atomic(path: Path, text: str) -> None:
    """Write via a temp file in the target directory, then rename over ``path``."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _apply_step(cfg: ScenarioConfig, step: float) -> ScenarioConfig:
    sweep = cfg.sweep
    if sweep.spacing != "linear":
        raise ConfigError([f"--step only applies to linear sweeps, {sweep.variable.value} is {sweep.spacing}"],
                          cfg.source)
    if not step > 0:
        raise ConfigError([f"--step must be > 0, got {step}"], cfg.source)
    points = int(round((sweep.hi - sweep.lo) / step)) + 1
    if points < 2:
        raise ConfigError([f"--step {step} leaves fewer than 2 points in [{sweep.lo}, {sweep.hi}]"], cfg.source)
    return dataclasses.replace(cfg, sweep=dataclasses.replace(sweep, points=points))


def _err(msg):
    print(f"icsrs: {msg}", file=sys.stderr)


def cmd_run(args) -> int:
    try:
        cfg = resolve(args.target, strict=args.strict)
        if args.step is not None:
            cfg = _apply_step(cfg, args.step)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    if not args.quiet:
        for note in cfg.warnings:
            _err(f"warning: {note}")

    try:
        result = run_sweep(cfg.sweep)
    except SweepPointError as exc:
        _err(f"computation failed: {exc}")
        return EXIT_COMPUTE

    out = Path(args.output)
    try:
        write_atomic(out, render_csv(cfg, result))
        if args.gnuplot:
            write_atomic(out.with_suffix(".gp"), render_gnuplot(cfg, result, out.name))
    except ValueError as exc:
        _err(f"plot script: {exc}")
        return EXIT_CONFIG
    except OSError as exc:
        _err(f"cannot write {out}: {exc.strerror or exc}")
        return EXIT_IO
    if not args.quiet:
        print(f"{cfg.name}: {len(result)} rows -> {out}")
        if result.regime_warnings:
            _err(f"warning: noise click probability exceeded 0.1 at {len(result.regime_warnings)} point(s)")
    return EXIT_OK


def cmd_list(args) -> int:
    for name in RECIPE_NAMES:
        cfg = load_recipe(name)
        print(f"{name}  {cfg.description}")
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        cfg = resolve(args.target, strict=args.strict)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    if not args.quiet:
        for note in cfg.warnings:
            _err(f"warning: {note}")
        print(f"{args.target}: ok ({cfg.sweep.variable.value} sweep, {int(cfg.sweep.points)} points, "
              f"{len(cfg.scenario.plan)} channel(s))")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--strict", dest="strict", action="store_true", default=True,
                      help="reject unknown configuration keys (default)")
    mode.add_argument("--lenient", dest="strict", action="store_false",
                      help="warn about unknown configuration keys and ignore them")
    common.add_argument("--quiet", action="store_true", help="suppress progress and warnings")

    parser = argparse.ArgumentParser(prog="icsrs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="run a recipe or scenario file and write CSV")
    run.add_argument("target", help=f"config path or recipe name ({', '.join(RECIPE_NAMES)})")
    run.add_argument("output", help="CSV file to write")
    run.add_argument("--step", type=float, default=None,
                     help="abscissa spacing for linear sweeps (overrides the point count)")
    run.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script next to the CSV")
    run.set_defaults(func=cmd_run)

    lst = sub.add_parser("list-recipes", parents=[common], help="list bundled figure recipes")
    lst.set_defaults(func=cmd_list)

    val = sub.add_parser("validate", parents=[common], help="check a scenario file without running it")
    val.add_argument("target")
    val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
