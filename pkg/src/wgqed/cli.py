"""
Scenario files, command workflows and tabular output.

A scenario is a YAML document::

    units: {rate: gamma0, length: lambda}
    waveguide: {wavelength: 1.0}
    emitters:
      - {z: 0.0, gamma_wg: 2.0, gamma_free: 1.0}
      - {z: 0.05, gamma_wg: 2.0, gamma_free: 1.0}
    gradient: 0.0
    grid: {min: -40, max: 40, points: 8001}
    inversion: {method: lossy}
    sensing: {d: 0.01, gamma_wg: 10, gamma_free: 1, shifts: [92.0]}

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError, DomainError, NumericalError
from .features import auto_grid, count_emitters, find_extrema
from .inversion import (
    disambiguate_branch,
    extract_per_emitter,
    invert_lossless,
    invert_lossy,
    measured_splitting,
)
from .model import Emitter, EmitterArray, WaveguideParams, apply_gradient_field, compute_spectrum
from .sensing import SensingConfig, read_shift

COMMANDS = ("spectrum", "features", "count", "invert", "sense")
RATE_UNITS = ("gamma0", "Gamma0")
EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3

SCHEMAS = {
    "spectrum": ("detuning", "re_r", "im_r", "R", "T"),
    "features": ("kind", "center", "value", "fwhm"),
    "count": ("regime", "peaks", "dips", "emitters"),
    "invert": ("method", "emitter", "d", "n", "gamma_wg", "gamma_free", "residual"),
    "sense": ("shift", "dd", "microstrain", "kelvin", "resolvable"),
}


# ----------------------------- configuration -----------------------------

def _line_map(node, path="", out=None):
    """Dotted field path -> 1-based source line for every YAML node."""
    out = {} if out is None else out
    out[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            key = f"{path}.{k.value}" if path else str(k.value)
            _line_map(v, key, out)
            out[key] = k.start_mark.line + 1  # report the key, not the value
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            _line_map(v, f"{path}[{i}]", out)
    return out


class _Reader:
    """Typed access to the raw mapping with line-aware errors."""

    def __init__(self, data, lines):
        self.data = data
        self.lines = lines

    def fail(self, path, message):
        line = self.lines.get(path)
        if line is None:
            parent = path.rsplit(".", 1)[0] if "." in path else ""
            line = self.lines.get(parent)
        raise ConfigError(message, field=path, line=line)

    def get(self, path, default=KeyError):
        node = self.data
        for part in path.split("."):
            if "[" in part:
                name, idx = part[:-1].split("[")
                node = node.get(name) if isinstance(node, dict) else None
                node = node[int(idx)] if isinstance(node, list) and int(idx) < len(node) else None
            else:
                node = node.get(part) if isinstance(node, dict) else None
            if node is None:
                if default is KeyError:
                    self.fail(path, "required field is missing")
                return default
        return node

    def number(self, path, default=KeyError, positive=False, allow_inf=False):
        value = self.get(path, default)
        if value is default and default is not KeyError:
            return value
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", ".inf") and allow_inf:
                value = math.inf
            else:
                self.fail(path, f"expected a number, got {value!r}")
        value = float(value)
        if math.isnan(value) or (math.isinf(value) and not allow_inf):
            self.fail(path, "must be finite")
        if positive and not value > 0:
            self.fail(path, "must be positive")
        return value

    def integer(self, path, default=KeyError, minimum=None):
        value = self.get(path, default)
        if value is default and default is not KeyError:
            return value
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(path, f"expected an integer, got {value!r}")
        if minimum is not None and value < minimum:
            self.fail(path, f"must be >= {minimum}")
        return value

    def choice(self, path, options, default=KeyError):
        value = self.get(path, default)
        if value not in options:
            self.fail(path, f"must be one of {', '.join(map(str, options))}, got {value!r}")
        return value


@dataclass
class ScenarioConfig:
    waveguide: WaveguideParams
    emitters: EmitterArray
    gradient: float | None = None
    grid: tuple[float, float, int] | None = None
    inversion: dict = field(default_factory=dict)
    sensing: dict = field(default_factory=dict)
    count: dict = field(default_factory=dict)

    @property
    def rate_unit(self) -> str:
        return self.emitters.rate_unit

    def probed_emitters(self) -> EmitterArray:
        if self.gradient:
            return apply_gradient_field(self.emitters, self.gradient)
        return self.emitters

    def to_dict(self) -> dict:
        out = {
            "units": {"rate": self.rate_unit, "length": "lambda"},
            "waveguide": {
                "wavelength": self.waveguide.wavelength,
                "group_velocity": (
                    "inf" if math.isinf(self.waveguide.group_velocity)
                    else self.waveguide.group_velocity
                ),
            },
            "emitters": [
                {"z": e.z, "gamma_wg": e.gamma_wg, "gamma_free": e.gamma_free, "detuning": e.detuning}
                for e in self.emitters
            ],
        }
        if self.gradient is not None:
            out["gradient"] = self.gradient
        if self.grid is not None:
            out["grid"] = {"min": self.grid[0], "max": self.grid[1], "points": self.grid[2]}
        for name in ("inversion", "sensing", "count"):
            block = getattr(self, name)
            if block:
                out[name] = dict(block)
        return out

    def to_text(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()[:16]


def parse_config(text: str) -> ScenarioConfig:
    """Validate scenario text into a :class:`ScenarioConfig`."""
    try:
        node = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"malformed YAML: {exc}", line=mark.line + 1 if mark else None) from None
    if not isinstance(data, dict):
        raise ConfigError("scenario must be a mapping", line=1)
    rd = _Reader(data, _line_map(node))

    rate_unit = rd.choice("units.rate", RATE_UNITS)
    rd.choice("units.length", ("lambda",))
    wavelength = rd.number("waveguide.wavelength", 1.0, positive=True)
    vg = rd.number("waveguide.group_velocity", math.inf, positive=True, allow_inf=True)
    waveguide = WaveguideParams(wavelength, vg)

    raw = rd.get("emitters")
    if not isinstance(raw, list) or not raw:
        rd.fail("emitters", "at least one emitter is required")
    emitters = []
    for i in range(len(raw)):
        p = f"emitters[{i}]"
        if not isinstance(raw[i], dict):
            rd.fail(p, "each emitter must be a mapping")
        emitters.append(
            Emitter(
                z=rd.number(f"{p}.z"),
                gamma_wg=rd.number(f"{p}.gamma_wg", positive=True),
                gamma_free=_nonneg(rd, f"{p}.gamma_free"),
                detuning=rd.number(f"{p}.detuning", 0.0),
            )
        )
    try:
        array = EmitterArray(tuple(emitters), rate_unit)
    except DomainError as exc:
        rd.fail("emitters", str(exc))

    gradient = rd.number("gradient", None)

    grid = None
    if rd.get("grid", None) is not None:
        lo = rd.number("grid.min")
        hi = rd.number("grid.max")
        pts = rd.integer("grid.points", minimum=2)
        if not hi > lo:
            rd.fail("grid.max", "must exceed grid.min")
        grid = (lo, hi, pts)

    blocks = {}
    for name in ("inversion", "sensing", "count"):
        block = rd.get(name, {})
        if not isinstance(block, dict):
            rd.fail(name, "must be a mapping")
        blocks[name] = block
    cfg = ScenarioConfig(waveguide, array, gradient, grid, **blocks)
    cfg._reader = rd
    return cfg


def _nonneg(rd, path):
    value = rd.number(path, 0.0)
    if value < 0:
        rd.fail(path, "must be >= 0")
    return value


def load_config(path) -> ScenarioConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)


# ------------------------------- tables -------------------------------

@dataclass
class ResultTable:
    command: str
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    config_hash: str = ""

    def to_text(self, delimiter=",") -> str:
        buf = io.StringIO()
        buf.write(f"# command: {self.command}\n")
        buf.write(f"# config-sha256: {self.config_hash}\n")
        w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".9g")
    if value is None:
        return ""
    return str(value)


def emit_plot_data(table: ResultTable, path, delimiter=",") -> Path:
    """Write a table as delimiter-separated text with a comment header."""
    path = Path(path)
    try:
        path.write_text(table.to_text(delimiter), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return path


# ------------------------------ commands ------------------------------

def _spectrum(cfg: ScenarioConfig, grid_points=None):
    emitters = cfg.probed_emitters()
    if cfg.grid is not None:
        lo, hi, pts = cfg.grid
        grid = np.linspace(lo, hi, grid_points or pts)
    else:
        grid = auto_grid(emitters, cfg.waveguide, points=grid_points or 4001)
    return compute_spectrum(emitters, grid, cfg.waveguide)


def _cmd_spectrum(cfg, grid_points):
    s = _spectrum(cfg, grid_points)
    return [
        (float(w), float(r.real), float(r.imag), float(R), float(T))
        for w, r, R, T in zip(s.grid, s.r, s.R, s.T)
    ]


def _cmd_features(cfg, grid_points):
    f = find_extrema(_spectrum(cfg, grid_points))
    rows = [("peak", p.center, p.height, p.fwhm) for p in f.peaks]
    rows += [("dip", d.center, d.depth, None) for d in f.dips]
    return sorted(rows, key=lambda r: (r[1], r[0]))


def _cmd_count(cfg, grid_points):
    rd = cfg._reader
    default = "lossless" if cfg.emitters.lossless else "lossy"
    regime = rd.choice("count.regime", ("auto", "lossless", "lossy"), "auto")
    if regime == "auto":
        regime = default
    f = find_extrema(_spectrum(cfg, grid_points))
    sig = f.significant()
    n = count_emitters(f, regime)
    return [(regime, len(sig.peaks), len(sig.dips), n)]


def _cmd_invert(cfg, grid_points):
    rd = cfg._reader
    method = rd.choice("inversion.method", ("lossless", "lossy", "per-emitter", "branch"))
    if method == "lossy":
        lo = rd.number("inversion.d_min", 0.001, positive=True)
        hi = rd.number("inversion.d_max", 0.5, positive=True)
        n_grid = rd.integer("inversion.n_grid", 10_000, minimum=3)
        if not hi > lo:
            rd.fail("inversion.d_max", "must exceed inversion.d_min")
        res = invert_lossy(_spectrum(cfg, grid_points), (lo, hi), n_grid, cfg.waveguide)
        return [("lossy-fit", "all", res.d, None, res.gamma_wg, res.gamma_free, res.residual)]
    if method == "lossless":
        gamma = rd.number("inversion.gamma_wg", cfg.emitters[0].gamma_wg, positive=True)
        n = rd.integer("inversion.n", 0, minimum=0)
        res = invert_lossless(_spectrum(cfg, grid_points), gamma, n, cfg.waveguide)
        return [("lossless-dip", "all", res.d, res.n, res.gamma_wg, 0.0, res.residual)]
    if not cfg.gradient:
        rd.fail("gradient", f"inversion method '{method}' needs a non-zero gradient")
    if method == "per-emitter":
        res = extract_per_emitter(_spectrum(cfg, grid_points), cfg.gradient)
        return [
            ("per-emitter", i + 1, res.d, None, gw, gf, res.residual)
            for i, (gw, gf) in enumerate(zip(res.gamma_wg, res.gamma_free))
        ]
    # branch: dip without the gradient, splitting with it
    gamma = rd.number("inversion.gamma_wg", cfg.emitters[0].gamma_wg, positive=True)
    plain = ScenarioConfig(cfg.waveguide, cfg.emitters, None, cfg.grid)
    d0 = invert_lossless(_spectrum(plain, grid_points), gamma, 0, cfg.waveguide).d
    split = measured_splitting(_spectrum(cfg, grid_points))
    match = disambiguate_branch(split, cfg.gradient, d0, cfg.waveguide.wavelength)
    return [("branch", "all", match.d, match.n, gamma, 0.0, match.residual)]


def _cmd_sense(cfg, grid_points):
    rd = cfg._reader
    try:
        sc = SensingConfig(
            d=rd.number("sensing.d", positive=True),
            gamma_wg=rd.number("sensing.gamma_wg", positive=True),
            gamma_free=_nonneg(rd, "sensing.gamma_free"),
            branch=rd.choice("sensing.branch", ("superradiant", "subradiant"), "superradiant"),
            wavelength_physical=rd.number("sensing.wavelength_physical", 1.55e-6, positive=True),
            strain_coefficient=rd.number("sensing.strain_coefficient", 1.25e-12, positive=True),
            temperature_coefficient=rd.number("sensing.temperature_coefficient", 12.5e-12, positive=True),
            alpha=rd.number("sensing.alpha", 0.9),
        )
    except DomainError as exc:
        rd.fail("sensing", str(exc))
    shifts = rd.get("sensing.shifts")
    if not isinstance(shifts, list) or not shifts:
        rd.fail("sensing.shifts", "expected a non-empty list of peak shifts")
    rows = []
    for i in range(len(shifts)):
        shift = rd.number(f"sensing.shifts[{i}]")
        r = read_shift(shift, sc)
        rows.append((r.shift, r.dd, r.strain, r.temperature, r.resolvable))
    return rows


_RUNNERS = {
    "spectrum": _cmd_spectrum,
    "features": _cmd_features,
    "count": _cmd_count,
    "invert": _cmd_invert,
    "sense": _cmd_sense,
}


def run_command(command: str, config: ScenarioConfig, grid_points: int | None = None) -> ResultTable:
    """Run one workflow on a validated scenario and return its table."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    if not hasattr(config, "_reader"):
        config = parse_config(config.to_text())
    rows = _RUNNERS[command](config, grid_points)
    return ResultTable(command, SCHEMAS[command], rows, config.digest())


def build_parser():
    p = argparse.ArgumentParser(
        prog="wgqed",
        description="Waveguide-QED spectra, feature extraction and inversion.",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="scenario YAML file")
    p.add_argument("--out", help="also write the table to this file")
    p.add_argument("--grid-points", type=int, help="override the number of grid points")
    p.add_argument("--seed", type=int, help="reserved; every algorithm is deterministic")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        if args.grid_points is not None and args.grid_points < 2:
            raise ConfigError("must be >= 2", field="--grid-points")
        cfg = load_config(args.config)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            table = run_command(args.command, cfg, args.grid_points)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        if args.out:
            emit_plot_data(table, args.out)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    sys.stdout.write(table.to_text())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
