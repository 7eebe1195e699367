"""TOML / JSON configuration files with SI-suffixed values.

Layout (every section optional)::

    [circuit]   c_i, alpha, v_p, xor_delay
    [sensor]    r_x, c_x
    [profile]   opamp, schmitt, zcd, effects = ["GBW", ...]
    [timer]     clock_hz, bit_width, capture_jitter_rms
    [[opamp]]   name, gbw_hz, slew_rate, v_offset, i_bias, c_parasitic, delay_lh, delay_hl
    [requirements]  rx_min, rx_max, cx_max, c_i, alpha, v_p, epsilon_pct, tau_p
    [sweep]     rx_values, cx_values, opamps, modes, quantize, max_points

``[[opamp]]`` tables replace the built-in catalog. Missing circuit values fall
back to the reference circuit.
"""

from __future__ import annotations

import json
import re
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

from .design import DesignRequirements
from .errors import ConfigParseError, GridCapError
from .measure import TimerModel
from .models import (
    ALL_EFFECTS,
    Effect,
    Method,
    NonIdealityProfile,
    OpAmpModel,
    OscillatorConfig,
    SensorRC,
    builtin_catalog,
    lookup,
    reference_config,
)
from .units import parse_quantity

DEFAULT_GRID_CAP = 100_000
REFERENCE_RX = tuple(k * 100e3 for k in range(1, 11))
REFERENCE_CX = tuple(float(f"{c}e-12") for c in range(10, 43, 4))


@dataclass(frozen=True)
class SweepSpec:
    rx_values: tuple[float, ...] = REFERENCE_RX
    cx_values: tuple[float, ...] = REFERENCE_CX
    opamps: tuple[str, ...] = ()
    modes: tuple[Method, ...] = tuple(Method)
    quantize: bool = False
    max_points: int = DEFAULT_GRID_CAP

    def __post_init__(self):
        for name in ("rx_values", "cx_values", "modes"):
            if not getattr(self, name):
                raise ValueError(f"sweep {name} must not be empty")
        points = len(self.rx_values) * len(self.cx_values) * max(1, len(self.opamps)) * len(self.modes)
        if points > self.max_points:
            raise GridCapError(f"sweep has {points} points, cap is {self.max_points}",
                               points=points, cap=self.max_points)


@dataclass(frozen=True)
class LoadedConfig:
    config: OscillatorConfig = field(default_factory=reference_config)
    catalog: tuple[OpAmpModel, ...] = field(default_factory=lambda: tuple(builtin_catalog()))
    opamp: str | None = None
    schmitt: str | None = None
    zcd: str | None = None
    effects: frozenset = ALL_EFFECTS
    timer: TimerModel = field(default_factory=TimerModel)
    requirements: DesignRequirements = field(default_factory=DesignRequirements)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    source: str = "<defaults>"

    def profile(self, opamp: str | None = None, effects=None) -> NonIdealityProfile:
        """Profile for the selected op-amp, or the ideal profile when none is selected."""
        name = opamp or self.opamp
        effects = self.effects if effects is None else effects
        if name is None:
            return NonIdealityProfile.ideal()
        op = lookup(name, self.catalog)
        schmitt = lookup(self.schmitt, self.catalog) if self.schmitt else None
        zcd = lookup(self.zcd, self.catalog) if self.zcd else None
        return NonIdealityProfile.from_opamp(op, effects, schmitt=schmitt, zcd=zcd)


_UNITS = {
    "circuit": {"c_i": "F", "alpha": "", "v_p": "V", "xor_delay": "s"},
    "sensor": {"r_x": "ohm", "c_x": "F"},
    "timer": {"clock_hz": "Hz", "bit_width": "", "capture_jitter_rms": "s"},
    "opamp": {"gbw_hz": "Hz", "slew_rate": "V/s", "v_offset": "V", "i_bias": "A",
              "c_parasitic": "F", "delay_lh": "s", "delay_hl": "s"},
    "requirements": {"rx_min": "ohm", "rx_max": "ohm", "cx_max": "F", "c_i": "F", "alpha": "",
                     "v_p": "V", "epsilon_pct": "%", "tau_p": "s"},
}


class _Ctx:
    def __init__(self, text: str, source: str):
        self.lines = text.splitlines()
        self.source = source

    def line_of(self, section: str, key: str | None) -> int | None:
        """Best-effort 1-based line number of ``key`` inside ``[section]``."""
        current = None
        head = re.compile(r"^\s*\[\[?\s*([^\]]+?)\s*\]\]?")
        for i, line in enumerate(self.lines, 1):
            m = head.match(line)
            if m:
                current = m.group(1)
                if key is None and current == section:
                    return i
                continue
            if key is not None and current == section and re.match(rf"^\s*\"?{re.escape(key)}\"?\s*[=:]", line):
                return i
        if key is not None:
            for i, line in enumerate(self.lines, 1):
                if re.search(rf"\"?{re.escape(key)}\"?\s*[=:]", line):
                    return i
        return None

    def fail(self, section: str, key: str | None, message: str) -> ConfigParseError:
        line = self.line_of(section, key)
        where = f"{self.source}:{line}" if line else self.source
        fieldname = f"[{section}].{key}" if key else f"[{section}]"
        return ConfigParseError(f"{where}: {fieldname}: {message}", line=line, field=fieldname)


def _quantity(ctx: _Ctx, section: str, key: str, value, unit: str) -> float:
    try:
        return parse_quantity(value, unit)
    except ValueError as exc:
        raise ctx.fail(section, key, str(exc)) from None


def _table(ctx: _Ctx, data: dict, section: str) -> dict:
    raw = data.get(section, {})
    if not isinstance(raw, dict):
        raise ctx.fail(section, None, "expected a table")
    units = _UNITS.get(section)
    out = {}
    for k, v in raw.items():
        if units is not None and k not in units:
            raise ctx.fail(section, k, f"unknown key (expected one of {', '.join(units)})")
        out[k] = _quantity(ctx, section, k, v, units[k]) if units is not None else v
    return out


def _names(ctx: _Ctx, section: str, key: str, value) -> tuple[str, ...]:
    if isinstance(value, str):
        value = [value]
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ctx.fail(section, key, "expected a string or a list of strings")
    return tuple(value)


def _quantities(ctx: _Ctx, section: str, key: str, value, unit: str) -> tuple[float, ...]:
    if isinstance(value, dict):
        try:
            start = parse_quantity(value["start"], unit)
            stop = parse_quantity(value["stop"], unit)
            count = int(value["count"])
        except (KeyError, ValueError, TypeError) as exc:
            raise ctx.fail(section, key, f"range needs start, stop, count ({exc})") from None
        if count < 1:
            raise ctx.fail(section, key, "count must be >= 1")
        if count == 1:
            return (start,)
        return tuple(start + (stop - start) * i / (count - 1) for i in range(count))
    if not isinstance(value, list):
        value = [value]
    return tuple(_quantity(ctx, section, key, v, unit) for v in value)


def parse_config(data: dict, text: str = "", source: str = "<memory>") -> LoadedConfig:
    ctx = _Ctx(text, source)
    if not isinstance(data, dict):
        raise ConfigParseError(f"{source}: top level must be a table")
    known = {"circuit", "sensor", "profile", "timer", "opamp", "requirements", "sweep"}
    for key in data:
        if key not in known:
            raise ctx.fail(key, None, f"unknown section (expected one of {', '.join(sorted(known))})")

    ref = reference_config()
    circ = _table(ctx, data, "circuit")
    sens = _table(ctx, data, "sensor")
    config = OscillatorConfig(
        c_i=circ.get("c_i", ref.c_i), alpha=circ.get("alpha", ref.alpha), v_p=circ.get("v_p", ref.v_p),
        sensor=SensorRC(sens.get("r_x", ref.r_x), sens.get("c_x", ref.c_x)),
        xor_delay=circ.get("xor_delay", 0.0),
    )

    catalog = tuple(builtin_catalog())
    if "opamp" in data:
        entries = data["opamp"]
        if not isinstance(entries, list):
            raise ctx.fail("opamp", None, "use [[opamp]] array-of-tables entries")
        parts = []
        for entry in entries:
            if "name" not in entry:
                raise ctx.fail("opamp", None, "every [[opamp]] needs a name")
            vals = {}
            for k, v in entry.items():
                if k == "name":
                    continue
                if k not in _UNITS["opamp"]:
                    raise ctx.fail("opamp", k, "unknown key")
                vals[k] = None if v is None else _quantity(ctx, "opamp", k, v, _UNITS["opamp"][k])
            for req_key in ("gbw_hz", "slew_rate", "v_offset", "i_bias"):
                if req_key not in vals:
                    raise ctx.fail("opamp", None, f"entry {entry['name']!r} is missing {req_key}")
            parts.append(OpAmpModel(name=str(entry["name"]), **vals))
        catalog = tuple(parts)

    prof = data.get("profile", {})
    if not isinstance(prof, dict):
        raise ctx.fail("profile", None, "expected a table")
    for k in prof:
        if k not in ("opamp", "schmitt", "zcd", "effects"):
            raise ctx.fail("profile", k, "unknown key")
    effects = ALL_EFFECTS
    if "effects" in prof:
        try:
            effects = frozenset(Effect(e.upper()) for e in _names(ctx, "profile", "effects", prof["effects"]))
        except ValueError as exc:
            raise ctx.fail("profile", "effects", f"{exc}; known: {', '.join(e.value for e in Effect)}") from None
    names = {}
    for role in ("opamp", "schmitt", "zcd"):
        if role in prof:
            name = prof[role]
            try:
                lookup(name, catalog)
            except KeyError as exc:
                raise ctx.fail("profile", role, str(exc.args[0])) from None
            names[role] = name

    tim = _table(ctx, data, "timer")
    try:
        timer = TimerModel(clock_hz=tim.get("clock_hz", 16e6), bit_width=int(tim.get("bit_width", 16)),
                           capture_jitter_rms=tim.get("capture_jitter_rms", 0.0))
    except ValueError as exc:
        raise ctx.fail("timer", None, str(exc)) from None

    reqs = _table(ctx, data, "requirements")
    req_defaults = dict(c_i=config.c_i, alpha=config.alpha, v_p=config.v_p, tau_p=config.xor_delay)
    try:
        requirements = DesignRequirements(**{**req_defaults, **reqs})
    except ValueError as exc:
        raise ctx.fail("requirements", None, str(exc)) from None

    sweep = _parse_sweep(ctx, data.get("sweep", {}), catalog)
    return LoadedConfig(config=config, catalog=catalog, opamp=names.get("opamp"), schmitt=names.get("schmitt"),
                        zcd=names.get("zcd"), effects=effects, timer=timer, requirements=requirements,
                        sweep=sweep, source=source)


def _parse_sweep(ctx: _Ctx, raw, catalog) -> SweepSpec:
    if not isinstance(raw, dict):
        raise ctx.fail("sweep", None, "expected a table")
    kw = {}
    for k, v in raw.items():
        if k == "rx_values":
            kw[k] = _quantities(ctx, "sweep", k, v, "ohm")
        elif k == "cx_values":
            kw[k] = _quantities(ctx, "sweep", k, v, "F")
        elif k == "opamps":
            kw[k] = _names(ctx, "sweep", k, v)
            for name in kw[k]:
                try:
                    lookup(name, catalog)
                except KeyError as exc:
                    raise ctx.fail("sweep", k, str(exc.args[0])) from None
        elif k == "modes":
            try:
                kw[k] = tuple(Method(m.upper()) for m in _names(ctx, "sweep", k, v))
            except ValueError as exc:
                raise ctx.fail("sweep", k, f"{exc}; known: {', '.join(m.value for m in Method)}") from None
        elif k == "quantize":
            if not isinstance(v, bool):
                raise ctx.fail("sweep", k, "expected true or false")
            kw[k] = v
        elif k == "max_points":
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ctx.fail("sweep", k, "expected a positive integer")
            kw[k] = v
        else:
            raise ctx.fail("sweep", k, "unknown key")
    try:
        return SweepSpec(**kw)
    except GridCapError:
        raise
    except ValueError as exc:
        raise ctx.fail("sweep", None, str(exc)) from None


def loads(text: str, source: str = "<string>", fmt: str | None = None) -> LoadedConfig:
    """Parse TOML (default) or JSON text. ``fmt`` is ``"toml"`` or ``"json"``; None sniffs it."""
    if fmt is None:
        fmt = "json" if text.lstrip().startswith("{") else "toml"
    try:
        if fmt == "json":
            data = json.loads(text)
        else:
            data = tomllib.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"{source}:{exc.lineno}: {exc.msg} (column {exc.colno})", line=exc.lineno) from None
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        line = int(m.group(1)) if m else None
        raise ConfigParseError(f"{source}:{line or '?'}: {exc}", line=line) from None
    return parse_config(data, text, source)


def load(path) -> LoadedConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigParseError(f"{path}: cannot read ({exc.strerror})") from None
    fmt = "json" if path.suffix.lower() == ".json" else "toml"
    return loads(text, str(path), fmt)


def load_catalog(path) -> tuple[OpAmpModel, ...]:
    """Catalog-only file: a TOML/JSON with ``[[opamp]]`` entries, or a JSON list of op-amp objects.

    A file without any entries yields an empty catalog.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigParseError(f"{path}:{exc.lineno}: {exc.msg}", line=exc.lineno) from None
        if isinstance(raw, list):
            raw = {"opamp": raw}
    else:
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigParseError(f"{path}: {exc}") from None
    if not raw.get("opamp"):
        return ()
    return parse_config({"opamp": raw["opamp"]}, text, str(path)).catalog


def reference_file(name: str = "reference.toml") -> str:
    """Text of a bundled data file (``reference.toml`` or ``catalog.toml``)."""
    return resources.files("relaxosc").joinpath("data").joinpath(name).read_text(encoding="utf-8")
