"""Domain types, the built-in op-amp catalog and configuration validation.

All types are frozen dataclasses. Quantities are plain floats in SI base
units (ohm, farad, volt, ampere, second, hertz, volt per second).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Iterable, Sequence

from .errors import ValidationError


class Effect(str, enum.Enum):
    """Non-ideality toggles of a :class:`NonIdealityProfile`."""

    GBW = "GBW"
    SLEW = "SLEW"
    OFFSET = "OFFSET"
    BIAS = "BIAS"
    ZCD_OFFSET = "ZCD_OFFSET"
    DELAYS = "DELAYS"


ALL_EFFECTS = frozenset(Effect)


class Method(str, enum.Enum):
    """How a :class:`SensorEstimate` was obtained."""

    IDEAL_INV = "IDEAL_INV"
    COMPENSATED = "COMPENSATED"
    IDEAL_INV_AVG = "IDEAL_INV_AVG"
    COMPENSATED_AVG = "COMPENSATED_AVG"

    @property
    def averaged(self) -> bool:
        return self in (Method.IDEAL_INV_AVG, Method.COMPENSATED_AVG)

    @property
    def compensated(self) -> bool:
        return self in (Method.COMPENSATED, Method.COMPENSATED_AVG)


@dataclass(frozen=True)
class OpAmpModel:
    """Datasheet-level op-amp parameters.

    ``gbw_hz`` is the gain-bandwidth product in Hz; the integrator equations
    use ``a0w0 = 2*pi*gbw_hz`` in rad/s. ``c_parasitic`` and the delays may be
    ``None`` when the datasheet value is unknown; :meth:`with_defaults` fills
    them with zero and reports which ones were assumed.
    """

    name: str
    gbw_hz: float
    slew_rate: float
    v_offset: float
    i_bias: float
    c_parasitic: float | None = None
    delay_lh: float | None = None
    delay_hl: float | None = None

    @property
    def a0w0(self) -> float:
        return 2.0 * math.pi * self.gbw_hz

    @property
    def missing(self) -> tuple[str, ...]:
        return tuple(n for n in ("c_parasitic", "delay_lh", "delay_hl") if getattr(self, n) is None)

    def with_defaults(self) -> "OpAmpModel":
        return replace(
            self,
            c_parasitic=0.0 if self.c_parasitic is None else self.c_parasitic,
            delay_lh=0.0 if self.delay_lh is None else self.delay_lh,
            delay_hl=0.0 if self.delay_hl is None else self.delay_hl,
        )

    def v_os_total(self, r_x: float) -> float:
        """Offset seen by the integrator, ``V_os + i_b * R_x``."""
        return self.v_offset + self.i_bias * r_x

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "OpAmpModel":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in known})


@dataclass(frozen=True)
class ComparatorModel:
    v_offset_z: float = 0.0
    delay_lh: float = 0.0
    delay_hl: float = 0.0

    @classmethod
    def from_opamp(cls, op: OpAmpModel) -> "ComparatorModel":
        op = op.with_defaults()
        return cls(v_offset_z=op.v_offset, delay_lh=op.delay_lh, delay_hl=op.delay_hl)


@dataclass(frozen=True)
class SensorRC:
    r_x: float
    c_x: float


@dataclass(frozen=True)
class OscillatorConfig:
    """Circuit constants around the sensor.

    ``alpha`` is the Schmitt threshold ratio: the trigger flips when the
    integrator output reaches ``±alpha*v_p``.
    """

    c_i: float
    alpha: float
    v_p: float
    sensor: SensorRC
    xor_delay: float = 0.0

    @property
    def r_x(self) -> float:
        return self.sensor.r_x

    @property
    def c_x(self) -> float:
        return self.sensor.c_x

    @property
    def x_ratio(self) -> float:
        """``C_x / C_i``."""
        return self.sensor.c_x / self.c_i

    @property
    def time_constant(self) -> float:
        return self.sensor.r_x * self.c_i

    def with_sensor(self, r_x: float, c_x: float) -> "OscillatorConfig":
        return replace(self, sensor=SensorRC(r_x, c_x))


def reference_config(r_x: float = 330e3, c_x: float = 33e-12) -> OscillatorConfig:
    """The documented example circuit: C_i = 330 pF, alpha = 0.5, V_p = 5 V."""
    return OscillatorConfig(c_i=330e-12, alpha=0.5, v_p=5.0, sensor=SensorRC(r_x, c_x))


_IDEAL_OPAMP = OpAmpModel("IDEAL", gbw_hz=math.inf, slew_rate=math.inf, v_offset=0.0,
                          i_bias=0.0, c_parasitic=0.0, delay_lh=0.0, delay_hl=0.0)


@dataclass(frozen=True)
class NonIdealityProfile:
    """Op-amp and comparator models plus the set of effects switched on.

    Every accessor below returns the value actually used by the equations:
    a disabled effect reads as its ideal value (infinite GBW and slew rate,
    zero offsets and delays). Op-amp models must be fully specified; build
    profiles from catalog entries with :meth:`from_opamp`, which applies the
    zero defaults explicitly and records them in ``assumed``.
    """

    integrator_opamp: OpAmpModel = _IDEAL_OPAMP
    schmitt_opamp: OpAmpModel = _IDEAL_OPAMP
    zcd: ComparatorModel = ComparatorModel()
    enabled_effects: frozenset = ALL_EFFECTS
    assumed: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "enabled_effects", frozenset(Effect(e) for e in self.enabled_effects))
        for role in ("integrator_opamp", "schmitt_opamp"):
            op = getattr(self, role)
            if op.missing:
                raise ValueError(
                    f"{role} {op.name!r} has unspecified {', '.join(op.missing)}; "
                    "call OpAmpModel.with_defaults() or NonIdealityProfile.from_opamp()"
                )

    @classmethod
    def ideal(cls) -> "NonIdealityProfile":
        return cls(enabled_effects=frozenset())

    @classmethod
    def from_opamp(cls, op: OpAmpModel, effects: Iterable = ALL_EFFECTS,
                   schmitt: OpAmpModel | None = None,
                   zcd: ComparatorModel | OpAmpModel | None = None) -> "NonIdealityProfile":
        """Profile in which one op-amp type implements integrator, Schmitt trigger and ZCD."""
        schmitt = op if schmitt is None else schmitt
        zcd_src = schmitt if zcd is None else zcd
        assumed = [f"{op.name}.{m}" for m in op.missing]
        if schmitt is not op:
            assumed += [f"{schmitt.name}.{m}" for m in schmitt.missing]
        if isinstance(zcd_src, OpAmpModel):
            if zcd_src is not op and zcd_src is not schmitt:
                assumed += [f"{zcd_src.name}.{m}" for m in zcd_src.missing if m != "c_parasitic"]
            zcd_model = ComparatorModel.from_opamp(zcd_src)
        else:
            zcd_model = zcd_src
        return cls(op.with_defaults(), schmitt.with_defaults(), zcd_model,
                   frozenset(effects), tuple(dict.fromkeys(assumed)))

    def with_effects(self, effects: Iterable) -> "NonIdealityProfile":
        return replace(self, enabled_effects=frozenset(effects))

    def enabled(self, effect: Effect) -> bool:
        return effect in self.enabled_effects

    @property
    def a0w0(self) -> float:
        return self.integrator_opamp.a0w0 if self.enabled(Effect.GBW) else math.inf

    @property
    def c_p(self) -> float:
        return self.integrator_opamp.c_parasitic if self.enabled(Effect.GBW) else 0.0

    @property
    def slew_rate(self) -> float:
        return self.integrator_opamp.slew_rate if self.enabled(Effect.SLEW) else math.inf

    @property
    def v_os(self) -> float:
        return self.integrator_opamp.v_offset if self.enabled(Effect.OFFSET) else 0.0

    @property
    def i_b(self) -> float:
        return self.integrator_opamp.i_bias if self.enabled(Effect.BIAS) else 0.0

    def v_os_total(self, r_x: float) -> float:
        return self.v_os + self.i_b * r_x

    @property
    def v_oz(self) -> float:
        return self.zcd.v_offset_z if self.enabled(Effect.ZCD_OFFSET) else 0.0

    def _delay(self, value: float) -> float:
        return value if self.enabled(Effect.DELAYS) else 0.0

    @property
    def tau_s_lh(self) -> float:
        return self._delay(self.schmitt_opamp.delay_lh)

    @property
    def tau_s_hl(self) -> float:
        return self._delay(self.schmitt_opamp.delay_hl)

    @property
    def tau_z_lh(self) -> float:
        return self._delay(self.zcd.delay_lh)

    @property
    def tau_z_hl(self) -> float:
        return self._delay(self.zcd.delay_hl)

    def xor_delay(self, config: OscillatorConfig) -> float:
        return self._delay(config.xor_delay)


@dataclass(frozen=True)
class PeriodSet:
    """Durations of the four XOR-output segments of one oscillation cycle."""

    tp1: float
    tp2: float
    tp3: float
    tp4: float

    @property
    def total(self) -> float:
        return self.tp1 + self.tp2 + self.tp3 + self.tp4

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.tp1, self.tp2, self.tp3, self.tp4)


@dataclass(frozen=True)
class AveragedPeriods:
    t1: float
    t2: float
    t_offset_skew: float = 0.0


@dataclass(frozen=True)
class SensorEstimate:
    r_x_est: float
    c_x_est: float
    method: Method
    iterations: int = 0


# Table values; GBW column is GBW/(2*pi) in MHz. None marks an empty cell.
_TABLE = [
    # name,     GBW,    SR V/us, Cp pF, Vos mV, ib nA, tau ns
    ("AD741",   1.0,    0.5,     None,  5.0,    500.0, 300.0),
    ("LT1360",  60.0,   800.0,   4.0,   0.3,    250.0, None),
    ("TL071",   5.25,   29.0,    2.0,   4.0,    0.1,   310.0),
    ("OPA177",  0.6,    0.3,     None,  0.6,    6.0,   None),
    ("LTC1049", 0.8,    0.8,     None,  0.01,   0.05,  None),
]

_ALIASES = {"LT1049": "LTC1049", "OPA177FP": "OPA177"}


def _scaled(value, exp):
    # via decimal string so that e.g. 0.6 MHz becomes exactly the double 0.6e6
    return None if value is None else float(f"{value!r}e{exp}")


def builtin_catalog() -> list[OpAmpModel]:
    """The five characterised op-amps, in table order. Empty cells are ``None``."""
    out = []
    for name, gbw, sr, cp, vos, ib, tau in _TABLE:
        out.append(OpAmpModel(
            name=name,
            gbw_hz=_scaled(gbw, 6),
            slew_rate=_scaled(sr, 6),
            v_offset=_scaled(vos, -3),
            i_bias=_scaled(ib, -9),
            c_parasitic=_scaled(cp, -12),
            delay_lh=_scaled(tau, -9),
            delay_hl=_scaled(tau, -9),
        ))
    return out


def lookup(name: str, catalog: Sequence[OpAmpModel] | None = None) -> OpAmpModel:
    catalog = builtin_catalog() if catalog is None else catalog
    key = _ALIASES.get(name.upper(), name.upper())
    for op in catalog:
        if op.name.upper() == key:
            return op
    raise KeyError(f"op-amp {name!r} not in catalog ({', '.join(o.name for o in catalog)})")


def catalog_to_json(catalog: Sequence[OpAmpModel]) -> str:
    return json.dumps([op.to_dict() for op in catalog], indent=2)


def catalog_from_json(text: str) -> list[OpAmpModel]:
    return [OpAmpModel.from_dict(d) for d in json.loads(text)]


# ---------------------------------------------------------------- validation

@dataclass(frozen=True)
class Violation:
    code: str
    field: str
    value: object
    message: str


def _finite(x) -> bool:
    try:
        return math.isfinite(float(x))
    except (TypeError, ValueError):
        return False


def validate(config: OscillatorConfig, profile: NonIdealityProfile | None = None) -> list[Violation]:
    """Return every violated invariant; an empty list means the configuration is usable.

    Never raises for numeric input. Besides the per-field invariants this
    checks that the integrator output after the charge-transfer step, reduced
    by the finite-GBW offset, still starts above the ZCD threshold.
    """
    out: list[Violation] = []

    def bad(code, name, value, msg):
        out.append(Violation(code, name, value, msg))

    values = {
        "c_i": config.c_i, "alpha": config.alpha, "v_p": config.v_p,
        "r_x": config.sensor.r_x, "c_x": config.sensor.c_x, "xor_delay": config.xor_delay,
    }
    for name, v in values.items():
        if name == "r_x" and (v is None or _isinf(v)):
            continue
        if not _finite(v):
            bad("NON_FINITE", name, v, "value must be a finite number")
    if out:
        return out

    r_x = config.sensor.r_x
    if r_x is None or _isinf(r_x):
        bad("NO_LEAKAGE_PATH", "r_x", r_x, "sensor resistance must be finite for the loop to oscillate")
    elif r_x <= 0:
        bad("NON_POSITIVE_COMPONENT", "r_x", r_x, "must be > 0")
    if config.c_i <= 0:
        bad("NON_POSITIVE_COMPONENT", "c_i", config.c_i, "must be > 0")
    if config.v_p <= 0:
        bad("NON_POSITIVE_COMPONENT", "v_p", config.v_p, "must be > 0")
    if config.sensor.c_x < 0:
        bad("NON_POSITIVE_COMPONENT", "c_x", config.sensor.c_x, "must be >= 0")
    if config.xor_delay < 0:
        bad("NEGATIVE_DELAY", "xor_delay", config.xor_delay, "must be >= 0")
    if not 0 < config.alpha < 1:
        bad("ALPHA_OUT_OF_RANGE", "alpha", config.alpha, "Schmitt ratio must satisfy 0 < alpha < 1")

    if profile is not None:
        out.extend(_validate_profile(profile))
    if out:
        return out

    x = config.x_ratio
    if config.alpha <= 2 * x:
        bad("CROSS_OVER", "alpha", config.alpha,
            f"alpha must exceed 2*C_x/C_i = {2 * x:.6g}; the charge-transfer step would cross zero")
        return out

    if profile is not None:
        from .analytic import gamma  # deferred: analytic imports this module

        g = gamma(config, profile).gamma
        start = config.v_p * (config.alpha - 2 * x - g)
        if start <= profile.v_oz:
            bad("CROSS_OVER", "alpha", config.alpha,
                f"ramp start V_p(alpha - 2X - gamma) = {start:.6g} V does not exceed the ZCD offset {profile.v_oz:.6g} V")
        vos = profile.v_os_total(r_x)
        if abs(vos) >= config.v_p:
            bad("OFFSET_TOO_LARGE", "v_os_total", vos, "integrator offset V_os + i_b*R_x must stay below V_p")
    return out


def _isinf(v) -> bool:
    try:
        return math.isinf(float(v))
    except (TypeError, ValueError):
        return False


def _validate_profile(profile: NonIdealityProfile) -> list[Violation]:
    out = []
    for role in ("integrator_opamp", "schmitt_opamp"):
        op = getattr(profile, role)
        for name, lo_strict in (("gbw_hz", True), ("slew_rate", True), ("i_bias", False),
                                ("c_parasitic", False), ("delay_lh", False), ("delay_hl", False)):
            v = getattr(op, name)
            if v is None or v != v:
                out.append(Violation("NON_FINITE", f"{role}.{name}", v, "must be a number"))
            elif (lo_strict and v <= 0) or (not lo_strict and v < 0):
                code = "NEGATIVE_DELAY" if name.startswith("delay") else "NON_POSITIVE_COMPONENT"
                out.append(Violation(code, f"{role}.{name}", v, "must be > 0" if lo_strict else "must be >= 0"))
        if not _finite(op.v_offset):
            out.append(Violation("NON_FINITE", f"{role}.v_offset", op.v_offset, "must be finite"))
    for name in ("delay_lh", "delay_hl"):
        v = getattr(profile.zcd, name)
        if not _finite(v) or v < 0:
            out.append(Violation("NEGATIVE_DELAY", f"zcd.{name}", v, "must be finite and >= 0"))
    if not _finite(profile.zcd.v_offset_z):
        out.append(Violation("NON_FINITE", "zcd.v_offset_z", profile.zcd.v_offset_z, "must be finite"))
    return out


def ensure_valid(config: OscillatorConfig, profile: NonIdealityProfile | None = None) -> OscillatorConfig:
    violations = validate(config, profile)
    if violations:
        raise ValidationError(violations)
    return config
