"""Parsing of SI quantities such as ``"330pF"``, ``"4.7 kΩ"`` or ``"0.3V/µs"``.

Values are converted through :class:`decimal.Decimal`, so ``"330pF"`` yields the
same double as the literal ``330e-12``.
"""

from __future__ import annotations

import re
from decimal import Decimal, InvalidOperation
from numbers import Real

_PREFIX_EXP = {
    "a": -18, "f": -15, "p": -12, "n": -9, "u": -6, "µ": -6, "μ": -6,
    "m": -3, "": 0, "k": 3, "K": 3, "M": 6, "G": 9, "T": 12,
}

# canonical unit -> accepted spellings
_UNIT_ALIASES = {
    "F": ("F",),
    "ohm": ("Ω", "Ω", "ohm", "ohms", "Ohm", "Ohms"),
    "Hz": ("Hz",),
    "V": ("V",),
    "A": ("A",),
    "s": ("s", "sec"),
    "V/s": ("V/s",),
    "%": ("%",),
    "": ("",),
}

_NUMBER = re.compile(r"^\s*([+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)\s*(.*?)\s*$")


def _split_prefix(text: str, spellings: tuple[str, ...]) -> int | None:
    for sp in sorted(spellings, key=len, reverse=True):
        if text.endswith(sp):
            head = text[: len(text) - len(sp)] if sp else text
            if head in _PREFIX_EXP:
                return _PREFIX_EXP[head]
    return None


def parse_quantity(value, unit: str) -> float:
    """Return ``value`` in SI base units.

    ``unit`` is the expected canonical unit (``"F"``, ``"ohm"``, ``"Hz"``,
    ``"V"``, ``"A"``, ``"s"``, ``"V/s"``, ``"%"`` or ``""``). Plain numbers are
    taken as already being in base units. A bare prefix (``"330k"``) is
    accepted for any unit.

    >>> parse_quantity("330pF", "F") == 330e-12
    True
    >>> parse_quantity("0.3 V/µs", "V/s") == 0.3e6
    True
    """
    if isinstance(value, bool):
        raise ValueError(f"expected a quantity in {unit or 'dimensionless'} units, got {value!r}")
    if isinstance(value, Real):
        return float(value)
    if not isinstance(value, str):
        raise ValueError(f"expected a quantity in {unit or 'dimensionless'} units, got {value!r}")
    m = _NUMBER.match(value)
    if not m:
        raise ValueError(f"cannot parse {value!r} as a number with unit {unit!r}")
    mantissa, suffix = m.group(1), m.group(2).replace(" ", "")
    try:
        number = Decimal(mantissa)
    except InvalidOperation:  # pragma: no cover - regex already guards this
        raise ValueError(f"cannot parse {value!r}") from None

    if unit not in _UNIT_ALIASES:
        raise ValueError(f"unknown unit {unit!r}")

    if unit == "V/s":
        exp = _parse_rate(suffix)
    else:
        exp = _split_prefix(suffix, _UNIT_ALIASES[unit])
        if exp is None and suffix in _PREFIX_EXP:
            exp = _PREFIX_EXP[suffix]
    if exp is None:
        raise ValueError(f"cannot parse {value!r}: unit suffix {suffix!r} is not {unit or 'dimensionless'}")
    return float(number.scaleb(exp))


def _parse_rate(suffix: str) -> int | None:
    if suffix == "":
        return 0
    if "/" not in suffix:
        return None
    num, den = suffix.split("/", 1)
    num_exp = _split_prefix(num, _UNIT_ALIASES["V"])
    den_exp = _split_prefix(den, _UNIT_ALIASES["s"])
    if num_exp is None or den_exp is None:
        return None
    return num_exp - den_exp


_FORMAT_PREFIXES = [(12, "T"), (9, "G"), (6, "M"), (3, "k"), (0, ""), (-3, "m"),
                    (-6, "µ"), (-9, "n"), (-12, "p"), (-15, "f")]


def format_quantity(value: float, unit: str, digits: int = 4) -> str:
    """Human-readable engineering notation, e.g. ``format_quantity(3.3e-11, "F") == "33 pF"``."""
    if value == 0 or value != value or value in (float("inf"), float("-inf")):
        return f"{value:g} {unit}".strip()
    mag = abs(value)
    for exp, prefix in _FORMAT_PREFIXES:
        if mag >= 10.0 ** exp * (1 - 1e-12):
            break
    return f"{value / 10.0 ** exp:.{digits}g} {prefix}{'Ω' if unit == 'ohm' else unit}".strip()
