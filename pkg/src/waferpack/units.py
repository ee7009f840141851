"""Unit-suffixed quantities for command-line input (``26.3um``, ``5GHz``,
``2kohm.cm``).  Bare numbers are rejected on purpose."""

from __future__ import annotations

import re

UNITS = {
    "length": {"m": 1.0, "mm": 1e-3, "um": 1e-6, "nm": 1e-9},
    "frequency": {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9},
    "resistivity": {"ohm.cm": 1.0, "kohm.cm": 1e3, "ohm.m": 100.0},  # to ohm.cm
    "impedance": {"ohm": 1.0},
    "conductivity": {"S/m": 1.0},
}

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z/.]*)\s*$")


def parse_quantity(text: str, dimension: str, default_unit: str | None = None) -> float:
    """Parse ``text`` into SI (resistivity: ohm.cm).

    ``default_unit`` allows a bare number; without it a unit suffix is
    required.
    """
    table = UNITS[dimension]
    m = _NUMBER.match(text)
    if not m:
        raise ValueError(f"cannot parse {text!r} as a {dimension}")
    value, unit = float(m.group(1)), m.group(2)
    if not unit:
        if default_unit is None:
            raise ValueError(f"{text!r} needs a unit ({', '.join(table)})")
        unit = default_unit
    lookup = {k.lower(): v for k, v in table.items()}
    if unit.lower() not in lookup:
        raise ValueError(f"unknown {dimension} unit {unit!r} in {text!r} "
                         f"(expected one of {', '.join(table)})")
    return value * lookup[unit.lower()]
