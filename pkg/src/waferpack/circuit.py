"""Equivalent circuit of the capped line.

Each port sees the via and bump in series (R + jwL) and the via-to-substrate
admittance in shunt (oxide capacitance in series with the lossy silicon).
Between the two vias runs the device line, whose per-unit-length admittance
is increased by the cap hanging above it across the bonding gap::

    port1 --[Z_via+Z_bump]--+--====== line + cap loading ======--+--[Z_via+Z_bump]-- port2
                            |                                     |
                          Y_via                                 Y_via
                            |                                     |
                           gnd                                   gnd

All element functions broadcast over ``f`` (Hz).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np
from scipy.constants import epsilon_0, mu_0, speed_of_light

from .geometry import BondingSpec, BumpGeometry, PackageDesign, ViaGeometry, standoff_gap
from .materials import MaterialLayer, SiliconSubstrate, collapse_stack
from .network import TwoPortABCD, abcd_line, abcd_series, abcd_shunt, cascade

OXIDE_PERMITTIVITY = 3.9


def skin_depth(conductivity, f):
    return 1.0 / np.sqrt(np.pi * np.asarray(f, dtype=float) * mu_0 * conductivity)


def cylinder_inductance(length: float, diameter: float) -> float:
    """Partial self-inductance of a straight round conductor, long-wire form,
    clamped at zero for stubby cylinders."""
    return max(mu_0 * length / (2 * np.pi) * (np.log(4 * length / diameter) - 1.0), 0.0)


def _omega(f):
    f = np.asarray(f, dtype=float)
    if np.any(~(f > 0)):
        raise ValueError("frequency must be positive")
    return 2 * np.pi * f


def via_series_impedance(via: ViaGeometry, fill: MaterialLayer, f):
    """R(f) + jwL of the copper core.

    Current is confined to an annulus one skin depth deep, or the full
    cross-section once the skin depth reaches the core radius.
    """
    w = _omega(f)
    r = via.conductor_radius
    delta = skin_depth(fill.conductivity, f)
    inner = np.clip(r - delta, 0.0, None)
    area = np.pi * (r**2 - inner**2)
    resistance = via.height / (fill.conductivity * area)
    return resistance + 1j * w * cylinder_inductance(via.height, 2 * r)


def via_shunt_admittance(via: ViaGeometry, cap: SiliconSubstrate, f):
    """Oxide capacitance in series with the substrate G || C."""
    w = _omega(f)
    r = via.conductor_radius
    t_ox = via.sidewall_oxide_thickness
    c_ox = 2 * np.pi * epsilon_0 * OXIDE_PERMITTIVITY * via.height / np.log((r + t_ox) / r)
    factor = 2 * np.pi / np.log(via.return_radius / (r + t_ox))
    y_si = cap.conductivity * factor * via.height \
        + 1j * w * epsilon_0 * cap.relative_permittivity * factor * via.height
    y_ox = 1j * w * c_ox
    return y_ox * y_si / (y_ox + y_si)


def bump_series_impedance(bump: BumpGeometry, f):
    w = _omega(f)
    layer = collapse_stack(bump.stack)
    resistance = layer.thickness / (layer.conductivity * np.pi * bump.radius**2)
    return resistance + 1j * w * cylinder_inductance(bump.height, 2 * bump.radius)


def adhesive_series_impedance(spec: BondingSpec, contact_area: float, f):
    """Vertical resistance of the glue layer under one bump."""
    if spec.mode != "adhesive":
        raise ValueError(f"adhesive impedance needs an adhesive bonding spec, got {spec.mode!r}")
    _omega(f)
    r = spec.thickness / (spec.conductivity * contact_area)
    return np.full(np.shape(f), r, dtype=complex)


def cap_loading_admittance(gap: float, cap: SiliconSubstrate, loaded_area: float, f):
    """Shunt admittance per metre of line added by the cap.

    ``loaded_area`` is the strip area under the cap per metre of line (m^2/m,
    i.e. the strip width).  The air gap capacitance sits in series with the
    cap slab, a conductance in parallel with a capacitance.
    """
    if not gap > 0:
        raise ValueError(f"gap must be positive, got {gap!r}")
    w = _omega(f)
    y_gap = 1j * w * epsilon_0 * loaded_area / gap
    y_slab = (cap.conductivity + 1j * w * epsilon_0 * cap.relative_permittivity) \
        * loaded_area / cap.thickness
    return y_gap * y_slab / (y_gap + y_slab)


def line_conductor_resistance(conductor: MaterialLayer, width: float, f):
    """Per-unit-length strip resistance; current depth is the thickness or
    the skin depth, whichever is smaller."""
    depth = np.minimum(conductor.thickness, skin_depth(conductor.conductivity, f))
    return 1.0 / (conductor.conductivity * width * depth)


def line_parameters(design: PackageDesign, f, capped: bool = True):
    """``(z0, gamma)`` of the device line, optionally including cap loading."""
    w = _omega(f)
    root_eps = np.sqrt(design.line_eff_permittivity)
    l_per_m = design.line_char_impedance * root_eps / speed_of_light
    c_per_m = root_eps / (speed_of_light * design.line_char_impedance)
    z = line_conductor_resistance(design.line_conductor, design.line_width, f) + 1j * w * l_per_m
    y = 1j * w * c_per_m
    if capped:
        y = y + cap_loading_admittance(standoff_gap(design), design.cap, design.line_width, f)
    return np.sqrt(z / y), np.sqrt(z * y)


# ---------------------------------------------------------------------------
# element chains

@dataclass(frozen=True, eq=False)
class Series:
    z: np.ndarray

    def abcd(self, f) -> TwoPortABCD:
        return abcd_series(self.z, f)


@dataclass(frozen=True, eq=False)
class Shunt:
    y: np.ndarray

    def abcd(self, f) -> TwoPortABCD:
        return abcd_shunt(self.y, f)


@dataclass(frozen=True, eq=False)
class Line:
    z0: np.ndarray
    gamma: np.ndarray
    length: float

    def abcd(self, f) -> TwoPortABCD:
        return abcd_line(self.z0, self.gamma, self.length, f)


Element = Union[Series, Shunt, Line]


@dataclass(frozen=True, eq=False)
class ElementChain:
    """Elements ordered from port 1 to port 2, all evaluated on ``frequency``."""

    elements: tuple[Element, ...]
    frequency: np.ndarray

    def __post_init__(self):
        if not self.elements:
            raise ValueError("an element chain cannot be empty")

    def __len__(self):
        return len(self.elements)

    def __iter__(self) -> Iterator[Element]:
        return iter(self.elements)

    def __getitem__(self, i) -> Element:
        return self.elements[i]

    def to_abcd(self) -> TwoPortABCD:
        return cascade([e.abcd(self.frequency) for e in self.elements])


def port_series_impedance(design: PackageDesign, f):
    """Via + bonded bump (+ glue) seen in series at one port."""
    fill = MaterialLayer("via fill", design.via_fill_conductivity, design.via.height)
    z = via_series_impedance(design.via, fill, f) + bump_series_impedance(design.bonded_bump(), f)
    if design.bonding.mode == "adhesive":
        z = z + adhesive_series_impedance(design.bonding, design.contact_area(), f)
    return z


def assemble(design: PackageDesign, f) -> ElementChain:
    """Via/bump - via shunt - capped line - via shunt - via/bump."""
    f = np.asarray(f, dtype=float)
    z_port = port_series_impedance(design, f)
    y_via = via_shunt_admittance(design.via, design.cap, f)
    z0, gamma = line_parameters(design, f)
    elements = (Series(z_port), Shunt(y_via), Line(z0, gamma, design.line_length),
                Shunt(y_via), Series(z_port))
    return ElementChain(elements, f)


def bare_line(design: PackageDesign, f) -> ElementChain:
    """The uncapped device line alone, for before/after-capping comparisons."""
    f = np.asarray(f, dtype=float)
    z0, gamma = line_parameters(design, f, capped=False)
    return ElementChain((Line(z0, gamma, design.line_length),), f)
