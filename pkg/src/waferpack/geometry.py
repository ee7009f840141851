"""Geometry of the capped line: via, bump, bonding, and the full package design.

Lengths are SI metres throughout; only the design-file keys carry display
units (``cap_thickness_um`` and so on).
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .materials import (
    CatalogEntry,
    LayerStack,
    MaterialLayer,
    SiliconSubstrate,
    load_catalog,
    paper_bump_stack,
)

UM = 1e-6

# manufacturability windows, metres
CAP_MIN_DEMONSTRATED = 230e-6
CAP_SAFE_RANGE = (250e-6, 300e-6)
VIA_DIAMETER_RANGE = (40e-6, 100e-6)
OXIDE_RANGE = (1e-6, 6e-6)
ADHESIVE_MAX_THICKNESS = 10e-6

#: 3x a 150 um ground-signal-ground pad pitch.
DEFAULT_RETURN_RADIUS = 450e-6

#: Sets |S21| of the recommended design to -0.146 dB at 8 GHz.
DEFAULT_LINE_LENGTH = 4.7e-3


@dataclass(frozen=True)
class ViaGeometry:
    """Copper-filled through-cap via.

    ``diameter`` is the etched hole; the sidewall oxide lines the hole, so the
    copper core has radius ``diameter / 2 - sidewall_oxide_thickness``.
    ``return_radius`` is the radius of the cylinder the substrate current
    returns through.
    """

    diameter: float
    height: float
    sidewall_oxide_thickness: float = 2 * UM
    return_radius: float = DEFAULT_RETURN_RADIUS

    def __post_init__(self):
        if not self.diameter > 0:
            raise ValueError(f"via diameter must be positive, got {self.diameter!r}")
        if not self.height > 0:
            raise ValueError(f"via height must be positive, got {self.height!r}")
        if not 0 < self.sidewall_oxide_thickness < self.diameter / 2:
            raise ValueError("sidewall oxide must be positive and thinner than the via radius")
        if not self.return_radius > self.diameter / 2:
            raise ValueError("return radius must exceed the via radius")

    @property
    def conductor_radius(self) -> float:
        return self.diameter / 2 - self.sidewall_oxide_thickness


@dataclass(frozen=True)
class BumpGeometry:
    """Cylindrical solder bump; ``stack`` runs along the bump height."""

    radius: float
    height: float
    stack: LayerStack

    def __post_init__(self):
        if not (self.radius > 0 and self.height > 0):
            raise ValueError("bump radius and height must be positive")
        if not math.isclose(self.stack.total_thickness, self.height, rel_tol=1e-9):
            raise ValueError(f"bump height {self.height!r} does not match its stack "
                             f"({self.stack.total_thickness!r})")

    @classmethod
    def from_stack(cls, radius: float, stack: LayerStack) -> BumpGeometry:
        stack = dataclasses.replace(stack, cross_section_area=math.pi * radius**2)
        return cls(radius, stack.total_thickness, stack)

    @property
    def volume(self) -> float:
        return math.pi * self.radius**2 * self.height

    @property
    def footprint(self) -> float:
        return math.pi * self.radius**2


@dataclass(frozen=True)
class BondingSpec:
    """Wafer-to-wafer bonding: ``none``, ``reflow`` or ``adhesive``.

    Use the ``none()``, ``reflow_to()`` and ``adhesive_layer()`` constructors.
    """

    mode: str = "none"
    target_radius: float | None = None
    conductivity: float | None = None
    thickness: float | None = None

    def __post_init__(self):
        if self.mode == "none":
            if any(v is not None for v in (self.target_radius, self.conductivity, self.thickness)):
                raise ValueError("bonding 'none' takes no parameters")
        elif self.mode == "reflow":
            if self.target_radius is None or not self.target_radius > 0:
                raise ValueError("reflow bonding needs a positive target radius")
        elif self.mode == "adhesive":
            if self.conductivity is None or not (self.conductivity > 0
                                                 and math.isfinite(self.conductivity)):
                raise ValueError("adhesive bonding needs a positive finite conductivity")
            if self.thickness is None or not 0 < self.thickness <= ADHESIVE_MAX_THICKNESS:
                raise ValueError(f"adhesive thickness must lie in (0, 10 um], got {self.thickness!r}")
        else:
            raise ValueError(f"unknown bonding mode {self.mode!r}")

    @classmethod
    def none(cls) -> BondingSpec:
        return cls("none")

    @classmethod
    def reflow_to(cls, target_radius: float) -> BondingSpec:
        return cls("reflow", target_radius=target_radius)

    @classmethod
    def adhesive_layer(cls, thickness: float, conductivity: float | None = None) -> BondingSpec:
        if conductivity is None:
            conductivity = load_catalog()["conductive_adhesive"].conductivity
        return cls("adhesive", conductivity=conductivity, thickness=thickness)

    @property
    def label(self) -> str:
        if self.mode == "reflow":
            return f"reflow({self.target_radius / UM:g}um)"
        if self.mode == "adhesive":
            return f"adhesive({self.thickness / UM:g}um)"
        return "none"


@dataclass(frozen=True)
class PackageDesign:
    """One capped coplanar line: via and bump at each port, cap over the line.

    ``line_char_impedance`` and ``line_eff_permittivity`` describe the bare
    (uncapped) line.  ``line_width`` is the strip width under the cap that
    both carries the conductor loss and sees the cap loading.
    ``pad_area`` defaults to the footprint of the bonded bump.
    """

    cap: SiliconSubstrate
    via: ViaGeometry
    bump: BumpGeometry
    bonding: BondingSpec = field(default_factory=BondingSpec.none)
    line_length: float = DEFAULT_LINE_LENGTH
    line_char_impedance: float = 50.0
    line_eff_permittivity: float = 6.45
    line_conductor: MaterialLayer = field(
        default_factory=lambda: MaterialLayer.from_catalog("Au", 2 * UM))
    line_width: float = 100 * UM
    pad_area: float | None = None
    via_fill_conductivity: float = 5.8e7

    def __post_init__(self):
        if not math.isclose(self.cap.thickness, self.via.height, rel_tol=1e-12):
            raise ValueError(f"via height {self.via.height!r} must equal cap thickness "
                             f"{self.cap.thickness!r}")
        for name in ("line_length", "line_char_impedance", "line_width"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive, got {value!r}")
        if not self.line_eff_permittivity >= 1:
            raise ValueError("line effective permittivity must be >= 1")
        if not (self.via_fill_conductivity > 0 and math.isfinite(self.via_fill_conductivity)):
            raise ValueError("via fill conductivity must be positive and finite")
        if self.pad_area is not None and not self.pad_area > 0:
            raise ValueError("pad area must be positive")
        if self.bonding.mode == "reflow" and self.bonding.target_radius < self.bump.radius:
            raise ValueError(f"reflow target radius {self.bonding.target_radius!r} is smaller "
                             f"than the bump radius {self.bump.radius!r}; bumps do not contract")

    def with_cap_thickness(self, thickness: float) -> PackageDesign:
        """Thin or thicken the cap; the via follows."""
        return dataclasses.replace(
            self,
            cap=dataclasses.replace(self.cap, thickness=thickness),
            via=dataclasses.replace(self.via, height=thickness),
        )

    def bonded_bump(self) -> BumpGeometry:
        if self.bonding.mode == "reflow":
            return reflow(self.bump, self.bonding.target_radius)
        return self.bump

    def contact_area(self) -> float:
        return self.bonded_bump().footprint if self.pad_area is None else self.pad_area


def paper_default(catalog: Mapping[str, CatalogEntry] | None = None) -> PackageDesign:
    """The recommended design: 2 kohm.cm, 250 um cap, 60 um via, 2 um oxide."""
    catalog = load_catalog() if catalog is None else catalog
    thickness = 250 * UM
    return PackageDesign(
        cap=SiliconSubstrate.named("HRS2k", thickness),
        via=ViaGeometry(60 * UM, thickness, 2 * UM),
        bump=BumpGeometry.from_stack(30 * UM, paper_bump_stack(30 * UM, catalog)),
        line_conductor=MaterialLayer.from_catalog("Au", 2 * UM, catalog),
        via_fill_conductivity=catalog["Cu"].conductivity,
    )


def reflow(bump: BumpGeometry, r_eff: float) -> BumpGeometry:
    """Spread a bump to radius ``r_eff`` at constant volume and cylindrical shape."""
    if r_eff < bump.radius:
        raise ValueError(f"reflow radius {r_eff!r} is smaller than the bump radius "
                         f"{bump.radius!r}; bumps do not contract")
    if r_eff == bump.radius:
        return bump
    scale = (bump.radius / r_eff) ** 2
    stack = bump.stack.scaled(scale, math.pi * r_eff**2)
    return BumpGeometry(r_eff, bump.height * scale, stack)


def standoff_gap(design: PackageDesign) -> float:
    """Cap-to-device gap after bonding."""
    gap = design.bonded_bump().height
    if design.bonding.mode == "adhesive":
        gap += design.bonding.thickness
    return gap


@dataclass(frozen=True)
class Violation:
    parameter: str
    message: str

    def __str__(self):
        return f"{self.parameter}: {self.message}"


def validate(design: PackageDesign) -> list[Violation]:
    """Manufacturability warnings.  An empty list means nothing to flag."""
    out = []
    t = design.cap.thickness
    if t < CAP_MIN_DEMONSTRATED:
        out.append(Violation("cap_thickness", f"{t / UM:g} um is below the demonstrated "
                                              f"{CAP_MIN_DEMONSTRATED / UM:g} um thinning limit"))
    elif not CAP_SAFE_RANGE[0] <= t <= CAP_SAFE_RANGE[1]:
        out.append(Violation("cap_thickness", f"{t / UM:g} um is outside the mechanically safe "
                                              f"250-300 um window"))
    d = design.via.diameter
    if not VIA_DIAMETER_RANGE[0] <= d <= VIA_DIAMETER_RANGE[1]:
        out.append(Violation("via_diameter", f"{d / UM:g} um is outside the studied 40-100 um range"))
    ox = design.via.sidewall_oxide_thickness
    if not OXIDE_RANGE[0] <= ox <= OXIDE_RANGE[1]:
        out.append(Violation("oxide_thickness", f"{ox / UM:g} um is outside the studied 1-6 um range"))
    return out


def lossless_variant(design: PackageDesign, big: float = 1e30) -> PackageDesign:
    """Same geometry with near-perfect conductors and a near-insulating cap.

    Useful to separate mismatch from dissipation.  ``big`` stands in for
    infinite conductivity (and for infinite cap resistivity in ohm.cm).
    """
    bump = design.bump
    stack = LayerStack(tuple(dataclasses.replace(layer, conductivity=big)
                             for layer in bump.stack.layers), bump.stack.cross_section_area)
    bonding = design.bonding
    if bonding.mode == "adhesive":
        bonding = dataclasses.replace(bonding, conductivity=big)
    return dataclasses.replace(
        design,
        cap=dataclasses.replace(design.cap, resistivity=big),
        bump=dataclasses.replace(bump, stack=stack),
        bonding=bonding,
        via_fill_conductivity=big,
        line_conductor=dataclasses.replace(design.line_conductor, conductivity=big),
    )


# ---------------------------------------------------------------------------
# design files

_DESIGN_KEYS = {
    "base", "cap_resistivity_ohm_cm", "cap_relative_permittivity", "cap_thickness_um",
    "via_diameter_um", "oxide_thickness_um", "return_radius_um", "via_fill",
    "bump_radius_um", "bump_layers", "bonding", "line_length_um", "line_width_um",
    "line_impedance_ohm", "line_eff_permittivity", "line_conductor",
    "line_conductor_thickness_um", "pad_area_um2",
}
_LAYER_KEYS = {"material", "thickness_um"}
_BONDING_KEYS = {"mode", "target_radius_um", "thickness_um", "material"}


class DesignFileError(ValueError):
    """Raised for unreadable or inconsistent design files; ``key`` names the culprit."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


def _number(raw: Mapping[str, Any], key: str) -> float:
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DesignFileError(f"key {key!r}: expected a number, got {value!r}", key)
    return float(value)


def _bonding_from(raw: Any, catalog: Mapping[str, CatalogEntry]) -> BondingSpec:
    if raw == "none":
        return BondingSpec.none()
    if not isinstance(raw, dict):
        raise DesignFileError("key 'bonding': expected 'none' or an object with a 'mode'", "bonding")
    unknown = set(raw) - _BONDING_KEYS
    if unknown:
        key = sorted(unknown)[0]
        raise DesignFileError(f"unknown key {key!r} in 'bonding'", key)
    mode = raw.get("mode")
    if mode == "none":
        return BondingSpec.none()
    if mode == "reflow":
        return BondingSpec.reflow_to(_number(raw, "target_radius_um") * UM)
    if mode == "adhesive":
        material = raw.get("material", "conductive_adhesive")
        if material not in catalog:
            raise DesignFileError(f"bonding material {material!r} not in catalog", "material")
        return BondingSpec("adhesive", conductivity=catalog[material].conductivity,
                           thickness=_number(raw, "thickness_um") * UM)
    raise DesignFileError(f"bonding mode must be none, reflow or adhesive, got {mode!r}", "mode")


def design_from_dict(raw: Mapping[str, Any],
                     catalog: Mapping[str, CatalogEntry] | None = None) -> PackageDesign:
    """Build a design from a design-file mapping.

    Every key is optional; missing keys take the ``paper-default`` values.
    Unknown keys raise :class:`DesignFileError`.
    """
    catalog = load_catalog() if catalog is None else catalog
    if not isinstance(raw, Mapping):
        raise DesignFileError("design file must contain a JSON object")
    unknown = set(raw) - _DESIGN_KEYS
    if unknown:
        key = sorted(unknown)[0]
        raise DesignFileError(f"unknown design key {key!r}", key)
    if raw.get("base", "paper-default") != "paper-default":
        raise DesignFileError(f"unknown base preset {raw['base']!r}", "base")

    base = paper_default(catalog)

    def get(key, default, scale=1.0):
        return _number(raw, key) * scale if key in raw else default

    def material(key, default):
        name = raw.get(key, default)
        if name not in catalog:
            raise DesignFileError(f"key {key!r}: material {name!r} not in catalog", key)
        return catalog[name].conductivity

    try:
        thickness = get("cap_thickness_um", base.cap.thickness, UM)
        cap = SiliconSubstrate(get("cap_resistivity_ohm_cm", base.cap.resistivity),
                               get("cap_relative_permittivity", base.cap.relative_permittivity),
                               thickness)
        via = ViaGeometry(get("via_diameter_um", base.via.diameter, UM), thickness,
                          get("oxide_thickness_um", base.via.sidewall_oxide_thickness, UM),
                          get("return_radius_um", base.via.return_radius, UM))
        radius = get("bump_radius_um", base.bump.radius, UM)
        if "bump_layers" in raw:
            layers = raw["bump_layers"]
            if not isinstance(layers, list) or not layers:
                raise DesignFileError("key 'bump_layers': expected a non-empty list", "bump_layers")
            built = []
            for entry in layers:
                if not isinstance(entry, dict):
                    raise DesignFileError("key 'bump_layers': entries must be objects", "bump_layers")
                extra = set(entry) - _LAYER_KEYS
                if extra:
                    key = sorted(extra)[0]
                    raise DesignFileError(f"unknown key {key!r} in 'bump_layers'", key)
                name = entry.get("material")
                if name not in catalog:
                    raise DesignFileError(f"bump layer material {name!r} not in catalog", "material")
                built.append(MaterialLayer(name, catalog[name].conductivity,
                                           _number(entry, "thickness_um") * UM))
            stack = LayerStack(tuple(built), math.pi * radius**2)
        else:
            stack = base.bump.stack
        bump = BumpGeometry.from_stack(radius, stack)
        bonding = _bonding_from(raw["bonding"], catalog) if "bonding" in raw else base.bonding
        conductor = MaterialLayer(
            raw.get("line_conductor", base.line_conductor.name),
            material("line_conductor", base.line_conductor.name),
            get("line_conductor_thickness_um", base.line_conductor.thickness, UM))
        return PackageDesign(
            cap=cap, via=via, bump=bump, bonding=bonding,
            line_length=get("line_length_um", base.line_length, UM),
            line_char_impedance=get("line_impedance_ohm", base.line_char_impedance),
            line_eff_permittivity=get("line_eff_permittivity", base.line_eff_permittivity),
            line_conductor=conductor,
            line_width=get("line_width_um", base.line_width, UM),
            pad_area=get("pad_area_um2", None, UM * UM),
            via_fill_conductivity=material("via_fill", "Cu"),
        )
    except DesignFileError:
        raise
    except ValueError as exc:
        raise DesignFileError(f"invalid design: {exc}") from exc


def load_design(path: str | Path,
                catalog: Mapping[str, CatalogEntry] | None = None) -> PackageDesign:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DesignFileError(f"{path}: not valid JSON ({exc})") from exc
    return design_from_dict(raw, catalog)
