"""Conductive layer stacks, the series-resistance conductivity collapse and
the Au/Sn solder alloy transform.

A bump built from several plated metals carries current *through* its layers,
so the layers act as resistors in series.  Collapsing the stack to one layer
with an effective conductivity keeps the total resistance unchanged::

    1 / sigma_eff = sum_i x_i / sigma_i,    x_i = t_i / sum_j t_j

Conductivities are not hard-coded anywhere in the models; they come from the
bundled materials catalog (``data/materials.json``), which a run may override.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

#: Fraction of the Sn thickness worth of Au consumed when Au/Sn reflows into
#: AuSn.  One parameter, fitted to 15.3 um Au + 10 um Sn -> 19 um AuSn + 6.3 um Au.
AU_CONSUMPTION_RATIO = 0.9

#: Named cap substrates, resistivity in ohm.cm.
SUBSTRATE_RESISTIVITY = {
    "LRS": 15.0,
    "HRS1k": 1000.0,
    "HRS2k": 2000.0,
}

SILICON_PERMITTIVITY = 11.9


@dataclass(frozen=True)
class CatalogEntry:
    conductivity: float
    notes: str = ""


def load_catalog(path: str | Path | None = None,
                 overrides: Mapping[str, float] | None = None) -> dict[str, CatalogEntry]:
    """Load a materials catalog.

    Args:
        path: JSON file mapping material name to
            ``{"conductivity_S_per_m": float, "notes": str}``.  The bundled
            catalog is used when omitted.
        overrides: name -> conductivity (S/m) replacing or adding entries.

    Returns:
        Dictionary of catalog entries keyed by material name.
    """
    if path is None:
        text = resources.files("waferpack").joinpath("data/materials.json").read_text()
    else:
        text = Path(path).read_text()
    raw = json.loads(text)
    if not isinstance(raw, dict):
        raise ValueError("materials catalog must be a JSON object")

    catalog = {}
    for name, entry in raw.items():
        try:
            sigma = float(entry["conductivity_S_per_m"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"catalog entry {name!r}: missing or invalid "
                             f"'conductivity_S_per_m'") from exc
        unknown = set(entry) - {"conductivity_S_per_m", "notes"}
        if unknown:
            raise ValueError(f"catalog entry {name!r}: unknown keys {sorted(unknown)}")
        _check_conductivity(sigma, name)
        catalog[name] = CatalogEntry(sigma, str(entry.get("notes", "")))
    for name, sigma in (overrides or {}).items():
        _check_conductivity(sigma, name)
        catalog[name] = CatalogEntry(float(sigma), "run override")
    return catalog


def _check_conductivity(sigma, what):
    if not (sigma > 0 and math.isfinite(sigma)):
        raise ValueError(f"{what}: conductivity must be positive and finite, got {sigma!r}")


@dataclass(frozen=True)
class MaterialLayer:
    """One conductive layer.

    Attributes:
        name: Label, usually the catalog material name.
        conductivity: S/m.
        thickness: m, measured along the current flow.
    """

    name: str
    conductivity: float
    thickness: float

    def __post_init__(self):
        _check_conductivity(self.conductivity, f"layer {self.name!r}")
        if not (self.thickness > 0 and math.isfinite(self.thickness)):
            raise ValueError(f"layer {self.name!r}: thickness must be positive and "
                             f"finite, got {self.thickness!r}")

    @classmethod
    def from_catalog(cls, name: str, thickness: float,
                     catalog: Mapping[str, CatalogEntry] | None = None) -> MaterialLayer:
        catalog = load_catalog() if catalog is None else catalog
        try:
            entry = catalog[name]
        except KeyError:
            raise ValueError(f"material {name!r} not in catalog "
                             f"(known: {', '.join(sorted(catalog))})") from None
        return cls(name, entry.conductivity, thickness)


@dataclass(frozen=True)
class LayerStack:
    """Layers in series along the current path, plus the common cross-section."""

    layers: tuple[MaterialLayer, ...]
    cross_section_area: float

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise ValueError("a layer stack needs at least one layer")
        if not (self.cross_section_area > 0 and math.isfinite(self.cross_section_area)):
            raise ValueError(f"cross-section area must be positive, got {self.cross_section_area!r}")

    @property
    def total_thickness(self) -> float:
        return math.fsum(layer.thickness for layer in self.layers)

    def resistance(self) -> float:
        """DC resistance of the layers in series (ohm)."""
        return math.fsum(layer.thickness / (layer.conductivity * self.cross_section_area)
                         for layer in self.layers)

    def scaled(self, factor: float, cross_section_area: float) -> LayerStack:
        """Copy with every thickness multiplied by ``factor``."""
        layers = [MaterialLayer(layer.name, layer.conductivity, layer.thickness * factor)
                  for layer in self.layers]
        return LayerStack(tuple(layers), cross_section_area)


@dataclass(frozen=True)
class SiliconSubstrate:
    """Capping silicon wafer.

    Attributes:
        resistivity: ohm.cm.
        relative_permittivity: dimensionless.
        thickness: m.
    """

    resistivity: float
    relative_permittivity: float = SILICON_PERMITTIVITY
    thickness: float = 250e-6

    def __post_init__(self):
        if not (self.resistivity > 0 and math.isfinite(self.resistivity)):
            raise ValueError(f"resistivity must be in (0, inf) ohm.cm, got {self.resistivity!r}")
        if not self.relative_permittivity >= 1:
            raise ValueError("relative permittivity must be >= 1")
        if not (self.thickness > 0 and math.isfinite(self.thickness)):
            raise ValueError(f"substrate thickness must be positive, got {self.thickness!r}")

    @classmethod
    def named(cls, name: str, thickness: float = 250e-6) -> SiliconSubstrate:
        """Catalog substrate: ``LRS`` (15 ohm.cm), ``HRS1k`` or ``HRS2k``."""
        try:
            rho = SUBSTRATE_RESISTIVITY[name]
        except KeyError:
            raise ValueError(f"unknown substrate {name!r}; choose from "
                             f"{', '.join(SUBSTRATE_RESISTIVITY)}") from None
        return cls(rho, SILICON_PERMITTIVITY, thickness)

    @property
    def conductivity(self) -> float:
        """S/m."""
        return 100.0 / self.resistivity


def effective_conductivity_pair(sigma_a: float, sigma_b: float, x: float) -> float:
    """Effective conductivity of two layers in series.

    ``x`` is the thickness fraction of layer ``b``; layer ``a`` fills the rest.
    """
    _check_conductivity(sigma_a, "sigma_a")
    _check_conductivity(sigma_b, "sigma_b")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"thickness fraction must lie in [0, 1], got {x!r}")
    return sigma_a * sigma_b / (sigma_b * (1.0 - x) + sigma_a * x)


def thickness_fraction(stack: LayerStack, index: int) -> float:
    if not -len(stack.layers) <= index < len(stack.layers):
        raise IndexError(f"layer index {index} out of range for a "
                         f"{len(stack.layers)}-layer stack")
    return stack.layers[index].thickness / stack.total_thickness


def collapse_stack(stack: LayerStack) -> MaterialLayer:
    """Replace a stack by one layer of equal thickness and equal resistance."""
    total = stack.total_thickness
    resistivity = math.fsum(layer.thickness / layer.conductivity for layer in stack.layers) / total
    # the harmonic mean can drift one ulp outside [min, max] for near-uniform stacks
    sigmas = [layer.conductivity for layer in stack.layers]
    sigma = min(max(1.0 / resistivity, min(sigmas)), max(sigmas))
    name = "+".join(layer.name for layer in stack.layers)
    return MaterialLayer(name, sigma, total)


def solder_alloy_transform(au_thickness: float, sn_thickness: float,
                           ratio: float = AU_CONSUMPTION_RATIO) -> tuple[float, float]:
    """Thicknesses after Au/Sn reflow.

    All Sn reacts with ``ratio * sn_thickness`` of Au to form AuSn; the
    volume change on alloying is neglected, so the stack height is conserved.

    Returns:
        ``(ausn_thickness, residual_au_thickness)``
    """
    if au_thickness < 0 or sn_thickness < 0:
        raise ValueError("layer thicknesses must be non-negative")
    consumed = ratio * sn_thickness
    if consumed > au_thickness * (1 + 1e-12):
        raise ValueError(
            f"not enough Au to alloy all Sn: {sn_thickness:.4g} m of Sn needs "
            f"{consumed:.4g} m of Au but only {au_thickness:.4g} m is plated")
    total = au_thickness + sn_thickness
    residual = max(au_thickness - consumed, 0.0)
    return total - residual, residual


def paper_bump_stack(radius: float = 30e-6,
                     catalog: Mapping[str, CatalogEntry] | None = None) -> LayerStack:
    """Post-reflow bump stack: AuSn / Au / Ti from 15.3 um Au + 10 um Sn on 1 um Ti."""
    catalog = load_catalog() if catalog is None else catalog
    ausn, au = solder_alloy_transform(15.3e-6, 10e-6)
    layers = [
        MaterialLayer.from_catalog("AuSn", ausn, catalog),
        MaterialLayer.from_catalog("Au", au, catalog),
        MaterialLayer.from_catalog("Ti", 1e-6, catalog),
    ]
    return LayerStack(tuple(layers), math.pi * radius**2)


def stack_from_layers(layers: Sequence[tuple[str, float]], cross_section_area: float,
                      catalog: Mapping[str, CatalogEntry] | None = None) -> LayerStack:
    """Build a stack from ``(material name, thickness)`` pairs."""
    catalog = load_catalog() if catalog is None else catalog
    return LayerStack(tuple(MaterialLayer.from_catalog(n, t, catalog) for n, t in layers),
                      cross_section_area)
