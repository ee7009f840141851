"""Equivalent-circuit model of an RF line under a wafer-level silicon cap with
through-cap vias and solder bumps, with design-space sweeps over the package
parameters."""

from .circuit import ElementChain, assemble, bare_line
from .geometry import (
    BondingSpec,
    BumpGeometry,
    PackageDesign,
    ViaGeometry,
    design_from_dict,
    load_design,
    lossless_variant,
    paper_default,
    reflow,
    standoff_gap,
    validate,
)
from .materials import (
    LayerStack,
    MaterialLayer,
    SiliconSubstrate,
    collapse_stack,
    effective_conductivity_pair,
    load_catalog,
    paper_bump_stack,
    solder_alloy_transform,
    thickness_fraction,
)
from .network import (
    FrequencyResponse,
    SMatrix,
    TwoPortABCD,
    abcd_line,
    abcd_series,
    abcd_shunt,
    abcd_to_s,
    cascade,
    check_passivity,
    check_reciprocity,
    magnitude_db,
    read_touchstone,
    s_to_abcd,
    write_touchstone,
)
from .sweep import (
    Axis,
    DesignSpace,
    Metric,
    SweepTable,
    bonding_comparison,
    default_grid,
    evaluate,
    rank,
    run_sweep,
    trend_report,
    uncapped_response,
)

__all__ = [
    "abcd_line",
    "abcd_series",
    "abcd_shunt",
    "abcd_to_s",
    "assemble",
    "Axis",
    "bare_line",
    "bonding_comparison",
    "BondingSpec",
    "BumpGeometry",
    "cascade",
    "check_passivity",
    "check_reciprocity",
    "collapse_stack",
    "default_grid",
    "design_from_dict",
    "DesignSpace",
    "effective_conductivity_pair",
    "ElementChain",
    "evaluate",
    "FrequencyResponse",
    "LayerStack",
    "load_catalog",
    "load_design",
    "lossless_variant",
    "magnitude_db",
    "MaterialLayer",
    "Metric",
    "PackageDesign",
    "paper_bump_stack",
    "paper_default",
    "rank",
    "read_touchstone",
    "reflow",
    "run_sweep",
    "s_to_abcd",
    "SiliconSubstrate",
    "SMatrix",
    "solder_alloy_transform",
    "standoff_gap",
    "SweepTable",
    "thickness_fraction",
    "trend_report",
    "TwoPortABCD",
    "uncapped_response",
    "validate",
    "ViaGeometry",
    "write_touchstone",
]

__version__ = "0.1.0"
