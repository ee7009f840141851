"""Command-line front end.

Exit status: 0 on success, 1 when a physical-consistency gate fails or a
sweep row errors, 2 on bad input.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

from .geometry import (
    UM,
    BondingSpec,
    BumpGeometry,
    DesignFileError,
    load_design,
    paper_default,
    reflow,
)
from .materials import (
    LayerStack,
    MaterialLayer,
    collapse_stack,
    load_catalog,
    paper_bump_stack,
    thickness_fraction,
)
from .network import check_passivity, check_reciprocity, magnitude_db, write_touchstone
from .sweep import (
    REFERENCE_FREQUENCIES,
    Axis,
    DesignSpace,
    Metric,
    bonding_comparison,
    default_grid,
    design_label,
    evaluate,
    rank,
    run_sweep,
    trend_report,
)
from .units import parse_quantity

AXIS_DEFAULT_UNITS = {
    "cap_resistivity": ("resistivity", "ohm.cm"),
    "cap_thickness": ("length", "um"),
    "via_diameter": ("length", "um"),
    "oxide_thickness": ("length", "um"),
}

AXIS_HELP = """\
axis syntax: NAME=VALUES, repeatable.  NAME is one of cap_resistivity
(ohm.cm), cap_thickness, via_diameter, oxide_thickness (um) or bonding.
VALUES is a comma list (15,1000,2000) or an inclusive range start:stop:step
(40:100:10).  Numbers without a unit take the axis unit shown above; other
units may be given explicitly (0.3mm, 2kohm.cm).  Bonding values are
none, reflow@<radius> and adhesive@<thickness>, e.g. bonding=none,reflow@40um.
"""


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers

def _quantity(dimension):
    def parse(text):
        try:
            return parse_quantity(text, dimension)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    parse.__name__ = dimension
    return parse


def _load_design(args, catalog):
    if args.design == "paper-default":
        return paper_default(catalog)
    return load_design(args.design, catalog)


def _catalog(args):
    return load_catalog(args.materials) if args.materials else load_catalog()


def _grid(args):
    if args.points < 1:
        raise UsageError("--points must be at least 1")
    if args.points > 1 and not args.start < args.stop:
        raise UsageError("--start must be below --stop")
    return default_grid(args.start, args.stop, args.points)


def parse_axis(text: str) -> Axis:
    name, sep, spec = text.partition("=")
    name = name.strip()
    if not sep or not spec:
        raise UsageError(f"axis {text!r} must look like NAME=VALUES")
    if name == "bonding":
        values = []
        for item in spec.split(","):
            mode, _, arg = item.strip().partition("@")
            if mode == "none" and not arg:
                values.append(BondingSpec.none())
            elif mode == "reflow" and arg:
                values.append(BondingSpec.reflow_to(parse_quantity(arg, "length")))
            elif mode == "adhesive" and arg:
                values.append(BondingSpec.adhesive_layer(parse_quantity(arg, "length")))
            else:
                raise UsageError(f"bad bonding value {item!r}")
        return Axis(name, tuple(values))
    if name not in AXIS_DEFAULT_UNITS:
        raise UsageError(f"unknown axis {name!r}")
    dimension, unit = AXIS_DEFAULT_UNITS[name]
    scale = UM if dimension == "length" else 1.0

    def q(s):
        return parse_quantity(s.strip(), dimension, default_unit=unit)

    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise UsageError(f"range {spec!r} must be start:stop:step")
        start, stop, step = (q(p) for p in parts)
        if not step > 0 or stop < start:
            raise UsageError(f"range {spec!r} needs step > 0 and stop >= start")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        # round on the display scale so 40:100:10 gives exactly 40, 50, ... um
        values = [round((start + i * step) / scale, 12) * scale for i in range(n)]
    else:
        values = [q(p) for p in spec.split(",")]
    return Axis(name, tuple(values))


# ---------------------------------------------------------------------------
# subcommands

def _summary_lines(resp):
    lines = [f"{'f (GHz)':>8}  {'S11 (dB)':>10}  {'S21 (dB)':>10}"]
    lo, hi = resp.frequency[0], resp.frequency[-1]
    shown = [f for f in REFERENCE_FREQUENCIES if lo <= f <= hi] or [resp.frequency[0]]
    for f in shown:
        i = resp.index_of(f)
        lines.append(f"{resp.frequency[i] / 1e9:8.3f}  {magnitude_db(resp.s11[i]):10.3f}  "
                     f"{magnitude_db(resp.s21[i]):10.4f}")
    return lines


def cmd_simulate(args) -> int:
    catalog = _catalog(args)
    design = _load_design(args, catalog)
    grid = _grid(args)
    resp = evaluate(design, grid, args.z_ref, check=False)
    checks = [check_passivity(resp), check_reciprocity(resp)]
    output = Path(args.output or (Path(args.design).stem if args.design != "paper-default"
                                  else "paper-default") + ".s2p")
    write_touchstone(resp, output, comments=[
        "waferpack simulate",
        f"design: {design_label(design)}",
    ])
    lines = [f"design {design_label(design)}", *_summary_lines(resp), *map(str, checks),
             f"wrote {output} ({len(resp)} points)"]
    print("\n".join(lines))
    return 0 if all(c.passed for c in checks) else 1


def cmd_sweep(args) -> int:
    catalog = _catalog(args)
    design = _load_design(args, catalog)
    grid = _grid(args)
    axes = tuple(parse_axis(a) for a in args.axis)
    metrics = tuple(Metric.parse(m) for m in args.metric) if args.metric else tuple(
        Metric(kind, f) for f in REFERENCE_FREQUENCIES for kind in ("insertion_loss", "return_loss"))
    rank_by = Metric.parse(args.rank_by) if args.rank_by else metrics[0]
    if rank_by not in metrics:
        metrics = metrics + (rank_by,)

    table = run_sweep(DesignSpace(design, axes), grid, metrics, args.z_ref, workers=args.workers)
    table.to_csv(args.csv)

    lines = [f"wrote {args.csv} ({len(table)} rows)"]
    for axis in axes:
        if len(axis.values) >= 2:
            lines.append(f"trend: {trend_report(table, axis.parameter, rank_by, args.flat_threshold)}")
    lines.append(f"ranking by {rank_by.column} (best first):")
    for n, row in enumerate(rank(table, rank_by), start=1):
        coords = ", ".join(f"{a.column}={_show(a, v)}" for a, v in zip(axes, row.coords)) or "base"
        value = row.values[table.metrics.index(rank_by)]
        lines.append(f"  {n:3d}. {coords}: {value:.4f} dB" + (f"  [{row.error}]" if row.error else ""))
    text = "\n".join(lines)
    print(text)
    if args.trend_output:
        Path(args.trend_output).write_text(text + "\n")
    return 1 if any(row.error for row in table.rows) else 0


def _show(axis, value):
    if axis.parameter == "bonding":
        return value.label
    return f"{value / (UM if axis.parameter != 'cap_resistivity' else 1.0):g}"


def _read_stack(path, catalog):
    raw = json.loads(Path(path).read_text())
    unknown = set(raw) - {"layers", "radius_um"}
    if unknown:
        raise UsageError(f"stack file: unknown key {sorted(unknown)[0]!r}")
    layers = []
    for entry in raw.get("layers") or []:
        extra = set(entry) - {"material", "conductivity_S_per_m", "thickness_um"}
        if extra:
            raise UsageError(f"stack file: unknown layer key {sorted(extra)[0]!r}")
        name = entry.get("material", "layer")
        if "conductivity_S_per_m" in entry:
            sigma = float(entry["conductivity_S_per_m"])
        elif name in catalog:
            sigma = catalog[name].conductivity
        else:
            raise UsageError(f"stack file: material {name!r} not in catalog and no conductivity given")
        layers.append(MaterialLayer(name, sigma, float(entry["thickness_um"]) * UM))
    if not layers:
        raise UsageError("stack file: 'layers' must be a non-empty list")
    radius = float(raw.get("radius_um", 30.0)) * UM
    return LayerStack(tuple(layers), math.pi * radius**2)


def cmd_collapse(args) -> int:
    catalog = _catalog(args)
    if args.stack == "paper-bump":
        stack = paper_bump_stack(catalog=catalog)
    else:
        stack = _read_stack(args.stack, catalog)
    eff = collapse_stack(stack)
    lines = [f"{'layer':<14}{'thickness (um)':>16}{'sigma (S/m)':>14}{'fraction x':>12}"]
    for i, layer in enumerate(stack.layers):
        lines.append(f"{layer.name:<14}{layer.thickness / UM:16.6g}{layer.conductivity:14.6g}"
                     f"{thickness_fraction(stack, i):12.6f}")
    lines += [
        f"total thickness: {eff.thickness / UM:.6g} um",
        f"effective conductivity: {eff.conductivity:.9g} S/m",
        f"series resistance: {stack.resistance():.6g} ohm "
        f"(area {stack.cross_section_area / UM**2:.6g} um^2)",
    ]
    print("\n".join(lines))
    return 0


def cmd_reflow(args) -> int:
    layer = MaterialLayer("bump", 1.0, args.h)
    bump = BumpGeometry(args.r, args.h, LayerStack((layer,), math.pi * args.r**2))
    if args.r_eff < args.r:
        raise UsageError(f"--r-eff ({args.r_eff / UM:g} um) must not be below --r "
                         f"({args.r / UM:g} um): bumps do not contract")
    out = reflow(bump, args.r_eff)
    print("\n".join([
        f"radius: {bump.radius / UM:.7g} um -> {out.radius / UM:.7g} um",
        f"height: {bump.height / UM:.7g} um -> {out.height / UM:.7g} um",
        f"volume: {bump.volume:.12e} m^3 -> {out.volume:.12e} m^3",
    ]))
    return 0


def cmd_report(args) -> int:
    catalog = _catalog(args)
    design = _load_design(args, catalog)
    grid = _grid(args)
    studies = [
        ("cap resistivity", Axis("cap_resistivity", (15.0, 1000.0, 2000.0)), 5e9),
        ("cap thickness", Axis("cap_thickness", (230e-6, 250e-6, 300e-6)), 8e9),
        ("via diameter", Axis("via_diameter", tuple(d * UM for d in range(40, 101, 10))), 5e9),
    ]
    lines = [f"base design {design_label(design)}", ""]
    failed = False
    for title, axis, f in studies:
        s21, s11 = Metric("insertion_loss", f), Metric("return_loss", f)
        table = run_sweep(DesignSpace(design, (axis,)), grid, (s21, s11), args.z_ref)
        failed |= any(r.error for r in table.rows)
        lines.append(f"== {title} ==")
        for row in table.rows:
            lines.append(f"  {_show(axis, row.coords[0]):>8}  {s21.column} {row.values[0]:9.4f}"
                         f"  {s11.column} {row.values[1]:9.3f}")
        lines.append(f"  {trend_report(table, axis.parameter, s21, args.flat_threshold)}")
        best = rank(table, s21)[0].coords[0]
        edge = " (edge of range, no interior optimum)" if best in (
            axis.values[0], axis.values[-1]) else ""
        lines += [f"  best: {_show(axis, best)}{edge}", ""]

    s11 = Metric("return_loss", 6e9)
    lines.append("== sidewall oxide (1-6 um) ==")
    for rho in (15.0, 1000.0, 2000.0):
        space = DesignSpace(design, (Axis("cap_resistivity", (rho,)),
                                     Axis("oxide_thickness", tuple(t * UM for t in range(1, 7)))))
        table = run_sweep(space, grid, (s11,), args.z_ref)
        failed |= any(r.error for r in table.rows)
        lines.append(f"  {rho:g} ohm.cm: {trend_report(table, 'oxide_thickness', s11, args.flat_threshold)}")
    lines.append("")

    lines.append("== bonding (deltas against unbonded) ==")
    lines.append(str(bonding_comparison(design, grid, z_ref=args.z_ref)))
    # split the adhesive shift into the raised cap and the glue resistance
    glue = BondingSpec.adhesive_layer(5e-6)
    ideal = dataclasses.replace(glue, conductivity=1e30)
    split = bonding_comparison(design, grid, frequencies=(6e9,), variants=(glue, ideal),
                               z_ref=args.z_ref).variants
    total, gap_only = split[0].delta_s11_db[0], split[1].delta_s11_db[0]
    lines.append(f"adhesive(5um) dS11@6GHz {total:+.4f} dB: raised cap {gap_only:+.4f} dB, "
                 f"glue resistance {total - gap_only:+.4f} dB")
    text = "\n".join(lines)
    print(text)
    if args.output:
        Path(args.output).write_text(text + "\n")
    return 1 if failed else 0


# ---------------------------------------------------------------------------

def _common(p, design=True):
    if design:
        p.add_argument("--design", default="paper-default",
                       help="design JSON file or the preset 'paper-default'")
    p.add_argument("--materials", help="materials catalog JSON (default: bundled)")


def _grid_options(p):
    p.add_argument("--start", type=_quantity("frequency"), default=0.1e9, help="e.g. 0.1GHz")
    p.add_argument("--stop", type=_quantity("frequency"), default=10e9, help="e.g. 10GHz")
    p.add_argument("--points", type=int, default=199)
    p.add_argument("--z-ref", type=_quantity("impedance"), default=50.0, help="e.g. 50ohm")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="waferpack", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="S-parameters of one design to a .s2p file")
    _common(p)
    _grid_options(p)
    p.add_argument("-o", "--output", help="Touchstone output path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="design-space sweep to CSV with trends and ranking",
                       epilog=AXIS_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    _common(p)
    _grid_options(p)
    p.add_argument("--axis", action="append", default=[], help="NAME=VALUES (see below)")
    p.add_argument("--metric", action="append", help="e.g. s21@5GHz; repeatable")
    p.add_argument("--rank-by", help="metric to rank and classify trends by")
    p.add_argument("--csv", default="sweep.csv")
    p.add_argument("--trend-output", help="also write the trend/ranking text here")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--flat-threshold", type=float, default=0.05, help="dB")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("collapse", help="effective conductivity of a layer stack")
    p.add_argument("stack", help="stack JSON file or 'paper-bump'")
    _common(p, design=False)
    p.set_defaults(func=cmd_collapse)

    p = sub.add_parser("reflow", help="volume-conserving bump reflow")
    p.add_argument("--h", type=_quantity("length"), required=True, help="bump height, e.g. 26.3um")
    p.add_argument("--r", type=_quantity("length"), required=True, help="bump radius, e.g. 30um")
    p.add_argument("--r-eff", type=_quantity("length"), required=True,
                   help="radius after reflow, e.g. 40um")
    p.set_defaults(func=cmd_reflow)

    p = sub.add_parser("report", help="all single-parameter studies and the bonding comparison")
    _common(p)
    _grid_options(p)
    p.add_argument("--flat-threshold", type=float, default=0.05, help="dB")
    p.add_argument("-o", "--output", help="also write the report here")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DesignFileError as exc:
        where = f" (key {exc.key!r})" if exc.key else ""
        print(f"error: {exc}{where}", file=sys.stderr)
        return 2
    except (UsageError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
