"""Design-space sweeps over the package degrees of freedom.

A :class:`DesignSpace` is a base design plus axes; :func:`run_sweep`
evaluates the Cartesian product (first axis varies slowest) and records the
requested :class:`Metric` values per row.  Rows are then ranked or classified
along one axis with :func:`rank` and :func:`trend_report`.

Metric values are stored as signed S-parameter magnitudes in dB
(``S11_dB``, ``S21_dB``).  "Loss" for ranking means ``-S21_dB`` for insertion
loss and ``S11_dB`` for reflection, so smaller is always better.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .circuit import assemble, bare_line
from .geometry import UM, BondingSpec, PackageDesign, validate
from .units import parse_quantity
from .network import (
    FrequencyResponse,
    abcd_to_s,
    check_passivity,
    check_reciprocity,
    magnitude_db,
)

#: axis id -> (CSV column suffix, display scale: SI value / scale = display value)
AXES = {
    "cap_resistivity": ("ohm_cm", 1.0),
    "cap_thickness": ("um", UM),
    "via_diameter": ("um", UM),
    "oxide_thickness": ("um", UM),
    "bonding": ("", None),
}

#: Frequencies the reference results are quoted at.
REFERENCE_FREQUENCIES = (5e9, 6e9, 7e9, 8e9)

FLAT_THRESHOLD_DB = 0.05


class ConsistencyError(RuntimeError):
    """A response failed the passivity or reciprocity gate."""


def default_grid(start: float = 0.1e9, stop: float = 10e9, points: int = 199) -> np.ndarray:
    """Linear grid; the default 50 MHz step hits 5, 6, 7 and 8 GHz."""
    if points < 1:
        raise ValueError("a frequency grid needs at least one point")
    if points == 1:
        return np.array([float(start)])
    if not 0 < start < stop:
        raise ValueError("grid needs 0 < start < stop")
    return np.linspace(start, stop, points)


def evaluate(design: PackageDesign, grid, z_ref: float = 50.0,
             check: bool = True) -> FrequencyResponse:
    """S-parameters of one design over ``grid``.

    With ``check`` the passivity and reciprocity gates are enforced and a
    :class:`ConsistencyError` is raised on violation.
    """
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    resp = FrequencyResponse.from_smatrix(abcd_to_s(assemble(design, grid).to_abcd(), z_ref))
    if check:
        for report in (check_passivity(resp), check_reciprocity(resp)):
            if not report.passed:
                raise ConsistencyError(f"{report} for design {design_label(design)}")
    return resp


def uncapped_response(design: PackageDesign, grid, z_ref: float = 50.0) -> FrequencyResponse:
    """The bare device line without cap, vias or bumps."""
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    return FrequencyResponse.from_smatrix(abcd_to_s(bare_line(design, grid).to_abcd(), z_ref))


def design_label(design: PackageDesign) -> str:
    return (f"[{design.cap.resistivity:g} ohm.cm, cap {design.cap.thickness / UM:g} um, "
            f"via {design.via.diameter / UM:g} um, oxide "
            f"{design.via.sidewall_oxide_thickness / UM:g} um, {design.bonding.label}]")


def apply_axis(design: PackageDesign, parameter: str, value: Any) -> PackageDesign:
    """Return ``design`` with one degree of freedom set (SI units, ohm.cm)."""
    if parameter == "cap_resistivity":
        return dataclasses.replace(design, cap=dataclasses.replace(design.cap, resistivity=value))
    if parameter == "cap_thickness":
        return design.with_cap_thickness(value)
    if parameter == "via_diameter":
        return dataclasses.replace(design, via=dataclasses.replace(design.via, diameter=value))
    if parameter == "oxide_thickness":
        return dataclasses.replace(
            design, via=dataclasses.replace(design.via, sidewall_oxide_thickness=value))
    if parameter == "bonding":
        if not isinstance(value, BondingSpec):
            raise TypeError("bonding axis values must be BondingSpec instances")
        return dataclasses.replace(design, bonding=value)
    raise ValueError(f"unknown sweep axis {parameter!r}; choose from {', '.join(AXES)}")


@dataclass(frozen=True)
class Axis:
    parameter: str
    values: tuple

    def __post_init__(self):
        if self.parameter not in AXES:
            raise ValueError(f"unknown sweep axis {self.parameter!r}; choose from {', '.join(AXES)}")
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise ValueError(f"axis {self.parameter!r} has no values")

    @property
    def column(self) -> str:
        suffix = AXES[self.parameter][0]
        return f"{self.parameter}_{suffix}" if suffix else self.parameter


@dataclass(frozen=True)
class DesignSpace:
    base: PackageDesign
    axes: tuple[Axis, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        names = [a.parameter for a in self.axes]
        if len(set(names)) != len(names):
            raise ValueError("each axis may appear only once")

    def points(self) -> list[tuple]:
        """Coordinates in lexicographic axis order (first axis slowest)."""
        return list(itertools.product(*(a.values for a in self.axes)))

    def design_at(self, coords: Sequence) -> PackageDesign:
        design = self.base
        for axis, value in zip(self.axes, coords):
            design = apply_axis(design, axis.parameter, value)
        return design


@dataclass(frozen=True)
class Metric:
    """S11 (``return_loss``) or S21 (``insertion_loss``) in dB at one frequency.

    The value is read at the grid point nearest to ``frequency``.
    """

    kind: str
    frequency: float

    def __post_init__(self):
        if self.kind not in ("return_loss", "insertion_loss"):
            raise ValueError(f"metric kind must be return_loss or insertion_loss, got {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> Metric:
        """``s21@5GHz`` or ``s11@6GHz``."""
        name, _, freq = text.partition("@")
        kinds = {"s11": "return_loss", "s21": "insertion_loss"}
        if name.lower() not in kinds or not freq:
            raise ValueError(f"metric must look like s21@5GHz or s11@6GHz, got {text!r}")
        return cls(kinds[name.lower()], parse_quantity(freq, "frequency"))

    @property
    def column(self) -> str:
        s = "S11" if self.kind == "return_loss" else "S21"
        return f"{s}_dB@{self.frequency / 1e9:g}GHz"

    def value(self, resp: FrequencyResponse) -> float:
        i = resp.index_of(self.frequency)
        s = resp.s11[i] if self.kind == "return_loss" else resp.s21[i]
        return float(magnitude_db(s))

    def loss(self, value: float) -> float:
        return value if self.kind == "return_loss" else -value


@dataclass(frozen=True)
class Row:
    coords: tuple
    values: tuple[float, ...]
    flags: tuple[str, ...] = ()
    error: str | None = None


@dataclass(frozen=True)
class SweepTable:
    axes: tuple[Axis, ...]
    metrics: tuple[Metric, ...]
    rows: tuple[Row, ...] = field(default=())

    def __len__(self):
        return len(self.rows)

    def column(self, metric: Metric) -> np.ndarray:
        try:
            k = self.metrics.index(metric)
        except ValueError:
            raise ValueError(f"metric {metric.column} not in table") from None
        return np.array([row.values[k] for row in self.rows])

    def to_csv(self, path: str | Path | None = None) -> str:
        """RFC 4180 CSV: coordinates, metrics, flags.  Returns the text."""
        buf = io.StringIO(newline="")
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow([a.column for a in self.axes] + [m.column for m in self.metrics] + ["flags"])
        for row in self.rows:
            cells = [_format_coord(a, v) for a, v in zip(self.axes, row.coords)]
            cells += [_fmt(v) for v in row.values]
            flags = list(row.flags) + ([f"error: {row.error}"] if row.error else [])
            cells.append("; ".join(flags))
            writer.writerow(cells)
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.8e}"


def _format_coord(axis: Axis, value) -> str:
    if axis.parameter == "bonding":
        return value.label
    return _fmt(value / AXES[axis.parameter][1])


def _coord_key(value):
    if isinstance(value, BondingSpec):
        return (value.mode, value.target_radius or 0.0, value.thickness or 0.0)
    return value


def _evaluate_row(job) -> Row:
    space, coords, grid, metrics, z_ref = job
    flags = ()
    try:
        design = space.design_at(coords)
        flags = tuple(str(v) for v in validate(design))
        resp = evaluate(design, grid, z_ref)
    except (ValueError, ArithmeticError, ConsistencyError) as exc:
        return Row(coords, tuple(math.nan for _ in metrics), flags, str(exc))
    return Row(coords, tuple(m.value(resp) for m in metrics), flags)


def run_sweep(space: DesignSpace, grid, metrics: Iterable[Metric], z_ref: float = 50.0,
              workers: int = 1) -> SweepTable:
    """Evaluate every design point.

    Failing points are kept as rows with NaN metrics and an ``error``.
    ``workers > 1`` evaluates rows in a process pool; the table is identical
    to the serial one.
    """
    metrics = tuple(metrics)
    if not metrics:
        raise ValueError("at least one metric is required")
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    jobs = [(space, coords, grid, metrics, z_ref) for coords in space.points()]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_evaluate_row, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = [_evaluate_row(job) for job in jobs]
    return SweepTable(space.axes, metrics, tuple(rows))


def rank(table: SweepTable, metric: Metric) -> list[Row]:
    """Rows ordered best first; ties fall back to the design coordinates.

    Rows whose evaluation failed go last, in table order.
    """
    if metric not in table.metrics:
        raise ValueError(f"metric {metric.column} not in table")
    k = table.metrics.index(metric)
    good = [r for r in table.rows if not math.isnan(r.values[k])]
    bad = [r for r in table.rows if math.isnan(r.values[k])]
    good.sort(key=lambda r: (metric.loss(r.values[k]), tuple(_coord_key(c) for c in r.coords)))
    return good + bad


@dataclass(frozen=True)
class TrendReport:
    """How a metric's loss moves along one axis.

    ``classification`` is one of ``increasing``, ``decreasing`` (loss versus
    the axis value), ``non-monotonic`` or ``flat``.  With several other axes
    the table splits into groups; the overall class is the common one, or
    ``non-monotonic`` if groups disagree.
    """

    axis: str
    metric: Metric
    classification: str
    total_variation: float
    groups: tuple[tuple[tuple, str, float], ...] = ()

    def __str__(self):
        head = (f"flat along {self.axis}" if self.classification == "flat"
                else f"{self.classification} loss with {self.axis}")
        return f"{head} ({self.metric.column}, total variation {self.total_variation:.4g} dB)"


def _classify(loss: np.ndarray, threshold: float) -> tuple[str, float]:
    steps = np.diff(loss)
    tv = float(np.sum(np.abs(steps)))
    if tv < threshold:
        return "flat", tv
    if np.all(steps >= 0):
        return "increasing", tv
    if np.all(steps <= 0):
        return "decreasing", tv
    return "non-monotonic", tv


def trend_report(table: SweepTable, axis: str, metric: Metric,
                 threshold: float = FLAT_THRESHOLD_DB) -> TrendReport:
    names = [a.parameter for a in table.axes]
    if axis not in names:
        raise ValueError(f"axis {axis!r} not in table")
    j = names.index(axis)
    if len(table.axes[j].values) < 2:
        raise ValueError(f"axis {axis!r} needs at least two values for a trend")
    k = table.metrics.index(metric)

    groups: dict[tuple, list[Row]] = {}
    for row in table.rows:
        rest = row.coords[:j] + row.coords[j + 1:]
        groups.setdefault(rest, []).append(row)

    results = []
    for rest, rows in groups.items():
        if axis != "bonding":
            rows = sorted(rows, key=lambda r: r.coords[j])
        loss = np.array([metric.loss(r.values[k]) for r in rows])
        if np.any(np.isnan(loss)):
            results.append((rest, "non-monotonic", math.nan))
            continue
        results.append((rest, *_classify(loss, threshold)))

    classes = {c for _, c, _ in results}
    overall = classes.pop() if len(classes) == 1 else "non-monotonic"
    tv = max(t for _, _, t in results)
    return TrendReport(axis, metric, overall, tv, tuple(results))


# ---------------------------------------------------------------------------
# bonding

@dataclass(frozen=True)
class BondingVariant:
    label: str
    s11_db: tuple[float, ...]
    s21_db: tuple[float, ...]
    delta_s11_db: tuple[float, ...]
    delta_s21_db: tuple[float, ...]
    max_abs_delta_s21_db: float


@dataclass(frozen=True)
class BondingComparison:
    """Each bonding variant against the unbonded base at the reference
    frequencies; deltas are variant minus base, in dB."""

    frequencies: tuple[float, ...]
    variants: tuple[BondingVariant, ...]

    def __getitem__(self, label: str) -> BondingVariant:
        for v in self.variants:
            if v.label == label:
                return v
        raise KeyError(label)

    def __str__(self):
        cols = "".join(f"  dS11@{f / 1e9:g}GHz  dS21@{f / 1e9:g}GHz" for f in self.frequencies)
        lines = [f"{'bonding':<18}{cols}  max|dS21| (grid)"]
        for v in self.variants:
            cells = "".join(f"  {a:+12.4f}  {b:+12.5f}" for a, b in zip(v.delta_s11_db, v.delta_s21_db))
            lines.append(f"{v.label:<18}{cells}  {v.max_abs_delta_s21_db:.5f}")
        return "\n".join(lines)


def default_bonding_variants() -> tuple[BondingSpec, ...]:
    return (BondingSpec.none(), BondingSpec.reflow_to(40 * UM),
            BondingSpec.adhesive_layer(5e-6), BondingSpec.adhesive_layer(10e-6))


def bonding_comparison(base: PackageDesign, grid, frequencies: Sequence[float] = (5e9, 6e9),
                       variants: Sequence[BondingSpec] | None = None,
                       z_ref: float = 50.0) -> BondingComparison:
    variants = default_bonding_variants() if variants is None else tuple(variants)
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    ref = evaluate(dataclasses.replace(base, bonding=BondingSpec.none()), grid, z_ref)
    idx = [ref.index_of(f) for f in frequencies]
    ref11, ref21 = magnitude_db(ref.s11), magnitude_db(ref.s21)

    out = []
    for spec in variants:
        resp = evaluate(dataclasses.replace(base, bonding=spec), grid, z_ref)
        s11, s21 = magnitude_db(resp.s11), magnitude_db(resp.s21)
        out.append(BondingVariant(
            spec.label,
            tuple(float(np.atleast_1d(s11)[i]) for i in idx),
            tuple(float(np.atleast_1d(s21)[i]) for i in idx),
            tuple(float(np.atleast_1d(s11 - ref11)[i]) for i in idx),
            tuple(float(np.atleast_1d(s21 - ref21)[i]) for i in idx),
            float(np.max(np.abs(s21 - ref21))),
        ))
    return BondingComparison(tuple(float(f) for f in frequencies), tuple(out))
