"""Two-port network algebra: ABCD primitives, cascading, ABCD <-> S conversion,
physical-consistency checks and Touchstone v1 ``.s2p`` I/O.

Every object is vectorised over frequency: matrices have shape ``(..., 2, 2)``
and ``frequency`` broadcasts against the leading axes, so one call handles a
whole sweep grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

FORMAT_UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}


class SingularNetworkError(ArithmeticError):
    """ABCD -> S conversion hit a zero denominator."""


class TouchstoneError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def _freq(f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if np.any(~(f > 0)):
        raise ValueError("frequency must be positive")
    return f


@dataclass(frozen=True, eq=False)
class TwoPortABCD:
    """Chain matrix ``[[A, B], [C, D]]``; B in ohm, C in siemens."""

    matrix: np.ndarray
    frequency: np.ndarray

    @property
    def a(self):
        return self.matrix[..., 0, 0]

    @property
    def b(self):
        return self.matrix[..., 0, 1]

    @property
    def c(self):
        return self.matrix[..., 1, 0]

    @property
    def d(self):
        return self.matrix[..., 1, 1]

    def det(self) -> np.ndarray:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: TwoPortABCD) -> TwoPortABCD:
        return cascade([self, other])


def _abcd(a, b, c, d, f) -> TwoPortABCD:
    f = _freq(f)
    a, b, c, d, f = np.broadcast_arrays(*(np.asarray(v) for v in (a, b, c, d)), f)
    m = np.empty(f.shape + (2, 2), dtype=complex)
    m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1] = a, b, c, d
    return TwoPortABCD(m, f)


def abcd_series(z, f) -> TwoPortABCD:
    """Series impedance ``z`` (ohm)."""
    return _abcd(1.0, z, 0.0, 1.0, f)


def abcd_shunt(y, f) -> TwoPortABCD:
    """Shunt admittance ``y`` (S) to ground."""
    return _abcd(1.0, 0.0, y, 1.0, f)


def abcd_line(z0, gamma, length, f) -> TwoPortABCD:
    """Uniform line of characteristic impedance ``z0``, propagation constant
    ``gamma`` (1/m) and ``length`` (m)."""
    if np.any(np.asarray(length) < 0):
        raise ValueError("line length must be non-negative")
    gl = np.asarray(gamma) * length
    ch, sh = np.cosh(gl), np.sinh(gl)
    z0 = np.asarray(z0)
    return _abcd(ch, z0 * sh, sh / z0, ch, f)


def cascade(chain: Sequence[TwoPortABCD]) -> TwoPortABCD:
    """Left-to-right product of two-ports sharing one frequency grid."""
    if not chain:
        raise ValueError("cannot cascade an empty chain")
    first = chain[0]
    m = first.matrix
    for item in chain[1:]:
        if not np.array_equal(np.broadcast_to(item.frequency, first.frequency.shape),
                              first.frequency):
            raise ValueError("cascaded two-ports must share the same frequency grid")
        m = m @ item.matrix
    return TwoPortABCD(m, first.frequency)


@dataclass(frozen=True, eq=False)
class SMatrix:
    """Scattering matrix ``[[s11, s12], [s21, s22]]`` at a real reference impedance."""

    s: np.ndarray
    reference_impedance: float
    frequency: np.ndarray

    @property
    def s11(self):
        return self.s[..., 0, 0]

    @property
    def s12(self):
        return self.s[..., 0, 1]

    @property
    def s21(self):
        return self.s[..., 1, 0]

    @property
    def s22(self):
        return self.s[..., 1, 1]


def abcd_to_s(m: TwoPortABCD, z_ref: float = 50.0) -> SMatrix:
    if not z_ref > 0:
        raise ValueError(f"reference impedance must be positive, got {z_ref!r}")
    a, b, c, d = m.a, m.b / z_ref, m.c * z_ref, m.d
    den = a + b + c + d
    bad = ~np.isfinite(den) | (den == 0)
    if np.any(bad):
        f = np.broadcast_to(m.frequency, den.shape)[bad].ravel()[0]
        raise SingularNetworkError(f"singular ABCD -> S conversion at {f:.6g} Hz")
    s = np.empty(m.matrix.shape, dtype=complex)
    s[..., 0, 0] = (a + b - c - d) / den
    s[..., 0, 1] = 2 * (a * d - b * c) / den
    s[..., 1, 0] = 2 / den
    s[..., 1, 1] = (-a + b - c + d) / den
    return SMatrix(s, float(z_ref), m.frequency)


def s_to_abcd(s: SMatrix) -> TwoPortABCD:
    z0 = s.reference_impedance
    s11, s12, s21, s22 = s.s11, s.s12, s.s21, s.s22
    two_s21 = 2 * s21
    m = np.empty(s.s.shape, dtype=complex)
    m[..., 0, 0] = ((1 + s11) * (1 - s22) + s12 * s21) / two_s21
    m[..., 0, 1] = z0 * ((1 + s11) * (1 + s22) - s12 * s21) / two_s21
    m[..., 1, 0] = ((1 - s11) * (1 - s22) - s12 * s21) / (two_s21 * z0)
    m[..., 1, 1] = ((1 - s11) * (1 + s22) + s12 * s21) / two_s21
    return TwoPortABCD(m, s.frequency)


def magnitude_db(s):
    """``20 log10 |s|``; an exact zero maps to ``-inf``."""
    with np.errstate(divide="ignore"):
        out = 20.0 * np.log10(np.abs(s))
    return float(out) if np.ndim(out) == 0 else out


class FrequencyResponse:
    """S-matrices over a strictly increasing frequency grid.

    Indexing returns the :class:`SMatrix` at one grid point.
    """

    def __init__(self, frequency, s, reference_impedance: float = 50.0):
        frequency = np.atleast_1d(np.asarray(frequency, dtype=float))
        s = np.asarray(s, dtype=complex).reshape(frequency.shape + (2, 2))
        if frequency.ndim != 1 or frequency.size == 0:
            raise ValueError("a frequency response needs at least one grid point")
        if np.any(np.diff(frequency) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        if not reference_impedance > 0:
            raise ValueError("reference impedance must be positive")
        self.frequency = frequency
        self.s = s
        self.reference_impedance = float(reference_impedance)

    @classmethod
    def from_smatrix(cls, sm: SMatrix) -> FrequencyResponse:
        return cls(sm.frequency, sm.s, sm.reference_impedance)

    def __len__(self):
        return self.frequency.size

    def __getitem__(self, i) -> SMatrix:
        return SMatrix(self.s[i], self.reference_impedance, self.frequency[i])

    def __repr__(self):
        return (f"FrequencyResponse({len(self)} points, {self.frequency[0]:.4g}-"
                f"{self.frequency[-1]:.4g} Hz, z_ref={self.reference_impedance:g})")

    @property
    def s11(self):
        return self.s[:, 0, 0]

    @property
    def s12(self):
        return self.s[:, 0, 1]

    @property
    def s21(self):
        return self.s[:, 1, 0]

    @property
    def s22(self):
        return self.s[:, 1, 1]

    def index_of(self, f: float) -> int:
        """Nearest grid point to ``f``."""
        return int(np.argmin(np.abs(self.frequency - f)))

    def at(self, f: float) -> SMatrix:
        return self[self.index_of(f)]


# ---------------------------------------------------------------------------
# physical consistency

@dataclass(frozen=True, eq=False)
class CheckReport:
    """Per-frequency check values against a pass threshold."""

    name: str
    frequency: np.ndarray
    values: np.ndarray
    limit: float

    @property
    def passed(self) -> bool:
        return bool(np.all(self.values <= self.limit))

    @property
    def worst(self) -> tuple[float, float]:
        """``(frequency, value)`` of the worst point."""
        i = int(np.argmax(self.values))
        return float(self.frequency[i]), float(self.values[i])

    def __str__(self):
        f, v = self.worst
        status = "pass" if self.passed else "FAIL"
        return f"{self.name}: {status} (worst {v:.3e} at {f / 1e9:.4g} GHz, limit {self.limit:g})"


def check_passivity(resp: FrequencyResponse, tol: float = 1e-9) -> CheckReport:
    """Largest singular value of S at each frequency, limit ``1 + tol``."""
    sv = np.linalg.svd(resp.s, compute_uv=False)[:, 0]
    return CheckReport("passivity", resp.frequency, sv, 1.0 + tol)


def check_reciprocity(resp: FrequencyResponse, tol: float = 1e-9) -> CheckReport:
    """``|s12 - s21|`` at each frequency, limit ``tol``."""
    return CheckReport("reciprocity", resp.frequency, np.abs(resp.s12 - resp.s21), tol)


# ---------------------------------------------------------------------------
# Touchstone v1

def write_touchstone(resp: FrequencyResponse, path: str | Path,
                     comments: Sequence[str] = ()) -> None:
    """Write a two-port Touchstone v1 file in GHz / RI format.

    Layout: ``!`` comment lines, the option line ``# GHz S RI R <zref>``, then
    one row per frequency: ``f Re(S11) Im(S11) Re(S21) Im(S21) Re(S12)
    Im(S12) Re(S22) Im(S22)``, every number printed with 17 significant
    digits and rows terminated by ``\\n``.
    """
    if len(resp) == 0:
        raise ValueError("cannot write an empty response")
    lines = [f"! {c}" for c in comments]
    lines.append(f"# GHz S RI R {resp.reference_impedance:.17g}")
    order = ((0, 0), (1, 0), (0, 1), (1, 1))
    for f, s in zip(resp.frequency, resp.s):
        vals = [f / 1e9]
        for i, j in order:
            vals += [s[i, j].real, s[i, j].imag]
        lines.append(" ".join(f"{v:.16e}" for v in vals))
    Path(path).write_text("\n".join(lines) + "\n")


def _to_complex(fmt, x, y):
    if fmt == "RI":
        return complex(x, y)
    if fmt == "MA":
        return complex(x * math.cos(math.radians(y)), x * math.sin(math.radians(y)))
    mag = 10.0 ** (x / 20.0)
    return complex(mag * math.cos(math.radians(y)), mag * math.sin(math.radians(y)))


def read_touchstone(path: str | Path) -> FrequencyResponse:
    """Read a two-port Touchstone v1 S-parameter file (RI, MA or DB)."""
    unit, fmt, z_ref = "GHZ", "MA", 50.0  # v1 defaults
    seen_option = False
    tokens: list[tuple[float, int]] = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            if seen_option:
                raise TouchstoneError("second option line", lineno)
            seen_option = True
            parts = line[1:].upper().split()
            k = 0
            while k < len(parts):
                p = parts[k]
                if p in FORMAT_UNITS:
                    unit = p
                elif p in ("RI", "MA", "DB"):
                    fmt = p
                elif p == "S":
                    pass
                elif p in ("Y", "Z", "H", "G"):
                    raise TouchstoneError(f"only S parameters are supported, got {p}", lineno)
                elif p == "R":
                    k += 1
                    try:
                        z_ref = float(parts[k])
                    except (IndexError, ValueError):
                        raise TouchstoneError("option 'R' needs a numeric impedance", lineno) from None
                else:
                    raise TouchstoneError(f"unrecognised option {p!r}", lineno)
                k += 1
            continue
        for tok in line.split():
            try:
                tokens.append((float(tok), lineno))
            except ValueError:
                raise TouchstoneError(f"not a number: {tok!r}", lineno) from None

    if len(tokens) % 9:
        raise TouchstoneError(f"{len(tokens)} numbers is not a multiple of 9 "
                              f"(two-port rows)", tokens[-1][1])
    if not tokens:
        raise TouchstoneError("no data rows")
    rows = np.array([t[0] for t in tokens]).reshape(-1, 9)
    freq = rows[:, 0] * FORMAT_UNITS[unit]
    s = np.empty((len(rows), 2, 2), dtype=complex)
    for n, row in enumerate(rows):
        vals = [_to_complex(fmt, row[1 + 2 * k], row[2 + 2 * k]) for k in range(4)]
        s[n, 0, 0], s[n, 1, 0], s[n, 0, 1], s[n, 1, 1] = vals
    bad = np.nonzero(np.diff(freq) <= 0)[0]
    if bad.size:
        raise TouchstoneError("frequencies must be strictly increasing",
                              tokens[9 * (bad[0] + 1)][1])
    return FrequencyResponse(freq, s, z_ref)
