"""Touchstone v1 reader/writer for 1- and 2-port S-parameter files.

Only v1 files with S-parameters are supported; v2 keyword files are
rejected. The record keeps the numeric pairs exactly as they appear in
the file (in the file's own frequency unit and value format) so that a
write/parse round trip is bit-identical; conversion to Hz and complex
values happens at the accessors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, ValidationError

FREQ_UNITS = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}
UNIT_LABEL = {"hz": "Hz", "khz": "kHz", "mhz": "MHz", "ghz": "GHz"}
FORMATS = ("RI", "MA", "DB")

DEFAULT_UNIT = "ghz"
DEFAULT_FORMAT = "MA"
DEFAULT_Z_REF = 50.0

# Touchstone v1 column order for 2-port rows: S11 S21 S12 S22
_TWO_PORT_ORDER = ((0, 0), (1, 0), (0, 1), (1, 1))


@dataclass(frozen=True)
class TouchstoneRecord:
    """Parsed Touchstone data.

    freqs: raw frequency values in the file's `freq_unit`;
    data: raw value pairs, shape (n_rows, n_params, 2) in `fmt`;
    param_type is always "S".
    """

    freq_unit: str
    param_type: str
    fmt: str
    z_ref: float
    n_ports: int
    freqs: np.ndarray
    data: np.ndarray

    def __post_init__(self):
        if self.freq_unit not in FREQ_UNITS:
            raise ValidationError(f"unknown frequency unit {self.freq_unit!r}")
        if self.param_type != "S":
            raise ValidationError("only S-parameters are supported")
        if self.fmt not in FORMATS:
            raise ValidationError(f"unknown format {self.fmt!r}")
        if not (self.z_ref > 0):
            raise ValidationError(f"z_ref must be > 0, got {self.z_ref}")
        if self.n_ports not in (1, 2):
            raise ValidationError(f"only 1- and 2-port data supported, got {self.n_ports}")
        freqs = np.asarray(self.freqs, dtype=float)
        data = np.asarray(self.data, dtype=float)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "data", data)
        if data.shape != (len(freqs), self.n_ports**2, 2):
            raise ValidationError(f"data shape {data.shape} inconsistent with record")
        if len(freqs) and np.any(np.diff(freqs) <= 0):
            raise ValidationError("frequencies must be strictly increasing")

    @property
    def freqs_hz(self) -> np.ndarray:
        return self.freqs * FREQ_UNITS[self.freq_unit]

    def _pairs_to_complex(self, a, b):
        if self.fmt == "RI":
            return a + 1j * b
        mag = 10.0 ** (a / 20.0) if self.fmt == "DB" else a
        return mag * np.exp(1j * np.deg2rad(b))

    def values(self) -> np.ndarray:
        """Complex S-parameters: shape (n,) for 1-port, (n, 2, 2) for 2-port."""
        a = self.data[..., 0]
        b = self.data[..., 1]
        c = self._pairs_to_complex(a, b)
        if self.n_ports == 1:
            return c[:, 0]
        out = np.empty((len(self.freqs), 2, 2), dtype=complex)
        for col, (i, j) in enumerate(_TWO_PORT_ORDER):
            out[:, i, j] = c[:, col]
        return out


def _complex_to_pairs(values: np.ndarray, fmt: str) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    if fmt == "RI":
        return np.stack([values.real, values.imag], axis=-1)
    mag = np.abs(values)
    ang = np.rad2deg(np.angle(values))
    if fmt == "MA":
        return np.stack([mag, ang], axis=-1)
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(mag)
    return np.stack([db, ang], axis=-1)


def record_from_s11(freqs_hz, s11, unit: str = DEFAULT_UNIT, fmt: str = "RI",
                    z_ref: float = DEFAULT_Z_REF) -> TouchstoneRecord:
    """Build a 1-port record from complex S11 samples (freqs in Hz)."""
    unit = unit.lower()
    freqs = np.asarray(freqs_hz, dtype=float) / FREQ_UNITS[unit]
    data = _complex_to_pairs(np.asarray(s11, dtype=complex), fmt)[:, None, :]
    return TouchstoneRecord(freq_unit=unit, param_type="S", fmt=fmt, z_ref=z_ref,
                            n_ports=1, freqs=freqs, data=data)


def record_from_two_port(freqs_hz, s11, s21, s12, s22, unit: str = DEFAULT_UNIT,
                         fmt: str = "RI", z_ref: float = DEFAULT_Z_REF) -> TouchstoneRecord:
    """Build a 2-port record from complex S-parameter arrays (freqs in Hz)."""
    unit = unit.lower()
    freqs = np.asarray(freqs_hz, dtype=float) / FREQ_UNITS[unit]
    cols = [np.asarray(s, dtype=complex) for s in (s11, s21, s12, s22)]
    data = np.stack([_complex_to_pairs(c, fmt) for c in cols], axis=1)
    return TouchstoneRecord(freq_unit=unit, param_type="S", fmt=fmt, z_ref=z_ref,
                            n_ports=2, freqs=freqs, data=data)


def _parse_option_line(tokens, line_no):
    unit, fmt, z_ref = DEFAULT_UNIT, DEFAULT_FORMAT, DEFAULT_Z_REF
    param = "S"
    i = 0
    while i < len(tokens):
        tok = tokens[i].lower()
        if tok in FREQ_UNITS:
            unit = tok
        elif tok in ("ri", "ma", "db"):
            fmt = tok.upper()
        elif tok == "s":
            param = "S"
        elif tok in ("y", "z", "g", "h"):
            raise ParseError(f"parameter type {tokens[i]!r} not supported (only S)", line_no)
        elif tok == "r":
            if i + 1 >= len(tokens):
                raise ParseError("option line: R given without a resistance value", line_no)
            try:
                z_ref = float(tokens[i + 1])
            except ValueError:
                raise ParseError(f"option line: bad reference resistance {tokens[i+1]!r}", line_no)
            i += 1
        else:
            raise ParseError(f"option line: unknown token {tokens[i]!r}", line_no)
        i += 1
    if not (z_ref > 0):
        raise ParseError(f"option line: reference resistance must be > 0, got {z_ref}", line_no)
    return unit, param, fmt, z_ref


def parse_touchstone(text: str) -> TouchstoneRecord:
    """Parse Touchstone v1 text into a TouchstoneRecord.

    `!` starts a comment anywhere in a line. Option-line tokens are
    case-insensitive; omitted tokens default to GHz, MA, R 50. The port
    count follows from the data column count (3 -> 1-port, 9 -> 2-port).
    """
    if not text.strip():
        raise ParseError("empty Touchstone input")
    unit, param, fmt, z_ref = DEFAULT_UNIT, "S", DEFAULT_FORMAT, DEFAULT_Z_REF
    saw_option = False
    freqs: list[float] = []
    rows: list[list[float]] = []
    n_cols = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            raise ParseError(
                "Touchstone v2 keywords are not supported (v1 files only)", line_no
            )
        if line.startswith("#"):
            if saw_option:
                raise ParseError("multiple option lines", line_no)
            unit, param, fmt, z_ref = _parse_option_line(line[1:].split(), line_no)
            saw_option = True
            continue
        parts = line.split()
        try:
            nums = [float(p) for p in parts]
        except ValueError as exc:
            raise ParseError(f"bad numeric field ({exc})", line_no)
        if n_cols is None:
            if len(nums) not in (3, 9):
                raise ParseError(
                    f"expected 3 (1-port) or 9 (2-port) columns, got {len(nums)}", line_no
                )
            n_cols = len(nums)
        elif len(nums) != n_cols:
            raise ParseError(
                f"inconsistent column count: expected {n_cols}, got {len(nums)}", line_no
            )
        if freqs and nums[0] <= freqs[-1]:
            raise ParseError(
                f"frequency not strictly increasing ({nums[0]} after {freqs[-1]})", line_no
            )
        freqs.append(nums[0])
        rows.append(nums[1:])

    if not rows:
        raise ParseError("no data rows found")
    n_ports = 1 if n_cols == 3 else 2
    data = np.asarray(rows, dtype=float).reshape(len(rows), n_ports**2, 2)
    return TouchstoneRecord(freq_unit=unit, param_type=param, fmt=fmt, z_ref=z_ref,
                            n_ports=n_ports, freqs=np.asarray(freqs), data=data)


def _fmt_num(x: float) -> str:
    """Shortest decimal that round-trips the double exactly."""
    if x == 0:
        return "0"
    if math.isinf(x) or math.isnan(x):
        raise ValidationError(f"cannot serialize non-finite value {x}")
    return repr(float(x))


def write_touchstone(record: TouchstoneRecord) -> str:
    """Serialize a record to Touchstone v1 text (numeric round trip exact)."""
    lines = [
        f"! {record.n_ports}-port S-parameter data",
        f"# {UNIT_LABEL[record.freq_unit]} S {record.fmt} R {_fmt_num(record.z_ref)}",
    ]
    for i, f in enumerate(record.freqs):
        fields = [_fmt_num(f)]
        for pair in record.data[i]:
            fields.append(_fmt_num(pair[0]))
            fields.append(_fmt_num(pair[1]))
        lines.append(" ".join(fields))
    return "\n".join(lines) + "\n"
