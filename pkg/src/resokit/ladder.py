"""Ladder filter synthesis and two-port evaluation from MBVD resonators.

A ladder is an alternating series/shunt chain of one-port resonators.
Shunt resonators are detuned down so their lossless anti-resonance sits
on the series resonance, which opens the passband; static capacitances
follow an image-impedance matching rule with the shunt/series
capacitance ratio r as the design knob.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PassbandUnresolvedError, ValidationError
from .mbvd import (
    DEFAULT_KT2_DEFINITION,
    Kt2Definition,
    MbvdParams,
    freq_ratio_from_kt2,
    from_targets,
    synth_admittance,
)

# Dielectric-loss resistance of the measured reference resonator; designed
# resonators inherit it by default (a substrate property, unlike the probe
# routing resistance, which a monolithic filter does not pay per element).
REFERENCE_DIELECTRIC_LOSS_OHM = 1.5

SERIES = "series"
SHUNT = "shunt"


@dataclass(frozen=True)
class LadderSpec:
    """An ordered series/shunt resonator chain with its termination.

    elements: list of (position, MbvdParams) with position in
    {"series", "shunt"}; z0: termination impedance (ohm); f_center:
    design center frequency (Hz).
    """

    elements: tuple
    z0: float
    f_center: float

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if not (self.z0 > 0):
            raise ValidationError(f"z0 must be > 0, got {self.z0}")
        if not (self.f_center > 0):
            raise ValidationError(f"f_center must be > 0, got {self.f_center}")
        for pos, res in self.elements:
            if pos not in (SERIES, SHUNT):
                raise ValidationError(f"unknown element position {pos!r}")
            if not isinstance(res, MbvdParams):
                raise ValidationError("elements must carry MbvdParams resonators")


@dataclass(frozen=True)
class LadderResponse:
    """Two-port S-parameters of a ladder over a frequency grid."""

    freqs: np.ndarray
    s11: np.ndarray
    s21: np.ndarray
    s12: np.ndarray
    s22: np.ndarray


@dataclass(frozen=True)
class FilterMetrics:
    """Passband metrics extracted from an |S21| trace.

    il_db: insertion loss at the passband peak (dB, >= 0)
    bw_frac: 3-dB fractional bandwidth (f_hi - f_lo)/sqrt(f_lo*f_hi)
    rejection_db: minimum out-of-band rejection outside the guard band
    f_lo, f_hi: 3-dB band edges (Hz)
    """

    il_db: float
    bw_frac: float
    rejection_db: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not (self.f_lo < self.f_hi):
            raise ValidationError("f_lo must be < f_hi")
        if self.il_db < 0 or self.rejection_db < 0:
            raise ValidationError("il_db and rejection_db must be >= 0")


@dataclass(frozen=True)
class SweepRow:
    """One row of a coupling sweep; metrics are NaN when unresolved."""

    kt2: float
    il_db: float
    bw_frac: float
    rejection_db: float
    resolved: bool


def design_ladder(order: int, f_series: float, kt2: float, qm: float, r: float,
                  z0: float, rs: float = 0.0,
                  r0: float = REFERENCE_DIELECTRIC_LOSS_OHM,
                  definition: Kt2Definition = DEFAULT_KT2_DEFINITION) -> LadderSpec:
    """Size an order-N ladder from per-resonator targets.

    The chain alternates starting with a series element (odd orders also
    end on one). Series resonators resonate at f_series; shunt resonators
    are detuned down so their lossless anti-resonance equals f_series.
    C0_series = 1/(2*pi*f_center*z0*sqrt(r)) with f_center the geometric
    mean of the series fs and fp_lossless, and C0_shunt = r*C0_series.
    All resonators share kt2, qm and the rs/r0 parasitics.
    """
    if order < 2:
        raise ValidationError(f"order must be >= 2, got {order}")
    if not (r > 0):
        raise ValidationError(f"capacitance ratio r must be > 0, got {r}")
    if not (z0 > 0):
        raise ValidationError(f"z0 must be > 0, got {z0}")

    ratio = freq_ratio_from_kt2(kt2, definition)   # fs/fp
    fp_over_fs = 1.0 / ratio
    f_center = f_series * math.sqrt(fp_over_fs)     # sqrt(fs * fp_lossless)
    c0_series = 1.0 / (2.0 * math.pi * f_center * z0 * math.sqrt(r))
    c0_shunt = r * c0_series
    f_shunt = f_series / fp_over_fs                 # shunt fp_lossless == f_series

    elements = []
    for i in range(order):
        if i % 2 == 0:
            res = from_targets(f_series, kt2, qm, c0_series, rs, r0, definition)
            elements.append((SERIES, res))
        else:
            res = from_targets(f_shunt, kt2, qm, c0_shunt, rs, r0, definition)
            elements.append((SHUNT, res))
    return LadderSpec(elements=tuple(elements), z0=z0, f_center=f_center)


def ladder_response(spec: LadderSpec, fgrid) -> LadderResponse:
    """Cascade the ladder's ABCD factors and convert to S-parameters.

    Series element: [[1, Z], [0, 1]] with Z = 1/Y; shunt element:
    [[1, 0], [Y, 1]]. Grid points where a resonator admittance is singular
    are recorded as NaN and skipped rather than aborting.
    """
    f = np.asarray(fgrid, dtype=float)
    if f.ndim != 1 or len(f) == 0:
        raise ValidationError("fgrid must be a non-empty 1-D array")
    if np.any(~np.isfinite(f)) or np.any(f <= 0):
        raise ValidationError("fgrid must be finite and > 0")
    if np.any(np.diff(f) <= 0):
        raise ValidationError("fgrid must be strictly increasing")

    a = np.ones(len(f), dtype=complex)
    b = np.zeros(len(f), dtype=complex)
    c = np.zeros(len(f), dtype=complex)
    d = np.ones(len(f), dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        for pos, res in spec.elements:
            y = synth_admittance(res, f)
            if pos == SERIES:
                z = 1.0 / y
                b = a * z + b
                d = c * z + d
            else:
                a = a + b * y
                c = c + d * y
        z0 = spec.z0
        den = a + b / z0 + c * z0 + d
        s11 = (a + b / z0 - c * z0 - d) / den
        s21 = 2.0 / den
        s12 = 2.0 * (a * d - b * c) / den
        s22 = (-a + b / z0 - c * z0 + d) / den
    return LadderResponse(freqs=f, s11=s11, s21=s21, s12=s12, s22=s22)


def _cross(freqs, db, i0, i1, level):
    """Linear interpolation of the frequency where db crosses level."""
    return freqs[i0] + (level - db[i0]) * (freqs[i1] - freqs[i0]) / (db[i1] - db[i0])


def filter_metrics(freqs, s21, guard: tuple[float, float] = (0.15, 0.15)) -> FilterMetrics:
    """Extract FilterMetrics from an S21 trace.

    The passband is the region above (peak - 3 dB); the band edges are the
    outermost crossings of that level around the peak. Rejection is taken
    over f < (1 - g_lo)*f_c and f > (1 + g_hi)*f_c with f_c the geometric
    mean of the band edges.
    """
    freqs = np.asarray(freqs, dtype=float)
    s21 = np.asarray(s21, dtype=complex)
    ok = np.isfinite(s21) & (np.abs(s21) > 0)
    if not np.all(ok):
        freqs, s21 = freqs[ok], s21[ok]
    if len(freqs) < 8:
        raise PassbandUnresolvedError("too few finite S21 samples")
    db = 20.0 * np.log10(np.abs(s21))
    peak = int(np.argmax(db))
    level = db[peak] - 3.0
    above = np.nonzero(db >= level)[0]
    lo_i, hi_i = int(above[0]), int(above[-1])
    if lo_i == 0 or hi_i == len(freqs) - 1:
        raise PassbandUnresolvedError(
            "passband unresolved: no 3-dB crossings inside the grid"
        )
    f_lo = float(_cross(freqs, db, lo_i - 1, lo_i, level))
    f_hi = float(_cross(freqs, db, hi_i, hi_i + 1, level))
    f_c = math.sqrt(f_lo * f_hi)
    out = (freqs < (1.0 - guard[0]) * f_c) | (freqs > (1.0 + guard[1]) * f_c)
    if not np.any(out):
        raise PassbandUnresolvedError("grid has no samples outside the guard band")
    return FilterMetrics(
        il_db=max(-float(db[peak]), 0.0),
        bw_frac=(f_hi - f_lo) / f_c,
        rejection_db=max(-float(np.max(db[out])), 0.0),
        f_lo=f_lo,
        f_hi=f_hi,
    )


def default_filter_grid(f_series: float, span: tuple[float, float] = (0.8, 1.2),
                        n: int = 6001) -> np.ndarray:
    """Evaluation grid used by the filter and sweep paths: `span` times the
    series resonance, covering the passband and the near-band guard regions."""
    return np.linspace(span[0] * f_series, span[1] * f_series, n)


def evaluate_design(order: int, f_series: float, kt2: float, qm: float, r: float,
                    z0: float, rs: float = 0.0,
                    r0: float = REFERENCE_DIELECTRIC_LOSS_OHM,
                    definition: Kt2Definition = DEFAULT_KT2_DEFINITION,
                    fgrid=None, guard: tuple[float, float] = (0.15, 0.15)):
    """design_ladder + ladder_response + filter_metrics in one step.

    Returns (spec, response, metrics). The same path backs the CLI filter
    command and each kt2_sweep row, so their numbers agree exactly.
    """
    spec = design_ladder(order, f_series, kt2, qm, r, z0, rs, r0, definition)
    grid = default_filter_grid(f_series) if fgrid is None else np.asarray(fgrid, float)
    resp = ladder_response(spec, grid)
    met = filter_metrics(resp.freqs, resp.s21, guard)
    return spec, resp, met


def kt2_sweep(kt2_lo: float, kt2_hi: float, n_steps: int, qm: float, r: float,
              order: int, f_series: float, z0: float, rs: float = 0.0,
              r0: float = REFERENCE_DIELECTRIC_LOSS_OHM,
              definition: Kt2Definition = DEFAULT_KT2_DEFINITION,
              fgrid=None) -> list[SweepRow]:
    """Evaluate the ladder design across a coupling range.

    Rows whose passband cannot be resolved (tiny kt2) are flagged with NaN
    metrics rather than fabricated; numerical failures never abort the
    remaining rows.
    """
    upper = math.pi**2 / 8 if definition is Kt2Definition.QUADRATIC else 1.0
    if not (0 <= kt2_lo < kt2_hi < upper):
        raise ValidationError(
            f"require 0 <= kt2_lo < kt2_hi < {upper:.4g}, got ({kt2_lo}, {kt2_hi})"
        )
    if n_steps < 2:
        raise ValidationError(f"n_steps must be >= 2, got {n_steps}")
    rows = []
    for kt2 in np.linspace(kt2_lo, kt2_hi, n_steps):
        kt2 = float(kt2)
        try:
            _, _, met = evaluate_design(order, f_series, kt2, qm, r, z0,
                                        rs, r0, definition, fgrid)
            rows.append(SweepRow(kt2, met.il_db, met.bw_frac,
                                 met.rejection_db, True))
        except (PassbandUnresolvedError, ValidationError):
            rows.append(SweepRow(kt2, math.nan, math.nan, math.nan, False))
    return rows
