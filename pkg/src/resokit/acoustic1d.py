"""1-D transfer-matrix acoustics for layered stacks and periodic cells.

Each layer or lateral segment is a lossless acoustic transmission line;
force-per-area plays the role of voltage and particle velocity the role
of current, so the per-element chain matrix is

    [[cos(k l), j z sin(k l)], [j sin(k l) / z, cos(k l)]]

with k = 2*pi*f/v and characteristic impedance z. Thickness stacks give
the thickness-extensional resonance of a plate (stress-free faces);
lateral rod/trench cells give Bloch stop-bands and transmission through
a finite number of cells.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NoResonanceError, NumericsError, ValidationError


@dataclass(frozen=True)
class Layer:
    """One layer of a thickness stack: thickness (m), density (kg/m^3),
    longitudinal sound speed (m/s)."""

    thickness: float
    density: float
    velocity: float

    def __post_init__(self):
        for name in ("thickness", "density", "velocity"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValidationError(f"Layer.{name} must be finite and > 0, got {v}")


@dataclass(frozen=True)
class Segment:
    """One lateral segment of a periodic cell: length (m), effective phase
    velocity (m/s), effective characteristic impedance per unit depth.

    Zero length is allowed (a degenerate segment contributes the identity)."""

    length: float
    velocity: float
    impedance: float

    def __post_init__(self):
        if not (math.isfinite(self.length) and self.length >= 0):
            raise ValidationError(f"Segment.length must be finite and >= 0, got {self.length}")
        for name in ("velocity", "impedance"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValidationError(f"Segment.{name} must be finite and > 0, got {v}")


@dataclass(frozen=True)
class UnitCellGeometry:
    """Rod-trench unit-cell cross-section.

    w_r: rod width (m); w_u: unit-cell width (m); t1: trench film
    thickness (m); t2: rod step height (m); rod_stack / trench_stack:
    bottom-to-top layer lists of the two regions.
    """

    w_r: float
    w_u: float
    t1: float
    t2: float
    rod_stack: tuple
    trench_stack: tuple

    def __post_init__(self):
        if not (0 < self.w_r < self.w_u):
            raise ValidationError(f"require 0 < w_r < w_u, got w_r={self.w_r}, w_u={self.w_u}")
        if not (self.t1 > 0):
            raise ValidationError(f"t1 must be > 0, got {self.t1}")
        if self.t2 < 0:
            raise ValidationError(f"t2 must be >= 0, got {self.t2}")
        if not self.rod_stack or not self.trench_stack:
            raise ValidationError("rod_stack and trench_stack must be non-empty")
        object.__setattr__(self, "rod_stack", tuple(self.rod_stack))
        object.__setattr__(self, "trench_stack", tuple(self.trench_stack))


@dataclass(frozen=True)
class StopBand:
    """One stop-band interval (Hz)."""

    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not (0 < self.f_lo < self.f_hi):
            raise ValidationError(f"require 0 < f_lo < f_hi, got ({self.f_lo}, {self.f_hi})")

    def contains(self, f: float) -> bool:
        return self.f_lo <= f <= self.f_hi


@dataclass(frozen=True)
class BlochResult:
    """Per-cell Bloch eigenvalue data at one frequency."""

    bloch_factor: complex
    in_stop_band: bool
    attenuation_per_cell: float


def _line_matrices(f, lengths, velocities, impedances, q=None):
    """Chain matrices of acoustic lines, shape (n_freq, n_elem, 2, 2)."""
    f = np.atleast_1d(np.asarray(f, dtype=float))
    if np.any(~np.isfinite(f)) or np.any(f <= 0):
        raise ValidationError("frequencies must be finite and > 0")
    v = np.asarray(velocities, dtype=complex)
    if q is not None:
        if not (q > 0):
            raise ValidationError(f"quality factor must be > 0, got {q}")
        v = v * (1.0 + 0.5j / q)
    phase = (2.0 * math.pi * f)[:, None] * np.asarray(lengths)[None, :] / v[None, :]
    z = np.asarray(impedances, dtype=complex)[None, :]
    m = np.empty(phase.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = np.cos(phase)
    m[..., 0, 1] = 1j * z * np.sin(phase)
    m[..., 1, 0] = 1j * np.sin(phase) / z
    m[..., 1, 1] = np.cos(phase)
    return m


def _chain(matrices):
    """Ordered product over the element axis of an (n_freq, n_elem, 2, 2) array."""
    total = matrices[:, 0]
    for k in range(1, matrices.shape[1]):
        total = total @ matrices[:, k]
    return total


def stack_matrix(stack, f):
    """Chain matrix of a thickness stack at frequency f (scalar or array)."""
    if not stack:
        raise ValidationError("stack must be non-empty")
    m = _chain(_line_matrices(
        f,
        [l.thickness for l in stack],
        [l.velocity for l in stack],
        [l.density * l.velocity for l in stack],
    ))
    return m if np.asarray(f).shape else m[0]


def _te_condition(stack, f):
    """Stress-free/stress-free resonance function: Im of the force-coupling
    off-diagonal element; its zeros are the free-plate resonances."""
    m = stack_matrix(stack, np.atleast_1d(f))
    return m[:, 0, 1].imag


def te_resonance(stack, f_min: float | None = None, f_max: float | None = None,
                 n_scan: int = 512, rtol: float = 1e-12) -> float:
    """Lowest thickness-extensional resonance of a free-free stack (Hz).

    The search bracket defaults to (0.1, 3) times the half-wave estimate of
    the thickest layer. Bisection runs on the sign of the resonance
    condition to relative tolerance `rtol`.
    """
    if not stack:
        raise ValidationError("stack must be non-empty")
    if f_min is None or f_max is None:
        thickest = max(stack, key=lambda l: l.thickness)
        f_est = thickest.velocity / (2.0 * thickest.thickness)
        f_min = 0.1 * f_est if f_min is None else f_min
        f_max = 3.0 * f_est if f_max is None else f_max
    if not (0 < f_min < f_max):
        raise ValidationError(f"require 0 < f_min < f_max, got ({f_min}, {f_max})")
    grid = np.linspace(f_min, f_max, n_scan)
    vals = _te_condition(stack, grid)
    signs = np.sign(vals)
    flips = np.nonzero(np.diff(signs) != 0)[0]
    if len(flips) == 0:
        raise NoResonanceError(
            f"no TE resonance in range ({f_min:.4g}, {f_max:.4g}) Hz"
        )
    i = int(flips[0])
    a, b = float(grid[i]), float(grid[i + 1])
    sa = signs[i]
    while (b - a) > rtol * b:
        mid = 0.5 * (a + b)
        if np.sign(_te_condition(stack, mid)[0]) == sa:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def cell_matrix(cell, f, q: float | None = None):
    """Chain matrix of one unit cell (ordered product over its segments).

    f may be a scalar or array; returns (2, 2) or (n, 2, 2). An empty cell
    yields the identity with a warning. Optional q applies a uniform
    quality factor as a complex velocity v*(1 + j/(2q)) for sensitivity
    studies.
    """
    scalar = not np.asarray(f).shape
    if not cell:
        warnings.warn("empty cell: returning identity matrix", stacklevel=2)
        n = 1 if scalar else len(np.atleast_1d(f))
        eye = np.broadcast_to(np.eye(2, dtype=complex), (n, 2, 2)).copy()
        return eye[0] if scalar else eye
    m = _chain(_line_matrices(
        f,
        [s.length for s in cell],
        [s.velocity for s in cell],
        [s.impedance for s in cell],
        q=q,
    ))
    return m[0] if scalar else m


def bloch(cell, f) -> BlochResult:
    """Bloch eigenvalue analysis of one lossless cell at one frequency.

    Solves lambda^2 - tr(M) lambda + 1 = 0 and returns the |lambda| <= 1
    root; in_stop_band iff |tr(M)/2| > 1, where the attenuation per cell is
    -ln|lambda| (zero in pass-bands).
    """
    m = cell_matrix(cell, float(f))
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det - 1.0) > 1e-6:
        raise NumericsError(f"cell matrix determinant {det} deviates from 1")
    t = 0.5 * (m[0, 0] + m[1, 1]).real
    if abs(t) > 1.0:
        root = math.sqrt(t * t - 1.0)
        lam_small = t - root if t > 0 else t + root
        return BlochResult(
            bloch_factor=complex(lam_small),
            in_stop_band=True,
            attenuation_per_cell=math.acosh(abs(t)),
        )
    lam = complex(t, math.sqrt(max(1.0 - t * t, 0.0)))
    return BlochResult(bloch_factor=lam, in_stop_band=False, attenuation_per_cell=0.0)


def transmission(cell, n_cells: int, f, z_src: float, z_load: float,
                 q: float | None = None):
    """Power transmission through n_cells cells between resistive terminations.

    Returns the ratio of power delivered to z_load over the power available
    from a matched source of impedance z_src; lies in [0, 1] for lossless
    passive cells. f may be a scalar or array.
    """
    if n_cells < 1:
        raise ValidationError(f"n_cells must be >= 1, got {n_cells}")
    if not (z_src > 0 and z_load > 0):
        raise ValidationError(f"terminations must be > 0, got ({z_src}, {z_load})")
    scalar = not np.asarray(f).shape
    m1 = cell_matrix(cell, np.atleast_1d(np.asarray(f, dtype=float)), q=q)
    m = m1
    for _ in range(n_cells - 1):
        m = m @ m1
    a, b = m[:, 0, 0], m[:, 0, 1]
    c, d = m[:, 1, 0], m[:, 1, 1]
    denom = a * z_load + b + c * z_src * z_load + d * z_src
    t = 4.0 * z_src * z_load / np.abs(denom) ** 2
    return float(t[0]) if scalar else t


def find_stop_bands(cell, f_lo: float, f_hi: float, n_grid: int,
                    edge_rtol: float = 1e-13) -> list[StopBand]:
    """Scan |tr(M)/2| > 1 on a grid and refine each band edge by bisection.

    Edges interior to the scan range are refined to relative tolerance
    `edge_rtol`; bands touching the range boundary keep the boundary as
    their edge.
    """
    if not (0 < f_lo < f_hi):
        raise ValidationError(f"require 0 < f_lo < f_hi, got ({f_lo}, {f_hi})")
    if n_grid < 100:
        raise ValidationError(f"n_grid must be >= 100, got {n_grid}")

    grid = np.linspace(f_lo, f_hi, n_grid)
    m = cell_matrix(cell, grid)
    half_tr = 0.5 * (m[:, 0, 0] + m[:, 1, 1]).real
    flagged = np.abs(half_tr) > 1.0

    runs = []       # per flagged run: (lo frequency or task id, hi ditto)
    tasks = []      # bisection tasks: (f_inside, f_outside)

    def new_task(f_in, f_out):
        tasks.append((f_in, f_out))
        return len(tasks) - 1

    i = 0
    while i < n_grid:
        if not flagged[i]:
            i += 1
            continue
        j = i
        while j + 1 < n_grid and flagged[j + 1]:
            j += 1
        lo = float(grid[0]) if i == 0 else new_task(grid[i], grid[i - 1])
        hi = float(grid[-1]) if j == n_grid - 1 else new_task(grid[j], grid[j + 1])
        runs.append((lo, hi))
        i = j + 1

    refined = np.empty(0)
    if tasks:
        a = np.array([t[0] for t in tasks])   # flagged side
        b = np.array([t[1] for t in tasks])   # unflagged side
        for _ in range(200):
            if np.all(np.abs(b - a) <= edge_rtol * np.maximum(np.abs(a), np.abs(b))):
                break
            mid = 0.5 * (a + b)
            mm = cell_matrix(cell, mid)
            inside = np.abs(0.5 * (mm[:, 0, 0] + mm[:, 1, 1]).real) > 1.0
            a = np.where(inside, mid, a)
            b = np.where(inside, b, mid)
        refined = 0.5 * (a + b)

    def resolve(edge):
        return edge if isinstance(edge, float) else float(refined[edge])

    return [StopBand(resolve(lo), resolve(hi)) for lo, hi in runs]


def _region_effective(stack) -> tuple[float, float]:
    """Thin-plate 1-D reduction of a layered region.

    Velocity is the thickness-weighted root of (sum stiffness*t)/(sum rho*t)
    with stiffness = rho*v^2; impedance is areal mass times that velocity,
    so a thickness step produces an impedance mismatch.
    """
    areal_mass = sum(l.density * l.thickness for l in stack)
    stiffness = sum(l.density * l.velocity**2 * l.thickness for l in stack)
    v_eff = math.sqrt(stiffness / areal_mass)
    return v_eff, areal_mass * v_eff


def geometry_to_segments(g: UnitCellGeometry) -> list[Segment]:
    """Reduce the rod-trench cross-section to [trench, rod, trench] segments.

    The rod segment has length w_r centered between two trench segments of
    length (w_u - w_r)/2 each.
    """
    v_rod, z_rod = _region_effective(g.rod_stack)
    v_tr, z_tr = _region_effective(g.trench_stack)
    half = 0.5 * (g.w_u - g.w_r)
    trench = Segment(length=half, velocity=v_tr, impedance=z_tr)
    rod = Segment(length=g.w_r, velocity=v_rod, impedance=z_rod)
    return [trench, rod, trench]
