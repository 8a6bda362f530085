"""Modified Butterworth-Van Dyke (MBVD) model of a one-port resonator.

Circuit topology: a motional branch (rm + jwlm + 1/(jwcm)) in parallel
with a lossy static branch (r0 + 1/(jwc0)), the combination in series
with a routing resistance rs.

All quantities are SI: frequencies in Hz, capacitances in F, inductances
in H, resistances in ohm. Admittances returned in S.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import ValidationError

PI2_OVER_8 = math.pi**2 / 8.0


class Kt2Definition(Enum):
    """Selectable conventions mapping the fs/fp split to a coupling value.

    QUADRATIC:  (pi^2/8) * (1 - fs^2/fp^2)        (toolkit default)
    SEPARATION: (fp^2 - fs^2) / fp^2
    TANGENT:    (pi/2)(fs/fp) / tan((pi/2)(fs/fp))
    """

    QUADRATIC = "quadratic"
    SEPARATION = "separation"
    TANGENT = "tangent"


DEFAULT_KT2_DEFINITION = Kt2Definition.QUADRATIC


@dataclass(frozen=True)
class MbvdParams:
    """Six-element MBVD parameter set for one resonator.

    c0: static capacitance (F), strictly positive
    cm: motional capacitance (F), >= 0
    lm: motional inductance (H), >= 0
    rm: motional resistance (ohm), >= 0
    rs: series routing resistance (ohm), >= 0
    r0: dielectric-loss resistance in the static branch (ohm), >= 0

    The motional branch exists as a whole or not at all: cm > 0 iff lm > 0.
    """

    c0: float
    cm: float
    lm: float
    rm: float
    rs: float
    r0: float

    def __post_init__(self):
        vals = (self.c0, self.cm, self.lm, self.rm, self.rs, self.r0)
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError(f"non-finite MBVD element value in {vals}")
        if self.c0 <= 0:
            raise ValidationError(f"c0 must be > 0, got {self.c0}")
        if self.cm < 0 or self.lm < 0:
            raise ValidationError("cm and lm must be >= 0")
        if (self.cm > 0) != (self.lm > 0):
            raise ValidationError(
                "motional branch must be complete: cm > 0 iff lm > 0 "
                f"(got cm={self.cm}, lm={self.lm})"
            )
        if self.rm < 0 or self.rs < 0 or self.r0 < 0:
            raise ValidationError("resistances must be >= 0")

    @property
    def has_motional_branch(self) -> bool:
        return self.cm > 0.0


@dataclass(frozen=True)
class ResonatorMetrics:
    """Closed-form and extracted figures of merit for one resonator.

    fp is the admittance-magnitude minimum (the measured-trace convention);
    fp_lossless = fs*sqrt(1 + cm/c0) is also carried for design work.
    fom = 2*pi*fp*c0 / |Y(fp)|; reported as +inf with lossless=True when
    the element set dissipates nothing.
    """

    fs: float
    fp: float
    fp_lossless: float
    kt2: float
    qm: float
    fom_m: float
    fom: float
    lossless: bool
    definition: Kt2Definition


def _branch_impedances(p: MbvdParams, w):
    zm = p.rm + 1j * w * p.lm + 1.0 / (1j * w * p.cm) if p.cm > 0 else None
    z0b = p.r0 + 1.0 / (1j * w * p.c0)
    return zm, z0b


def synth_admittance(p: MbvdParams, f):
    """Complex admittance Y(f) of the MBVD circuit (S).

    f may be a scalar or an array of frequencies in Hz, all > 0.
    With cm = 0 the motional branch is an open circuit.
    """
    f = np.asarray(f, dtype=float)
    if f.size == 0 or np.any(~np.isfinite(f)) or np.any(f <= 0):
        raise ValidationError("frequencies must be finite and > 0")
    w = 2.0 * math.pi * f
    with np.errstate(divide="ignore", invalid="ignore"):
        zm, z0b = _branch_impedances(p, w)
        if zm is None:
            zpar = z0b
        else:
            zpar = 1.0 / (1.0 / zm + 1.0 / z0b)
        y = 1.0 / (p.rs + zpar)
    return complex(y) if np.ndim(y) == 0 else y


def resonance_freqs(p: MbvdParams, n_scan: int = 512) -> tuple[float, float, float]:
    """Series resonance, lossless anti-resonance and |Y|-minimum (Hz).

    fs = 1/(2*pi*sqrt(lm*cm)); fp_lossless = fs*sqrt(1 + cm/c0); fp_min is
    the numerical minimum of |Y| searched on [fs, 1.5*fp_lossless].
    """
    if not p.has_motional_branch:
        raise ValidationError("no motional branch: cm = 0")
    fs = 1.0 / (2.0 * math.pi * math.sqrt(p.lm * p.cm))
    fp_lossless = fs * math.sqrt(1.0 + p.cm / p.c0)
    lo, hi = fs, 1.5 * fp_lossless
    grid = np.linspace(lo, hi, n_scan)
    mag = np.abs(synth_admittance(p, grid))
    i = int(np.argmin(mag))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, n_scan - 1)]
    res = minimize_scalar(
        lambda f: abs(synth_admittance(p, f)),
        bounds=(a, b),
        method="bounded",
        options={"xatol": fs * 1e-12, "maxiter": 200},
    )
    fp_min = float(res.x)
    return fs, fp_lossless, fp_min


def kt2_from_freqs(fs: float, fp: float,
                   definition: Kt2Definition = DEFAULT_KT2_DEFINITION) -> float:
    """Electromechanical coupling from the (fs, fp) pair, per `definition`."""
    if not (0 < fs <= fp):
        raise ValidationError(f"require 0 < fs <= fp, got fs={fs}, fp={fp}")
    if fs == fp:
        return 0.0
    ratio = fs / fp
    if definition is Kt2Definition.QUADRATIC:
        return PI2_OVER_8 * (1.0 - ratio**2)
    if definition is Kt2Definition.SEPARATION:
        return 1.0 - ratio**2
    if definition is Kt2Definition.TANGENT:
        x = 0.5 * math.pi * ratio
        return x / math.tan(x)
    raise ValidationError(f"unknown kt2 definition {definition!r}")


def kt2_upper_bound(definition: Kt2Definition = DEFAULT_KT2_DEFINITION) -> float:
    """Supremum of the coupling value reachable as fs/fp -> 0."""
    return PI2_OVER_8 if definition is Kt2Definition.QUADRATIC else 1.0


def freq_ratio_from_kt2(kt2: float, definition: Kt2Definition) -> float:
    """Invert kt2_from_freqs for the fs/fp ratio in (0, 1)."""
    hi = kt2_upper_bound(definition)
    if not (0.0 < kt2 < hi):
        raise ValidationError(
            f"kt2 must lie in (0, {hi:.6g}) for {definition.value}, got {kt2}"
        )
    if definition is Kt2Definition.QUADRATIC:
        return math.sqrt(1.0 - kt2 / PI2_OVER_8)
    if definition is Kt2Definition.SEPARATION:
        return math.sqrt(1.0 - kt2)
    return brentq(
        lambda r: kt2_from_freqs(r, 1.0, definition) - kt2,
        1e-12, 1.0 - 1e-14, xtol=1e-15, rtol=8.9e-16,
    )


def from_targets(fres: float, kt2: float, qm: float, c0: float,
                 rs: float = 0.0, r0: float = 0.0,
                 definition: Kt2Definition = DEFAULT_KT2_DEFINITION) -> MbvdParams:
    """Build MBVD elements hitting a target (fres, kt2, qm) at a given c0.

    Round trip: resonance_freqs gives fs = fres and
    kt2_from_freqs(fs, fp_lossless, definition) = kt2 to machine precision.
    qm may be inf for a lossless motional branch (rm = 0).
    """
    if not (fres > 0):
        raise ValidationError(f"fres must be > 0, got {fres}")
    if not (c0 > 0):
        raise ValidationError(f"c0 must be > 0, got {c0}")
    if not (qm > 0):
        raise ValidationError(f"qm must be > 0, got {qm}")
    ratio = freq_ratio_from_kt2(kt2, definition)
    gamma = 1.0 / ratio**2 - 1.0          # cm/c0
    cm = c0 * gamma
    w = 2.0 * math.pi * fres
    lm = 1.0 / (w**2 * cm)
    rm = 0.0 if math.isinf(qm) else w * lm / qm
    return MbvdParams(c0=c0, cm=cm, lm=lm, rm=rm, rs=rs, r0=r0)


def metrics(p: MbvdParams,
            definition: Kt2Definition = DEFAULT_KT2_DEFINITION) -> ResonatorMetrics:
    """Extract ResonatorMetrics from an element set.

    kt2 uses the |Y|-minimum anti-resonance (measured-admittance convention);
    qm = 2*pi*fs*lm/rm; fom_m = kt2*qm; fom = 2*pi*fp*c0/|Y(fp)|.
    """
    if not p.has_motional_branch:
        raise ValidationError("no motional branch: cm = 0")
    fs, fp_lossless, fp_min = resonance_freqs(p)
    kt2 = kt2_from_freqs(fs, fp_min, definition)
    qm = math.inf if p.rm == 0 else 2.0 * math.pi * fs * p.lm / p.rm
    fom_m = kt2 * qm
    lossless = p.rm == 0 and p.rs == 0 and p.r0 == 0
    if lossless:
        fom = math.inf
    else:
        fom = 2.0 * math.pi * fp_min * p.c0 / abs(synth_admittance(p, fp_min))
    return ResonatorMetrics(
        fs=fs, fp=fp_min, fp_lossless=fp_lossless, kt2=kt2, qm=qm,
        fom_m=fom_m, fom=fom, lossless=lossless, definition=definition,
    )
