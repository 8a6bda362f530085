"""Fit an MBVD element set to a measured or synthesized admittance trace.

The fit minimizes sum_i |Y_model(f_i) - Y_i|^2 / |Y_i|^2 over the six
elements with a damped (Levenberg-Marquardt style) least-squares loop.
Positivity is guaranteed by optimizing log-parameters; the |Y_i|^2
normalization balances the large dynamic range between the series and
parallel resonance regions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoResonanceError, NumericsError, ValidationError
from .mbvd import MbvdParams, kt2_from_freqs

# Resistances are floored here during the log-parameter search and snapped
# back to zero below the snap threshold after convergence.
RESISTANCE_FLOOR_OHM = 1e-6
RESISTANCE_SNAP_OHM = 1e-3


@dataclass(frozen=True)
class AdmittanceTrace:
    """A one-port admittance trace: frequencies (Hz) and complex samples (S).

    ref_impedance records the reference impedance when the trace came from
    reflection data; it does not enter the fit.
    """

    freqs: np.ndarray
    values: np.ndarray
    ref_impedance: float = 50.0

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "values", values)
        if freqs.ndim != 1 or values.ndim != 1 or len(freqs) != len(values):
            raise ValidationError("freqs and values must be 1-D arrays of equal length")
        if len(freqs) < 8:
            raise ValidationError(f"trace too short: {len(freqs)} points (need >= 8)")
        if np.any(~np.isfinite(freqs)) or np.any(freqs <= 0):
            raise ValidationError("frequencies must be finite and > 0")
        if np.any(np.diff(freqs) <= 0):
            raise ValidationError("frequencies must be strictly increasing")
        if np.any(~np.isfinite(values)):
            raise ValidationError("admittance samples must be finite")
        if not (self.ref_impedance > 0):
            raise ValidationError(f"ref_impedance must be > 0, got {self.ref_impedance}")

    def __len__(self):
        return len(self.freqs)


@dataclass(frozen=True)
class FitResult:
    """Outcome of fit_mbvd.

    residual is the RMS of the normalized complex residuals; cost_history
    holds the accepted cost sequence (monotone non-increasing).
    """

    params: MbvdParams
    residual: float
    iterations: int
    converged: bool
    cost_history: list = field(default_factory=list)


@dataclass(frozen=True)
class FitOptions:
    rel_tol: float = 1e-10       # stop when relative cost decrease falls below
    abs_cost_tol: float = 1e-20  # stop outright at machine-precision cost
    max_iter: int = 200
    lambda0: float = 1e-3        # initial damping; x10 on reject, /10 on accept
    lambda_max: float = 1e15
    fd_step: float = 1e-6        # central-difference step on log-parameters
    max_log_step: float = 30.0   # per-iteration cap on log-parameter moves


def s11_to_admittance(s11, z_ref: float):
    """Convert a reflection coefficient to admittance: Y = (1-s11)/((1+s11)*z_ref)."""
    if not (z_ref > 0):
        raise ValidationError(f"z_ref must be > 0, got {z_ref}")
    s11 = np.asarray(s11, dtype=complex)
    if np.any(s11 == -1):
        raise ValidationError("s11 = -1 (ideal short) has no finite admittance")
    y = (1.0 - s11) / (1.0 + s11) / z_ref
    return complex(y) if np.ndim(y) == 0 else y


def _half_power_width(freqs, mag, i_peak):
    """Full width of the |Y| peak at |Y|max/sqrt(2); falls back to one-sided."""
    level = mag[i_peak] / math.sqrt(2.0)
    f_left = f_right = None
    for i in range(i_peak, 0, -1):
        if mag[i - 1] < level <= mag[i]:
            t = (level - mag[i - 1]) / (mag[i] - mag[i - 1])
            f_left = freqs[i - 1] + t * (freqs[i] - freqs[i - 1])
            break
    for i in range(i_peak, len(mag) - 1):
        if mag[i + 1] < level <= mag[i]:
            t = (mag[i] - level) / (mag[i] - mag[i + 1])
            f_right = freqs[i] + t * (freqs[i + 1] - freqs[i])
            break
    if f_left is not None and f_right is not None:
        return f_right - f_left
    if f_left is not None:
        return 2.0 * (freqs[i_peak] - f_left)
    if f_right is not None:
        return 2.0 * (f_right - freqs[i_peak])
    return None


def initial_guess(trace: AdmittanceTrace) -> MbvdParams:
    """Seed an MBVD fit from trace landmarks.

    fs from the interior |Y| maximum, fp from the interior |Y| minimum above
    it, c0 from the low-frequency susceptance, cm/lm from the inferred
    coupling, qm from the half-power width, rs from the high-frequency tail
    of Re(1/Y) and rm from the peak conductance.
    """
    freqs = trace.freqs
    mag = np.abs(trace.values)
    n = len(freqs)

    i_peak = int(np.argmax(mag))
    if i_peak == 0 or i_peak == n - 1:
        raise NoResonanceError("no resonance found: |Y| has no interior maximum")
    upper = mag[i_peak + 1:]
    i_min = i_peak + 1 + int(np.argmin(upper))
    if i_min >= n - 1:
        raise NoResonanceError("no resonance found: anti-resonance outside the grid")
    fs_est = float(freqs[i_peak])
    fp_est = float(freqs[i_min])

    k = max(2, n // 10)
    w_low = 2.0 * math.pi * freqs[:k]
    c0_est = float(np.median(trace.values[:k].imag / w_low))
    c0_est = max(c0_est, 1e-18)

    kt2_est = kt2_from_freqs(fs_est, fp_est)
    kt2_est = min(max(kt2_est, 1e-6), 0.99 * (math.pi**2 / 8))
    x = (8.0 / math.pi**2) * kt2_est
    cm_est = c0_est * x / (1.0 - x)
    lm_est = 1.0 / ((2.0 * math.pi * fs_est) ** 2 * cm_est)

    width = _half_power_width(freqs, mag, i_peak)
    qm_est = fs_est / width if width else 100.0
    qm_est = min(max(qm_est, 1.0), 1e7)

    tail = trace.values[n - k:]
    rs_est = max(float(np.min((1.0 / tail).real)), 0.0)
    rm_est = 1.0 / mag[i_peak] - rs_est
    if not math.isfinite(rm_est) or rm_est < RESISTANCE_FLOOR_OHM:
        # peak conductance swamped by the rs estimate: fall back on the width
        rm_est = 2.0 * math.pi * fs_est * lm_est / qm_est
    return MbvdParams(c0=c0_est, cm=cm_est, lm=lm_est, rm=rm_est, rs=rs_est, r0=0.0)


def _model_matrix(param_sets: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    """Vectorized MBVD admittance for a (m, 6) parameter matrix -> (m, n)."""
    c0, cm, lm, rm, rs, r0 = (param_sets[:, i][:, None] for i in range(6))
    w = (2.0 * math.pi * freqs)[None, :]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        zm = rm + 1j * w * lm + 1.0 / (1j * w * cm)
        z0b = r0 + 1.0 / (1j * w * c0)
        return 1.0 / (rs + 1.0 / (1.0 / zm + 1.0 / z0b))


def fit_mbvd(trace: AdmittanceTrace, init: MbvdParams,
             opts: FitOptions = FitOptions()) -> FitResult:
    """Damped least-squares MBVD fit of `trace` starting from `init`.

    Stops when the relative cost decrease on an accepted step falls below
    opts.rel_tol or after opts.max_iter iterations; `converged` reflects
    which. Raises NumericsError if the model goes non-finite during the
    search and ValidationError for an unusable seed.
    """
    if not init.has_motional_branch:
        raise ValidationError("initial guess must have a motional branch (cm > 0)")
    mag = np.abs(trace.values)
    if np.any(mag == 0):
        raise ValidationError("trace contains zero-magnitude samples; cannot normalize")

    freqs = trace.freqs
    target = trace.values
    n = len(freqs)

    p0 = np.array([init.c0, init.cm, init.lm,
                   max(init.rm, RESISTANCE_FLOOR_OHM),
                   max(init.rs, RESISTANCE_FLOOR_OHM),
                   max(init.r0, RESISTANCE_FLOOR_OHM)])
    u = np.log(p0)

    def residuals(u_vec: np.ndarray) -> np.ndarray:
        y = _model_matrix(np.exp(u_vec)[None, :], freqs)[0]
        if np.any(~np.isfinite(y)):
            raise NumericsError(
                "non-finite model admittance during fit "
                f"(log-parameters {np.array2string(u_vec, precision=4)})"
            )
        r = (y - target) / mag
        return np.concatenate([r.real, r.imag])

    def jacobian(u_vec: np.ndarray) -> np.ndarray:
        h = opts.fd_step
        probes = np.repeat(u_vec[None, :], 12, axis=0)
        for k in range(6):
            probes[2 * k, k] += h
            probes[2 * k + 1, k] -= h
        ys = _model_matrix(np.exp(probes), freqs)
        if np.any(~np.isfinite(ys)):
            raise NumericsError("non-finite model admittance in Jacobian evaluation")
        r = (ys - target[None, :]) / mag[None, :]
        res = np.concatenate([r.real, r.imag], axis=1)  # (12, 2n)
        return ((res[0::2] - res[1::2]) / (2.0 * h)).T  # (2n, 6)

    r = residuals(u)
    cost = float(r @ r)
    history = [cost]
    lam = opts.lambda0
    converged = cost <= opts.abs_cost_tol
    iterations = 0

    while not converged and iterations < opts.max_iter:
        iterations += 1
        jac = jacobian(u)
        hess = jac.T @ jac
        grad = jac.T @ r
        diag = np.diag(hess)
        # relative floor keeps directions the data cannot see from blowing
        # up the Marquardt-scaled step
        floor = max(float(diag.max()), 1e-300) * 1e-10
        damp = np.maximum(diag, floor)
        accepted = False
        while lam <= opts.lambda_max:
            try:
                step = np.linalg.solve(hess + lam * np.diag(damp), -grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            step = np.clip(step, -opts.max_log_step, opts.max_log_step)
            r_new = residuals(u + step)
            cost_new = float(r_new @ r_new)
            if np.isfinite(cost_new) and cost_new < cost:
                rel_dec = (cost - cost_new) / cost
                u = u + step
                r = r_new
                cost = cost_new
                history.append(cost)
                lam = max(lam / 10.0, 1e-15)
                accepted = True
                if rel_dec < opts.rel_tol or cost <= opts.abs_cost_tol:
                    converged = True
                break
            lam *= 10.0
        if not accepted:
            # no descent at maximum damping: stationary at working precision
            converged = True

    p = np.exp(u)
    rm, rs, r0 = (0.0 if v < RESISTANCE_SNAP_OHM else float(v) for v in p[3:6])
    params = MbvdParams(c0=float(p[0]), cm=float(p[1]), lm=float(p[2]),
                        rm=rm, rs=rs, r0=r0)
    residual = math.sqrt(cost / n)
    return FitResult(params=params, residual=residual, iterations=iterations,
                     converged=converged, cost_history=history)


def extract_mbvd(trace: AdmittanceTrace, opts: FitOptions = FitOptions()) -> FitResult:
    """Convenience wrapper: seed with initial_guess, then fit."""
    return fit_mbvd(trace, initial_guess(trace), opts)
