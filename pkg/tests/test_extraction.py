"""Trace fitting: seeds, damped least squares, and its invariants."""

import math

import numpy as np
import pytest

import resokit as rk

from conftest import TARGETS, multiplicative_noise


def synth_trace(params, f_lo=3e9, f_hi=7e9, n=2001):
    freqs = np.linspace(f_lo, f_hi, n)
    return rk.AdmittanceTrace(freqs, rk.synth_admittance(params, freqs))


class TestS11ToAdmittance:
    def test_matched_load(self):
        assert rk.s11_to_admittance(0.0, 50.0) == pytest.approx(0.02)

    def test_open_circuit(self):
        assert rk.s11_to_admittance(1.0, 50.0) == 0.0

    def test_quadrature_point(self):
        # (1 - j)/(1 + j) = -j
        assert rk.s11_to_admittance(1j, 50.0) == pytest.approx(-1j / 50.0)

    def test_short_is_singular(self):
        with pytest.raises(rk.ValidationError):
            rk.s11_to_admittance(-1.0, 50.0)

    def test_bad_reference(self):
        with pytest.raises(rk.ValidationError):
            rk.s11_to_admittance(0.0, 0.0)


class TestTraceValidation:
    def test_too_short(self):
        with pytest.raises(rk.ValidationError):
            rk.AdmittanceTrace(np.linspace(1e9, 2e9, 5), np.ones(5, complex))

    def test_non_monotone(self):
        f = np.array([1e9, 2e9, 1.5e9, 3e9, 4e9, 5e9, 6e9, 7e9])
        with pytest.raises(rk.ValidationError):
            rk.AdmittanceTrace(f, np.ones(8, complex))

    def test_nonpositive_frequency(self):
        f = np.linspace(0.0, 7e9, 8)
        with pytest.raises(rk.ValidationError):
            rk.AdmittanceTrace(f, np.ones(8, complex))


class TestInitialGuess:
    def test_seed_sits_on_peak(self, reference_trace):
        # The estimator pins fs to the |Y| maximum; for the lossy reference
        # device that peak sits ~0.3% below the motional fs (the series and
        # static losses skew the magnitude), so assert the estimator
        # contract plus closeness to the resonance.
        guess = rk.initial_guess(reference_trace)
        fs_guess = 1.0 / (2 * math.pi * math.sqrt(guess.lm * guess.cm))
        mag = np.abs(reference_trace.values)
        f_peak = reference_trace.freqs[int(np.argmax(mag))]
        assert fs_guess == pytest.approx(f_peak, rel=1e-9)
        assert fs_guess == pytest.approx(TARGETS["fres"], rel=5e-3)

    def test_low_loss_seed_within_one_grid_step(self):
        p = rk.from_targets(TARGETS["fres"], TARGETS["kt2"], TARGETS["qm"],
                            TARGETS["c0"], rs=0.0, r0=0.0)
        trace = synth_trace(p)
        guess = rk.initial_guess(trace)
        fs_guess = 1.0 / (2 * math.pi * math.sqrt(guess.lm * guess.cm))
        step = trace.freqs[1] - trace.freqs[0]
        assert abs(fs_guess - TARGETS["fres"]) <= step

    def test_pure_capacitor_has_no_resonance(self):
        p = rk.MbvdParams(c0=1e-12, cm=0.0, lm=0.0, rm=0.0, rs=0.0, r0=0.0)
        with pytest.raises(rk.NoResonanceError):
            rk.initial_guess(synth_trace(p))

    def test_truncated_grid_has_no_antiresonance(self, target_params):
        # grid ends between fs and fp: the |Y| minimum sits on the edge
        with pytest.raises(rk.NoResonanceError):
            rk.initial_guess(synth_trace(target_params, 3e9, 5.6e9))

    def test_guess_is_valid_params(self, reference_trace):
        guess = rk.initial_guess(reference_trace)
        assert guess.c0 > 0 and guess.cm > 0 and guess.lm > 0


class TestFitMbvd:
    def test_noiseless_recovery(self, target_params, reference_trace):
        result = rk.extract_mbvd(reference_trace)
        assert result.converged
        for name in ("c0", "cm", "lm", "rm", "rs", "r0"):
            truth = getattr(target_params, name)
            fitted = getattr(result.params, name)
            assert fitted == pytest.approx(truth, rel=1e-3), name

    def test_noisy_recovery_sample(self, target_params, reference_trace):
        # small Monte-Carlo sample; the full 100-seed study runs in the
        # acceptance suite
        hits = 0
        for seed in range(20):
            rng = np.random.default_rng(900 + seed)
            noisy = rk.AdmittanceTrace(
                reference_trace.freqs,
                multiplicative_noise(reference_trace.values, 0.01, rng),
            )
            fit = rk.extract_mbvd(noisy)
            fs, fp_lossless, _ = rk.resonance_freqs(fit.params)
            kt2 = rk.kt2_from_freqs(fs, fp_lossless)
            hits += abs(kt2 - TARGETS["kt2"]) < 0.003
        assert hits >= 19

    def test_rejects_seed_without_motional_branch(self, reference_trace):
        bad = rk.MbvdParams(c0=1e-12, cm=0.0, lm=0.0, rm=0.0, rs=0.0, r0=0.0)
        with pytest.raises(rk.ValidationError):
            rk.fit_mbvd(reference_trace, bad)

    def test_idempotent_on_own_synthesis(self, target_params, reference_trace):
        result = rk.fit_mbvd(reference_trace, target_params)
        assert result.converged
        assert result.iterations <= 5
        assert result.residual < 1e-12

    def test_cost_history_monotone(self, reference_trace):
        result = rk.extract_mbvd(reference_trace)
        history = np.array(result.cost_history)
        assert np.all(np.diff(history) <= 0.0)

    def test_scale_equivariance(self, target_params):
        s = 2.5
        scaled = rk.MbvdParams(c0=target_params.c0, cm=target_params.cm,
                               lm=target_params.lm / s**2, rm=target_params.rm,
                               rs=target_params.rs, r0=target_params.r0)
        trace = synth_trace(scaled, 3e9 * s, 7e9 * s)
        fit = rk.extract_mbvd(trace)
        fs = 1.0 / (2 * math.pi * math.sqrt(fit.params.lm * fit.params.cm))
        assert fs == pytest.approx(s * TARGETS["fres"], rel=1e-3)

    def test_grid_robustness(self, target_params, reference_trace):
        def kt2_of(trace):
            fit = rk.extract_mbvd(trace)
            fs, fp_lossless, _ = rk.resonance_freqs(fit.params)
            return rk.kt2_from_freqs(fs, fp_lossless)

        full = kt2_of(reference_trace)
        halved = reference_trace
        while len(halved) // 2 >= 64:
            halved = rk.AdmittanceTrace(halved.freqs[::2], halved.values[::2])
            assert abs(kt2_of(halved) - full) < 1e-3

    def test_zero_resistance_snap(self):
        # near-lossless device: fitted sub-milliohm resistances snap to zero
        p = rk.from_targets(5e9, 0.2, 1e8, 1e-12, rs=0.0, r0=0.0)
        trace = synth_trace(p, 4e9, 6.5e9)
        fit = rk.extract_mbvd(trace)
        assert fit.params.rm == 0.0
        assert fit.params.rs == 0.0
        assert fit.params.r0 == 0.0

    def test_iteration_cap_controls_convergence_flag(self, reference_trace):
        opts = rk.FitOptions(max_iter=2)
        fit = rk.extract_mbvd(reference_trace, opts)
        assert fit.iterations <= 2
        assert not fit.converged
