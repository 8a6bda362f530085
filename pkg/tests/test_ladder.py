"""Ladder synthesis, S-parameter evaluation and passband metrics."""

import math

import numpy as np
import pytest

import resokit as rk
from resokit.ladder import SERIES, SHUNT, default_filter_grid

FIG10 = dict(order=5, f_series=5.31e9, kt2=0.239, qm=101.0, r=3.0, z0=50.0)


@pytest.fixture(scope="module")
def fig10_spec():
    return rk.design_ladder(**FIG10)


@pytest.fixture(scope="module")
def fig10_result():
    return rk.evaluate_design(**FIG10)


class TestDesignLadder:
    def test_element_pattern_odd_order(self, fig10_spec):
        positions = [pos for pos, _ in fig10_spec.elements]
        assert positions == [SERIES, SHUNT, SERIES, SHUNT, SERIES]

    def test_element_pattern_even_order(self):
        spec = rk.design_ladder(4, 5.31e9, 0.239, 101.0, 3.0, 50.0)
        positions = [pos for pos, _ in spec.elements]
        assert positions == [SERIES, SHUNT, SERIES, SHUNT]

    def test_static_capacitances(self, fig10_spec):
        # frozen closed-form evaluation of the image matching rule
        c0s = fig10_spec.elements[0][1].c0
        c0p = fig10_spec.elements[1][1].c0
        assert c0s == pytest.approx(3.2795e-13, rel=1e-3)
        assert c0p == pytest.approx(9.8386e-13, rel=1e-3)
        assert c0p == pytest.approx(3.0 * c0s, rel=1e-12)

    def test_unit_ratio_gives_equal_capacitances(self):
        spec = rk.design_ladder(3, 5.31e9, 0.239, 101.0, 1.0, 50.0)
        assert spec.elements[0][1].c0 == pytest.approx(spec.elements[1][1].c0, rel=1e-12)

    def test_detuning_identity(self, fig10_spec):
        # every shunt resonator's lossless anti-resonance equals the series fs
        for pos, res in fig10_spec.elements:
            if pos != SHUNT:
                continue
            fs = 1.0 / (2 * math.pi * math.sqrt(res.lm * res.cm))
            fp_lossless = fs * math.sqrt(1.0 + res.cm / res.c0)
            assert fp_lossless == pytest.approx(FIG10["f_series"], rel=1e-12)

    def test_shunt_detuned_down(self, fig10_spec):
        shunt = fig10_spec.elements[1][1]
        fs_shunt = 1.0 / (2 * math.pi * math.sqrt(shunt.lm * shunt.cm))
        gamma = shunt.cm / shunt.c0
        assert fs_shunt == pytest.approx(FIG10["f_series"] / math.sqrt(1 + gamma), rel=1e-12)

    def test_order_below_two_rejected(self):
        with pytest.raises(rk.ValidationError):
            rk.design_ladder(1, 5.31e9, 0.239, 101.0, 3.0, 50.0)

    def test_shared_performance(self, fig10_spec):
        for _, res in fig10_spec.elements:
            fs = 1.0 / (2 * math.pi * math.sqrt(res.lm * res.cm))
            qm = 2 * math.pi * fs * res.lm / res.rm
            assert qm == pytest.approx(FIG10["qm"], rel=1e-9)


class TestLadderResponse:
    def test_empty_chain_is_through(self):
        spec = rk.LadderSpec(elements=(), z0=50.0, f_center=5e9)
        resp = rk.ladder_response(spec, np.linspace(4e9, 6e9, 11))
        assert np.allclose(resp.s21, 1.0)
        assert np.allclose(resp.s11, 0.0)

    def test_single_series_resonator_shape(self):
        res = rk.from_targets(5.31e9, 0.239, 101.0, 3.28e-13)
        spec = rk.LadderSpec(elements=((SERIES, res),), z0=50.0, f_center=5.31e9)
        freqs = np.linspace(4.5e9, 6.5e9, 2001)
        resp = rk.ladder_response(spec, freqs)
        mag = np.abs(resp.s21)
        fs, _, fp_min = rk.resonance_freqs(res)
        # the through-peak shifts slightly below fs against the terminations
        assert freqs[int(np.argmax(mag))] == pytest.approx(fs, rel=2e-2)
        assert freqs[int(np.argmin(mag))] == pytest.approx(fp_min, rel=2e-3)

    def test_reciprocity(self, fig10_result):
        _, resp, _ = fig10_result
        assert np.allclose(resp.s12, resp.s21, rtol=1e-9, atol=1e-12)

    def test_passivity(self, fig10_result):
        _, resp, _ = fig10_result
        power = np.abs(resp.s21) ** 2 + np.abs(resp.s11) ** 2
        assert np.max(power) <= 1.0 + 1e-9

    def test_invalid_grid(self, fig10_spec):
        with pytest.raises(rk.ValidationError):
            rk.ladder_response(fig10_spec, np.array([2e9, 1e9]))


class TestFilterMetrics:
    def test_reference_envelope(self, fig10_result):
        _, _, met = fig10_result
        assert 2.0 <= met.il_db <= 3.5
        assert 0.100 <= met.bw_frac <= 0.125
        assert met.rejection_db > 30.0
        assert met.f_lo < met.f_hi

    def test_lossless_limit(self):
        _, _, met = rk.evaluate_design(order=5, f_series=5.31e9, kt2=0.239,
                                       qm=math.inf, r=3.0, z0=50.0,
                                       rs=0.0, r0=0.0)
        assert met.il_db < 0.1

    def test_unresolved_passband(self):
        freqs = np.linspace(4e9, 6e9, 101)
        s21 = np.full(101, 0.9 + 0j)   # flat line: no 3-dB crossings
        with pytest.raises(rk.PassbandUnresolvedError):
            rk.filter_metrics(freqs, s21)

    def test_flagged_nan_points_are_skipped(self):
        spec, resp, met = rk.evaluate_design(**FIG10)
        s21 = resp.s21.copy()
        s21[100] = complex(math.nan, math.nan)
        met2 = rk.filter_metrics(resp.freqs, s21)
        assert met2.il_db == pytest.approx(met.il_db, abs=1e-6)


class TestKt2Sweep:
    def test_trends_and_flags(self):
        rows = rk.kt2_sweep(0.01, 0.35, 7, qm=101.0, r=3.0, order=5,
                            f_series=5.31e9, z0=50.0)
        assert len(rows) == 7
        resolved = [row for row in rows if row.resolved]
        assert len(resolved) >= 5
        bws = [row.bw_frac for row in resolved]
        assert all(b2 > b1 for b1, b2 in zip(bws, bws[1:]))
        ils = [row.il_db for row in resolved]
        assert all(i2 <= i1 + 1e-12 for i1, i2 in zip(ils, ils[1:]))
        for row in rows:
            if not row.resolved:
                assert math.isnan(row.il_db) and math.isnan(row.bw_frac)

    def test_consistency_with_direct_evaluation(self):
        rows = rk.kt2_sweep(0.1, 0.3, 3, qm=101.0, r=3.0, order=5,
                            f_series=5.31e9, z0=50.0)
        mid = rows[1]
        assert mid.kt2 == pytest.approx(0.2, rel=1e-12)
        _, _, met = rk.evaluate_design(order=5, f_series=5.31e9, kt2=mid.kt2,
                                       qm=101.0, r=3.0, z0=50.0)
        assert mid.il_db == pytest.approx(met.il_db, rel=1e-9)
        assert mid.bw_frac == pytest.approx(met.bw_frac, rel=1e-9)

    def test_invalid_ranges(self):
        with pytest.raises(rk.ValidationError):
            rk.kt2_sweep(0.3, 0.1, 5, 101.0, 3.0, 5, 5.31e9, 50.0)
        with pytest.raises(rk.ValidationError):
            rk.kt2_sweep(0.1, 0.3, 1, 101.0, 3.0, 5, 5.31e9, 50.0)


class TestPropertySuites:
    def test_random_ladder_passivity_and_reciprocity(self):
        rng = np.random.default_rng(77)
        grid = default_filter_grid(5e9, n=101)
        for _ in range(40):
            order = int(rng.integers(2, 8))
            kt2 = rng.uniform(0.02, 0.4)
            qm = 10 ** rng.uniform(1.3, 4)
            r = rng.uniform(0.5, 5.0)
            spec = rk.design_ladder(order, 5e9, kt2, qm, r, 50.0,
                                    rs=rng.uniform(0, 3), r0=rng.uniform(0, 3))
            resp = rk.ladder_response(spec, grid)
            power = np.abs(resp.s21) ** 2 + np.abs(resp.s11) ** 2
            assert np.max(power) <= 1.0 + 1e-9
            assert np.allclose(resp.s12, resp.s21, rtol=1e-9, atol=1e-12)
