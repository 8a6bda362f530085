"""Command-line interface: end-to-end flows, file outputs, exit codes."""

import csv
import math
from pathlib import Path

import numpy as np
import pytest

import resokit as rk
from resokit.cli import main

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "reference_device.cfg"


def run(*argv):
    return main([str(a) for a in argv])


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


class TestSynthFitRoundTrip:
    def test_end_to_end_extraction(self, tmp_path, capsys):
        s1p = tmp_path / "dev.s1p"
        fit_csv = tmp_path / "fit.csv"
        assert run("synth", "--config", CONFIG, "--fmin", "3e9", "--fmax", "7e9",
                   "--n", "2001", "--out", s1p) == 0
        assert s1p.exists()
        assert run("fit", "--input", s1p, "--out", fit_csv) == 0
        out = capsys.readouterr().out
        assert "kt2=23.90%" in out
        header, rows = read_csv(fit_csv)
        record = dict(zip(header, rows[0]))
        assert abs(float(record["kt2_lossless"]) - 0.239) < 1e-3
        assert abs(float(record["c0_f"]) - 1.25e-12) / 1.25e-12 < 1e-3
        assert record["converged"] == "True"
        assert (tmp_path / "fit.png").exists()

    def test_fit_accepts_csv_trace(self, tmp_path):
        trace_csv = tmp_path / "trace.csv"
        out_csv = tmp_path / "fit.csv"
        assert run("synth", "--config", CONFIG, "--fmin", "3e9", "--fmax", "7e9",
                   "--n", "1201", "--out", trace_csv, "--no-fig") == 0
        assert run("fit", "--input", trace_csv, "--out", out_csv, "--no-fig") == 0
        header, rows = read_csv(out_csv)
        record = dict(zip(header, rows[0]))
        assert abs(float(record["rs_ohm"]) - 7.7) < 0.01


class TestFilterCommand:
    def test_reference_summary(self, tmp_path, capsys):
        out = tmp_path / "filt.csv"
        rc = run("filter", "--order", 5, "--r", 3, "--kt2", 0.239, "--qm", 101,
                 "--fres", 5.31e9, "--z0", 50, "--out", out)
        assert rc == 0
        text = capsys.readouterr().out
        assert "IL=2.31 dB" in text
        assert "BW=10.86%" in text
        assert "rejection=30.1 dB" in text
        header, rows = read_csv(out)
        assert header[:3] == ["frequency_hz", "s11_re", "s11_im"]
        assert len(rows) == 6001
        assert (tmp_path / "filt.png").exists()

    def test_s2p_output_reparses(self, tmp_path):
        out = tmp_path / "filt.s2p"
        assert run("filter", "--order", 5, "--r", 3, "--kt2", 0.239, "--qm", 101,
                   "--fres", 5.31e9, "--z0", 50, "--out", out, "--no-fig") == 0
        rec = rk.parse_touchstone(out.read_text())
        assert rec.n_ports == 2
        s = rec.values()
        peak = np.max(np.abs(s[:, 1, 0]))
        assert 20 * math.log10(peak) == pytest.approx(-2.31, abs=0.05)

    def test_unresolved_passband_exit_code(self, tmp_path):
        # kt2 so small the 3-dB band cannot be resolved on the default grid
        rc = run("filter", "--order", 5, "--r", 3, "--kt2", 0.001, "--qm", 101,
                 "--fres", 5.31e9, "--z0", 50)
        assert rc == 3


class TestAcousticCommands:
    def test_te_res(self, tmp_path, capsys):
        out = tmp_path / "te.csv"
        assert run("te-res", "--config", CONFIG, "--stack", "rod",
                   "--out", out, "--no-fig") == 0
        header, rows = read_csv(out)
        fres = float(dict(zip(header, rows[0]))["fres_hz"])
        assert abs(fres / 5.31e9 - 1.0) < 0.15

    def test_te_res_unknown_stack(self):
        assert run("te-res", "--config", CONFIG, "--stack", "nope") == 2

    def test_stopbands_reference(self, tmp_path):
        out = tmp_path / "sb.csv"
        assert run("stopbands", "--config", CONFIG, "--fmin", "4.5e9",
                   "--fmax", "6.7e9", "--n", "4001", "--out", out, "--no-fig") == 0
        header, rows = read_csv(out)
        assert header == ["f_lo_hz", "f_hi_hz"]
        bands = [(float(a), float(b)) for a, b in rows]
        assert any(lo <= 5.31e9 <= hi for lo, hi in bands)

    def test_stopbands_uniform_cell_empty(self, tmp_path):
        cfg = tmp_path / "uniform.cfg"
        cfg.write_text("""
[stack s]
layers = al 100e-9

[cell]
rod_width_m = 9e-6
cell_width_m = 24e-6
trench_film_m = 100e-9
rod_step_m = 0
rod_stack = s
trench_stack = s
""")
        out = tmp_path / "sb.csv"
        assert run("stopbands", "--config", cfg, "--fmin", "1e9",
                   "--fmax", "1e10", "--n", "2001", "--out", out, "--no-fig") == 0
        _, rows = read_csv(out)
        assert rows == []

    def test_transmission(self, tmp_path):
        out = tmp_path / "tr.csv"
        assert run("transmission", "--config", CONFIG, "--cells", 5,
                   "--fmin", "4.5e9", "--fmax", "6.7e9", "--n", "801",
                   "--out", out, "--no-fig") == 0
        header, rows = read_csv(out)
        t = np.array([float(r[1]) for r in rows])
        assert np.all(t <= 1.0 + 1e-9)
        assert t.min() < 0.01   # deep stop-band attenuation present


class TestSweepCommand:
    def test_sweep_csv(self, tmp_path):
        out = tmp_path / "sweep.csv"
        assert run("sweep-kt2", "--kt2-lo", 0.05, "--kt2-hi", 0.35, "--steps", 7,
                   "--qm", 101, "--r", 3, "--order", 5, "--fres", 5.31e9,
                   "--z0", 50, "--out", out, "--no-fig") == 0
        header, rows = read_csv(out)
        assert header == ["kt2", "il_db", "bw_frac", "rejection_db", "resolved"]
        bw = [float(r[2]) for r in rows if r[4] == "True"]
        assert bw == sorted(bw)


class TestCliContract:
    def test_metrics_summary(self, capsys):
        assert run("metrics", "--config", CONFIG) == 0
        out = capsys.readouterr().out
        assert "fs=5.31000 GHz" in out
        assert "qm=101.0" in out

    def test_validation_exit_code(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("[stack s]\nlayers = mystery 1e-9\n")
        assert run("te-res", "--config", bad, "--stack", "s") == 2

    def test_missing_file_exit_code(self):
        assert run("fit", "--input", "/nonexistent/trace.s1p") == 2

    def test_csv_outputs_are_deterministic(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        for out in (a, b):
            assert run("filter", "--order", 5, "--r", 3, "--kt2", 0.239,
                       "--qm", 101, "--fres", 5.31e9, "--z0", 50,
                       "--out", out, "--no-fig") == 0
        assert a.read_bytes() == b.read_bytes()

    def test_out_dir_override(self, tmp_path, monkeypatch):
        monkeypatch.setenv("RESOKIT_OUT_DIR", str(tmp_path / "redirect"))
        assert run("metrics", "--config", CONFIG, "--out", "m.csv",
                   "--no-fig") == 0
        assert (tmp_path / "redirect" / "m.csv").exists()

    def test_no_fig_suppresses_figure(self, tmp_path):
        out = tmp_path / "m.csv"
        assert run("metrics", "--config", CONFIG, "--out", out, "--no-fig") == 0
        assert out.exists()
        assert not (tmp_path / "m.png").exists()
