"""Figure rendering for the CLI report paths (Agg backend, files only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _finish(fig, ax, path, xlabel, ylabel, title):
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.4)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_admittance_figure(path, freqs, values, model=None, title="Admittance"):
    """|Y| vs frequency on a log scale, optionally overlaying a model trace."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.semilogy(np.asarray(freqs) / 1e9, np.abs(values), label="data")
    if model is not None:
        ax.semilogy(np.asarray(freqs) / 1e9, np.abs(model), "--", label="model fit")
        ax.legend()
    return _finish(fig, ax, path, "frequency (GHz)", "|Y| (S)", title)


def save_te_figure(path, freqs, condition, f_res, title="Thickness resonance scan"):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(np.asarray(freqs) / 1e9, condition)
    ax.axhline(0.0, color="k", lw=0.8)
    ax.axvline(f_res / 1e9, color="tab:red", ls="--", label=f"f_res = {f_res/1e9:.4f} GHz")
    ax.legend()
    return _finish(fig, ax, path, "frequency (GHz)", "resonance condition (a.u.)", title)


def save_stopband_figure(path, freqs, half_trace, bands, title="Dispersion scan"):
    """|tr(M)/2| with the unit threshold and shaded stop-bands."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(np.asarray(freqs) / 1e9, np.abs(half_trace))
    ax.axhline(1.0, color="k", lw=0.8)
    for band in bands:
        ax.axvspan(band.f_lo / 1e9, band.f_hi / 1e9, color="tab:orange", alpha=0.3)
    ax.set_yscale("log")
    return _finish(fig, ax, path, "frequency (GHz)", "|tr(M)/2|", title)


def save_transmission_figure(path, freqs, t, title="Transmission"):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.semilogy(np.asarray(freqs) / 1e9, np.maximum(np.asarray(t), 1e-18))
    return _finish(fig, ax, path, "frequency (GHz)", "T = Pout/Pin", title)


def save_filter_figure(path, freqs, s21, s11, title="Filter response"):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    f_ghz = np.asarray(freqs) / 1e9
    with np.errstate(divide="ignore"):
        ax.plot(f_ghz, 20 * np.log10(np.abs(s21)), label="S21")
        ax.plot(f_ghz, 20 * np.log10(np.abs(s11)), label="S11", alpha=0.7)
    ax.set_ylim(bottom=-60)
    ax.legend()
    return _finish(fig, ax, path, "frequency (GHz)", "magnitude (dB)", title)


def save_sweep_figure(path, rows, title="Coupling sweep"):
    """Insertion loss and fractional bandwidth vs kt2 (resolved rows only)."""
    res = [r for r in rows if r.resolved]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ax1.plot([r.kt2 * 100 for r in res], [r.il_db for r in res], "o-")
    ax1.set_xlabel("kt2 (%)")
    ax1.set_ylabel("insertion loss (dB)")
    ax1.grid(True, alpha=0.4)
    ax2.plot([r.kt2 * 100 for r in res], [r.bw_frac * 100 for r in res], "o-")
    ax2.set_xlabel("kt2 (%)")
    ax2.set_ylabel("3-dB bandwidth (%)")
    ax2.grid(True, alpha=0.4)
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
