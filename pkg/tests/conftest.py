"""Shared fixtures and oracle helpers for the test suite."""

import numpy as np
import pytest

import resokit as rk

# Electrical targets of the measured reference device.
TARGETS = dict(fres=5.31e9, kt2=0.239, qm=101.0, c0=1250e-15, rs=7.7, r0=1.5)


@pytest.fixture(scope="session")
def target_params() -> rk.MbvdParams:
    """Element set built from the reference targets (default definition)."""
    return rk.from_targets(**TARGETS)


@pytest.fixture(scope="session")
def reference_trace(target_params) -> rk.AdmittanceTrace:
    """Noiseless synthetic trace over 3-7 GHz, 2001 points."""
    freqs = np.linspace(3e9, 7e9, 2001)
    return rk.AdmittanceTrace(freqs, rk.synth_admittance(target_params, freqs))


def multiplicative_noise(values, level, rng):
    """Complex multiplicative Gaussian noise with RMS `level`."""
    n = len(values)
    eps = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    return values * (1.0 + level * eps)


def random_mbvd(rng, allow_zero_resistance=True) -> rk.MbvdParams:
    """Random valid parameter set spanning realistic SHF element ranges."""
    c0 = 10 ** rng.uniform(-13.5, -11.5)
    fres = 10 ** rng.uniform(8.5, 10.5)
    kt2 = rng.uniform(0.005, 0.45)
    qm = 10 ** rng.uniform(1.0, 4.0)
    if allow_zero_resistance and rng.random() < 0.25:
        rs, r0 = 0.0, 0.0
    else:
        rs = rng.uniform(0.0, 20.0)
        r0 = rng.uniform(0.0, 50.0)
    return rk.from_targets(fres, kt2, qm, c0, rs, r0)


def random_cell(rng, n_segments=None) -> list:
    """Random lossless cell with impedance contrast."""
    n = n_segments or rng.integers(2, 5)
    segs = []
    for _ in range(n):
        segs.append(rk.Segment(
            length=10 ** rng.uniform(-6.5, -5.0),
            velocity=10 ** rng.uniform(3.3, 4.1),
            impedance=10 ** rng.uniform(0.0, 1.5),
        ))
    return segs
