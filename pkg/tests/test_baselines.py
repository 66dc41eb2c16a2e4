import math

import numpy as np
import pytest

import oracles
from symdisc import baselines, cgu, coherent, gu


def test_ppm_pnr():
    assert baselines.ppm_pnr_pe(8, 0.0) == pytest.approx(7 / 8, abs=1e-15)
    assert baselines.ppm_pnr_pe(8, 1.0) == pytest.approx(7 / 8 * math.exp(-1), abs=1e-15)
    assert baselines.ppm_pnr_pe(8, 80.0) < 1e-30


def test_ppm_pnr_monte_carlo(rng):
    trials = 10**6
    est = oracles.sample_ppm_pnr_pe(8, 1.0, trials, rng)
    assert abs(est - baselines.ppm_pnr_pe(8, 1.0)) < 3 * oracles.standard_error(est, trials)


def test_two_pulse_pnr(rng):
    assert baselines.two_pulse_pnr_ps(8, 0.0) == pytest.approx(1 / 28, abs=1e-15)
    assert baselines.two_pulse_pnr_ps(8, 80.0) == pytest.approx(1.0, abs=1e-15)
    trials = 10**6
    est = oracles.sample_two_pulse_pnr_ps(8, 2.0, trials, rng)
    assert abs(est - baselines.two_pulse_pnr_ps(8, 2.0)) < 3 * oracles.standard_error(est, trials)


def test_homodyne_limits():
    for N in (2, 8):
        assert baselines.pcppm_homodyne_ps(N, 0.0) == pytest.approx(1 / (2 * N), abs=1e-12)
    assert baselines.pcppm_homodyne_ps(8, 30.0) == pytest.approx(1.0, abs=1e-10)


def test_homodyne_monte_carlo(rng):
    trials = 10**7
    pos, joint = oracles.sample_homodyne_position(8, 2.0, trials, rng)
    phase = 1 - 0.5 * math.erfc(math.sqrt(4.0))
    value = baselines.pcppm_homodyne_ps(8, 2.0)
    assert abs(pos * phase - value) < 3 * phase * oracles.standard_error(pos, trials)
    # deciding slot and sign jointly from the same output does at least as well as the product
    assert joint >= value - 3 * oracles.standard_error(joint, trials)


def test_structured_limits_and_slope():
    for N in (2, 8):
        assert baselines.pcppm_structured_pe(N, 0.0) == pytest.approx((2 * N - 1) / (2 * N), abs=1e-15)
    xs = np.linspace(6, 10, 21)
    slope = np.polyfit(xs, np.log([baselines.pcppm_structured_pe(8, x) for x in xs]), 1)[0]
    assert abs(slope + 1) < 0.1
    for x in np.linspace(0, 12, 25):
        assert 0 <= baselines.pcppm_structured_pe(8, x) <= 15 / 16


def test_structured_monte_carlo(rng):
    trials = 10**6
    for nbar in (0.5, 1.0, 3.0):
        est = oracles.sample_structured_pe(8, nbar, trials, rng)
        assert abs(est - baselines.pcppm_structured_pe(8, nbar)) < 3 * oracles.standard_error(est, trials)


def test_dolinar():
    assert baselines.dolinar_binary_pe(0.0) == pytest.approx(0.5, abs=1e-15)
    assert baselines.dolinar_binary_pe(50.0) < 1e-80
    for nb in (0.05, 0.3, 1.2):
        beta = math.sqrt(nb)
        cb = coherent.Codebook([coherent.CoherentCodeword([beta]), coherent.CoherentCodeword([-beta])])
        assert baselines.dolinar_binary_pe(nb) == pytest.approx(gu.pgm(cb).P_e, abs=1e-14)
        s = math.exp(-2 * nb)
        assert baselines.dolinar_binary_pe(nb) == pytest.approx(0.5 * (1 - math.sqrt(1 - s * s)), abs=1e-14)


@pytest.mark.parametrize("nbar", np.linspace(0.1, 10, 12))
def test_mpe_dominates_baselines(nbar):
    N = 8
    a = math.sqrt(nbar)
    assert gu.ppm_mpe_pe(N, nbar) <= baselines.ppm_pnr_pe(N, nbar) + 1e-9
    assert 1 - gu.two_pulse_ppm_mpe_ps(N, nbar) <= 1 - baselines.two_pulse_pnr_ps(N, nbar) + 1e-9
    mpe = 1 - cgu.pcppm_mpe_ps(N, a, -a)
    assert mpe <= 1 - baselines.pcppm_homodyne_ps(N, nbar) + 1e-9
    assert mpe <= baselines.pcppm_structured_pe(N, nbar) + 1e-9


def test_input_validation():
    with pytest.raises(ValueError):
        baselines.ppm_pnr_pe(1, 1.0)
    with pytest.raises(ValueError):
        baselines.two_pulse_pnr_ps(3, 1.0)
    with pytest.raises(ValueError):
        baselines.pcppm_structured_pe(8, -1.0)
