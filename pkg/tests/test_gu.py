import math

import numpy as np
import pytest

import oracles
from symdisc import coherent, gu, matfun, symmetry, ykl
from symdisc.errors import LinearDependence


def _rep_and_psi(cb, G):
    rep = symmetry.characters_from_rep(G)
    psi = ykl.state_matrix(coherent.gram(cb))[:, 0]
    return rep, psi


def test_pgm_orthogonal_states():
    sol = gu.pgm(coherent.ppm_codebook(4, 40.0))
    assert sol.P_s == pytest.approx(1.0, abs=1e-15)


def test_pgm_binary_ppm():
    a = 0.6
    k4 = math.exp(-2 * a * a)
    sol = gu.pgm(coherent.ppm_codebook(2, a))
    assert sol.P_s == pytest.approx(0.5 * (1 + math.sqrt(1 - k4)), abs=1e-14)
    assert 1 - sol.P_s == pytest.approx(gu.ppm_mpe_pe(2, a * a), abs=1e-14)


def test_pgm_structure():
    cb = coherent.two_pulse_ppm_codebook(5, 0.7)
    sol = gu.pgm(cb)
    gw = coherent.weighted_gram(cb)
    assert matfun.max_abs(sol.X - sol.X.conj().T) < 1e-12
    assert matfun.max_abs(sol.X.conj().T @ sol.X - gw) < 1e-9
    assert np.ptp(np.diag(sol.X).real) < 1e-10
    assert np.allclose(sol.conditionals.sum(axis=1), 1, atol=1e-9)
    assert sol.P_e == pytest.approx(1 - np.sum(cb.priors * np.diag(sol.conditionals)), abs=1e-10)
    assert matfun.max_abs(sol.W.conj().T @ sol.W - np.eye(len(cb))) < 1e-9


def test_pgm_ternary_is_probability():
    sol = gu.pgm(coherent.ternary_codebook(0.1))
    assert 1 / 3 <= sol.P_s <= 1


def test_pgm_rejects_dependent_codewords():
    with pytest.raises(LinearDependence):
        gu.pgm(coherent.pcppm_codebook(3, 0.5, 0.5))


def test_ppm_overlaps_are_circulant_eigenvalues():
    N, a = 6, 0.8
    k2 = math.exp(-a * a)
    cb = coherent.ppm_codebook(N, a)
    rep, psi = _rep_and_psi(cb, symmetry.cyclic_group(N))
    ov = gu.isotypic_overlaps(psi, rep)
    assert ov.overlaps[0] == pytest.approx((1 + (N - 1) * k2) / N, abs=1e-12)
    for k in range(1, N):
        assert ov.overlaps[k] == pytest.approx((1 - k2) / N, abs=1e-12)


@pytest.mark.parametrize("N", [4, 5, 6])
def test_two_pulse_overlaps_both_routes(N):
    a = 0.7
    k2 = math.exp(-a * a)
    cb = coherent.two_pulse_ppm_codebook(N, a)
    rep, psi = _rep_and_psi(cb, symmetry.symmetric_group_on_pairs(N))
    proj = gu.isotypic_overlaps(psi, rep, method="projector")
    dc = gu.isotypic_overlaps(psi, rep, method="double_coset")
    table = oracles.enumerate_sn_pair_sums(N)
    size = math.comb(N, 2)
    for lab in "abc":
        assert proj.overlaps[lab] == pytest.approx(dc.overlaps[lab], abs=1e-9)
        expected = rep.dims[lab] / size * (1 + table[lab][1] * k2 + table[lab][2] * k2 * k2)
        assert proj.overlaps[lab] == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize(
    "cb,G",
    [
        (coherent.ppm_codebook(7, 0.9), symmetry.cyclic_group(7)),
        (coherent.two_pulse_ppm_codebook(5, 0.6), symmetry.symmetric_group_on_pairs(5)),
        (coherent.ppm_codebook(5, 0.3 + 0.4j), symmetry.cyclic_group(5)),
    ],
)
def test_optimal_vector_matches_pgm(cb, G):
    rep, psi = _rep_and_psi(cb, G)
    w = gu.gu_optimal_vector(psi, rep)
    assert np.linalg.norm(w) == pytest.approx(1.0, abs=1e-10)
    pgm = gu.pgm(cb)
    col = pgm.W[:, 0]
    phase = np.vdot(col, w)
    assert abs(abs(phase) - 1) < 1e-9
    assert matfun.max_abs(w - phase * col) < 1e-9
    sol = gu.gu_measurement(cb, G)
    assert matfun.max_abs(sol.W.conj().T @ sol.W - np.eye(len(cb))) < 1e-9
    assert sol.P_s == pytest.approx(pgm.P_s, abs=1e-9)
    assert sol.diagnostics["closed_form_P_s"] == pytest.approx(pgm.P_s, abs=1e-9)


def test_optimal_vector_orthogonal_states():
    rep = symmetry.characters_from_rep(symmetry.cyclic_group(4))
    psi = np.eye(4)[0].astype(complex)
    assert np.allclose(gu.gu_optimal_vector(psi, rep), psi)


def test_success_probability_limits():
    rep = symmetry.characters_from_rep(symmetry.cyclic_group(5))
    same = gu.isotypic_overlaps(np.ones(5) / math.sqrt(5), rep)
    assert gu.gu_success_probability(same) == pytest.approx(1 / 5, abs=1e-12)
    ortho = gu.isotypic_overlaps(np.eye(5)[2], rep)
    assert gu.gu_success_probability(ortho) == pytest.approx(1.0, abs=1e-12)


def test_ppm_closed_form_cross_routes():
    cb = coherent.ppm_codebook(8, 1.0)
    rep, psi = _rep_and_psi(cb, symmetry.cyclic_group(8))
    ps = gu.gu_success_probability(gu.isotypic_overlaps(psi, rep))
    assert ps == pytest.approx(1 - gu.ppm_mpe_pe(8, 1.0), abs=1e-12)
    assert gu.pgm(cb).P_e == pytest.approx(gu.ppm_mpe_pe(8, 1.0), abs=1e-10)


def test_ppm_closed_form_limits_and_range():
    for N in (2, 5, 8):
        assert gu.ppm_mpe_pe(N, 0.0) == pytest.approx((N - 1) / N, abs=1e-15)
        assert gu.ppm_mpe_pe(N, 60.0) < 1e-50
        vals = [gu.ppm_mpe_pe(N, x) for x in np.linspace(0, 10, 30)]
        assert all(0 <= v <= 1 - 1 / N + 1e-15 for v in vals)
        assert np.all(np.diff(vals) < 0)


def test_two_pulse_closed_form():
    assert gu.two_pulse_ppm_mpe_ps(8, 2.0) == pytest.approx(gu.pgm(coherent.two_pulse_ppm_codebook(8, math.sqrt(2))).P_s, abs=1e-9)
    for N in (4, 6, 9, 12):
        vals = [gu.two_pulse_ppm_mpe_ps(N, x) for x in np.linspace(0, 10, 30)]
        assert vals[0] == pytest.approx(1 / math.comb(N, 2), abs=1e-15)
        assert np.all(np.diff(vals) > 0)
    assert gu.two_pulse_ppm_mpe_ps(6, 1.0, method="enumerate") == pytest.approx(gu.two_pulse_ppm_mpe_ps(6, 1.0), abs=1e-14)


def test_two_pulse_rejects_small_n():
    with pytest.raises(ValueError):
        gu.two_pulse_ppm_mpe_ps(3, 1.0)
