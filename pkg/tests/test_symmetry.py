import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from symdisc import coherent, symmetry
from symdisc.errors import BudgetExceeded, UnsupportedRepresentation
from symdisc.symmetry import (
    characters_from_rep,
    compose,
    cyclic_group,
    double_coset_char_sum,
    double_cosets,
    from_cycles,
    gram_automorphism_group,
    inverse,
    is_gram_invariant,
    orbits,
    pair_orbits,
    symmetric_group_on_pairs,
    two_orbit_cyclic_group,
)


def test_composition_convention():
    g = from_cycles(3, [0, 1])
    h = from_cycles(3, [1, 2])
    # (g o h)(i) = g(h(i))
    assert compose(g, h) == tuple(g[h[i]] for i in range(3))
    assert compose(g, inverse(g)) == (0, 1, 2)


def test_group_orders():
    assert cyclic_group(4).order == 4
    assert two_orbit_cyclic_group(8).order == 8
    G = symmetric_group_on_pairs(5)
    assert G.degree == 10 and G.order == 120 and len(G.elements) == 120


def test_sn_pairs_budget():
    with pytest.raises(BudgetExceeded):
        symmetric_group_on_pairs(10)


def test_orbit_counts():
    assert len(orbits(cyclic_group(6))) == 1
    assert [len(o) for o in orbits(two_orbit_cyclic_group(8))] == [8, 8]


def test_group_from_spec():
    assert symmetry.group_from_spec("cyclic:5").order == 5
    assert symmetry.group_from_spec("sn-pairs:5", 10).degree == 10
    with pytest.raises(ValueError):
        symmetry.group_from_spec("dihedral:4")
    with pytest.raises(ValueError):
        symmetry.group_from_spec("cyclic:5", 6)


def test_gram_invariance_examples():
    ppm = coherent.gram(coherent.ppm_codebook(5, 0.7))
    assert is_gram_invariant(ppm, (0, 1, 2, 3, 4), 1e-12)
    assert is_gram_invariant(ppm, from_cycles(5, [1, 3]), 1e-12)
    tern = coherent.gram(coherent.ternary_codebook(0.5))
    assert not is_gram_invariant(tern, from_cycles(3, [0, 1, 2]), 1e-12)
    assert is_gram_invariant(tern, from_cycles(3, [1, 2]), 1e-12)


def test_automorphism_groups():
    assert gram_automorphism_group(coherent.gram(coherent.ppm_codebook(4, 0.7))).order == 24
    assert gram_automorphism_group(coherent.gram(coherent.ternary_codebook(0.5))).order == 2
    code = coherent.rm_code(1, 3)
    g = coherent.gram(coherent.bpsk_codebook(code, 0.3))
    G = gram_automorphism_group(g)
    assert G.order >= 8
    # G is the full automorphism group, so membership is Gram invariance
    words = [int("".join(map(str, w)), 2) for w in code.codewords]
    for t in words:
        translate = tuple(words.index(w ^ t) for w in words)
        assert is_gram_invariant(g, translate, 1e-12)


def test_automorphism_group_small_brute_force():
    rng = np.random.default_rng(7)
    import itertools

    for _ in range(5):
        vals = rng.choice([0.2, 0.5], size=(5, 5))
        g = np.triu(vals, 1)
        g = g + g.T + np.eye(5)
        brute = [p for p in itertools.permutations(range(5)) if np.allclose(g[np.ix_(p, p)], g)]
        assert gram_automorphism_group(g).order == len(brute)


@pytest.mark.parametrize(
    "cb,G",
    [
        (coherent.ppm_codebook(6, 0.9), cyclic_group(6)),
        (coherent.pcppm_codebook(5, 0.7, 0.2), two_orbit_cyclic_group(5)),
        (coherent.two_pulse_ppm_codebook(6, 0.8), symmetric_group_on_pairs(6)),
    ],
)
def test_pair_orbits_refine_gram(cb, G):
    g = coherent.gram(cb)
    labels = pair_orbits(G)
    for c in range(labels.max() + 1):
        vals = g[labels == c]
        assert np.ptp(vals.real) < 1e-12 and np.ptp(vals.imag) < 1e-12
    assert all(is_gram_invariant(g, s, 1e-12) for s in G.generators)


def test_cyclic_characters_are_dft():
    N = 6
    rep = characters_from_rep(cyclic_group(N))
    shift = cyclic_group(N).generators[0]
    for k in rep.labels:
        for j in range(N):
            g = (0, 1, 2, 3, 4, 5)
            for _ in range(j):
                g = compose(shift, g)
            assert rep.character(k, g) == pytest.approx(np.exp(2j * np.pi * k * j / N), abs=1e-12)


@pytest.mark.parametrize("G", [cyclic_group(7), two_orbit_cyclic_group(4), symmetric_group_on_pairs(5), symmetric_group_on_pairs(6)])
def test_projector_algebra(G):
    rep = characters_from_rep(G)
    n = G.degree
    assert sum(rep.dims[l] * rep.multiplicities[l] for l in rep.labels) == n
    total = np.zeros((n, n), complex)
    for l in rep.labels:
        P = rep.projectors[l]
        assert np.max(np.abs(P @ P - P)) < 1e-9
        assert abs(np.trace(P) - rep.dims[l] * rep.multiplicities[l]) < 1e-9
        for m in rep.labels:
            if m != l:
                assert np.max(np.abs(P @ rep.projectors[m])) < 1e-9
        total += P
    assert np.max(np.abs(total - np.eye(n))) < 1e-9


def test_sn_pair_irreps():
    N = 6
    rep = characters_from_rep(symmetric_group_on_pairs(N))
    assert rep.dims == {"a": 1, "b": N - 1, "c": N * (N - 3) // 2}


def test_unsupported_group():
    G = gram_automorphism_group(coherent.gram(coherent.ppm_codebook(4, 0.7)))
    with pytest.raises(UnsupportedRepresentation):
        characters_from_rep(G)


def test_double_cosets_sn_pairs():
    N = 6
    G = symmetric_group_on_pairs(N)
    cosets = double_cosets(G, G.stabilizer(0))
    assert len(cosets) == 3
    reps = symmetry.sn_pair_double_coset_reps(N)
    # e, (0 2) and (0 2)(1 3) fall in different double cosets
    assert sorted(next(k for k, c in enumerate(cosets) if r in set(c.elements)) for r in reps) == [0, 1, 2]
    assert cosets[0].representative == tuple(range(G.degree))
    assert sum(len(c) for c in cosets) == G.order


def test_double_cosets_trivial_cases():
    G = cyclic_group(5)
    trivial = symmetry.PermutationGroup.from_elements(5, [tuple(range(5))])
    assert len(double_cosets(G, trivial)) == 5
    assert len(double_cosets(G, G)) == 1


@pytest.mark.parametrize("N", [4, 5, 6, 7])
def test_double_coset_sums_against_brute_force(N):
    brute = oracles.enumerate_sn_pair_sums(N)
    for method in ("vectors", "enumerate"):
        table = symmetry.sn_pair_character_table(N, method)
        for lab in "abc":
            assert np.max(np.abs(np.subtract(table[lab], brute[lab]))) < 1e-9
    assert brute["a"][1] == 2 * (N - 2)
    assert brute["b"][1:] == [N - 4, -(N - 3)]
    assert brute["c"][1:] == [-2, 1]


def test_pair_vectors_orthogonal():
    for N in (4, 5, 7):
        t, u, v = symmetry.pair_rep_trivial_G0_states(N)
        assert abs(t @ u) < 1e-12 and abs(u @ v) < 1e-12 and abs(t @ v) < 1e-12


def test_pair_vector_matrix_elements():
    for N in (4, 5, 6, 8):
        t, u, v = symmetry.pair_rep_trivial_G0_states(N)
        _, g1, g2 = symmetry.sn_pair_double_coset_reps(N)

        def act(g, x):
            y = np.zeros_like(x)
            y[list(g)] = x
            return y

        assert 2 * (N - 2) * (u @ act(g1, u)) / (u @ u) == pytest.approx(N - 4, abs=1e-12)
        ratio = (v @ act(g2, v)) / (v @ v)
        # the class-2 character needs the coset size C(N-2, 2) as a factor
        assert math.comb(N - 2, 2) * ratio == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 9), st.integers(0, 2**31))
def test_cyclic_double_coset_sums_equal_characters(N, seed):
    G = cyclic_group(N)
    rep = characters_from_rep(G)
    trivial = symmetry.PermutationGroup.from_elements(N, [tuple(range(N))])
    for c in double_cosets(G, trivial):
        g = c.representative
        for lab in rep.labels:
            assert double_coset_char_sum(rep, lab, c, trivial) == pytest.approx(np.conj(rep.character(lab, g)), abs=1e-12)
