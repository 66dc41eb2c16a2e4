"""Multimode coherent-state codewords, named constellations and their Gram matrices.

A codeword is a vector of complex field amplitudes, one per optical mode; the
mean photon number of mode ``k`` is ``|amplitudes[k]|**2``.  Overlaps between
coherent states are closed form, so every codebook is fully described by its
Gram matrix.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

PRIOR_TOL = 1e-12


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class CoherentCodeword:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.atleast_1d(np.asarray(self.amplitudes, dtype=complex))
        if amps.ndim != 1 or amps.size < 1:
            raise ValueError("a codeword needs at least one mode")
        if not np.all(np.isfinite(amps)):
            raise ValueError("codeword amplitudes must be finite")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def modes(self) -> int:
        return self.amplitudes.size

    @property
    def mean_photon_number(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def __eq__(self, other):
        if not isinstance(other, CoherentCodeword):
            return NotImplemented
        return np.array_equal(self.amplitudes, other.amplitudes)

    def __hash__(self):
        return hash(self.amplitudes.tobytes())


@dataclass(frozen=True)
class Codebook:
    """Codewords with prior probabilities."""

    codewords: tuple
    priors: np.ndarray = field(default=None)

    def __post_init__(self):
        words = tuple(
            w if isinstance(w, CoherentCodeword) else CoherentCodeword(w) for w in self.codewords
        )
        if not words:
            raise ValueError("empty codebook")
        modes = {w.modes for w in words}
        if len(modes) != 1:
            raise ValueError(f"codewords have differing mode counts {sorted(modes)}")
        n = len(words)
        if self.priors is None:
            priors = np.full(n, 1.0 / n)
        else:
            priors = np.asarray(self.priors, dtype=float)
        if priors.shape != (n,):
            raise ValueError(f"expected {n} priors, got shape {priors.shape}")
        if np.any(priors < 0) or abs(priors.sum() - 1.0) > PRIOR_TOL:
            raise ValueError("priors must be non-negative and sum to 1")
        object.__setattr__(self, "codewords", words)
        object.__setattr__(self, "priors", _frozen(priors))

    def __len__(self):
        return len(self.codewords)

    @property
    def modes(self) -> int:
        return self.codewords[0].modes

    @property
    def amplitudes(self) -> np.ndarray:
        """``(n, modes)`` array of amplitudes."""
        return np.array([w.amplitudes for w in self.codewords])

    @property
    def has_equal_priors(self) -> bool:
        return bool(np.all(np.abs(self.priors - 1.0 / len(self)) <= PRIOR_TOL))

    def require_equal_priors(self):
        if not self.has_equal_priors:
            raise ValueError("this operation assumes equal priors")


@dataclass(frozen=True)
class BinaryLinearCode:
    """Binary linear code given by generator rows (bit vectors of length ``N``)."""

    generators: np.ndarray

    def __post_init__(self):
        gens = np.atleast_2d(np.asarray(self.generators, dtype=np.uint8)) % 2
        if gens.size == 0:
            raise ValueError("need at least one generator row")
        object.__setattr__(self, "generators", _frozen(gens))
        words = _span(gens)
        object.__setattr__(self, "_words", _frozen(words))

    @property
    def length(self) -> int:
        return self.generators.shape[1]

    @property
    def dimension(self) -> int:
        return int(round(math.log2(len(self._words))))

    @property
    def codewords(self) -> np.ndarray:
        """``(2**k, N)`` array of codewords; the zero word comes first."""
        return self._words

    @property
    def distance_matrix(self) -> np.ndarray:
        w = self._words.astype(np.int64)
        return np.sum(w[:, None, :] ^ w[None, :, :], axis=2)

    @property
    def min_distance(self) -> int:
        weights = self._words.sum(axis=1)
        nz = weights[weights > 0]
        return int(nz.min()) if nz.size else 0

    @property
    def parameters(self) -> tuple[int, int, int]:
        return self.length, self.dimension, self.min_distance

    @classmethod
    def from_file(cls, path) -> "BinaryLinearCode":
        rows = []
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if set(line) - {"0", "1"}:
                raise ValueError(f"not a bit string: {line!r}")
            rows.append([int(c) for c in line])
        if not rows:
            raise ValueError(f"{path}: no generator rows")
        return cls(np.array(rows))

    def to_lines(self) -> str:
        return "\n".join("".join(str(int(b)) for b in row) for row in self.generators) + "\n"


def _span(gens: np.ndarray) -> np.ndarray:
    words = {tuple([0] * gens.shape[1])}
    for g in gens:
        g = tuple(int(b) for b in g)
        words |= {tuple(a ^ b for a, b in zip(w, g)) for w in words}
    # deterministic order: zero word first, then by integer value
    ordered = sorted(words, key=lambda w: int("".join(map(str, w)), 2))
    return np.array(ordered, dtype=np.uint8)


def inner_product(a: CoherentCodeword, b: CoherentCodeword) -> complex:
    """Overlap <a|b> of two multimode coherent states."""
    if a.modes != b.modes:
        raise ValueError(f"mode-count mismatch: {a.modes} vs {b.modes}")
    x, y = a.amplitudes, b.amplitudes
    return complex(np.exp(np.vdot(x, y) - 0.5 * (np.vdot(x, x).real + np.vdot(y, y).real)))


def gram(cb: Codebook) -> np.ndarray:
    """Gram matrix with entries <psi_i|psi_j>."""
    a = cb.amplitudes
    norms = np.sum(np.abs(a) ** 2, axis=1)
    g = np.exp(a.conj() @ a.T - 0.5 * (norms[:, None] + norms[None, :]))
    np.fill_diagonal(g, 1.0)
    return g


def weighted_gram(cb: Codebook) -> np.ndarray:
    """Gram matrix of the sub-normalized vectors sqrt(p_i)|psi_i>."""
    s = np.sqrt(cb.priors)
    return s[:, None] * gram(cb) * s[None, :]


def ppm_codebook(N: int, alpha: complex) -> Codebook:
    """One pulse of amplitude ``alpha`` in one of ``N`` slots."""
    if int(N) != N or N < 1:
        raise ValueError(f"invalid N={N}")
    return Codebook(tuple(alpha * np.eye(N)))


def two_pulse_ppm_codebook(N: int, alpha: complex) -> Codebook:
    """Pulses in two of ``N`` slots; codewords ordered as ``itertools.combinations``."""
    if int(N) != N or N < 4:
        raise ValueError(f"two-pulse PPM needs N >= 4, got {N}")
    words = []
    for i, j in itertools.combinations(range(N), 2):
        w = np.zeros(N, dtype=complex)
        w[[i, j]] = alpha
        words.append(w)
    return Codebook(tuple(words))


def pcppm_codebook(N: int, alpha: complex, beta: complex) -> Codebook:
    """Two PPM orbits: ``alpha`` pulses (indices ``0..N-1``) then ``beta`` pulses."""
    if int(N) != N or N < 1:
        raise ValueError(f"invalid N={N}")
    eye = np.eye(N)
    return Codebook(tuple(alpha * eye) + tuple(beta * eye))


def ternary_codebook(alpha: complex) -> Codebook:
    """The single-mode set {|0>, |-alpha>, |alpha>} (the |0> state first)."""
    return Codebook(((0.0,), (-alpha,), (alpha,)))


def bpsk_codebook(code: BinaryLinearCode, alpha: complex) -> Codebook:
    """Map bit 0 to |alpha> and bit 1 to |-alpha> in every mode."""
    signs = 1.0 - 2.0 * code.codewords.astype(float)
    return Codebook(tuple(alpha * signs))


def rm_code(r: int, m: int) -> BinaryLinearCode:
    """Reed-Muller code RM(r, m): evaluations of monomials of degree <= r on F_2^m."""
    if not (0 <= r <= m) or m < 0:
        raise ValueError(f"invalid Reed-Muller parameters r={r}, m={m}")
    points = np.array(list(itertools.product([0, 1], repeat=m)), dtype=np.uint8).reshape(2**m, m)
    rows = []
    for deg in range(r + 1):
        for subset in itertools.combinations(range(m), deg):
            rows.append(np.prod(points[:, list(subset)], axis=1) if subset else np.ones(2**m))
    return BinaryLinearCode(np.array(rows, dtype=np.uint8))


# -- JSON interchange ------------------------------------------------------


def codebook_to_json(cb: Codebook) -> dict:
    priors = "equal" if cb.has_equal_priors else [float(p) for p in cb.priors]
    return {
        "modes": cb.modes,
        "priors": priors,
        "codewords": [[[float(z.real), float(z.imag)] for z in w.amplitudes] for w in cb.codewords],
    }


def codebook_from_json(obj: dict) -> Codebook:
    try:
        modes = int(obj["modes"])
        raw = obj["codewords"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"codebook JSON is missing field {exc}") from None
    words = []
    for k, w in enumerate(raw):
        amps = np.array([complex(re, im) for re, im in w])
        if amps.size != modes:
            raise ValueError(f"codeword {k} has {amps.size} modes, expected {modes}")
        words.append(amps)
    priors = obj.get("priors", "equal")
    return Codebook(tuple(words), None if priors == "equal" else np.asarray(priors, dtype=float))


def save_codebook(cb: Codebook, path) -> None:
    Path(path).write_text(json.dumps(codebook_to_json(cb), indent=1))


def load_codebook(path) -> Codebook:
    return codebook_from_json(json.loads(Path(path).read_text()))

