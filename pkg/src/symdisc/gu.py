"""Pretty good measurement and closed forms for single-orbit (GU) state sets."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import matfun
from .coherent import Codebook, gram, weighted_gram
from .errors import FormulaDomain
from .symmetry import (
    PermutationGroup,
    RepresentationData,
    characters_from_rep,
    double_coset_char_sum,
    double_cosets,
    orbits,
    sn_pair_character_table,
)
from .ykl import MeasurementSolution, solution_from_basis, state_matrix

log = logging.getLogger(__name__)

RADICAND_TOL = 1e-12
ZERO_OVERLAP = 1e-14


def pgm(cb: Codebook) -> MeasurementSolution:
    """Pretty good (square-root) measurement.

    The solution matrix is ``sqrt(G_w)`` and the measurement basis is the
    unitary factor of the polar decomposition of the state matrix.
    """
    gw = weighted_gram(cb)
    M = state_matrix(gw)
    U, P = matfun.polar(M)
    cond = (np.abs(P) ** 2 / cb.priors[None, :]).T
    p_e = float(1.0 - np.sum(np.diag(P).real ** 2))
    return MeasurementSolution(P, U, np.array(cb.priors), cond, p_e, {"method": "pgm"})


@dataclass
class IsotypicOverlaps:
    """``<psi|P_lambda|psi>`` for every irrep ``lambda`` present."""

    dims: dict
    overlaps: dict
    setsize: int
    notes: list = field(default_factory=list)

    def __post_init__(self):
        total = sum(self.overlaps.values())
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"isotypic overlaps sum to {total}, expected 1 for a normalized state")
        if min(self.overlaps.values()) < -1e-12:
            raise ValueError("negative isotypic overlap")


def _act(g, psi):
    out = np.empty_like(psi)
    out[list(g)] = psi
    return out


def _require_transitive(G: PermutationGroup):
    if len(orbits(G)) != 1:
        raise ValueError("the group does not act transitively on the states")


def isotypic_overlaps(psi, rep: RepresentationData, base: int = 0, method: str = "projector") -> IsotypicOverlaps:
    """Weights of ``psi`` in each isotypic component.

    ``method="projector"`` applies the projector matrices directly;
    ``method="double_coset"`` uses the character sums over double cosets of
    the stabilizer of ``base`` together with ``<psi|U(g_i)|psi>`` at the
    coset representatives.
    """
    psi = np.asarray(psi, dtype=complex)
    G = rep.group
    _require_transitive(G)
    if psi.shape != (G.degree,):
        raise ValueError(f"state has shape {psi.shape}, group degree is {G.degree}")
    setsize = G.degree
    if method == "projector":
        ov = {lab: float(np.vdot(psi, rep.projectors[lab] @ psi).real) for lab in rep.labels}
    elif method == "double_coset":
        G0 = G.stabilizer(base)
        cosets = double_cosets(G, G0)
        amps = [np.vdot(psi, _act(c.representative, psi)) for c in cosets]
        ov = {}
        for lab in rep.labels:
            s = sum(double_coset_char_sum(rep, lab, c, G0) * a for c, a in zip(cosets, amps))
            ov[lab] = float((rep.dims[lab] / setsize * s).real)
    else:
        raise ValueError(f"unknown method {method!r}")
    return IsotypicOverlaps(dict(rep.dims), ov, setsize)


def gu_optimal_vector(psi, rep: RepresentationData) -> np.ndarray:
    """Optimal measurement vector paired with ``psi``.

    Isotypic components with (numerically) zero overlap are left out; that
    only happens for linearly dependent sets.
    """
    psi = np.asarray(psi, dtype=complex)
    ov = isotypic_overlaps(psi, rep)
    w = np.zeros_like(psi)
    for lab in rep.labels:
        o = ov.overlaps[lab]
        if o <= ZERO_OVERLAP:
            log.info("dropping isotypic component %s with overlap %.3e", lab, o)
            continue
        w += math.sqrt(rep.dims[lab] / ov.setsize) * (rep.projectors[lab] @ psi) / math.sqrt(o)
    return w


def gu_success_probability(overlaps: IsotypicOverlaps, setsize: int | None = None) -> float:
    """``|sum_lambda sqrt(d_lambda / |S|) sqrt(o_lambda)|^2``, skipping components the optimal vector drops."""
    setsize = overlaps.setsize if setsize is None else setsize
    amp = sum(
        math.sqrt(overlaps.dims[lab] / setsize) * math.sqrt(o)
        for lab, o in overlaps.overlaps.items()
        if o > ZERO_OVERLAP
    )
    return amp**2


def gu_measurement(cb: Codebook, G: PermutationGroup, base: int = 0) -> MeasurementSolution:
    """Optimal measurement of a GU codebook assembled from the orbit of the optimal vector."""
    cb.require_equal_priors()
    g = gram(cb)
    for s in G.generators:
        if matfun.max_abs(g[np.ix_(s, s)] - g) > 1e-10:
            raise ValueError(f"group element {s} does not preserve the Gram matrix")
    rep = characters_from_rep(G)
    psi = state_matrix(g)[:, base]
    w = gu_optimal_vector(psi, rep)
    n = len(cb)
    W = np.zeros((n, n), dtype=complex)
    for h in G.elements:
        W[:, h[base]] = _act(h, w)
    ov = isotypic_overlaps(psi, rep)
    sol = solution_from_basis(cb, W, diagnostics={"method": "gu", "overlaps": {str(k): v for k, v in ov.overlaps.items()}})
    sol.diagnostics["closed_form_P_s"] = gu_success_probability(ov)
    return sol


def ppm_mpe_pe(N: int, nbar: float) -> float:
    """Minimum error probability for N-ary PPM at mean photon number ``nbar``."""
    if N < 2 or nbar < 0:
        raise ValueError("need N >= 2 and nbar >= 0")
    k2 = math.exp(-nbar)
    a, b = 1 + (N - 1) * k2, 1 - k2
    # sqrt(a) - sqrt(b) written without cancellation
    diff = N * k2 / (math.sqrt(a) + math.sqrt(b))
    return (N - 1) / N**2 * diff**2


def _radical(x: float) -> float:
    if x < -RADICAND_TOL:
        raise FormulaDomain(f"negative radicand {x:.3e}")
    return math.sqrt(max(x, 0.0))


def two_pulse_ppm_mpe_ps(N: int, nbar: float, method: str = "vectors") -> float:
    """Optimal success probability for two-pulse PPM from the S_N double-coset sums."""
    if N < 4 or nbar < 0:
        raise ValueError("need N >= 4 and nbar >= 0")
    k2 = math.exp(-nbar)
    table = sn_pair_character_table(N, method)
    size = math.comb(N, 2)
    dims = {"a": 1, "b": N - 1, "c": size - N}
    total = sum(dims[lab] * _radical(1 + table[lab][1] * k2 + table[lab][2] * k2**2) for lab in "abc")
    return (total / size) ** 2
