"""Optimal measurements for multi-orbit (CGU) state sets.

Two solvers are provided.  :func:`solve_blocks_ykl` block-diagonalizes the
weighted Gram matrix in the Fourier basis of the acting group and searches
over the unitary freedom left in each multiplicity block.
:func:`symmetry_reduced_solve` instead fixes a pattern of equal entries in
the solution matrix and solves the equality conditions for the distinct
values directly.  Both use the Gauss-Newton iteration in :func:`gauss_newton`
and certify candidates with :func:`symdisc.ykl.verify`.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import matfun
from .coherent import BinaryLinearCode, bpsk_codebook, gram, rm_code
from .errors import (
    LinearDependence,
    NoValidBranch,
    NonInvariantGroup,
    PatternTooCoarse,
    SolveFailed,
    UnsupportedRepresentation,
)
from .symmetry import PermutationGroup, characters_from_rep, gram_automorphism_group, orbits, pair_orbits
from .ykl import DEFAULT_TOL, MeasurementSolution, eq2_residual, solution_from_x, verify

log = logging.getLogger(__name__)

STEP_TOL = 1e-12
RESIDUAL_TOL = 1e-10
MAX_ITER = 200
MAX_HALVINGS = 40
CONDITION_TOL = 1e-10


# -- Gauss-Newton ------------------------------------------------------------------------


@dataclass
class NewtonResult:
    x: np.ndarray
    residual: float
    iterations: int
    status: str  # "converged", "stalled" or "maxiter"


def _jacobian(fun, x, fx, rel_step=1e-6):
    jac = np.empty((fx.size, x.size))
    for j in range(x.size):
        h = rel_step * max(1.0, abs(x[j]))
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        jac[:, j] = (fun(xp) - fun(xm)) / (2 * h)
    return jac


def gauss_newton(fun, x0, max_iter=MAX_ITER, step_tol=STEP_TOL, residual_tol=RESIDUAL_TOL,
                 max_halvings=MAX_HALVINGS) -> NewtonResult:
    """Solve ``fun(x) = 0`` in the least-squares sense with backtracking Gauss-Newton steps.

    ``fun`` maps a real vector to a real residual vector; the system may be
    overdetermined and its Jacobian rank-deficient (minimum-norm steps are used).
    """
    x = np.array(x0, dtype=float)
    r = fun(x)
    norm = np.linalg.norm(r)
    for it in range(max_iter):
        if np.max(np.abs(r), initial=0.0) <= residual_tol:
            return NewtonResult(x, float(np.max(np.abs(r), initial=0.0)), it, "converged")
        J = _jacobian(fun, x, r)
        step = -np.linalg.lstsq(J, r, rcond=None)[0]
        t = 1.0
        for _ in range(max_halvings):
            r_new = fun(x + t * step)
            if np.linalg.norm(r_new) < norm:
                break
            t *= 0.5
        else:
            return NewtonResult(x, float(np.max(np.abs(r))), it, "stalled")
        x = x + t * step
        r, norm = r_new, np.linalg.norm(r_new)
        if np.max(np.abs(t * step)) <= step_tol * (1.0 + np.max(np.abs(x))):
            status = "converged" if np.max(np.abs(r)) <= residual_tol else "stalled"
            return NewtonResult(x, float(np.max(np.abs(r))), it + 1, status)
    res = float(np.max(np.abs(r)))
    return NewtonResult(x, res, max_iter, "converged" if res <= residual_tol else "maxiter")


def _eq2_vector(X):
    d = np.diag(X)
    a = X * d.conj()[None, :] - d[:, None] * X.conj().T
    off = ~np.eye(X.shape[0], dtype=bool)
    return np.concatenate([a[off].real, a[off].imag])


# -- Fourier block reduction ----------------------------------------------------------------


@dataclass
class BlockSystem:
    """Weighted Gram matrix in the Fourier basis of a group action.

    ``F^H G_w F`` is block diagonal; irrep ``lam`` occupies columns
    ``slices[lam]`` and contributes ``kron(blocks[lam], eye(dims[lam]))``
    (multiplicity index major).
    """

    labels: list
    dims: dict
    multiplicities: dict
    blocks: dict
    slices: dict
    F: np.ndarray
    gram_w: np.ndarray
    orbits: list

    def assemble(self, xblocks: dict) -> np.ndarray:
        """Map per-irrep blocks back to an ``n x n`` matrix in the state index basis."""
        n = self.F.shape[0]
        inner = np.zeros((n, n), dtype=complex)
        for lab in self.labels:
            sl = self.slices[lab]
            inner[sl, sl] = np.kron(xblocks[lab], np.eye(self.dims[lab]))
        return self.F @ inner @ self.F.conj().T


def block_reduce(gw, G: PermutationGroup, tol: float = 1e-9) -> BlockSystem:
    """Block-diagonalize the weighted Gram matrix ``gw`` using the isotypic structure of ``G``.

    Supported: abelian groups (one-dimensional irreps, any multiplicity) and
    multiplicity-free actions such as ``S_N`` on pairs.
    """
    gw = np.asarray(gw, dtype=complex)
    n = gw.shape[0]
    if G.degree != n:
        raise ValueError(f"group degree {G.degree} differs from {n} states")
    for g in G.generators:
        if matfun.max_abs(gw[np.ix_(g, g)] - gw) > 1e-10:
            raise NonInvariantGroup(f"generator {g} does not preserve the Gram matrix")
    rep = characters_from_rep(G)
    orbs = orbits(G)
    cols, slices, blocks = [], {}, {}
    for lab in rep.labels:
        d, m, P = rep.dims[lab], rep.multiplicities[lab], rep.projectors[lab]
        if d == 1:
            vecs = []
            for orb in orbs:
                v = P[:, orb[0]]
                nv = np.linalg.norm(v)
                if nv > 1e-9:
                    vecs.append(v / nv)
            if len(vecs) != m:
                raise UnsupportedRepresentation(f"found {len(vecs)} orbit vectors for irrep {lab}, expected {m}")
        elif m == 1:
            w, q = np.linalg.eigh(0.5 * (P + P.conj().T))
            vecs = list(q[:, w > 0.5].T)
        else:
            raise UnsupportedRepresentation(f"irrep {lab} has dimension {d} and multiplicity {m}")
        start = len(cols)
        cols.extend(vecs)
        slices[lab] = slice(start, len(cols))
        Fl = np.array(vecs).T
        sub = Fl.conj().T @ gw @ Fl
        blocks[lab] = sub if d == 1 else np.array([[np.trace(sub) / d]])
    F = np.array(cols).T
    bs = BlockSystem(list(rep.labels), dict(rep.dims), dict(rep.multiplicities), blocks, slices, F, gw, orbs)
    resid = matfun.max_abs(bs.assemble(blocks) - gw)
    if resid > tol:
        raise UnsupportedRepresentation(f"block reconstruction residual {resid:.3e}")
    return bs


def _hermitian_from_params(theta, m):
    h = np.zeros((m, m), dtype=complex)
    h[np.diag_indices(m)] = theta[:m]
    iu = np.triu_indices(m, 1)
    k = len(iu[0])
    h[iu] = theta[m:m + k] + 1j * theta[m + k:m + 2 * k]
    return h + np.triu(h, 1).conj().T


def _unitary(h):
    w, q = np.linalg.eigh(h)
    return (q * np.exp(1j * w)[None, :]) @ q.conj().T


def solve_blocks_ykl(bs: BlockSystem, priors, max_branches: int = 64, tol: float = DEFAULT_TOL) -> MeasurementSolution:
    """Optimal measurement for a block-reduced Gram matrix.

    Each block solution is ``V_lam sqrt(G_lam)`` with ``V_lam`` unitary; the
    ``V_lam`` are found by Gauss-Newton on the off-diagonal equality
    conditions in the original basis.  Branches are seeded at the PGM point
    (all ``V_lam = I``) and at single diagonal sign flips of each block; the
    converged branch with the lowest error probability among those passing
    the operator inequality is returned.
    """
    priors = np.asarray(priors, float)
    roots = {}
    for lab in bs.labels:
        blk = bs.blocks[lab]
        w = np.linalg.eigvalsh(blk)
        if w[0] <= CONDITION_TOL * max(1.0, w[-1]) * priors.min():
            raise LinearDependence(f"block {lab} is singular (eigenvalues {w})")
        roots[lab] = matfun.psd_sqrt(blk)
    sizes = [bs.multiplicities[lab] ** 2 if bs.dims[lab] == 1 else 1 for lab in bs.labels]
    offsets = np.concatenate([[0], np.cumsum(sizes)])

    def blocks_from(theta):
        out = {}
        for k, lab in enumerate(bs.labels):
            m = roots[lab].shape[0]
            h = _hermitian_from_params(theta[offsets[k]:offsets[k + 1]], m)
            out[lab] = _unitary(h) @ roots[lab]
        return out

    def residual(theta):
        return _eq2_vector(bs.assemble(blocks_from(theta)))

    seeds = [np.zeros(offsets[-1])]
    for k, lab in enumerate(bs.labels):
        m = roots[lab].shape[0]
        for i in range(m):
            s = np.zeros(offsets[-1])
            s[offsets[k] + i] = np.pi
            seeds.append(s)
    seeds = seeds[:max_branches]

    branches = []
    for b, seed in enumerate(seeds):
        res = gauss_newton(residual, seed)
        info = {"branch": b, "status": res.status, "residual": res.residual, "iterations": res.iterations}
        if res.status == "converged":
            X = bs.assemble(blocks_from(res.x))
            sol = solution_from_x(X, bs.gram_w, priors)
            rep = verify(bs.gram_w, sol, tol)
            info.update(P_e=sol.P_e, eq1=rep.eq1_residual, eq2=rep.eq2_residual, min_eig=rep.ineq_min_eig, passed=rep.passed)
            branches.append((info, sol))
        else:
            branches.append((info, None))
    diag = {"method": "cgu", "branch_count": len(seeds), "branches": [i for i, _ in branches]}
    converged = [(i, s) for i, s in branches if s is not None]
    if not converged:
        raise SolveFailed("Gauss-Newton did not converge from any branch seed", diag)
    valid = [(i, s) for i, s in converged if i["passed"]]
    if not valid:
        raise NoValidBranch("no converged branch satisfies the operator inequality", diag)
    info, best = min(valid, key=lambda pair: (pair[0]["P_e"], pair[0]["branch"]))
    best.diagnostics.update(diag, chosen_branch=info["branch"], eq1_residual=info["eq1"],
                            eq2_residual=info["eq2"], ineq_min_eig=info["min_eig"])
    return best


def pcppm_mpe_ps(N: int, alpha: complex, beta: complex) -> float:
    """Closed-form optimal success probability for two PPM orbits with amplitudes ``alpha`` and ``beta``."""
    if N < 2:
        raise ValueError(f"need N >= 2, got {N}")
    if abs(alpha - beta) == 0:
        raise ValueError("alpha == beta gives duplicate codewords")
    a2, b2 = abs(alpha) ** 2, abs(beta) ** 2
    e1 = math.exp(-a2)
    e2 = math.exp(-0.5 * abs(alpha - beta) ** 2)
    e3 = math.exp(-0.5 * (a2 + b2))
    from .gu import _radical

    total = (
        _radical(1 + (N - 1) * e1 + e2 + (N - 1) * e3)
        + _radical(1 + (N - 1) * e1 - e2 - (N - 1) * e3)
        + (N - 1) * _radical(1 - e1 + e2 - e3)
        + (N - 1) * _radical(1 - e1 - e2 + e3)
    )
    return total**2 / (4 * N**2)


# -- symmetry-pattern solver ----------------------------------------------------------------


@dataclass
class SymmetryPattern:
    """Assignment of a variable label to every entry ``(i, j)`` of the solution matrix."""

    labels: np.ndarray

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.intp)

    @property
    def n_classes(self) -> int:
        return int(self.labels.max()) + 1

    @classmethod
    def from_group(cls, G: PermutationGroup) -> "SymmetryPattern":
        """Classes are the orbits of ``G`` on ordered index pairs."""
        return cls(pair_orbits(G))

    @classmethod
    def from_gram_entries(cls, g, tol: float = 1e-12) -> "SymmetryPattern":
        """One class per distinct off-diagonal Gram value plus one for the diagonal."""
        g = np.asarray(g)
        n = g.shape[0]
        labels = np.zeros((n, n), dtype=np.intp)
        reps: list = []
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                for k, z in enumerate(reps):
                    if abs(g[i, j] - z) <= tol:
                        labels[i, j] = k + 1
                        break
                else:
                    reps.append(g[i, j])
                    labels[i, j] = len(reps)
        return cls(labels)

    def class_means(self, X) -> np.ndarray:
        X = np.asarray(X)
        return np.array([X[self.labels == c].mean() for c in range(self.n_classes)])

    def consistent_with(self, g, tol: float = 1e-10) -> bool:
        g = np.asarray(g)
        return all(np.ptp(g[self.labels == c].real) <= tol and np.ptp(g[self.labels == c].imag) <= tol
                   for c in range(self.n_classes))


def _distinct_per_row(A, tol=1e-8):
    return [len(np.unique(np.round(np.asarray(row) / tol).astype(np.int64))) for row in np.real_if_close(A)]


def symmetry_reduced_solve(g, pattern: SymmetryPattern, priors=None, init=None, n_restarts: int = 8,
                           tol: float = DEFAULT_TOL, seed: int = 0) -> MeasurementSolution:
    """Solve the equality conditions for a solution matrix constant on ``pattern`` classes.

    ``g`` is the unweighted Gram matrix; priors must be equal.  Starts from
    the class means of the PGM solution (or ``init``), then from seeded random
    perturbations of it.  Raises :class:`PatternTooCoarse` when no solution
    of the pattern satisfies the equalities and the operator inequality.
    """
    g = np.asarray(g, dtype=complex)
    n = g.shape[0]
    priors = np.full(n, 1.0 / n) if priors is None else np.asarray(priors, float)
    if np.max(np.abs(priors - 1.0 / n)) > 1e-12:
        raise ValueError("symmetry_reduced_solve assumes equal priors")
    if pattern.labels.shape != (n, n):
        raise ValueError("pattern size does not match the Gram matrix")
    if not pattern.consistent_with(g):
        raise ValueError("the Gram matrix is not constant on the pattern classes")
    s = np.sqrt(priors)
    gw = s[:, None] * g * s[None, :]
    real = matfun.max_abs(g.imag) < 1e-14
    k = pattern.n_classes
    iu = np.triu_indices(n)

    def unpack(v):
        vals = v if real else v[:k] + 1j * v[k:]
        return vals[pattern.labels]

    def residual(v):
        X = unpack(v)
        r1 = (X.conj().T @ X - gw)[iu]
        parts = [r1.real] if real else [r1.real, r1.imag]
        return np.concatenate(parts + [_eq2_vector(X)])

    if init is None:
        start = pattern.class_means(matfun.psd_sqrt(gw))
    else:
        init = np.asarray(init)
        start = pattern.class_means(init) if init.ndim == 2 else init
    v0 = start.real if real else np.concatenate([start.real, start.imag])
    rng = np.random.default_rng(seed)
    starts = [v0] + [v0 * (1 + 0.2 * rng.standard_normal(v0.size)) for _ in range(n_restarts)]

    attempts = []
    for a, v in enumerate(starts):
        res = gauss_newton(residual, v)
        info = {"start": a, "status": res.status, "residual": res.residual, "iterations": res.iterations}
        attempts.append(info)
        if res.status != "converged":
            continue
        sol = solution_from_x(unpack(res.x), gw, priors)
        rep = verify(gw, sol, tol)
        info.update(P_e=sol.P_e, min_eig=rep.ineq_min_eig, passed=rep.passed)
        if rep.passed:
            sol.diagnostics.update(
                method="reduced",
                n_variables=k,
                attempts=attempts,
                eq1_residual=rep.eq1_residual,
                eq2_residual=rep.eq2_residual,
                ineq_min_eig=rep.ineq_min_eig,
                row_distinct_counts=_distinct_per_row(sol.amplitudes),
            )
            return sol
    diag = {"n_variables": k, "attempts": attempts}
    if any(a["status"] == "maxiter" for a in attempts) and not any(a["status"] == "converged" for a in attempts):
        raise SolveFailed("Gauss-Newton did not converge for the symmetry pattern", diag)
    raise PatternTooCoarse("no solution constant on the pattern classes passes the optimality conditions; "
                           "refine the pattern with pair orbits of the Gram automorphism group", diag)


# -- the [8, 3, 2] Reed-Muller subcode example --------------------------------------------------

FIG1_NBAR = 0.01
FIG1_VALUES = {"a": 0.54, "b": 0.294, "c": 0.263, "d": 0.382}
FIG1_TOL = 5e-3


@dataclass
class Fig1Analysis:
    code: BinaryLinearCode
    nbar: float
    distance_matrix: np.ndarray
    automorphism_order: int
    pattern: SymmetryPattern
    solution: MeasurementSolution
    row_values: np.ndarray  # distinct amplitudes <w_0|psi_j> in row 0, diagonal first
    distinct_values_per_row: list
    distinct_distances_per_row: list
    split_distances: list  # distances whose positions carry more than one value in a row
    coarse_pattern_error: str | None = None
    matched: dict = field(default_factory=dict)


def analyze_fig1(code: BinaryLinearCode, nbar: float = FIG1_NBAR, check_coarse: bool = True) -> Fig1Analysis:
    """Solve the BPSK-modulated ``code`` with the pair-orbit pattern of its Gram automorphisms."""
    cb = bpsk_codebook(code, math.sqrt(nbar))
    g = gram(cb)
    D = code.distance_matrix
    G = gram_automorphism_group(g)
    pattern = SymmetryPattern.from_group(G)
    sol = symmetry_reduced_solve(g, pattern, cb.priors)
    amp = np.real_if_close(sol.amplitudes)
    row = amp[0]
    vals = [row[0]] + sorted({round(float(x), 10) for x in np.delete(row, 0)}, reverse=True)
    split = sorted(
        int(d) for d in set(D[0].tolist())
        if len({round(float(row[j]), 8) for j in range(len(row)) if D[0, j] == d}) > 1
    )
    coarse = None
    if check_coarse:
        try:
            symmetry_reduced_solve(g, SymmetryPattern.from_gram_entries(g), cb.priors)
        except (PatternTooCoarse, SolveFailed) as exc:
            coarse = f"{type(exc).__name__}: {exc}"
    return Fig1Analysis(
        code=code,
        nbar=nbar,
        distance_matrix=D,
        automorphism_order=G.order,
        pattern=pattern,
        solution=sol,
        row_values=np.array(vals, dtype=float),
        distinct_values_per_row=_distinct_per_row(amp),
        distinct_distances_per_row=[len(set(r.tolist())) for r in D],
        split_distances=split,
        coarse_pattern_error=coarse,
    )


def _match_values(row_values, targets=FIG1_VALUES, tol=FIG1_TOL) -> dict | None:
    if len(row_values) != len(targets):
        return None
    diag, rest = row_values[0], sorted(row_values[1:])
    want_rest = sorted(v for k, v in targets.items() if k != "a")
    if abs(diag - targets["a"]) > tol or any(abs(x - y) > tol for x, y in zip(rest, want_rest)):
        return None
    out = {"a": float(diag)}
    for key, want in targets.items():
        if key != "a":
            out[key] = float(min(rest, key=lambda x: abs(x - want)))
    return out


def _subcodes(parent: BinaryLinearCode, dim: int):
    words = [int("".join(map(str, w)), 2) for w in parent.codewords if w.any()]
    seen = set()
    for basis in itertools.combinations(words, dim):
        span = {0}
        for b in basis:
            span |= {x ^ b for x in span}
        if len(span) != 2**dim:
            continue
        key = frozenset(span)
        if key in seen:
            continue
        seen.add(key)
        yield basis, sorted(span)


def find_fig1_subcode(nbar: float = FIG1_NBAR, targets=FIG1_VALUES, tol: float = FIG1_TOL) -> Fig1Analysis:
    """Search the 3-dimensional subcodes of RM(2, 3) for the quoted solution values.

    Every subcode is screened with the square root of its Gram matrix (the
    solution for a linear code, whose translations act transitively); the
    first screened candidate is then confirmed with the pair-orbit symmetry
    solver.  Raises :class:`SolveFailed` if nothing matches.
    """
    parent = rm_code(2, 3)
    N = parent.length
    sigma = math.exp(-2 * nbar)
    checked = 0
    for basis, span in _subcodes(parent, 3):
        checked += 1
        D = np.array([[bin(x ^ y).count("1") for y in span] for x in span])
        root = matfun.psd_sqrt(sigma**D.astype(float)).real * math.sqrt(len(span))
        row = root[0] / math.sqrt(len(span))
        screened = [row[0]] + sorted({round(float(x), 10) for x in row[1:]}, reverse=True)
        if _match_values(np.array(screened), targets, tol) is None:
            continue
        gens = np.array([[int(c) for c in format(b, f"0{N}b")] for b in basis], dtype=np.uint8)
        analysis = analyze_fig1(BinaryLinearCode(gens), nbar)
        matched = _match_values(analysis.row_values, targets, tol)
        if matched is not None:
            analysis.matched = {"values": matched, "subcodes_checked": checked}
            return analysis
        log.warning("screened subcode %s failed confirmation", basis)
    raise SolveFailed(f"no 3-dimensional subcode of RM(2,3) reproduces {targets} within {tol}",
                      {"subcodes_checked": checked})
