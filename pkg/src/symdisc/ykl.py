"""Measurement solutions and the Yuen-Kennedy-Lax optimality check.

All operators live in the ``n``-dimensional span of the codewords, written in
the symmetric (Loewdin) orthonormal basis: the matrix whose columns are
``sqrt(p_i)|psi_i>`` is ``M = sqrt(G_w)`` with ``G_w`` the prior-weighted Gram
matrix.  A projective measurement is a unitary ``W`` whose columns are the
measurement vectors ``|w_i>``; its solution matrix is ``X = W^H M`` with
entries ``x_ij = sqrt(p_j) <w_i|psi_j>``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import matfun
from .coherent import Codebook, weighted_gram
from .errors import LinearDependence, SingularMatrix

DEFAULT_TOL = 1e-8
CONDITION_TOL = 1e-10


def ensemble_gram(ensemble) -> np.ndarray:
    """Weighted Gram of a :class:`Codebook`, or ``ensemble`` itself if it already is one."""
    return weighted_gram(ensemble) if isinstance(ensemble, Codebook) else np.asarray(ensemble)


def state_matrix(ensemble) -> np.ndarray:
    """``M = sqrt(G_w)``: columns are ``sqrt(p_i)|psi_i>`` in the Loewdin basis.

    ``ensemble`` is a :class:`Codebook` or a prior-weighted Gram matrix.
    """
    gw = ensemble_gram(ensemble)
    w = np.linalg.eigvalsh(gw)
    if w[0] <= CONDITION_TOL * w[-1]:
        raise LinearDependence(
            f"weighted Gram is singular to working precision (eigenvalue ratio {w[0] / w[-1]:.3e})"
        )
    return matfun.psd_sqrt(gw)


@dataclass
class MeasurementSolution:
    """A projective measurement together with its performance.

    ``conditionals[i, j]`` is the probability of deciding ``j`` when state
    ``i`` was sent.
    """

    X: np.ndarray
    W: np.ndarray
    priors: np.ndarray
    conditionals: np.ndarray
    P_e: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def P_s(self) -> float:
        return 1.0 - self.P_e

    @property
    def amplitudes(self) -> np.ndarray:
        """``<w_i|psi_j>``: the solution matrix with the prior weights divided out."""
        return self.X / np.sqrt(self.priors)[None, :]

    def to_json(self) -> dict:
        return {
            "P_e": self.P_e,
            "P_s": self.P_s,
            "priors": self.priors.tolist(),
            "X": _encode(self.X),
            "W": _encode(self.W),
            "conditionals": self.conditionals.tolist(),
            "diagnostics": self.diagnostics,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MeasurementSolution":
        return cls(
            X=_decode(obj["X"]),
            W=_decode(obj["W"]),
            priors=np.asarray(obj["priors"], float),
            conditionals=np.asarray(obj["conditionals"], float),
            P_e=float(obj["P_e"]),
            diagnostics=obj.get("diagnostics", {}),
        )


def _encode(a: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(a, complex)]


def _decode(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def save_solution(sol: MeasurementSolution, path) -> None:
    Path(path).write_text(json.dumps(sol.to_json(), indent=1))


def load_solution(path) -> MeasurementSolution:
    return MeasurementSolution.from_json(json.loads(Path(path).read_text()))


def solution_from_x(X, gw, priors, diagnostics=None) -> MeasurementSolution:
    """Complete a solution matrix ``X`` (with ``X^H X = G_w``) into a measurement."""
    X = np.asarray(X, dtype=complex)
    priors = np.asarray(priors, float)
    M = state_matrix(gw)
    W = np.linalg.solve(M, X.conj().T)
    cond = (np.abs(X) ** 2 / priors[None, :]).T
    p_e = float(1.0 - np.sum(np.abs(np.diag(X)) ** 2))
    return MeasurementSolution(X, W, priors, cond, p_e, dict(diagnostics or {}))


def solution_from_basis(ensemble, W, priors=None, diagnostics=None) -> MeasurementSolution:
    """Measurement solution for the basis ``W`` (columns in the Loewdin basis)."""
    W = np.asarray(W, dtype=complex)
    gw = ensemble_gram(ensemble)
    priors = np.diag(gw).real if priors is None else priors
    return solution_from_x(W.conj().T @ state_matrix(gw), gw, priors, diagnostics)


def build_upsilon(ensemble, W, return_asymmetry: bool = False):
    """``Upsilon = sum_i p_i psi_i Pi_i``, symmetrized with its other ordering ``sum_i p_i Pi_i psi_i``."""
    W = np.asarray(W, dtype=complex)
    M = state_matrix(ensemble)
    n = M.shape[0]
    if W.shape != (n, n):
        raise ValueError(f"measurement basis has shape {W.shape}, expected {(n, n)}")
    if matfun.max_abs(W.conj().T @ W - np.eye(n)) > 1e-9:
        raise SingularMatrix("measurement basis is not unitary")
    # sum_i |m_i><m_i|w_i><w_i| with m_i = sqrt(p_i)|psi_i>
    overlaps = np.einsum("ki,ki->i", M.conj(), W)
    left = (M * overlaps[None, :]) @ W.conj().T
    right = left.conj().T
    asym = matfun.max_abs(left - right)
    ups = 0.5 * (left + right)
    return (ups, asym) if return_asymmetry else ups


@dataclass
class YklReport:
    eq1_residual: float
    eq2_residual: float
    upsilon_asymmetry: float
    ineq_min_eig: float
    tol: float
    eq1_pass: bool
    eq2_pass: bool
    ineq_pass: bool

    @property
    def passed(self) -> bool:
        return self.eq1_pass and self.eq2_pass and self.ineq_pass

    def to_json(self) -> dict:
        return {
            "eq1_residual": self.eq1_residual,
            "eq2_residual": self.eq2_residual,
            "upsilon_asymmetry": self.upsilon_asymmetry,
            "ineq_min_eig": self.ineq_min_eig,
            "tol": self.tol,
            "verdict": {"eq1": self.eq1_pass, "eq2": self.eq2_pass, "inequality": self.ineq_pass},
            "pass": self.passed,
        }


def eq2_residual(X) -> float:
    """``max_{k,m} |x_km x*_mm - x_kk x*_mk|``."""
    X = np.asarray(X)
    d = np.diag(X)
    return matfun.max_abs(X * d.conj()[None, :] - d[:, None] * X.conj().T)


def verify(ensemble, sol: MeasurementSolution, tol: float = DEFAULT_TOL) -> YklReport:
    """Check both equality conditions and ``Upsilon - p_i psi_i >= 0`` for every ``i``.

    ``ensemble`` is a :class:`Codebook` or a prior-weighted Gram matrix.
    """
    gw = ensemble_gram(ensemble)
    X = np.asarray(sol.X, dtype=complex)
    r1 = matfun.max_abs(X.conj().T @ X - gw)
    r2 = eq2_residual(X)
    try:
        ups, asym = build_upsilon(gw, sol.W, return_asymmetry=True)
    except SingularMatrix:
        return YklReport(r1, r2, np.inf, -np.inf, tol, r1 <= tol, r2 <= tol, False)
    M = state_matrix(gw)
    worst = np.inf
    for i in range(M.shape[0]):
        m = M[:, i]
        worst = min(worst, matfun.min_eig(ups - np.outer(m, m.conj())))
    return YklReport(r1, r2, asym, float(worst), tol, r1 <= tol, r2 <= tol, worst >= -tol)
