"""Dense Hermitian linear algebra: spectra, PSD square roots, polar decomposition."""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError, NotPSD, SingularMatrix

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def as_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate ``a`` as a square Hermitian matrix and return it exactly symmetrized."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    scale = max(1.0, max_abs(a))
    if max_abs(a - a.conj().T) > tol * scale:
        raise ValueError("matrix is not Hermitian")
    return 0.5 * (a + a.conj().T)


def _fix_phases(q: np.ndarray) -> np.ndarray:
    # make the largest-magnitude component of each eigenvector real positive
    idx = np.argmax(np.abs(q), axis=0)
    pivots = q[idx, np.arange(q.shape[1])]
    return q * (np.abs(pivots) / pivots)[None, :]


def spectral(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition ``a = Q diag(w) Q^H`` with eigenvalues in descending order."""
    a = as_hermitian(a)
    try:
        w, q = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceError(f"Hermitian eigensolver failed: {exc}") from exc
    w, q = w[::-1], q[:, ::-1]
    q = _fix_phases(q)
    resid = max_abs(a @ q - q * w[None, :])
    if resid > 1e-10 * max(1.0, max_abs(a)):
        raise ConvergenceError(f"eigen-decomposition residual {resid:.3e}")
    return w, q


def min_eig(a) -> float:
    return float(np.linalg.eigvalsh(as_hermitian(a))[0])


def is_psd(a, tol: float = 0.0) -> bool:
    return min_eig(a) >= -tol


def psd_sqrt(a, tol: float = PSD_TOL) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues in ``[-tol * max|a|, 0)`` are clamped to zero; anything more
    negative raises :class:`NotPSD`.
    """
    w, q = spectral(a)
    scale = max(1.0, max_abs(a))
    if w[-1] < -tol * scale:
        raise NotPSD(f"minimum eigenvalue {w[-1]:.3e} below -{tol:g}")
    r = (q * np.sqrt(np.clip(w, 0.0, None))[None, :]) @ q.conj().T
    return 0.5 * (r + r.conj().T)


def psd_inv_sqrt(a, cond_tol: float = 1e-10) -> np.ndarray:
    """Inverse square root of a positive definite matrix."""
    w, q = spectral(a)
    if w[-1] <= cond_tol * w[0]:
        raise SingularMatrix(f"matrix is singular to working precision (eigenvalues {w[-1]:.3e}/{w[0]:.3e})")
    r = (q / np.sqrt(w)[None, :]) @ q.conj().T
    return 0.5 * (r + r.conj().T)


def polar(m) -> tuple[np.ndarray, np.ndarray]:
    """Right polar decomposition ``m = U P`` of an invertible square matrix."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"polar decomposition needs a square matrix, got {m.shape}")
    s = np.linalg.svd(m, compute_uv=False)
    if s[-1] <= 1e-12 * s[0]:
        raise SingularMatrix(f"smallest singular value {s[-1]:.3e} relative to {s[0]:.3e}")
    p = psd_sqrt(m.conj().T @ m)
    u = m @ np.linalg.inv(p)
    # one Newton-Schulz style polish keeps U unitary to roundoff
    u = 0.5 * (u + np.linalg.inv(u).conj().T)
    return u, p


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))[None, :]
