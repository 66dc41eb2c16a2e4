"""Error probabilities of conventional receivers for the example constellations."""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, special

from .errors import ConvergenceError

HOMODYNE_SIGMA = 0.5


def _check(N: int, nbar: float, min_N: int = 2):
    if N < min_N:
        raise ValueError(f"need N >= {min_N}, got {N}")
    if not nbar >= 0:
        raise ValueError(f"need nbar >= 0, got {nbar}")


def ppm_pnr_pe(N: int, nbar: float) -> float:
    """Direct detection of N-ary PPM: an error needs zero clicks and a wrong guess."""
    _check(N, nbar)
    return (N - 1) / N * math.exp(-nbar)


def two_pulse_pnr_ps(N: int, nbar: float) -> float:
    """Direct detection of two-pulse PPM with ``nbar`` photons per pulse."""
    _check(N, nbar, 4)
    k2 = math.exp(-nbar)
    return (1 - k2) ** 2 + 2 * (1 - k2) * k2 / (N - 1) + k2**2 / math.comb(N, 2)


def _folded_normal_pdf(x, mean, sigma=HOMODYNE_SIGMA):
    c = 1.0 / (sigma * math.sqrt(2 * math.pi))
    return c * (np.exp(-((x - mean) ** 2) / (2 * sigma**2)) + np.exp(-((x + mean) ** 2) / (2 * sigma**2)))


def _quad(f, a, b, epsabs, points=None):
    val, err, info = integrate.quad(f, a, b, epsabs=epsabs, epsrel=0.0, limit=200, points=points, full_output=1)[:3]
    if err > 10 * epsabs:
        raise ConvergenceError(f"quadrature error estimate {err:.2e} exceeds tolerance {epsabs:.1e}")
    return val


def pcppm_homodyne_ps(N: int, nbar: float) -> float:
    """Homodyne detection of phase-coded PPM.

    The pulse slot is taken as the one with the largest absolute homodyne
    output and its phase from the sign of that output; the two decisions are
    treated as independent.
    """
    _check(N, nbar)
    mean = math.sqrt(nbar)
    s = HOMODYNE_SIGMA

    def integrand(x):
        return _folded_normal_pdf(x, mean) * special.erf(x / (s * math.sqrt(2))) ** (N - 1)

    # beyond mean + 9 sigma the folded density is below 1e-17 of its peak
    upper = mean + 9 * s
    slot = _quad(integrand, 0.0, upper, 1e-10, points=[mean] if mean > 0 else None)
    return slot * (1 - 0.5 * special.erfc(math.sqrt(2 * nbar)))


def pcppm_structured_pe(N: int, nbar: float) -> float:
    """Photon counting until the first click, then a Dolinar receiver on the rest of the pulse.

    With ``p0 = exp(-nbar)`` and ``x = exp(-nbar t)`` for a first click at
    fraction ``t`` of the slot, the remaining pulse holds ``-ln(p0/x)``
    photons, so

        P_e = p0 (2N-1)/(2N) + (1-p0)/2 - 1/2 int_{p0}^1 sqrt(1 - (p0/x)^4) dx.
    """
    _check(N, nbar)
    p0 = math.exp(-nbar)
    if p0 == 1.0:
        return (2 * N - 1) / (2 * N)

    def integrand(x):
        return math.sqrt(max(0.0, 1.0 - (p0 / x) ** 4))

    # sqrt singularity in the derivative at x = p0; isolate it in its own piece
    mid = min(1.0, 2 * p0)
    total = _quad(integrand, p0, mid, 1e-12)
    if mid < 1.0:
        total += _quad(integrand, mid, 1.0, 1e-12)
    return p0 * (2 * N - 1) / (2 * N) + (1 - p0) / 2 - 0.5 * total


def dolinar_binary_pe(nb: float) -> float:
    """Helstrom error for ``|beta>`` versus ``|-beta>`` with ``|beta|^2 = nb``."""
    if not nb >= 0:
        raise ValueError(f"need nb >= 0, got {nb}")
    s = math.exp(-2 * nb)
    return 0.5 * s * s / (1 + math.sqrt(1 - s * s))
