"""Projective-measurement primitives.

All functions accept validated wrapper types or raw square arrays and are
pure. Outputs that are states come back as :class:`DensityMatrix` built
through the trusted constructor: they are valid whenever the inputs were.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NonRealTrace, ProbabilityOutOfRange, ZeroProbabilityBranch
from .hilbert import DEFAULT_TOL, DensityMatrix, _check_dims, as_matrix

BRANCH_EPS = 1e-12
IMAG_TOL = 1e-9

__all__ = [
    "BRANCH_EPS",
    "probability",
    "collapse_yes",
    "luders_map",
    "wigner_joint",
    "phase_rotate",
    "selective_phase_unitary",
    "canonical_phase",
    "is_undisturbed",
]


def _trace_product(a: np.ndarray, b: np.ndarray) -> complex:
    """Tr(a b) without forming the product."""
    return complex(np.einsum("ij,ji->", a, b))


def _as_probability(raw: complex, tol: float, what: str) -> float:
    if abs(raw.imag) > IMAG_TOL:
        raise NonRealTrace(f"{what} has imaginary part {raw.imag:.3e}", value=raw.imag)
    p = raw.real
    if p < -tol or p > 1.0 + tol:
        raise ProbabilityOutOfRange(f"{what} = {p!r} lies outside [0, 1]", value=p)
    return min(max(p, 0.0), 1.0)


def probability(rho, a, tol: float = DEFAULT_TOL) -> float:
    """Probability ``Tr(rho a)`` of a yes outcome, clamped to [0, 1]."""
    r, p = as_matrix(rho), as_matrix(a)
    _check_dims(r, p)
    return _as_probability(_trace_product(r, p), tol, "Tr(rho a)")


def collapse_yes(rho, a, eps: float = BRANCH_EPS) -> DensityMatrix:
    """Selective post-measurement state ``a rho a / Tr(rho a)``."""
    r, p = as_matrix(rho), as_matrix(a)
    _check_dims(r, p)
    prob = _trace_product(r, p).real
    if prob <= eps:
        raise ZeroProbabilityBranch(f"yes branch has probability {prob:.3e}", value=prob)
    out = p @ r @ p / prob
    return DensityMatrix(0.5 * (out + out.conj().T))


def luders_map(rho, a) -> DensityMatrix:
    """Nonselective Lüders update ``a rho a + (1-a) rho (1-a)``."""
    r, p = as_matrix(rho), as_matrix(a)
    d = _check_dims(r, p)
    q = np.eye(d) - p
    return DensityMatrix(p @ r @ p + q @ r @ q)


def wigner_joint(rho, a, b, tol: float = DEFAULT_TOL) -> float:
    """Sequential yes-yes probability ``Tr(rho a b a)`` (a measured first)."""
    r, pa, pb = as_matrix(rho), as_matrix(a), as_matrix(b)
    _check_dims(r, pa, pb)
    return _as_probability(_trace_product(pa @ r @ pa, pb), tol, "Tr(rho a b a)")


def canonical_phase(phi: float) -> float:
    """Representative of ``phi`` in [0, 2 pi)."""
    if not math.isfinite(phi):
        raise ValueError(f"phase must be finite, got {phi}")
    return math.fmod(math.fmod(phi, 2 * math.pi) + 2 * math.pi, 2 * math.pi)


def selective_phase_unitary(a, phi: float) -> np.ndarray:
    """``exp(i phi a) = 1 + (e^{i phi} - 1) a``, exact for a projector."""
    p = as_matrix(a)
    if not math.isfinite(phi):
        raise ValueError(f"phase must be finite, got {phi}")
    return np.eye(p.shape[0], dtype=np.complex128) + (np.exp(1j * phi) - 1.0) * p


def phase_rotate(rho, a, phi: float) -> DensityMatrix:
    r, p = as_matrix(rho), as_matrix(a)
    _check_dims(r, p)
    u = selective_phase_unitary(p, phi)
    return DensityMatrix(u @ r @ u.conj().T)


def is_undisturbed(sigma, a, tol: float = DEFAULT_TOL) -> bool:
    s = as_matrix(sigma)
    after = luders_map(s, a).matrix
    return float(np.max(np.abs(after - s))) <= tol
