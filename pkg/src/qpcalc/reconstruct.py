"""Density-matrix reconstruction from a Kirkwood-Dirac table.

For rank-one PVMs ``{|a_i><a_i|}`` and ``{|b_j><b_j|}`` the table entries are
``G_ij = <b_j|rho|a_i><a_i|b_j>``, so whenever no overlap vanishes

    rho = sum_ij G_ij / <a_i|b_j> |b_j><a_i|.

The real (Margenau-Hill) part alone does not fix the state;
:func:`parameter_count_demo` exhibits two distinct states with the same real
table.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (
    DegenerateOverlap,
    DimensionMismatch,
    NotRankOne,
    QPCalcError,
    ReconstructionNotPhysical,
    WitnessNotFound,
)
from .hilbert import (
    DensityMatrix,
    Pvm,
    Seed,
    as_seed,
    computational_basis,
    hadamard_basis,
    pvm_from_basis,
    validate_density,
)
from .measurement import phase_rotate
from .quasiprob import QuasiProbTable, kd_table, mh_table

DEFAULT_ETA = 1e-6
CONDITIONING_WARN = 1e-3
RECONSTRUCT_TOL = 1e-8

__all__ = [
    "OverlapMatrix",
    "ConditioningWarning",
    "WitnessReport",
    "basis_vectors",
    "completeness_check",
    "reconstruct_state",
    "parameter_count_demo",
]


class ConditioningWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class OverlapMatrix:
    entries: np.ndarray
    min_abs: float
    argmin: tuple[int, int]

    @property
    def well_conditioned(self) -> bool:
        return self.min_abs >= CONDITIONING_WARN

    def to_dict(self) -> dict:
        return {"min_abs": self.min_abs, "argmin": list(self.argmin), "entries": self.entries}


def basis_vectors(pvm: Pvm) -> np.ndarray:
    """Rows are unit vectors spanning each rank-one element.

    Phase convention: the first component with modulus above 1e-12 is made
    real and positive.
    """
    if not all(p.rank == 1 for p in pvm):
        raise NotRankOne("basis vectors need a rank-one PVM", value=[p.rank for p in pvm])
    rows = []
    for p in pvm:
        _, v = np.linalg.eigh(p.matrix)
        vec = v[:, -1]
        k = int(np.argmax(np.abs(vec) > 1e-12))
        rows.append(vec * (abs(vec[k]) / vec[k]))
    return np.array(rows)


def completeness_check(pa: Pvm, pb: Pvm, eta: float = DEFAULT_ETA) -> OverlapMatrix:
    """Overlaps ``<a_i|b_j>``; fails if any has modulus below ``eta``.

    Nonvanishing overlaps are a sufficient condition for the table inversion
    used here. Pairs sharing an element always fail.
    """
    if pa.dim != pb.dim:
        raise DimensionMismatch(f"PVM dimensions differ: {pa.dim} vs {pb.dim}")
    va, vb = basis_vectors(pa), basis_vectors(pb)
    ov = va.conj() @ vb.T
    unit = max(
        float(np.max(np.abs(np.sum(np.abs(ov) ** 2, axis=1) - 1))),
        float(np.max(np.abs(np.sum(np.abs(ov) ** 2, axis=0) - 1))),
    )
    if unit > 1e-10:
        raise DegenerateOverlap(f"overlap matrix is not unitary (deviation {unit:.3e})", value=unit)
    mags = np.abs(ov)
    i, j = np.unravel_index(int(np.argmin(mags)), mags.shape)
    result = OverlapMatrix(ov, float(mags[i, j]), (int(i), int(j)))
    if result.min_abs < eta:
        raise DegenerateOverlap(
            f"|<a_{i}|b_{j}>| = {result.min_abs:.3e} below eta {eta:.1e}",
            value=result.min_abs, index=[int(i), int(j)],
        )
    return result


def reconstruct_state(table, pa: Pvm, pb: Pvm, eta: float = DEFAULT_ETA) -> DensityMatrix:
    """Invert a Kirkwood-Dirac table over two rank-one PVMs.

    ``table`` is a :class:`QuasiProbTable` of kind ``kirkwood_dirac`` or a raw
    complex array. The estimate is Hermitized before validation at 1e-8,
    which only absorbs machine-precision asymmetry; noisy tables are not
    regularized and fail with :class:`ReconstructionNotPhysical`.
    """
    if isinstance(table, QuasiProbTable):
        if table.kind != "kirkwood_dirac":
            raise ValueError(f"need a kirkwood_dirac table, got {table.kind}")
        g = table.values
    else:
        g = np.asarray(table, dtype=np.complex128)
    d = pa.dim
    if g.shape != (len(pa), len(pb)) or pb.dim != d:
        raise DimensionMismatch(f"table shape {g.shape} does not match the PVMs")
    ov = completeness_check(pa, pb, eta)
    if ov.min_abs < CONDITIONING_WARN:
        warnings.warn(
            f"min overlap {ov.min_abs:.2e}: table errors are amplified by up to {1 / ov.min_abs:.1e}",
            ConditioningWarning,
            stacklevel=2,
        )
    va, vb = basis_vectors(pa), basis_vectors(pb)
    coef = g / ov.entries
    # sum_ij coef_ij |b_j><a_i|
    rho = vb.T @ coef.T @ va.conj()
    rho = 0.5 * (rho + rho.conj().T)
    try:
        return validate_density(rho, RECONSTRUCT_TOL)
    except QPCalcError as exc:
        raise ReconstructionNotPhysical(
            f"reconstructed matrix is not a state: {exc.message}", value=exc.value, cause=exc.error_kind
        ) from exc


# -- real-part incompleteness ------------------------------------------------


@dataclass(frozen=True, eq=False)
class WitnessReport:
    """Two distinct states with equal real tables but different complex tables."""

    rho: DensityMatrix
    sigma: DensityMatrix
    phi: float
    mh_a: QuasiProbTable
    mh_b: QuasiProbTable
    kd_a: QuasiProbTable
    kd_b: QuasiProbTable
    attempts: int

    @property
    def mh_difference(self) -> float:
        return float(np.max(np.abs(self.mh_a.values - self.mh_b.values)))

    @property
    def kd_difference(self) -> float:
        return float(np.max(np.abs(self.kd_a.values - self.kd_b.values)))

    @property
    def state_difference(self) -> float:
        return float(np.max(np.abs(self.rho.matrix - self.sigma.matrix)))

    def to_dict(self) -> dict:
        return {
            "rho": self.rho.matrix,
            "sigma": self.sigma.matrix,
            "phi": self.phi,
            "mh_difference": self.mh_difference,
            "kd_difference": self.kd_difference,
            "state_difference": self.state_difference,
            "mh_table": self.mh_a.values,
            "kd_table_rho": self.kd_a.values,
            "kd_table_sigma": self.kd_b.values,
            "attempts": self.attempts,
        }


def _default_bases(d: int, rng: np.random.Generator) -> tuple[Pvm, Pvm]:
    if d == 2:
        return pvm_from_basis(computational_basis(2)), pvm_from_basis(hadamard_basis())
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    return pvm_from_basis(computational_basis(d)), pvm_from_basis(q.T)


def _candidate_state(d: int, rng: np.random.Generator, anchor) -> np.ndarray:
    # real state carried off the real axis by a random selective phase
    g = rng.standard_normal((d, d))
    real = g @ g.T
    real /= np.trace(real)
    return phase_rotate(real, anchor, rng.uniform(0, 2 * np.pi)).matrix


def parameter_count_demo(
    d: int,
    seed: "Seed | int" = 0,
    *,
    pa: Pvm | None = None,
    pb: Pvm | None = None,
    budget: int = 50,
    grid: int = 1000,
    mh_tol: float = 1e-10,
    kd_gap: float = 1e-3,
) -> WitnessReport:
    """Find two states whose Margenau-Hill tables agree but Kirkwood-Dirac tables differ.

    Candidate pairs are ``rho`` and ``phase_rotate(rho, a_0, phi)`` with
    ``a_0`` the first element of ``pa``. For each random candidate the phase
    is scanned on a ``grid``-point mesh; each sign change of the entry that
    varies most is polished with Brent's method, and the root is accepted if
    every real-table entry matches within ``mh_tol`` while the complex tables
    differ by at least ``kd_gap``. Raises :class:`WitnessNotFound` after
    ``budget`` candidates.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    rng = as_seed(seed).rng()
    if pa is None or pb is None:
        da, db = _default_bases(d, rng)
        pa, pb = pa or da, pb or db
    anchor = pa[0]
    phis = np.linspace(0.0, 2 * np.pi, grid + 1)[1:-1]

    for attempt in range(1, budget + 1):
        rho = _candidate_state(d, rng, anchor)
        base = mh_table(rho, pa, pb).values.real

        def diff(phi: float) -> np.ndarray:
            return mh_table(phase_rotate(rho, anchor, phi), pa, pb).values.real - base

        scan = np.array([diff(p) for p in phis])
        k = int(np.argmax(np.max(np.abs(scan), axis=0).ravel()))
        h = scan.reshape(len(phis), -1)[:, k]
        flips = np.nonzero(np.sign(h[:-1]) * np.sign(h[1:]) < 0)[0]
        for i in flips:
            phi = brentq(lambda p: diff(p).ravel()[k], phis[i], phis[i + 1], xtol=1e-15, rtol=1e-15)
            if np.max(np.abs(diff(phi))) > mh_tol:
                continue
            sigma = phase_rotate(rho, anchor, phi)
            report = WitnessReport(
                DensityMatrix(rho), sigma, float(phi),
                mh_table(rho, pa, pb), mh_table(sigma, pa, pb),
                kd_table(rho, pa, pb), kd_table(sigma, pa, pb),
                attempt,
            )
            if report.kd_difference >= kd_gap:
                return report
    raise WitnessNotFound(
        f"no witness pair among {budget} candidates; try other bases", value=budget
    )
