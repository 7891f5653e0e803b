"""Validated finite-dimensional operator types and seeded random generation.

Matrices are plain ``complex128`` numpy arrays. The wrapper types
(:class:`DensityMatrix`, :class:`Projector`, :class:`Pvm`) hold read-only
copies, so instances can be shared freely between threads. Constructing a
wrapper directly does *not* validate; use the ``validate_*`` factories for
untrusted input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    NonFinite,
    NotComplete,
    NotHermitian,
    NotIdempotent,
    NotOrthogonal,
    NotOrthonormal,
    NotPositive,
    NotRankOne,
    NotSquare,
    NotUnitTrace,
)

DEFAULT_TOL = 1e-9

__all__ = [
    "DEFAULT_TOL",
    "Seed",
    "DensityMatrix",
    "Projector",
    "Pvm",
    "as_matrix",
    "as_seed",
    "validate_density",
    "validate_projector",
    "validate_pvm",
    "complement",
    "pvm_from_basis",
    "computational_basis",
    "fourier_basis",
    "hadamard_basis",
    "ket_projector",
    "random_density",
    "random_unitary",
    "random_projector",
    "random_pvm",
    "hs_inner",
]


def _frozen(a) -> np.ndarray:
    out = np.array(a, dtype=np.complex128, copy=True)
    out.setflags(write=False)
    return out


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite square complex matrix (no copy if already one)."""
    if hasattr(m, "matrix"):
        m = m.matrix
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise NotSquare(f"expected a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite("matrix has NaN or infinite entries")
    return arr


def _check_dims(*mats: np.ndarray) -> int:
    d = mats[0].shape[0]
    for m in mats[1:]:
        if m.shape[0] != d:
            raise DimensionMismatch(
                f"dimension mismatch: {d} vs {m.shape[0]}", dims=[x.shape[0] for x in mats]
            )
    return d


def _max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


# -- seeds -------------------------------------------------------------------


@dataclass(frozen=True)
class Seed:
    """Seed for a reproducible random stream.

    ``stream`` separates parallel shards: identical ``(value, stream)`` pairs
    give identical sequences, distinct streams give independent ones.
    """

    value: int
    stream: int = 0

    def __post_init__(self) -> None:
        if not 0 <= int(self.value) < 2**64:
            raise ValueError(f"seed value must be a 64-bit unsigned integer, got {self.value}")
        if int(self.stream) < 0:
            raise ValueError(f"stream id must be non-negative, got {self.stream}")

    def rng(self, shard: int | None = None) -> np.random.Generator:
        """Generator for this stream, or for sub-shard ``shard`` of it."""
        key = (int(self.stream),) if shard is None else (int(self.stream), int(shard))
        ss = np.random.SeedSequence(entropy=int(self.value), spawn_key=key)
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, stream: int) -> "Seed":
        return Seed(self.value, stream)

    def to_dict(self) -> dict:
        return {"value": int(self.value), "stream": int(self.stream)}


def as_seed(seed: "Seed | int | dict") -> Seed:
    if isinstance(seed, Seed):
        return seed
    if isinstance(seed, dict):
        return Seed(int(seed["value"]), int(seed.get("stream", 0)))
    return Seed(int(seed))


# -- domain types ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", _frozen(self.matrix))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True, eq=False)
class Projector:
    matrix: np.ndarray
    rank: int
    tol: float = DEFAULT_TOL
    _complement: "Projector | None" = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", _frozen(self.matrix))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def complement(self) -> "Projector":
        """``1 - P``; the complement of the complement is this same object."""
        if self._complement is None:
            comp = Projector(
                np.eye(self.dim) - self.matrix, self.dim - self.rank, self.tol, _complement=self
            )
            object.__setattr__(self, "_complement", comp)
        return self._complement

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True, eq=False)
class Pvm:
    elements: tuple[Projector, ...]
    rank_one: bool = False
    tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))

    @property
    def dim(self) -> int:
        return self.elements[0].dim

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i: int) -> Projector:
        return self.elements[i]


# -- validators --------------------------------------------------------------


def validate_density(m, tol: float = DEFAULT_TOL) -> DensityMatrix:
    """Check Hermiticity, then unit trace, then positivity (in that order)."""
    a = as_matrix(m)
    herm = _max_abs(a - a.conj().T)
    if herm > tol:
        raise NotHermitian(f"max|M - M^dagger| = {herm:.3e} exceeds tol {tol:.1e}", value=herm)
    tr = complex(np.trace(a))
    dev = abs(tr - 1.0)
    if dev > tol:
        raise NotUnitTrace(f"|Tr M - 1| = {dev:.3e} exceeds tol {tol:.1e}", value=dev)
    lam_min = float(np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0])
    if lam_min < -tol:
        raise NotPositive(f"smallest eigenvalue {lam_min:.3e} below -tol", value=lam_min)
    return DensityMatrix(a, tol)


def validate_projector(m, tol: float = DEFAULT_TOL) -> Projector:
    a = as_matrix(m)
    herm = _max_abs(a - a.conj().T)
    if herm > tol:
        raise NotHermitian(f"max|M - M^dagger| = {herm:.3e} exceeds tol {tol:.1e}", value=herm)
    idem = _max_abs(a @ a - a)
    if idem > tol:
        raise NotIdempotent(f"max|M^2 - M| = {idem:.3e} exceeds tol {tol:.1e}", value=idem)
    tr = float(np.real(np.trace(a)))
    rank = int(round(tr))
    if abs(tr - rank) > tol:
        raise NotIdempotent(f"trace {tr!r} is not an integer within tol", value=abs(tr - rank))
    return Projector(a, rank, tol)


def complement(p: Projector) -> Projector:
    return p.complement


def validate_pvm(
    projectors: Iterable, tol: float = DEFAULT_TOL, rank_one: bool | None = None
) -> Pvm:
    """Validate a complete set of orthogonal projectors.

    ``rank_one=None`` infers the flag from the element ranks; ``True`` demands it.
    """
    elems = [p if isinstance(p, Projector) else validate_projector(p, tol) for p in projectors]
    if not elems:
        raise NotComplete("empty PVM")
    _check_dims(*(e.matrix for e in elems))
    d = elems[0].dim
    worst = 0.0
    for i, pi in enumerate(elems):
        for pj in elems[i + 1 :]:
            worst = max(worst, _max_abs(pi.matrix @ pj.matrix))
    if worst > tol:
        raise NotOrthogonal(f"max|P_i P_j| = {worst:.3e} exceeds tol", value=worst)
    total = sum(e.matrix for e in elems)
    dev = _max_abs(total - np.eye(d))
    if dev > tol:
        raise NotComplete(f"max|sum P_i - 1| = {dev:.3e} exceeds tol", value=dev)
    all_rank_one = all(e.rank == 1 for e in elems)
    if rank_one and not all_rank_one:
        bad = [e.rank for e in elems if e.rank != 1]
        raise NotRankOne(f"element ranks {bad} are not 1", value=bad[0])
    return Pvm(tuple(elems), all_rank_one if rank_one is None else rank_one, tol)


def pvm_from_basis(vectors: Sequence, tol: float = DEFAULT_TOL) -> Pvm:
    """Rank-one PVM of outer products ``|v_i><v_i|`` of an orthonormal basis."""
    v = np.array([np.asarray(x, dtype=np.complex128) for x in vectors])
    if v.ndim != 2:
        raise NotOrthonormal("basis vectors must share one dimension")
    n, d = v.shape
    if n != d:
        raise NotComplete(f"{n} vectors cannot span dimension {d}", value=n)
    if not np.all(np.isfinite(v)):
        raise NonFinite("basis vector has NaN or infinite entries")
    gram = v.conj() @ v.T
    dev = _max_abs(gram - np.eye(n))
    if dev > tol:
        raise NotOrthonormal(f"max|<v_i|v_j> - delta_ij| = {dev:.3e} exceeds tol", value=dev)
    elems = tuple(Projector(np.outer(x, x.conj()), 1, tol) for x in v)
    return Pvm(elems, True, tol)


def ket_projector(v, tol: float = DEFAULT_TOL) -> Projector:
    """Rank-one projector onto the span of ``v`` (normalized here)."""
    v = np.asarray(v, dtype=np.complex128)
    v = v / np.linalg.norm(v)
    return Projector(np.outer(v, v.conj()), 1, tol)


def computational_basis(d: int) -> np.ndarray:
    return np.eye(d, dtype=np.complex128)


def hadamard_basis() -> np.ndarray:
    return np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)


def fourier_basis(d: int) -> np.ndarray:
    """Rows are the discrete Fourier vectors; unbiased to the computational basis."""
    j, k = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return np.exp(2j * np.pi * j * k / d) / np.sqrt(d)


# -- random generation -------------------------------------------------------


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(d: int, seed: "Seed | int") -> np.ndarray:
    """Haar-random unitary: QR of a Ginibre matrix with the R-diagonal phases fixed."""
    rng = as_seed(seed).rng()
    z = _complex_gaussian(rng, (d, d)) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def random_density(
    d: int, purity: Literal["pure", "mixed"] = "mixed", seed: "Seed | int" = 0
) -> DensityMatrix:
    """Pure: Haar-random ket. Mixed: normalized ``G G^dagger`` with Ginibre ``G``."""
    if d < 1:
        raise ValueError("dimension must be positive")
    rng = as_seed(seed).rng()
    if purity == "pure":
        psi = _complex_gaussian(rng, d)
        psi /= np.linalg.norm(psi)
        rho = np.outer(psi, psi.conj())
    elif purity == "mixed":
        g = _complex_gaussian(rng, (d, d))
        rho = g @ g.conj().T
        rho /= np.real(np.trace(rho))
    else:
        raise ValueError(f"unknown purity {purity!r}")
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho)


def random_projector(d: int, rank: int, seed: "Seed | int") -> Projector:
    if not 0 <= rank <= d:
        raise ValueError(f"rank {rank} outside [0, {d}]")
    u = random_unitary(d, seed)[:, :rank]
    p = u @ u.conj().T
    return Projector(0.5 * (p + p.conj().T), rank)


def random_pvm(d: int, seed: "Seed | int") -> Pvm:
    u = random_unitary(d, seed)
    return pvm_from_basis(u.T)


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product ``Tr(a^dagger b)``."""
    a, b = as_matrix(a), as_matrix(b)
    _check_dims(a, b)
    return complex(np.vdot(a, b))
