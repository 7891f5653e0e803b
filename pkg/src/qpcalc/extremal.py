"""Numerical checks of the Margenau-Hill range [-1/8, 1].

Extremes over states are attained at pure states (the value is linear in
rho), so sampling and refinement default to pure states and rank-one
projectors, each described by a unit vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import BoundViolation
from .hilbert import DensityMatrix, Projector, Seed, as_seed
from .quasiprob import mh

LOWER_BOUND = -0.125
UPPER_BOUND = 1.0
BOUND_TOL = 1e-10

__all__ = [
    "LOWER_BOUND",
    "UPPER_BOUND",
    "Configuration",
    "BoundsReport",
    "configuration",
    "configuration_from_vectors",
    "trine_vectors",
    "trine_config",
    "scan_bounds",
    "refine_minimum",
]


@dataclass(frozen=True, eq=False)
class Configuration:
    rho: DensityMatrix
    a: Projector
    b: Projector
    value: float
    vectors: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out = {
            "value": self.value,
            "rho": self.rho.matrix,
            "alpha": self.a.matrix,
            "beta": self.b.matrix,
        }
        if self.vectors is not None:
            out["vectors"] = {"psi": self.vectors[0], "alpha": self.vectors[1], "beta": self.vectors[2]}
        return out


def configuration(rho, a: Projector, b: Projector, vectors=None) -> Configuration:
    rho = rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)
    return Configuration(rho, a, b, mh(rho, a, b), None if vectors is None else np.array(vectors))


def configuration_from_vectors(psi, va, vb) -> Configuration:
    vecs = np.array([psi, va, vb], dtype=np.complex128)
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    rho = DensityMatrix(np.outer(vecs[0], vecs[0].conj()))
    a = Projector(np.outer(vecs[1], vecs[1].conj()), 1)
    b = Projector(np.outer(vecs[2], vecs[2].conj()), 1)
    return configuration(rho, a, b, vecs)


def trine_vectors(offset: float = 0.0) -> np.ndarray:
    """Three real qubit vectors 120 degrees apart, rotated by ``offset``."""
    theta = offset + 2 * np.pi * np.arange(3) / 3
    return np.stack([np.cos(theta), np.sin(theta)], axis=1).astype(np.complex128)


def trine_config(offset: float = 0.0) -> Configuration:
    """Trine preparation and projectors; the Margenau-Hill minimum -1/8."""
    t = trine_vectors(offset)
    return configuration_from_vectors(t[0], t[1], t[2])


def _unit_rows(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    z = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _random_projector_batch(rng: np.random.Generator, n: int, d: int, rank: int) -> np.ndarray:
    z = rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))
    q, _ = np.linalg.qr(z)
    q = q[:, :, :rank]
    return q @ q.conj().transpose(0, 2, 1)


@dataclass(frozen=True, eq=False)
class BoundsReport:
    dim: int
    n_samples: int
    seed: Seed
    min_config: Configuration
    max_config: Configuration
    min_index: int
    max_index: int
    mixed: bool = False
    rank: int = 1
    refined: Configuration | None = None

    def with_refined(self, cfg: Configuration) -> "BoundsReport":
        return BoundsReport(
            self.dim, self.n_samples, self.seed, self.min_config, self.max_config,
            self.min_index, self.max_index, self.mixed, self.rank, cfg,
        )

    def to_dict(self) -> dict:
        out = {
            "dim": self.dim,
            "n_samples": self.n_samples,
            "seed": self.seed.to_dict(),
            "mixed": self.mixed,
            "rank": self.rank,
            "lower_bound": LOWER_BOUND,
            "upper_bound": UPPER_BOUND,
            "min_value": self.min_config.value,
            "max_value": self.max_config.value,
            "min_index": self.min_index,
            "max_index": self.max_index,
            "min_config": self.min_config.to_dict(),
            "max_config": self.max_config.to_dict(),
        }
        if self.refined is not None:
            out["refined_value"] = self.refined.value
            out["refined_config"] = self.refined.to_dict()
        return out


def _sample_shard(rng, n, d, mixed, rank):
    """Values and the raw objects needed to rebuild any sample."""
    if not mixed and rank == 1:
        psi, va, vb = _unit_rows(rng, n, d), _unit_rows(rng, n, d), _unit_rows(rng, n, d)
        return _kernels.mh_rank_one_batch(psi, va, vb), ("vectors", psi, va, vb)
    if mixed:
        g = rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))
        rho = g @ g.conj().transpose(0, 2, 1)
        rho /= np.trace(rho, axis1=1, axis2=2).real[:, None, None]
    else:
        psi = _unit_rows(rng, n, d)
        rho = psi[:, :, None] * psi.conj()[:, None, :]
    a = _random_projector_batch(rng, n, d, rank)
    b = _random_projector_batch(rng, n, d, rank)
    vals = np.einsum("nij,njk,nki->n", rho, a, b).real
    return vals, ("matrices", rho, a, b)


def _rebuild(kind_data, k: int, rank: int) -> Configuration:
    kind, x, y, z = kind_data
    if kind == "vectors":
        return configuration_from_vectors(x[k], y[k], z[k])
    rho = DensityMatrix(0.5 * (x[k] + x[k].conj().T))
    return configuration(rho, Projector(y[k], rank), Projector(z[k], rank))


def scan_bounds(
    d: int,
    n_samples: int,
    seed: "Seed | int" = 0,
    *,
    mixed: bool = False,
    rank: int = 1,
    shards: int = 1,
    include_aligned: bool = False,
    tol: float = BOUND_TOL,
) -> BoundsReport:
    """Sample random triples and report the extreme Margenau-Hill values.

    Shard ``s`` draws from sub-stream ``s`` of ``seed``; the reduction keeps
    the earliest sample among equal values, ordered by (shard, index). With
    ``include_aligned`` the triple rho = a = b = |0><0| is sample 0.

    Raises :class:`BoundViolation` if any value leaves [-1/8, 1] by more than
    ``tol``, which would indicate a bug in the implementation.
    """
    if d < 2 or n_samples < 1:
        raise ValueError("need d >= 2 and n_samples >= 1")
    if not 1 <= rank <= d - 1:
        raise ValueError(f"rank must lie in [1, {d - 1}]")
    seed = as_seed(seed)
    shards = max(1, min(int(shards), n_samples))
    sizes = [len(c) for c in np.array_split(np.arange(n_samples), shards)]

    parts = []
    if include_aligned:
        e0 = np.zeros((1, d), dtype=np.complex128)
        e0[0, 0] = 1.0
        parts.append((_kernels.mh_rank_one_batch(e0, e0, e0), ("vectors", e0, e0, e0), 1))
    for s, size in enumerate(sizes):
        vals, data = _sample_shard(seed.rng(shard=s), size, d, mixed, rank)
        parts.append((vals, data, rank))

    values = np.concatenate([p[0] for p in parts])
    offsets = np.cumsum([0] + [len(p[0]) for p in parts])

    def locate(idx: int) -> Configuration:
        j = int(np.searchsorted(offsets, idx, side="right") - 1)
        vals, data, r = parts[j]
        return _rebuild(data, idx - offsets[j], r)

    i_min, i_max = int(np.argmin(values)), int(np.argmax(values))
    report = BoundsReport(
        d, len(values), seed, locate(i_min), locate(i_max), i_min, i_max, mixed, rank
    )
    if values[i_min] < LOWER_BOUND - tol:
        raise BoundViolation(
            f"sample {i_min} has value {values[i_min]!r} below -1/8",
            value=float(values[i_min]), config=report.min_config.to_dict(),
        )
    if values[i_max] > UPPER_BOUND + tol:
        raise BoundViolation(
            f"sample {i_max} has value {values[i_max]!r} above 1",
            value=float(values[i_max]), config=report.max_config.to_dict(),
        )
    return report


def _dominant_vector(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    vec = v[:, -1]
    k = int(np.argmax(np.abs(vec) > 1e-12))
    return vec * (abs(vec[k]) / vec[k])


def refine_minimum(
    start: Configuration,
    budget: int,
    seed: "Seed | int" = 0,
    *,
    step0: float = 0.3,
    patience: int = 20,
    min_step: float = 1e-8,
    return_trace: bool = False,
):
    """Derivative-free descent from ``start`` toward the minimum.

    Each step moves one of the three generating unit vectors along a random
    tangent direction and keeps the move only if the value drops. The step
    halves after ``patience`` consecutive rejections; the search stops once it
    falls below ``min_step`` or after ``budget`` proposals. The returned value
    never exceeds ``start.value``.

    With ``return_trace`` the accepted-value sequence is returned as well.
    """
    budget = int(budget)
    trace = np.empty(0)
    if budget <= 0:
        return (start, trace) if return_trace else start
    if start.vectors is not None:
        vecs0 = np.array(start.vectors, dtype=np.complex128)
    else:
        vecs0 = np.array([_dominant_vector(m.matrix) for m in (start.rho, start.a, start.b)])
    d = vecs0.shape[1]
    rng = as_seed(seed).rng()
    noise = (rng.standard_normal((budget, d)) + 1j * rng.standard_normal((budget, d))) / np.sqrt(2)
    choice = rng.integers(0, 3, size=budget).astype(np.int64)
    vecs, best, _, trace, _ = _kernels.refine_rank_one(
        vecs0, float(start.value), noise, choice, float(step0), int(patience), float(min_step)
    )
    result = start
    if best < start.value:
        cand = configuration_from_vectors(*vecs)
        if cand.value <= start.value:
            result = cand
    return (result, trace) if return_trace else result
