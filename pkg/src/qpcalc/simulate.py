"""Monte-Carlo simulation of two successive measurements.

The first measurement is either projective or a Gaussian pointer coupled
to the projector ``a``; the second is always an ideal projective measurement
of ``b``. Every trial contributes to the reported averages: there is no
post-selection anywhere.

Pointer model. The reading ``x`` has Kraus operator
``M_x = c0(x) (1 - a) + c1(x) a`` with
``c_k(x) = (2 pi s^2)^(-1/4) exp(-(x - k)^2 / (4 s^2))``. Its outcome density is
``p(x) = c0^2 Tr[rho (1-a)] + c1^2 Tr[rho a]`` because the cross terms
``Tr[a rho (1-a)]`` vanish, so ``x`` is sampled exactly by first drawing the
branch ``k`` with probability ``Tr[rho a]`` (k=1) or ``Tr[rho (1-a)]`` (k=0)
and then ``x ~ N(k, s^2)``.

Integrating ``x Tr[b M_x rho M_x^dagger]`` term by term gives the correlation

    E[x 1(b = yes)] = Tr[b a rho a] + exp(-1/(8 s^2)) Re Tr[b a rho (1-a)],

which tends to the sequential (Wigner-rule) probability as ``s -> 0`` and to
the Margenau-Hill value as ``s -> infinity``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ZeroProbabilityBranch
from .hilbert import Seed, _check_dims, as_matrix, as_seed
from .measurement import (
    _trace_product,
    collapse_yes,
    luders_map,
    probability,
    wigner_joint,
)
from .quasiprob import disturbance, mh

Z_THRESHOLD = 4.0

__all__ = [
    "Z_THRESHOLD",
    "PointerModel",
    "SimulationReport",
    "sample_projective_sequence",
    "estimate_disturbance",
    "pointer_correlation_exact",
    "sample_weak_pointer",
]


@dataclass(frozen=True)
class PointerModel:
    sigma: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"pointer spread must be positive and finite, got {self.sigma}")

    @property
    def coherence(self) -> float:
        """Overlap factor ``exp(-1/(8 sigma^2))`` between the two pointer branches."""
        return math.exp(-1.0 / (8.0 * self.sigma**2))


@dataclass(frozen=True, eq=False)
class SimulationReport:
    kind: str
    n: int
    counts: dict[str, int]
    estimates: dict[str, float]
    standard_errors: dict[str, float]
    seed: Seed
    params: dict = field(default_factory=dict)
    exact: dict[str, float] = field(default_factory=dict)

    def z_score(self, name: str) -> float:
        diff = self.estimates[name] - self.exact[name]
        se = self.standard_errors[name]
        if se == 0.0:
            return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
        return diff / se

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "counts": dict(self.counts),
            "estimates": dict(self.estimates),
            "standard_errors": dict(self.standard_errors),
            "exact": dict(self.exact),
            "z_scores": {k: self.z_score(k) for k in self.estimates if k in self.exact},
            "seed": self.seed.to_dict(),
            "params": dict(self.params),
        }


def _shard_sizes(n: int, shards: int) -> list[int]:
    shards = max(1, min(int(shards), n))
    base, extra = divmod(n, shards)
    return [base + (1 if s < extra else 0) for s in range(shards)]


def _run_shards(fn, seed: Seed, n: int, shards: int, workers: int) -> list:
    """Run ``fn(rng, size)`` per shard; results come back in shard order."""
    jobs = [(seed.rng(shard=s), size) for s, size in enumerate(_shard_sizes(n, shards))]
    if workers <= 1 or len(jobs) == 1:
        return [fn(rng, size) for rng, size in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def _indicator_stats(yes: int, n: int) -> tuple[float, float]:
    """Mean and standard error (sample std with ddof=1, over sqrt n) of a 0/1 sample."""
    f = yes / n
    if n < 2:
        return f, 0.0
    var = (yes - n * f * f) / (n - 1)
    return f, math.sqrt(max(var, 0.0) / n)


def _branch_conditionals(r: np.ndarray, pa: np.ndarray, pb: np.ndarray):
    p_first = probability(r, pa)
    comp = np.eye(r.shape[0]) - pa
    cond = []
    for proj in (pa, comp):
        try:
            cond.append(probability(collapse_yes(r, proj), pb))
        except ZeroProbabilityBranch:
            cond.append(0.0)
    return p_first, cond[0], cond[1]


def sample_projective_sequence(
    rho, a, b, n: int, seed: "Seed | int" = 0, *, shards: int = 1, workers: int = 1
) -> SimulationReport:
    """Measure ``a`` then ``b`` projectively ``n`` times and tally the outcomes."""
    r, pa, pb = as_matrix(rho), as_matrix(a), as_matrix(b)
    _check_dims(r, pa, pb)
    if n < 1:
        raise ValueError("need n >= 1")
    seed = as_seed(seed)
    p_first, q_yes, q_no = _branch_conditionals(r, pa, pb)

    def shard(rng, size):
        u1 = rng.random(size)
        u2 = rng.random(size)
        return _kernels.tally_sequence(u1, u2, p_first, q_yes, q_no)

    counts = np.sum(_run_shards(shard, seed, n, shards, workers), axis=0)
    labels = ("yy", "yn", "ny", "nn")
    est, se = {}, {}
    for lab, c in zip(labels, counts):
        est[f"p_{lab}"], se[f"p_{lab}"] = _indicator_stats(int(c), n)
    comp_a, comp_b = np.eye(r.shape[0]) - pa, np.eye(r.shape[0]) - pb
    exact = {
        "p_yy": wigner_joint(r, pa, pb),
        "p_yn": wigner_joint(r, pa, comp_b),
        "p_ny": wigner_joint(r, comp_a, pb),
        "p_nn": wigner_joint(r, comp_a, comp_b),
    }
    return SimulationReport(
        "projective", n, {lab: int(c) for lab, c in zip(labels, counts)}, est, se, seed,
        {"shards": len(_shard_sizes(n, shards)), "p_first_yes": p_first}, exact,
    )


def estimate_disturbance(
    rho, a, b, n: int, seed: "Seed | int" = 0, *, shards: int = 1, workers: int = 1
) -> SimulationReport:
    """Estimate half the shift of the ``b`` frequency caused by a prior nonselective ``a``.

    Two arms of ``n`` trials each: ``b`` measured directly on ``rho``, and
    ``b`` measured after ``a`` (outcome discarded). ``report.n`` counts both arms.
    """
    r, pa, pb = as_matrix(rho), as_matrix(a), as_matrix(b)
    _check_dims(r, pa, pb)
    if n < 1:
        raise ValueError("need n >= 1")
    seed = as_seed(seed)
    p_direct = probability(r, pb)
    p_first, q_yes, q_no = _branch_conditionals(r, pa, pb)

    def shard(rng, size):
        direct_yes = int(np.count_nonzero(rng.random(size) < p_direct))
        c = _kernels.tally_sequence(rng.random(size), rng.random(size), p_first, q_yes, q_no)
        return np.array([direct_yes, c[0] + c[2]], dtype=np.int64)

    direct_yes, after_yes = (int(x) for x in np.sum(_run_shards(shard, seed, n, shards, workers), axis=0))
    f1, s1 = _indicator_stats(direct_yes, n)
    f2, s2 = _indicator_stats(after_yes, n)
    est = {"disturbance": 0.5 * (f1 - f2), "p_b_direct": f1, "p_b_after_a": f2}
    se = {"disturbance": 0.5 * math.sqrt(s1 * s1 + s2 * s2), "p_b_direct": s1, "p_b_after_a": s2}
    exact = {
        "disturbance": disturbance(r, pa, pb),
        "p_b_direct": p_direct,
        "p_b_after_a": probability(luders_map(r, pa), pb),
    }
    counts = {
        "direct_yes": direct_yes,
        "direct_no": n - direct_yes,
        "after_a_yes": after_yes,
        "after_a_no": n - after_yes,
    }
    return SimulationReport(
        "disturbance", 2 * n, counts, est, se, seed,
        {"trials_per_arm": n, "shards": len(_shard_sizes(n, shards))}, exact,
    )


def _pointer_coefficients(r: np.ndarray, pa: np.ndarray, pb: np.ndarray) -> np.ndarray:
    comp = np.eye(r.shape[0]) - pa
    a_yy = _trace_product(pb, pa @ r @ pa).real
    b_nn = _trace_product(pb, comp @ r @ comp).real
    cross = _trace_product(pb, pa @ r @ comp)
    return np.array([a_yy, b_nn, 2.0 * cross.real, _trace_product(r, pa).real, _trace_product(r, comp).real])


def pointer_correlation_exact(rho, a, b, model: PointerModel) -> float:
    """Closed-form ``E[x 1(b = yes)]`` for the Gaussian pointer followed by ``b``."""
    r, pa, pb = as_matrix(rho), as_matrix(a), as_matrix(b)
    d = _check_dims(r, pa, pb)
    comp = np.eye(d) - pa
    sequential = _trace_product(pb, pa @ r @ pa).real
    cross = _trace_product(pb, pa @ r @ comp).real
    return sequential + model.coherence * cross


def sample_weak_pointer(
    rho,
    a,
    b,
    model: PointerModel,
    n: int,
    seed: "Seed | int" = 0,
    *,
    shards: int = 1,
    workers: int = 1,
) -> SimulationReport:
    """Sample (pointer reading, second outcome) pairs and estimate ``E[x 1(b = yes)]``."""
    r, pa, pb = as_matrix(rho), as_matrix(a), as_matrix(b)
    _check_dims(r, pa, pb)
    if n < 1:
        raise ValueError("need n >= 1")
    seed = as_seed(seed)
    coeffs = _pointer_coefficients(r, pa, pb)
    p_yes = min(max(coeffs[3], 0.0), 1.0)
    sigma = float(model.sigma)

    def shard(rng, size):
        branch = rng.random(size) < p_yes
        x = branch + sigma * rng.standard_normal(size)
        outcome = _kernels.weak_pointer_outcomes(x, branch, rng.random(size), coeffs, sigma)
        return x, outcome

    parts = _run_shards(shard, seed, n, shards, workers)
    x = np.concatenate([p[0] for p in parts])
    yes = np.concatenate([p[1] for p in parts])
    corr = x * yes
    ddof = 1 if n > 1 else 0
    est = {
        "x_times_b_yes": float(corr.mean()),
        "x_mean": float(x.mean()),
        "p_b_yes": float(yes.mean()),
    }
    se = {
        "x_times_b_yes": float(corr.std(ddof=ddof) / math.sqrt(n)),
        "x_mean": float(x.std(ddof=ddof) / math.sqrt(n)),
        "p_b_yes": _indicator_stats(int(yes.sum()), n)[1],
    }
    exact = {
        "x_times_b_yes": pointer_correlation_exact(r, pa, pb, model),
        "x_mean": probability(r, pa),
        "p_b_yes": _b_probability_after_pointer(r, pa, pb, model),
    }
    n_yes = int(yes.sum())
    return SimulationReport(
        "weak", n, {"b_yes": n_yes, "b_no": n - n_yes}, est, se, seed,
        {
            "sigma": sigma,
            "shards": len(_shard_sizes(n, shards)),
            "mh": mh(r, pa, pb),
            "wigner_joint": wigner_joint(r, pa, pb),
        },
        exact,
    )


def _b_probability_after_pointer(r, pa, pb, model: PointerModel) -> float:
    """``Tr[b E(rho)]`` for the pointer channel, whose coherences shrink by ``exp(-1/(8 s^2))``."""
    comp = np.eye(r.shape[0]) - pa
    diag = pa @ r @ pa + comp @ r @ comp
    off = pa @ r @ comp + comp @ r @ pa
    coherence = math.exp(-1.0 / (8.0 * model.sigma**2))
    return probability(diag + coherence * off, pb)

