"""Acceptance criteria 1-9, each at its stated tolerance and runtime limit.

Every test records one line in ``RESULTS``; ``conftest.py`` prints them in
the pytest terminal summary. Running this file directly prints the same lines.
"""

import math
import time

import numpy as np
import pytest

import oracles
from conftest import random_triples
from qpcalc.extremal import refine_minimum, scan_bounds, trine_config
from qpcalc.errors import DegenerateOverlap
from qpcalc.hilbert import (
    Seed,
    complement,
    computational_basis,
    fourier_basis,
    pvm_from_basis,
    random_density,
    random_projector,
    random_unitary,
)
from qpcalc.measurement import luders_map, phase_rotate, probability, wigner_joint
from qpcalc.quasiprob import disturbance, kd, kd_imag_via_phase, kd_table, mh, mh_via_disturbance
from qpcalc.reconstruct import completeness_check, parameter_count_demo, reconstruct_state
from qpcalc.simulate import (
    PointerModel,
    estimate_disturbance,
    pointer_correlation_exact,
    sample_projective_sequence,
    sample_weak_pointer,
)

ACCEPTANCE_SEED = 20_061_007
TRIALS = 1000
RESULTS: dict[int, str] = {}


def record(number, ok, detail, elapsed, limit):
    ok = ok and elapsed < limit
    RESULTS[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}  [{elapsed:.1f} s, limit {limit} s]"
    print(RESULTS[number])
    return ok


def test_criterion_1_trine_minimum():
    t0 = time.perf_counter()
    err = abs(trine_config().value + 0.125)
    assert record(1, err <= 1e-12, f"|trine + 1/8| = {err:.1e}", time.perf_counter() - t0, 1)


def test_criterion_2_bound_scan_and_refinement():
    t0 = time.perf_counter()
    ok, parts = True, []
    for d in (2, 3):
        rep = scan_bounds(d, 100_000, Seed(ACCEPTANCE_SEED, d), tol=np.inf)
        lo, hi = rep.min_config.value, rep.max_config.value
        ok &= lo >= -0.125 - 1e-10 and hi <= 1 + 1e-10
        parts.append(f"d={d} range [{lo:.5f}, {hi:.5f}]")
    finals = []
    for k in range(10):
        start = scan_bounds(2, 1, Seed(ACCEPTANCE_SEED, 100 + k)).min_config
        finals.append(refine_minimum(start, 100_000, Seed(ACCEPTANCE_SEED, 200 + k)).value)
    ok &= max(finals) <= -0.124
    parts.append(f"worst refined {max(finals):.6f}")
    assert record(2, ok, "; ".join(parts), time.perf_counter() - t0, 60)


def all_triples():
    for d in (2, 3, 4, 5):
        yield from random_triples(d, TRIALS, seed=ACCEPTANCE_SEED)


def test_criterion_3_identity_of_forms():
    t0 = time.perf_counter()
    worst = max(abs(mh(r, a, b) - mh_via_disturbance(r, a, b)) for r, a, b in all_triples())
    assert record(3, worst <= 1e-12, f"max |mh - mh_via_disturbance| = {worst:.1e}", time.perf_counter() - t0, 30)


def condition_errors(rho, a, b):
    at, bt = complement(a), complement(b)
    lam = luders_map(rho, a)
    seq = wigner_joint(rho, a, b)
    p_a, p_b = probability(rho, a), probability(rho, b)
    g = kd(rho, a, b)
    return {
        "marginality": max(
            abs(mh(rho, a, b) + mh(rho, a, bt) - p_a),
            abs(mh(rho, a, b) + mh(rho, at, b) - p_b),
        ),
        "condition 2": abs(mh(lam, a, b) - seq),
        "condition 3": abs(disturbance(rho, a, b) - disturbance(rho, at, b)),
        "condition 4": abs(kd(lam, a, b).imag),
        "condition 5": max(
            abs((g + kd(rho, a, bt)).imag), abs((g + kd(rho, at, b)).imag),
            abs(g + kd(rho, a, bt) - p_a), abs(g + kd(rho, at, b) - p_b),
        ),
        "disturbance marginal": abs(
            disturbance(rho, a, b) + disturbance(rho, at, b) - (p_b - probability(lam, b))
        ),
        "post-Lüders chain": max(
            abs(wigner_joint(lam, b, a) + disturbance(lam, b, a) - seq),
            abs(wigner_joint(lam, bt, a) + disturbance(lam, bt, a) - (p_a - seq)),
            abs(disturbance(lam, bt, a) - disturbance(lam, b, a)),
        ),
        "conjugation": abs(kd(rho, b, a) - np.conj(g)),
        "imaginary via phase": abs(g.imag - kd_imag_via_phase(rho, a, b)),
    }


def test_criterion_4_conditions_suite():
    t0 = time.perf_counter()
    worst: dict[str, float] = {}
    for r, a, b in all_triples():
        for name, err in condition_errors(r, a, b).items():
            worst[name] = max(worst.get(name, 0.0), err)
    bad = [k for k, v in worst.items() if v > 1e-12]
    detail = f"max error {max(worst.values()):.1e} over {len(worst)} identities" + (f"; failing: {bad}" if bad else "")
    assert record(4, not bad, detail, time.perf_counter() - t0, 60)


def test_criterion_5_classical_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng([ACCEPTANCE_SEED, 5])
    worst = 0.0
    for k in range(TRIALS):
        d = int(rng.integers(2, 6))
        rho = random_density(d, "mixed", Seed(ACCEPTANCE_SEED, 5000 + 3 * k))
        a = random_projector(d, int(rng.integers(1, d)), Seed(ACCEPTANCE_SEED, 5001 + 3 * k))
        b = random_projector(d, int(rng.integers(1, d)), Seed(ACCEPTANCE_SEED, 5002 + 3 * k))
        phi = rng.uniform(0, 2 * np.pi)
        rot = phase_rotate(rho, a, phi)
        lam = luders_map(rho, a).matrix
        worst = max(
            worst,
            float(np.max(np.abs(luders_map(rot, a).matrix - lam))),
            abs(wigner_joint(rot, a, b) - wigner_joint(rho, a, b)),
            float(np.max(np.abs(lam - 0.5 * (rho.matrix + phase_rotate(rho, a, np.pi).matrix)))),
        )
    assert record(5, worst <= 1e-12, f"max deviation {worst:.1e}", time.perf_counter() - t0, 10)


def shared_element_pair(d, seed):
    basis = random_unitary(d, seed).T
    other = basis.copy()
    # keep basis[0], mix the rest with a random unitary on the complement
    u = random_unitary(d - 1, seed.child(1)) if d > 2 else np.array([[np.exp(0.3j)]])
    other[1:] = u @ basis[1:]
    return pvm_from_basis(basis), pvm_from_basis(other)


def test_criterion_6_reconstruction_round_trip():
    t0 = time.perf_counter()
    worst, rejected, pairs = 0.0, 0, 0
    for d in (2, 3, 4):
        u = random_unitary(d, Seed(ACCEPTANCE_SEED, 600 + d))
        pa = pvm_from_basis(computational_basis(d) @ u.T)
        pb = pvm_from_basis(fourier_basis(d) @ u.T)
        for k in range(TRIALS):
            purity = "pure" if k % 2 else "mixed"
            rho = random_density(d, purity, Seed(ACCEPTANCE_SEED, 10_000 * d + k))
            out = reconstruct_state(kd_table(rho, pa, pb), pa, pb)
            worst = max(worst, float(np.max(np.abs(out.matrix - rho.matrix))))
        for k in range(100):
            sa, sb = shared_element_pair(d, Seed(ACCEPTANCE_SEED, 20_000 * d + k))
            pairs += 1
            try:
                completeness_check(sa, sb)
            except DegenerateOverlap:
                rejected += 1
    ok = worst <= 1e-9 and rejected == pairs
    detail = f"max entry error {worst:.1e}; shared-element pairs rejected {rejected}/{pairs}"
    assert record(6, ok, detail, time.perf_counter() - t0, 30)


def test_criterion_7_real_part_witness():
    t0 = time.perf_counter()
    rep = parameter_count_demo(2, Seed(ACCEPTANCE_SEED))
    # recompute both tables with the loop oracle
    pa, pb = rep.mh_a.pvm_a, rep.mh_a.pvm_b

    def g(m):
        return np.array([[oracles.trace(oracles.chain(m, x.matrix, y.matrix)) for y in pb] for x in pa])

    ga, gb = g(rep.rho.matrix), g(rep.sigma.matrix)
    mh_diff = float(np.max(np.abs(ga.real - gb.real)))
    kd_diff = float(np.max(np.abs(ga - gb)))
    ok = mh_diff <= 1e-10 and kd_diff >= 1e-3
    assert record(7, ok, f"mh diff {mh_diff:.1e}, kd diff {kd_diff:.3f}", time.perf_counter() - t0, 10)


def qubit_example():
    zero, plus = oracles.ket(1, 0), oracles.ket(1, 1)
    return oracles.outer(zero), oracles.outer(plus), oracles.outer(zero)


def test_criterion_8_monte_carlo():
    t0 = time.perf_counter()
    n = 1_000_000
    configs = [qubit_example()] + [tuple(x.matrix for x in t) for t in random_triples(3, 2, seed=ACCEPTANCE_SEED)]
    zs = []
    for k, (rho, a, b) in enumerate(configs):
        seq = sample_projective_sequence(rho, a, b, n, Seed(ACCEPTANCE_SEED, 800 + k))
        p = seq.exact["p_yy"]
        binomial_se = math.sqrt(p * (1 - p) / n)
        diff = seq.estimates["p_yy"] - p
        zs.append(abs(diff) / binomial_se if binomial_se else (0.0 if diff == 0 else math.inf))
        dist = estimate_disturbance(rho, a, b, n, Seed(ACCEPTANCE_SEED, 900 + k))
        zs.append(abs(dist.z_score("disturbance")))
    ok = max(zs) <= 4
    assert record(8, ok, f"max |z| = {max(zs):.2f} over {len(zs)} checks", time.perf_counter() - t0, 60)


def test_criterion_9_pointer_model():
    t0 = time.perf_counter()
    configs = [tuple(x.matrix for x in t) for t in random_triples(2, 5, seed=ACCEPTANCE_SEED + 9)]
    quad_err = 0.0
    for (rho, a, b), sigma in zip(configs, (0.2, 0.5, 1.0, 2.0, 5.0)):
        exact = pointer_correlation_exact(rho, a, b, PointerModel(sigma))
        quad_err = max(quad_err, abs(exact - oracles.pointer_correlation_quadrature(rho, a, b, sigma)))
    limit_err = 0.0
    for rho, a, b in configs:
        limit_err = max(
            limit_err,
            abs(pointer_correlation_exact(rho, a, b, PointerModel(1e3)) - mh(rho, a, b)),
            abs(pointer_correlation_exact(rho, a, b, PointerModel(1e-3)) - wigner_joint(rho, a, b)),
        )
    zs = []
    for k, sigma in enumerate((0.2, 1.0, 5.0)):
        for j, (rho, a, b) in enumerate([qubit_example(), configs[0]]):
            rep = sample_weak_pointer(rho, a, b, PointerModel(sigma), 1_000_000, Seed(ACCEPTANCE_SEED, 990 + 10 * k + j))
            zs.append(abs(rep.z_score("x_times_b_yes")))
    ok = quad_err <= 1e-6 and limit_err <= 1e-6 and max(zs) <= 4
    detail = f"quadrature {quad_err:.1e}, limits {limit_err:.1e}, sampler max |z| {max(zs):.2f}"
    assert record(9, ok, detail, time.perf_counter() - t0, 120)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
