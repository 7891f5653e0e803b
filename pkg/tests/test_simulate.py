import math

import numpy as np
import pytest
from scipy.integrate import simpson

import oracles
from conftest import random_triples
from qpcalc.hilbert import Seed, random_density, random_projector
from qpcalc.measurement import wigner_joint
from qpcalc.quasiprob import disturbance, mh
from qpcalc.simulate import (
    PointerModel,
    estimate_disturbance,
    pointer_correlation_exact,
    sample_projective_sequence,
    sample_weak_pointer,
)


def qubit_configs(k, seed=50):
    return random_triples(2, k, seed=seed)


class TestPointerModel:
    def test_rejects_bad_sigma(self):
        for s in (0.0, -1.0, float("nan"), float("inf")):
            with pytest.raises(ValueError):
                PointerModel(s)

    def test_coherence(self):
        assert PointerModel(1.0).coherence == pytest.approx(math.exp(-1 / 8))


class TestClosedForm:
    @pytest.mark.parametrize("sigma", [0.2, 0.5, 1.0, 2.0, 5.0])
    def test_matches_quadrature(self, sigma):
        for rho, a, b in qubit_configs(5):
            exact = pointer_correlation_exact(rho, a, b, PointerModel(sigma))
            quad = oracles.pointer_correlation_quadrature(rho.matrix, a.matrix, b.matrix, sigma)
            assert abs(exact - quad) <= 1e-6

    def test_qutrit_quadrature(self):
        for rho, a, b in random_triples(3, 3, seed=51):
            exact = pointer_correlation_exact(rho, a, b, PointerModel(0.8))
            quad = oracles.pointer_correlation_quadrature(rho.matrix, a.matrix, b.matrix, 0.8)
            assert abs(exact - quad) <= 1e-6

    def test_qubit_example(self, qubit_basics):
        rho, a, b = qubit_basics["0"], qubit_basics["+"], qubit_basics["0"]
        q = oracles.identity(2) - a
        seq = oracles.trace(oracles.chain(b, a, rho, a)).real
        cross = oracles.trace(oracles.chain(b, a, rho, q)).real
        assert (seq, cross) == pytest.approx((0.25, 0.25), abs=1e-15)
        expect = 0.25 + math.exp(-1 / 8) * 0.25
        assert pointer_correlation_exact(rho, a, b, PointerModel(1.0)) == pytest.approx(expect, abs=1e-15)
        assert oracles.pointer_correlation_quadrature(rho, a, b, 1.0) == pytest.approx(expect, abs=1e-6)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_limits(self, d):
        for rho, a, b in random_triples(d, 20, seed=52):
            assert abs(pointer_correlation_exact(rho, a, b, PointerModel(1e3)) - mh(rho, a, b)) <= 1e-6
            assert abs(pointer_correlation_exact(rho, a, b, PointerModel(1e-3)) - wigner_joint(rho, a, b)) <= 1e-6

    def test_weak_limit_identity(self):
        # Tr[b a rho a] + Re Tr[b a rho (1-a)] = Re Tr[rho a b]
        for rho, a, b in random_triples(3, 10, seed=53):
            r, pa, pb = rho.matrix, a.matrix, b.matrix
            q = oracles.identity(3) - pa
            lhs = oracles.trace(oracles.chain(pb, pa, r, pa)).real + oracles.trace(oracles.chain(pb, pa, r, q)).real
            assert lhs == pytest.approx(oracles.trace(oracles.chain(r, pa, pb)).real, abs=1e-13)

    def test_channel_coherence_by_quadrature(self):
        sigma = 0.6
        xs = np.linspace(-8 * sigma - 2, 8 * sigma + 3, 10_001)
        norm = (2 * np.pi * sigma**2) ** -0.5
        overlap = simpson(norm * np.exp(-(xs**2 + (xs - 1) ** 2) / (4 * sigma**2)), x=xs)
        assert overlap == pytest.approx(PointerModel(sigma).coherence, abs=1e-9)


class TestProjectiveSampler:
    def test_repeatable_outcomes(self, qubit_basics):
        rep = sample_projective_sequence(qubit_basics["0"], qubit_basics["0"], qubit_basics["0"], 1000, Seed(1))
        assert rep.counts == {"yy": 1000, "yn": 0, "ny": 0, "nn": 0}

    def test_qubit_example(self, qubit_basics):
        rep = sample_projective_sequence(qubit_basics["0"], qubit_basics["+"], qubit_basics["0"], 200_000, Seed(2))
        assert rep.exact["p_yy"] == pytest.approx(0.25, abs=1e-15)
        assert abs(rep.z_score("p_yy")) <= 4
        assert sum(rep.counts.values()) == 200_000

    def test_determinism(self):
        rho, a, b = qubit_configs(1)[0]
        r1 = sample_projective_sequence(rho, a, b, 10_000, Seed(3))
        r2 = sample_projective_sequence(rho, a, b, 10_000, Seed(3))
        assert r1.counts == r2.counts

    def test_workers_do_not_change_results(self):
        rho, a, b = qubit_configs(1)[0]
        r1 = sample_projective_sequence(rho, a, b, 40_000, Seed(4), shards=4, workers=1)
        r2 = sample_projective_sequence(rho, a, b, 40_000, Seed(4), shards=4, workers=4)
        assert r1.counts == r2.counts

    def test_all_estimates_consistent(self):
        for rho, a, b in random_triples(3, 3, seed=54):
            rep = sample_projective_sequence(rho, a, b, 100_000, Seed(5))
            for key in rep.estimates:
                assert abs(rep.z_score(key)) <= 4

    def test_bad_n(self, qubit_basics):
        with pytest.raises(ValueError):
            sample_projective_sequence(qubit_basics["0"], qubit_basics["0"], qubit_basics["0"], 0)


class TestDisturbanceEstimate:
    def test_commuting(self):
        rho = np.diag([0.3, 0.7])
        rep = estimate_disturbance(rho, np.diag([1.0, 0]), random_projector(2, 1, Seed(6)), 100_000, Seed(7))
        assert rep.exact["disturbance"] == pytest.approx(0, abs=1e-15)
        assert abs(rep.z_score("disturbance")) <= 4

    def test_qubit_example(self, qubit_basics):
        rep = estimate_disturbance(qubit_basics["0"], qubit_basics["+"], qubit_basics["0"], 200_000, Seed(8))
        assert rep.exact["disturbance"] == pytest.approx(0.25, abs=1e-15)
        assert abs(rep.z_score("disturbance")) <= 4
        assert rep.n == 400_000

    def test_identity_second(self):
        rho = random_density(2, "mixed", Seed(9))
        rep = estimate_disturbance(rho, random_projector(2, 1, Seed(10)), np.eye(2), 5_000, Seed(11))
        assert rep.estimates["disturbance"] == 0.0

    def test_random(self):
        for rho, a, b in random_triples(3, 3, seed=55):
            rep = estimate_disturbance(rho, a, b, 100_000, Seed(12))
            assert rep.exact["disturbance"] == pytest.approx(disturbance(rho, a, b), abs=1e-15)
            assert abs(rep.z_score("disturbance")) <= 4


class TestWeakSampler:
    def test_identity_first_projector(self):
        rho = random_density(2, "mixed", Seed(13))
        b = random_projector(2, 1, Seed(14))
        rep = sample_weak_pointer(rho, np.eye(2), b, PointerModel(0.7), 100_000, Seed(15))
        p_b = np.trace(rho.matrix @ b.matrix).real
        assert rep.exact["x_times_b_yes"] == pytest.approx(p_b, abs=1e-14)
        assert rep.exact["x_mean"] == pytest.approx(1.0, abs=1e-14)
        for key in rep.estimates:
            assert abs(rep.z_score(key)) <= 4

    @pytest.mark.parametrize("sigma", [0.2, 1.0, 5.0])
    def test_consistent(self, sigma):
        for rho, a, b in qubit_configs(2, seed=56):
            rep = sample_weak_pointer(rho, a, b, PointerModel(sigma), 100_000, Seed(16))
            for key in rep.estimates:
                assert abs(rep.z_score(key)) <= 4

    def test_qubit_example(self, qubit_basics):
        rep = sample_weak_pointer(qubit_basics["0"], qubit_basics["+"], qubit_basics["0"], PointerModel(1.0), 200_000, Seed(17))
        assert rep.exact["x_times_b_yes"] == pytest.approx(0.25 * (1 + math.exp(-1 / 8)), abs=1e-15)
        assert abs(rep.z_score("x_times_b_yes")) <= 4

    def test_determinism_and_sharding(self):
        rho, a, b = qubit_configs(1)[0]
        r1 = sample_weak_pointer(rho, a, b, PointerModel(0.5), 20_000, Seed(18), shards=3)
        r2 = sample_weak_pointer(rho, a, b, PointerModel(0.5), 20_000, Seed(18), shards=3, workers=3)
        assert r1.estimates == r2.estimates

    def test_extreme_sigma_is_finite(self):
        rho, a, b = qubit_configs(1)[0]
        for sigma in (1e-3, 1e3):
            rep = sample_weak_pointer(rho, a, b, PointerModel(sigma), 10_000, Seed(19))
            assert all(math.isfinite(v) for v in rep.estimates.values())
            assert abs(rep.z_score("x_times_b_yes")) <= 4

    def test_report_dict(self):
        rho, a, b = qubit_configs(1)[0]
        d = sample_weak_pointer(rho, a, b, PointerModel(1.0), 1_000, Seed(20)).to_dict()
        assert set(d) >= {"kind", "n", "counts", "estimates", "standard_errors", "exact", "z_scores", "seed"}
        assert d["params"]["mh"] == pytest.approx(mh(rho, a, b))
