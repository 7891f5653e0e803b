import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qpcalc.hilbert import Seed, random_density, random_projector  # noqa: E402


def random_triples(d, n, seed=0, purity="mixed"):
    """``n`` deterministic (rho, a, b) with projector ranks drawn from 1..d-1."""
    rng = np.random.default_rng([seed, d])
    out = []
    for k in range(n):
        rho = random_density(d, purity, Seed(seed, 3 * k))
        a = random_projector(d, int(rng.integers(1, d)), Seed(seed, 3 * k + 1))
        b = random_projector(d, int(rng.integers(1, d)), Seed(seed, 3 * k + 2))
        out.append((rho, a, b))
    return out


@pytest.fixture
def qubit_basics():
    from oracles import ket, outer

    zero, one = ket(1, 0), ket(0, 1)
    plus, minus = ket(1, 1), ket(1, -1)
    left = ket(1, 1j)
    return {
        "0": outer(zero),
        "1": outer(one),
        "+": outer(plus),
        "-": outer(minus),
        "L": outer(left),
        "I": np.eye(2, dtype=complex),
    }


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
