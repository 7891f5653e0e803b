"""Time each hot kernel on its numba and numpy paths.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both paths get identical inputs; the numba path is warmed up once first so
compile time is excluded. Outputs are compared before timing.
"""

import argparse
import time

import numpy as np

from qpcalc import _accel, _kernels


def unit_rows(rng, n, d):
    z = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def cases(rng):
    n = 1_000_000
    psi, va, vb = (unit_rows(rng, n, 3) for _ in range(3))
    yield "mh_rank_one_batch (1e6, d=3)", _kernels.mh_rank_one_batch, (psi, va, vb)

    yield "tally_sequence (1e7)", _kernels.tally_sequence, (rng.random(10 * n), rng.random(10 * n), 0.3, 0.6, 0.2)

    branch = rng.random(n) < 0.4
    x = branch + 0.5 * rng.standard_normal(n)
    coeffs = np.array([0.2, 0.3, 0.1, 0.4, 0.6])
    yield "weak_pointer_outcomes (1e6)", _kernels.weak_pointer_outcomes, (x, branch, rng.random(n), coeffs, 0.5)

    budget = 100_000
    vecs0 = unit_rows(rng, 3, 2)
    best0 = float(_kernels._triple_value(vecs0))
    noise = (rng.standard_normal((budget, 2)) + 1j * rng.standard_normal((budget, 2))) / np.sqrt(2)
    choice = rng.integers(0, 3, size=budget).astype(np.int64)
    # min_step 0 keeps both paths running the full budget
    yield "refine_rank_one (1e5 steps)", _kernels.refine_rank_one, (vecs0, best0, noise, choice, 0.3, 20, 0.0)


def best_time(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<32}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name, fn, inputs in cases(rng):
        fast, slow = fn.compiled(*inputs), fn.fallback(*inputs)
        if isinstance(fast, tuple):
            fast, slow = fast[1], slow[1]
        assert np.allclose(fast, slow), name
        t_nb = best_time(fn.compiled, inputs, args.repeat)
        t_np = best_time(fn.fallback, inputs, args.repeat)
        print(f"{name:<32}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
