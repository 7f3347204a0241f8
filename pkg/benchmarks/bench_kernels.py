"""Timing comparison: compiled scan kernels vs the numpy fallback.

Run: python benchmarks/bench_kernels.py
"""

import time

import numpy as np
from scipy.spatial.distance import cdist

from bcopy import _kernels_py

try:
    from bcopy import _kernels
except ImportError:
    raise SystemExit("compiled kernels not built; run pip install -e . first")

from bcopy.distances import ClusterParams, build_clustered_dataset
from bcopy.oracle import make_analytic_oracle
from bcopy.sampling import Region


def bench(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    rows = []

    values = rng.random(200)
    labels = rng.choice([-1, 1], size=200).astype(np.int64)
    rows.append(("masked_argmin (m=200, x5000 calls)",
                 bench(lambda: [_kernels.masked_argmin(values, labels, 1)
                                for _ in range(5000)]),
                 bench(lambda: [_kernels_py.masked_argmin(values, labels, 1)
                                for _ in range(5000)])))

    dist2 = rng.random((16, 64))
    il = rng.choice([-1, 1], size=16).astype(np.int64)
    ol = rng.choice([-1, 1], size=64).astype(np.int64)
    rows.append(("masked_argmin_pairs (16x64, x5000 calls)",
                 bench(lambda: [_kernels.masked_argmin_pairs(dist2, il, ol)
                                for _ in range(5000)]),
                 bench(lambda: [_kernels_py.masked_argmin_pairs(dist2, il, ol)
                                for _ in range(5000)])))

    queries = rng.normal(size=(20_000, 2))
    train = rng.normal(size=(400, 2))
    rows.append(("nearest_index (20k queries, 400 train)",
                 bench(lambda: _kernels.nearest_index(queries, train)),
                 bench(lambda: _kernels_py.nearest_index(queries, train))))

    # end-to-end clustered labelling, backend switched via monkeypatching
    import bcopy.distances as distances
    oracle = make_analytic_oracle("hyperplane", w=(1, 0), b=0.0)
    params = ClusterParams(n_c=4000, n_in=16, n_out=64, d_in=0.1, d_out=0.7)

    def run_labelling(impl):
        original = distances.kernels.masked_argmin_pairs
        distances.kernels.masked_argmin_pairs = impl.masked_argmin_pairs
        try:
            return build_clustered_dataset(oracle, Region.cube(2), params, seed=1)
        finally:
            distances.kernels.masked_argmin_pairs = original

    ds_c = run_labelling(_kernels)
    ds_py = run_labelling(_kernels_py)
    assert ds_c == ds_py, "backends disagree on labelling output"
    rows.append(("clustered labelling (64k samples end-to-end)",
                 bench(lambda: run_labelling(_kernels), repeats=3),
                 bench(lambda: run_labelling(_kernels_py), repeats=3)))

    print(f"{'kernel':<45} {'compiled':>10} {'numpy':>10} {'speedup':>8}")
    for name, tc, tp in rows:
        print(f"{name:<45} {tc * 1e3:>8.1f}ms {tp * 1e3:>8.1f}ms {tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
