"""Time the compiled kernels against the numpy fallback on the workloads the estimators run.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from camu import _fallback
from camu.zoo import gilman_fs

try:
    from camu import _kernels as compiled
except ImportError:
    compiled = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads(rng):
    rule = gilman_fs()
    lut, k, r = rule.lut, rule.k, rule.r
    p = np.array([0.2, 0.3, 0.5])
    # ratio estimation: a 2048-sample chunk on the cone of m=1, T=100
    T, m = 100, 1
    width = 2 * (m + r * T) + 1
    cells = rng.choice(3, size=(2048, width), p=p).astype(np.uint8)
    ref = np.ascontiguousarray(
        _fallback.central_codes(lut, k, r, cells[:1], T, r * T, 2 * m + 1)[0])
    ref_words = np.array([[(c // 3 ** (2 - i)) % 3 for i in range(3)] for c in ref], dtype=np.uint8)
    # Cesaro traces: symbol codes of the central cell over n=200
    cesaro_cells = rng.choice(3, size=(2048, 401), p=p).astype(np.uint8)
    torus = rng.choice(3, size=(4096, 64), p=p).astype(np.uint8)
    return {
        "column_match (2048 x 203, T=100)":
            lambda impl: impl.column_match(lut, k, r, cells, ref_words, r * T),
        "central_codes (2048 x 401, 200 steps)":
            lambda impl: impl.central_codes(lut, k, r, cesaro_cells, 200, 200, 1),
        "step_batch (2048 x 401)":
            lambda impl: impl.step_batch(lut, k, r, cesaro_cells),
        "torus_step_batch (4096 x 64)":
            lambda impl: impl.torus_step_batch(lut, k, r, torus),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if compiled is None:
        print("compiled extension not built; only the fallback can be timed")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<40} {'cython ms':>10} {'numpy ms':>10} {'speedup':>8}")
    for name, fn in workloads(rng).items():
        slow = best_of(lambda: fn(_fallback), args.repeat)
        if compiled is None:
            print(f"{name:<40} {'-':>10} {slow * 1e3:>10.2f} {'-':>8}")
            continue
        fast = best_of(lambda: fn(compiled), args.repeat)
        print(f"{name:<40} {fast * 1e3:>10.2f} {slow * 1e3:>10.2f} {slow / fast:>7.1f}x")


if __name__ == "__main__":
    main()
