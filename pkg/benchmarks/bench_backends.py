"""Timing comparison of the numba and numpy compute backends.

Runs the two hot kernels (pairwise distances, linkage merge) on growing
synthetic days and prints a table of wall times plus the speedup. The
numba path is warmed once before timing so JIT compilation is not
billed to the measurement.

Usage: python3 benchmarks/bench_backends.py [--max-frames 2000]
"""

import argparse
import time

import numpy as np

from egosumm.backends import LINKAGE_CODES, get_backend
from egosumm.evaluation import SynthConfig, synth_generate


def time_once(fn, *args):
    start = time.perf_counter()
    fn(*args)
    return time.perf_counter() - start


def best_of(fn, *args, repeats=3):
    return min(time_once(fn, *args) for _ in range(repeats))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-frames", type=int, default=2000)
    parser.add_argument("--dimension", type=int, default=512)
    args = parser.parse_args()

    numpy_backend = get_backend("numpy")
    try:
        numba_backend = get_backend("numba")
    except Exception as exc:
        raise SystemExit(f"numba backend unavailable: {exc}")

    sizes = [n for n in (250, 500, 1000, 2000, 4000) if n <= args.max_frames]
    code = LINKAGE_CODES["average"]

    # warm the JIT kernels off the clock
    small = np.random.default_rng(0).normal(size=(16, 8))
    warm_dist = numba_backend.pairwise_euclidean(small)
    numba_backend.linkage_merge(warm_dist, code)

    print(f"dimension={args.dimension}, average linkage, best of 3")
    print(f"{'frames':>7} {'kernel':>10} {'numpy':>9} {'numba':>9} {'speedup':>8}")
    for n in sizes:
        config = SynthConfig(
            num_events=5,
            frames_per_event=n // 5,
            dimension=args.dimension,
            separation=max(10.0, 1.3 * np.sqrt(2.0 * args.dimension)),
            seed=0,
        )
        stream, _ = synth_generate(config)
        features = np.asarray(stream.feature_matrix)

        t_np = best_of(numpy_backend.pairwise_euclidean, features)
        t_nb = best_of(numba_backend.pairwise_euclidean, features)
        print(
            f"{len(stream):>7} {'pairwise':>10} {t_np:>8.3f}s {t_nb:>8.3f}s "
            f"{t_np / t_nb:>7.1f}x"
        )

        dist = numba_backend.pairwise_euclidean(features)
        t_np = best_of(numpy_backend.linkage_merge, dist, code)
        t_nb = best_of(numba_backend.linkage_merge, dist, code)
        print(
            f"{len(stream):>7} {'linkage':>10} {t_np:>8.3f}s {t_nb:>8.3f}s "
            f"{t_np / t_nb:>7.1f}x"
        )


if __name__ == "__main__":
    main()
