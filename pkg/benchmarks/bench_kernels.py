"""Compare the compiled and numpy DTW backends on window-pair batches.

Usage: python3 benchmarks/bench_kernels.py [--pairs 10000] [--seq-len 24] [--dims 5]
"""

import argparse
import time

import numpy as np

from tsgeval import _kernels


def bench(fn, a, b, reps):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn(a, b)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=10000)
    ap.add_argument("--seq-len", type=int, nargs="+", default=[24, 125])
    ap.add_argument("--dims", type=int, default=5)
    ap.add_argument("--reps", type=int, default=3)
    args = ap.parse_args(argv)

    backends = _kernels.available_backends()
    rng = np.random.default_rng(0)
    print(f"{'l':>5} {'backend':>8} {'seconds':>10} {'pairs/s':>12} {'speedup':>8}")
    for l in args.seq_len:
        a = rng.normal(size=(args.pairs, l, args.dims))
        b = rng.normal(size=(args.pairs, l, args.dims))
        results = {name: bench(k.dtw_pairs, a, b, args.reps) for name, k in backends.items()}
        base = results["python"][0]
        for name, (sec, _) in sorted(results.items()):
            print(f"{l:>5} {name:>8} {sec:>10.3f} {args.pairs / sec:>12.0f} {base / sec:>7.1f}x")
        if len(results) > 1:
            outs = [o for _, o in results.values()]
            same = all(np.array_equal(outs[0], o) for o in outs[1:])
            print(f"{l:>5} outputs bit-identical across backends: {same}")


if __name__ == "__main__":
    main()
