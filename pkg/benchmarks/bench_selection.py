"""Benchmark the numba kernels against the pure-numpy fallback.

Runs the same k-center greedy selection on both backends, verifies the
orders are identical, and reports per-pick timings. The numba timing
excludes JIT compilation (a warmup pass runs first).

Usage:
    python benchmarks/bench_selection.py [--n 20000] [--d 64] [--picks 500]
"""

import argparse
import time

from coarseset.kernels import NUMBA_BACKEND, NUMPY_BACKEND
from coarseset.metrics import Metric
from coarseset.selector import kcenter_greedy
from coarseset.synth import MixtureSpec, generate


def run_once(e, picks, metric, backend):
    start = time.perf_counter()
    order = kcenter_greedy(e, [0], picks, metric, backend=backend)
    return order, time.perf_counter() - start


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=20000)
    parser.add_argument("--d", type=int, default=64)
    parser.add_argument("--picks", type=int, default=500)
    parser.add_argument("--metric", choices=[m.value for m in Metric], default="sqeuclidean")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    metric = Metric.from_name(args.metric)
    classes = 10
    spec = MixtureSpec(
        per_class_counts=[args.n // classes] * classes,
        d=args.d,
        separation=8.0,
        rng_seed=0,
    )
    e, _ = generate(spec)
    print(f"n={e.n} d={e.d} picks={args.picks} metric={metric.value}")

    backends = [("numpy", NUMPY_BACKEND)]
    if NUMBA_BACKEND is not None:
        kcenter_greedy(e, [0], 1, metric, backend=NUMBA_BACKEND)  # JIT warmup
        backends.append(("numba", NUMBA_BACKEND))
    else:
        print("numba unavailable; benchmarking the fallback only")

    timings = {}
    orders = {}
    for name, backend in backends:
        best = min(run_once(e, args.picks, metric, backend)[1] for _ in range(args.repeats))
        orders[name], _ = run_once(e, args.picks, metric, backend)
        timings[name] = best
        print(f"{name:>6}: {best:8.3f}s total, {1e6 * best / args.picks:9.1f} us/pick")

    if len(backends) == 2:
        same = orders["numpy"].order.tolist() == orders["numba"].order.tolist()
        print(f"orders identical: {same}")
        if not same:
            raise SystemExit("backend outputs diverged")
        print(f"speedup (numpy/numba): {timings['numpy'] / timings['numba']:.1f}x")


if __name__ == "__main__":
    main()
