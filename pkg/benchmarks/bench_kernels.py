"""Benchmark the compiled simulation kernels against the pure-Python fallback.

Runs each kernel on both backends, checks the outputs are bit-identical,
and prints a timing table.  Usage:

    python benchmarks/bench_kernels.py [--steps 20000] [--repeats 5]
"""

import argparse
import time

import numpy as np

from rfr_kit._kernels import _pure

try:
    from rfr_kit._kernels import _core
except ImportError:
    _core = None


def best_of(repeats: int, fn, *args) -> tuple[float, object]:
    result = None
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def as_arrays(result) -> list[np.ndarray]:
    if isinstance(result, tuple):
        return [np.asarray(x) for x in result]
    return [np.asarray(result)]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=20000,
                        help="path length / draw count (default 20000)")
    parser.add_argument("--repeats", type=int, default=5,
                        help="repeats per measurement, best kept (default 5)")
    args = parser.parse_args()

    if _core is None:
        print("compiled kernel not built; only the pure backend is available")
        print("build it with: pip install -e . --no-build-isolation")
        return 1

    n = args.steps
    ppf_grid = np.linspace(1e-6, 1.0 - 1e-6, n)
    path_a, path_b = _pure.simulate_paths(100.0, 0.15, 0.02, n, 7.0 / 365.0, 9)

    cases = [
        ("norm_ppf x grid",
         lambda impl: np.array([impl.norm_ppf(float(p)) for p in ppf_grid])),
        ("normal_stream",
         lambda impl: impl.normal_stream(12345, n)),
        ("simulate_paths",
         lambda impl: impl.simulate_paths(100.0, 0.15, 0.02, n, 7.0 / 365.0, 9)),
        ("relative_gaps",
         lambda impl: impl.relative_gaps(path_a, path_b)),
    ]

    print(f"backends: pure vs compiled   size={n}   best of {args.repeats}")
    print(f"{'kernel':<18} {'pure':>10} {'compiled':>10} {'speedup':>9}  identical")
    for name, runner in cases:
        t_pure, r_pure = best_of(args.repeats, runner, _pure)
        t_core, r_core = best_of(args.repeats, runner, _core)
        same = all(np.array_equal(a, b)
                   for a, b in zip(as_arrays(r_pure), as_arrays(r_core)))
        print(f"{name:<18} {t_pure * 1e3:>8.2f}ms {t_core * 1e3:>8.2f}ms "
              f"{t_pure / t_core:>8.1f}x  {'yes' if same else 'NO'}")
        if not same:
            print(f"  MISMATCH: {name} outputs differ between backends")
            return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
