"""Time the compiled kernels against the NumPy fallback.

Usage: python benchmarks/bench_kernels.py [--modes 2001] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from cqed_detect import _kernels_py as pure

try:
    from cqed_detect import _kernels as compiled
except ImportError:
    compiled = None


def cases(n_modes: int, n_times: int):
    rng = np.random.default_rng(0)
    energies = np.linspace(-100.0, 100.0, n_modes)
    # eigenvalues strictly between grid points, like the real spectrum
    points = energies[:-1] + np.diff(energies) * rng.uniform(0.2, 0.8, n_modes - 1)
    weights = rng.normal(size=n_modes + 2) ** 2
    eigenvalues = np.sort(rng.uniform(-100.0, 100.0, n_modes + 2))
    times = np.linspace(0.0, 3.0, n_times)
    return {
        "pole_sums": lambda k: k.pole_sums(points, energies),
        "spectral_sum": lambda k: k.spectral_sum(weights, eigenvalues, times),
    }


def best_of(fn, repeat: int) -> float:
    number = 1
    while timeit.timeit(fn, number=number) < 0.05:  # at least ~50 ms per sample
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--modes", type=int, default=2001, help="continuum size N")
    parser.add_argument("--times", type=int, default=301, help="time points for spectral_sum")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    if compiled is None:
        print("compiled extension not built; only the NumPy fallback is timed")
    print(f"N = {args.modes}, {args.times} time points")
    print(f"{'kernel':<14}{'numpy [ms]':>12}{'compiled [ms]':>15}{'speedup':>10}{'max |diff|':>12}")
    for name, call in cases(args.modes, args.times).items():
        t_py = best_of(lambda: call(pure), args.repeat)
        if compiled is None:
            print(f"{name:<14}{t_py * 1e3:>12.2f}{'-':>15}{'-':>10}{'-':>12}")
            continue
        t_c = best_of(lambda: call(compiled), args.repeat)
        diff = max(float(np.abs(np.asarray(a) - np.asarray(b)).max())
                   for a, b in zip(np.atleast_1d(call(pure)), np.atleast_1d(call(compiled))))
        print(f"{name:<14}{t_py * 1e3:>12.2f}{t_c * 1e3:>15.2f}{t_py / t_c:>9.1f}x{diff:>12.1e}")


if __name__ == "__main__":
    main()
