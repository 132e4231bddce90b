"""Compare the compiled and pure-Python kernels.

Usage: python benchmarks/bench_kernels.py [--sizes 100 1000 10000] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from brfd import _backend


def _inputs(J, rng):
    u = np.r_[0.0, rng.standard_normal(J), 0.0]
    phi = rng.uniform(-1, 1, J + 2)
    f = rng.standard_normal(J + 2)
    lo, up = rng.uniform(-1, 1, J - 1), rng.uniform(-1, 1, J - 1)
    d = 3.0 + rng.random(J)
    return (u, phi, f, 1.0 / (J + 1), 1e-3), (lo, d, up, rng.standard_normal(J))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[100, 1000, 10000, 100000])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    names = _backend.available()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<11}{'J':>8}" + "".join(f"{n + ' [us]':>16}" for n in names) + f"{'speedup':>10}")
    for J in args.sizes:
        relax_args, thomas_args = _inputs(J, rng)
        for kernel, call_args in (("relax_step", relax_args), ("thomas", thomas_args)):
            times = []
            for name in names:
                fn = getattr(_backend.get(name), kernel)
                number = max(1, 200_000 // J)
                best = min(timeit.repeat(lambda: fn(*call_args), number=number, repeat=args.repeat))
                times.append(best / number * 1e6)
            speed = f"{times[-1] / times[0]:.1f}x" if len(times) > 1 else "-"
            print(f"{kernel:<11}{J:>8}" + "".join(f"{t:>16.1f}" for t in times) + f"{speed:>10}")


if __name__ == "__main__":
    main()
