"""
Compare the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints best-of-N wall times per kernel and the speedup.
"""

import argparse
import math
import timeit

import numpy as np

from quenchtherm.kernels import _fallback

try:
    from quenchtherm.kernels import _core
except ImportError:
    _core = None


def cases():
    v0 = np.diag([0.5, 0.5, 0.5, 0.5])
    t = np.linspace(0.0, 20.0, 100_000)
    lo = math.tanh(math.pi * (1 - 0.0016) / 2) * (1 - 1e-12)
    return {
        "sample_reduced (1e5 points)": lambda m: m.sample_reduced(v0, 1.0, 1.3, t),
        "wedge_scan (pi, 0.16%)": lambda m: m.wedge_scan(lo, math.pi, 0.0016, True, 400_001),
        "wedge_scan (pi, 1e-6, full range)": lambda m: m.wedge_scan(
            math.tanh(math.pi * (1 - 1e-6) / 2) * (1 - 1e-12), math.pi, 1e-6, True, 400_001
        ),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _core is None:
        print("compiled extension not built; only the fallback is timed")
    print(f"{'kernel':<36} {'python [ms]':>12} {'compiled [ms]':>14} {'speedup':>8}")
    for name, fn in cases().items():
        t_py = min(timeit.repeat(lambda: fn(_fallback), number=1, repeat=args.repeat)) * 1e3
        if _core is None:
            print(f"{name:<36} {t_py:>12.3f} {'-':>14} {'-':>8}")
            continue
        t_c = min(timeit.repeat(lambda: fn(_core), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<36} {t_py:>12.3f} {t_c:>14.3f} {t_py / t_c:>7.1f}x")


if __name__ == "__main__":
    main()
