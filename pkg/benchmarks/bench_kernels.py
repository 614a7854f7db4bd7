"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import math
import timeit

import numpy as np

from csltrap import kernels


def cases(rng):
    a = rng.uniform(-0.3, 0.05, 200)
    q = rng.uniform(0.0, 0.9, 200)
    pos = rng.normal(scale=1e-9, size=(24, 3))
    coeffs = rng.normal(size=24)
    h = math.pi / 200
    return {
        "mathieu scalar (20k steps)": lambda m: m.mathieu_max_amplitude(-0.01, 0.3, 20000, h, 1e3),
        "mathieu batch (200 x 20k)": lambda m: m.mathieu_max_amplitude_batch(a, q, 20000, h, 1e3),
        "pair_sum (24 sites)": lambda m: m.pair_sum(pos, coeffs, 7e-10, True),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the python backend is timed")
    print(f"{'kernel':<30}" + "".join(f"{name:>14}" for name in backends) + f"{'speedup':>10}")
    for label, fn in cases(np.random.default_rng(0)).items():
        times = {}
        for name, mod in backends.items():
            number = 1 if name == "python" and "scalar" in label else 3
            times[name] = min(timeit.repeat(lambda: fn(mod), number=number,
                                            repeat=args.repeat)) / number
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{label:<30}" + "".join(f"{t * 1e3:>11.3f} ms" for t in times.values())
              + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
