"""Compare the numba and numpy finite-volume kernels.

    python benchmarks/bench_fv.py [--cells 400,800,1600] [--repeat 3]
"""

import argparse
import time

import numpy as np

from pistonlimit.fv import FvConfig, numba_available, run_fv
from pistonlimit.gas_state import PistonParams


def timed(config, repeat):
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        res = run_fv(config)
        best = min(best, time.perf_counter() - t)
    return best, res


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", default="400,800,1600")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    params = PistonParams(1.4, 2.0, "rush")
    backends = ["numpy"] + (["numba"] if numba_available() else [])
    if "numba" in backends:
        run_fv(FvConfig(params, N=16, backend="numba"))   # compile outside the timing
    print(f"{'N':>6} {'backend':>8} {'steps':>6} {'seconds':>10} {'cell-steps/s':>14}")
    for n in (int(c) for c in args.cells.split(",")):
        results = {}
        for b in backends:
            sec, res = timed(FvConfig(params, N=n, backend=b), args.repeat)
            results[b] = res
            print(f"{n:>6} {b:>8} {res.steps:>6} {sec:>10.4f} {n * res.steps / sec:>14.3e}")
        if len(results) == 2:
            diff = np.max(np.abs(results["numba"].U - results["numpy"].U))
            print(f"{'':>6} max |numba - numpy| = {diff:.2e}")


if __name__ == "__main__":
    main()
