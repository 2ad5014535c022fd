"""Compiled vs pure-Python integration kernel.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times three representative integrations on each available backend and
checks that both produce the same samples.
"""
import argparse
import time

import numpy as np

from instanton_pvi import BACKENDS, InstantonState, integrate_asd
from instanton_pvi.shooting import boundary_series

CASES = {
    "hopf 0.5 -> 0.05": (InstantonState(0.5, 9 / 13, 36 / 13, 12 / 13), 0.05),
    "generic 0.5 -> 0.95": (InstantonState(0.5, 0.7, 1.3, -0.4), 0.95),
    "shoot r-=2.5 c=0.5": (boundary_series(0.5, 2.5, 1e-5), 1e-6),
}


def run(backend, s0, t_end, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        tr = integrate_asd(s0, t_end, 1e-10, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, tr


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"backends: {', '.join(BACKENDS)}")
    print(f"{'case':<24}{'samples':>9}" + "".join(f"{b + ' [ms]':>16}" for b in BACKENDS)
          + ("  speedup" if len(BACKENDS) > 1 else ""))
    for name, (s0, t_end) in CASES.items():
        times, trs = [], []
        for b in BACKENDS:
            dt, tr = run(b, s0, t_end, args.repeat)
            times.append(dt)
            trs.append(tr)
        line = f"{name:<24}{len(trs[0].ts):>9}" + "".join(f"{1e3 * t:>16.3f}" for t in times)
        if len(BACKENDS) > 1:
            same = np.array_equal(trs[0].ts, trs[1].ts) and np.allclose(trs[0].a, trs[1].a,
                                                                       rtol=1e-13, atol=0)
            line += f"  {times[1] / times[0]:7.1f}x" + ("" if same else "  MISMATCH")
        print(line)


if __name__ == "__main__":
    main()
