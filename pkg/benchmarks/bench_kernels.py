"""Compare the compiled and pure-Python stepping kernels.

    python benchmarks/bench_kernels.py [--ms 2] [--modules 4]

Both backends run the same scenario; the script prints wall time, steps per
second, the speedup, and the largest state difference between them.
"""

import argparse
import time

import numpy as np

from dcat import kernels
from dcat.engine import Scenario, SquaredSine, simulate
from dcat.topology import ConverterConfig


def run(backend, scenario):
    t0 = time.perf_counter()
    result = simulate(scenario, backend=backend, with_report=False)
    return time.perf_counter() - t0, result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ms", type=float, default=2.0, help="simulated milliseconds")
    ap.add_argument("--modules", type=int, default=4)
    args = ap.parse_args()

    scenario = Scenario(ConverterConfig(module_count=args.modules), SquaredSine(400.0, 50.0),
                        args.ms * 1e-3, record_decimation=22)
    steps = round(scenario.duration / scenario.dt)
    backends = kernels.available_backends()
    results = {}
    for name in backends:
        wall, res = run(name, scenario)
        results[name] = (wall, res)
        print(f"{name:>9}: {wall:8.3f} s  {steps / wall:12.0f} steps/s")
    if len(results) == 2:
        (tc, rc), (tp, rp) = results["compiled"], results["python"]
        diff = np.max(np.abs(rc.final_state.to_vector() - rp.final_state.to_vector()))
        print(f"  speedup: {tp / tc:.1f}x   max |state difference|: {diff:.3g}")
    else:
        print("only one backend available:", backends)


if __name__ == "__main__":
    main()
