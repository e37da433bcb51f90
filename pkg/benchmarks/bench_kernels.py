"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--cells 400] [--repeat 5]

Times each kernel in isolation with both backends, then a short transient
run and a stationary solve in a subprocess per backend (the backend is fixed
at import, selected with TROUGHFLOW_KERNELS).
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from troughflow.kernels import available_backends

FULL_RUN = """
import time
from troughflow.config import preset_noor_like
from troughflow.cli import apply_overrides
from troughflow.stationary import StationaryProblem, solve_stationary
from troughflow.transient import run_transient
cfg = apply_overrides(preset_noor_like()[0], cells={cells}, t_end={t_end})
t0 = time.perf_counter()
run_transient(cfg.scenario, cfg.params, cfg.solver)
t1 = time.perf_counter()
solve_stationary(StationaryProblem.from_scenario(cfg.scenario, cfg.params), cfg.scenario.grid)
t2 = time.perf_counter()
print(t1 - t0, t2 - t1)
"""


def kernel_cases(n):
    rng = np.random.default_rng(0)
    rho = rng.uniform(0.3, 1.0, n)
    K = np.cumsum(rng.normal(0, 1, n)) / n
    u_face = rng.normal(0.5, 0.2, n + 1)
    out = np.empty(n)
    f_nodes = np.full(8 * n + 1, 0.5)
    return {
        "offset_objective": lambda m: m.offset_objective(0.3, rho, K, 1.0 / n),
        "upwind_step": lambda m: m.upwind_step(rho, u_face, 0.9, 0.8, 0.1, 0.2, out),
        "rk4_march": lambda m: m.rk4_march(0.8, 0.9, f_nodes, 0.25 / n, 1.0, 0.7, 1.0, 0.2, 1.0),
    }


def time_kernels(n, repeat):
    backends = available_backends()
    print(f"kernel timings, n = {n} cells (best of {repeat}, microseconds per call)")
    print(f"{'kernel':<18}" + "".join(f"{name:>12}" for name in backends) + f"{'speedup':>10}")
    for name, call in kernel_cases(n).items():
        best = {}
        for bname, mod in backends.items():
            number = 20 if name == "rk4_march" and bname == "python" else 200
            t = min(timeit.repeat(lambda: call(mod), number=number, repeat=repeat)) / number
            best[bname] = t * 1e6
        line = f"{name:<18}" + "".join(f"{best[b]:>12.2f}" for b in backends)
        if "cython" in best:
            line += f"{best['python'] / best['cython']:>9.1f}x"
        print(line)


def time_full_runs(cells, t_end):
    print(f"\nend-to-end, n = {cells}, transient to t = {t_end} and one stationary solve (s)")
    results = {}
    for bname in available_backends():
        env = dict(os.environ, TROUGHFLOW_KERNELS=bname)
        code = FULL_RUN.format(cells=cells, t_end=t_end)
        out = subprocess.run([sys.executable, "-c", code], env=env, check=True,
                             capture_output=True, text=True).stdout.split()
        results[bname] = tuple(float(v) for v in out)
        print(f"{bname:<8} transient {results[bname][0]:8.3f}   stationary {results[bname][1]:8.3f}")
    if "cython" in results:
        tr = results["python"][0] / results["cython"][0]
        st = results["python"][1] / results["cython"][1]
        print(f"speedup  transient {tr:7.1f}x   stationary {st:7.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", type=int, default=400)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--t-end", type=float, default=1.0)
    args = ap.parse_args()
    time_kernels(args.cells, args.repeat)
    time_full_runs(args.cells, args.t_end)


if __name__ == "__main__":
    main()
