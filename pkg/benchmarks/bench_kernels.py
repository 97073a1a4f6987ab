"""Time the solver kernels: numpy against numba, and a full RK4 step.

    python3 benchmarks/bench_kernels.py --shape 64 32 32 --repeat 20
"""
import argparse
import time

import numpy as np

from curvibc.lee_sim import kernels
from curvibc.lee_sim.config import SimConfig
from curvibc.lee_sim.solver import Simulation


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--shape", type=int, nargs=3, default=(64, 32, 32))
    ap.add_argument("--repeat", type=int, default=10)
    ap.add_argument("--threads", type=int)
    args = ap.parse_args()

    cfg = SimConfig().replace(grid={"shape": tuple(args.shape)}, boundary={"inflow": "first_order"},
                              pulse={"center": args.shape[0] / 2, "noise": 1e-4})
    sim = Simulation(cfg)
    q = sim.initial_state().q
    out = np.empty_like(q)
    rows = []

    rows.append(("rhs numpy", best_of(
        lambda: kernels.rhs_numpy(q, sim.mat, sim.contra, False, sim.closure, out), args.repeat)))
    rows.append(("filter numpy", best_of(
        lambda: kernels.filter_numpy(q, 0.1, False, out), args.repeat)))
    if kernels.numba is not None:
        if args.threads:
            kernels.set_threads(args.threads)
        kernels.rhs_numba(q, sim.mat, sim.contra, False, sim.closure, out)  # compile
        kernels.filter_numba(q, 0.1, False, out)
        rows.append(("rhs numba", best_of(
            lambda: kernels.rhs_numba(q, sim.mat, sim.contra, False, sim.closure, out), args.repeat)))
        rows.append(("filter numba", best_of(
            lambda: kernels.filter_numba(q, 0.1, False, out), args.repeat)))
    state = sim.initial_state()
    sim.step(state)
    rows.append((f"rk4 step ({sim.backend})", best_of(lambda: sim.step(state), args.repeat)))

    print(f"shape {tuple(args.shape)}, best of {args.repeat}")
    for name, t in rows:
        print(f"  {name:<22s} {1e3 * t:9.2f} ms")
    base = dict(rows)
    if "rhs numba" in base:
        print(f"  rhs speedup {base['rhs numpy'] / base['rhs numba']:.1f}x")


if __name__ == "__main__":
    main()
