"""Benchmark the kernel backends (pure Python vs compiled Cython).

Times the two hot kernels on representative workloads and, when both
backends are available, reports the speedup. Run from the repo root:

    python benchmarks/bench_backends.py
"""

import time

import numpy as np

from eatsc.kernels import available_backends


def time_call(fn, repeats):
    best = float("inf")
    for _ in range(5):
        start = time.perf_counter()
        for _ in range(repeats):
            fn()
        best = min(best, (time.perf_counter() - start) / repeats)
    return best


def bench_penalty_sum(mod, n_vehicles=80, repeats=2000):
    rng = np.random.default_rng(1)
    principal = np.ones(n_vehicles)
    arrival = np.sort(rng.uniform(0, 500, n_vehicles))
    carried = rng.uniform(0, 60, n_vehicles)
    return time_call(lambda: mod.penalty_sum(principal, arrival, carried, 520.0, 400.0, 0.2),
                     repeats)


def bench_run_phase(mod, ticks=60, repeats=500):
    rng = np.random.default_rng(2)
    shape = (4, 20000)
    principal = np.zeros(shape)
    arrival = np.zeros(shape)
    carried = np.zeros(shape)
    probs = np.array([0.083, 0.083, 0.167, 0.167])
    uniforms = rng.random((ticks, 4))
    base_tail = np.array([12, 9, 30, 28], dtype=np.int64)
    for q in range(4):
        arrival[q, : base_tail[q]] = np.sort(rng.uniform(0, 100, int(base_tail[q])))
        principal[q, : base_tail[q]] = 1.0

    def run():
        head = np.zeros(4, np.int64)
        tail = base_tail.copy()
        pt = np.zeros(4, np.int64)
        mod.run_phase(principal, arrival, carried, head, tail, 2, ticks, probs,
                      uniforms, np.ones(4), 110, 2.0, 100.0, 0.0, pt)

    return time_call(run, repeats)


def main():
    backends = available_backends()
    print(f"backends available: {', '.join(backends)}\n")
    results = {}
    for name, mod in backends.items():
        penalty = bench_penalty_sum(mod)
        phase = bench_run_phase(mod)
        results[name] = (penalty, phase)
        print(f"{name:>9}:  penalty_sum(80 veh) {penalty * 1e6:8.2f} us   "
              f"run_phase(60 ticks) {phase * 1e6:8.2f} us")
    if len(results) == 2:
        py, comp = results["python"], results["compiled"]
        print(f"\nspeedup (python/compiled):  penalty_sum x{py[0] / comp[0]:.1f}   "
              f"run_phase x{py[1] / comp[1]:.1f}")


if __name__ == "__main__":
    main()
