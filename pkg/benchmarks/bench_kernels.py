"""Compare the numba and numpy batch kernels (and the scalar port loop).

    python benchmarks/bench_kernels.py --seeds 1000 --repeats 7
"""
import argparse
import time

import numpy as np

from spikegate import _kernels
from spikegate.batch import simulate, truth_table_schedule
from spikegate.device import REFERENCE_PARAMS
from spikegate.gates import XOR, truth_table
from spikegate.instrument import simulated_port


def best_of(fn, n):
    times = []
    for _ in range(n):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=1000)
    ap.add_argument("--repeats", type=int, default=7)
    ap.add_argument("--rounds", type=int, default=5)
    args = ap.parse_args()

    seeds = np.arange(args.seeds)
    schedule, _ = truth_table_schedule(XOR, args.repeats)
    print(f"schedule: {len(schedule)} events x {args.seeds} devices")

    routes = {"numpy": False}
    if _kernels.HAVE_NUMBA:
        simulate(REFERENCE_PARAMS, schedule, seeds[:2], use_numba=True)  # compile
        routes["numba"] = True
    results = {}
    for name, flag in routes.items():
        results[name] = simulate(REFERENCE_PARAMS, schedule, seeds, use_numba=flag)
        t = best_of(lambda: simulate(REFERENCE_PARAMS, schedule, seeds, use_numba=flag), args.rounds)
        print(f"{name:>7}: {t * 1e3:8.2f} ms")
    if "numba" in results:
        print(f"identical: {np.array_equal(results['numpy'], results['numba'])}")

    # kernels alone, noise and decay factors prepared once
    m = len(schedule)
    noise = np.random.default_rng(0).normal(0.0, REFERENCE_PARAMS.noise_sigma, size=(args.seeds, m))
    has_pre = schedule.pre_hold > 0
    pre_cu = np.where(has_pre, 1.0 - np.exp(-schedule.pre_hold / REFERENCE_PARAMS.tau_u), 0.0)
    pre_es = np.where(has_pre, np.exp(-schedule.pre_hold / REFERENCE_PARAMS.tau_s), 1.0)
    cu, es = 1.0 - np.exp(-1.0), np.exp(-20.0 / 7.0)
    kernels = {"numpy": _kernels.drive_numpy}
    if _kernels.HAVE_NUMBA:
        kernels["numba"] = _kernels.drive_numba
    for name, kernel in kernels.items():
        def call():
            n = args.seeds
            kernel(np.zeros(n), np.zeros(n), np.zeros(n), schedule.volts, has_pre, pre_cu, pre_es, cu, es,
                   REFERENCE_PARAMS.kappa, REFERENCE_PARAMS.g_dc, noise, np.empty((n, m)))
        t = best_of(call, args.rounds)
        print(f"{name:>7} kernel only: {t * 1e3:8.3f} ms")

    n_scalar = min(args.seeds, 100)
    t = best_of(lambda: [truth_table(simulated_port(REFERENCE_PARAMS, int(s)), XOR, repeats=args.repeats) for s in seeds[:n_scalar]], 1)
    print(f" scalar: {t * 1e3 * args.seeds / n_scalar:8.2f} ms (extrapolated from {n_scalar} seeds)")


if __name__ == "__main__":
    main()
