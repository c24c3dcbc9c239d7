#!/usr/bin/env python3
"""Benchmark the compiled stepping core against the numpy fallback.

Runs the same chunk workload (identical states, fields and noise) through
both backends, reports steps/second and the speedup, and verifies the
outputs agree exactly.

Usage: python bench/benchmark.py [--trajectories N] [--t-final T]
"""

import argparse
import math
import time

import numpy as np

from qubitsme.ensemble import _integrate_chunk, _prepare
from qubitsme.kernels import _pyref
from qubitsme.scenarios import builtin_scenario

try:
    from qubitsme.kernels import _core
except ImportError:
    _core = None

SCENARIOS = ("fig2_vacuum_hd", "fig3_vacuum_pd", "fig4_photon_hd",
             "fig4_photon_pd", "fig5_cat_hd", "fig6_cat_pd")


def run_backend(impl, prep, m):
    """Time one chunk through a specific backend implementation."""
    import qubitsme.ensemble as ens
    saved = ens.kernels
    # swap the dispatch module for the requested implementation
    class _Shim:
        MAX_RECORDED_JUMPS = _pyref.MAX_RECORDED_JUMPS

        def __getattr__(self, name):
            return getattr(impl, name)

    ens.kernels = _Shim()
    try:
        t0 = time.perf_counter()
        out = _integrate_chunk(prep, 0, m)
        elapsed = time.perf_counter() - t0
    finally:
        ens.kernels = saved
    return elapsed, out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trajectories", type=int, default=200)
    parser.add_argument("--t-final", type=float, default=None)
    args = parser.parse_args()

    if _core is None:
        print("compiled core not available; nothing to compare")

    print(f"{'scenario':<18}{'steps':>12}{'python':>12}{'compiled':>12}"
          f"{'speedup':>9}   identical")
    total = {"python": 0.0, "compiled": 0.0}
    steps_total = 0
    for name in SCENARIOS:
        s = builtin_scenario(name, n_trajectories=args.trajectories)
        prep = _prepare(s)
        m = args.trajectories
        nsteps = s.integrator.n_steps * m
        steps_total += nsteps
        t_py, out_py = run_backend(_pyref, prep, m)
        total["python"] += t_py
        if _core is not None:
            t_c, out_c = run_backend(_core, prep, m)
            total["compiled"] += t_c
            same = all(np.array_equal(out_py[k], out_c[k], equal_nan=True)
                       for k in ("states", "innov", "yrec", "status"))
            print(f"{name:<18}{nsteps:>12,}{t_py:>11.2f}s{t_c:>11.2f}s"
                  f"{t_py / t_c:>8.1f}x   {same}")
        else:
            print(f"{name:<18}{nsteps:>12,}{t_py:>11.2f}s{'-':>12}{'-':>9}")

    print(f"\npython backend:   {steps_total / total['python']:,.0f} steps/s")
    if _core is not None:
        print(f"compiled backend: {steps_total / total['compiled']:,.0f} "
              f"steps/s")
        print(f"overall speedup:  {total['python'] / total['compiled']:.1f}x")


if __name__ == "__main__":
    main()
