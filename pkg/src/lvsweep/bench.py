"""Benchmark the compiled kernel against the pure-Python fallback.

Run as ``python -m lvsweep.bench``.  The workloads are a hard sweep to the
eps threshold (count kernel), a tagged run (individual-based kernel), and
a coupled triple; identical seeds, so the backends also cross-check each
other's outputs while timing.
"""

from __future__ import annotations

import math
import time

from . import _kernels, bdp, ssa
from .model import EcologyParams, ScalingParams, derived_ecology

PARAMS = EcologyParams(f_A=1.0, f_a=2.0, D_A=0.0, D_a=0.0,
                       C_AA=1.0, C_Aa=0.9, C_aA=0.5, C_aa=1.0)
SCALING = ScalingParams(K=2000, r_K=0.1)
EPS = 0.1
SEED_BASE = 0xB0A710AD
N_REPS = 6


def _workloads():
    derived = derived_ecology(PARAMS)
    band = ssa.resident_band(derived, PARAMS, SCALING, EPS)
    target = ssa.eps_threshold(SCALING, EPS)
    initial = ssa.hard_initial_state(PARAMS, SCALING.K, 0.5)
    rates = bdp.coupling_rates(PARAMS, EPS)
    n0_A = int(math.floor(derived.nbar_A * SCALING.K))

    def sweep(kern, seed):
        return kern.run_sweep(
            PARAMS.f_A, PARAMS.f_a, PARAMS.D_A, PARAMS.D_a,
            PARAMS.C_AA, PARAMS.C_Aa, PARAMS.C_aA, PARAMS.C_aa,
            SCALING.K, SCALING.r_K,
            initial.n_Ab1, initial.n_Ab2, initial.n_ab1, initial.n_ab2,
            seed, 50_000_000,
            eps_target=target, band_lo=band[0], band_hi=band[1],
        )

    def tagged(kern, seed):
        return kern.run_tagged(
            PARAMS.f_A, PARAMS.f_a, PARAMS.D_A, PARAMS.D_a,
            PARAMS.C_AA, PARAMS.C_Aa, PARAMS.C_aA, PARAMS.C_aa,
            SCALING.K, SCALING.r_K,
            initial.n_Ab1, initial.n_Ab2, initial.n_ab1, initial.n_ab2,
            seed, ssa.lineage_seed(seed), 50_000_000,
            eps_target=target, band_lo=band[0], band_hi=band[1],
            stop_at_eps=True, check_founder_b1=True,
        )

    def coupled(kern, seed):
        return kern.run_coupled(
            PARAMS.f_A, PARAMS.f_a, PARAMS.D_A, PARAMS.D_a,
            PARAMS.C_AA, PARAMS.C_Aa, PARAMS.C_aA, PARAMS.C_aa,
            SCALING.K, n0_A, 1,
            rates.s_minus, rates.s_plus,
            seed, 50_000_000,
            target, band[0], band[1],
        )

    return {"sweep": sweep, "tagged": tagged, "coupled": coupled}


def run_benchmark(n_reps: int = N_REPS) -> dict:
    """Time each workload on every available backend; verify agreement."""
    results = {}
    workloads = _workloads()
    for name, fn in workloads.items():
        per_backend = {}
        outputs = {}
        for backend in _kernels.available_backends():
            kern = _kernels.get_backend(backend)
            t0 = time.perf_counter()
            events = 0
            outs = []
            for i in range(n_reps):
                res = fn(kern, ssa.replicate_seed(SEED_BASE, i))
                events += res["events"]
                outs.append((res["status"], res["t"], res["events"], res.get("n")))
            dt = time.perf_counter() - t0
            per_backend[backend] = {
                "seconds": dt,
                "events": events,
                "events_per_s": events / dt if dt > 0 else float("inf"),
            }
            outputs[backend] = outs
        if len(outputs) == 2 and outputs["compiled"] != outputs["pure"]:
            raise AssertionError(f"backend outputs diverge on workload {name!r}")
        results[name] = per_backend
    return results


def main() -> None:
    results = run_benchmark()
    print(f"kernel backends: {', '.join(_kernels.available_backends())}")
    for name, per_backend in results.items():
        print(f"\nworkload: {name}")
        for backend, row in per_backend.items():
            print(
                f"  {backend:9s} {row['seconds']:8.3f} s   "
                f"{row['events']:>10d} events   {row['events_per_s']:>12.0f} events/s"
            )
        if "compiled" in per_backend and "pure" in per_backend:
            speedup = (per_backend["pure"]["seconds"]
                       / per_backend["compiled"]["seconds"])
            print(f"  speedup   {speedup:.1f}x")


if __name__ == "__main__":
    main()
