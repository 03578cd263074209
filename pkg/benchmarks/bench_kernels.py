"""Timing comparison of the numba kernels against the numpy fallback.

Two views:

* kernels, in process: both implementation families stay importable
  side by side, so each interpolation kernel runs on identical
  bootstrapped discount-curve knots over growing query batches, with a
  parity column for the largest batch.
* end to end, in worker subprocesses: MULTICURVE_BACKEND is read once
  at import time, so a fresh process per setting bootstraps the
  synthetic discounting and 6M curves, runs a two-swap delta ladder,
  and evaluates the discount curve on a dense grid.

JIT compilation is triggered before any clock starts, so the numbers
are steady-state throughput, not first-call latency.

Usage:  python3 benchmarks/bench_kernels.py [--sizes 100,10000,1000000]
"""

import argparse
import json
import math
import os
import subprocess
import sys
from time import perf_counter

import numpy as np

from multicurve import Date, InstrumentKind, MarketState, add_months, instrument_pv
from multicurve._kernels import BACKEND, NUMBA_IMPLS, NUMPY_IMPLS, warm_up
from multicurve.interp import monotone_cubic_slopes, zero_rates_from_logdf
from multicurve.risk import delta_ladder
from multicurve.synthetic import default_market, make_quote_sets

REPEATS = 7


def best_seconds(fn, args, inner=1):
    best = math.inf
    for _ in range(REPEATS):
        t0 = perf_counter()
        for _ in range(inner):
            fn(*args)
        best = min(best, (perf_counter() - t0) / inner)
    return best


def two_curve_state():
    market = default_market()
    sets = make_quote_sets(market)
    keep = {"discount": sets["discount"], "fwd_6M": sets["fwd_6M"]}
    return MarketState(market.reference_date, keep)


def knot_arrays(curve):
    """Anchor-prepended knot data in the layout the kernels consume."""
    serials = np.array([d.serial for d in curve.pillar_dates], dtype=np.int64)
    ts = np.concatenate(
        ([0.0], (serials - curve.reference_date.serial) / 365.0)
    )
    dfs = np.concatenate(([1.0], curve.pillar_dfs))
    lnp = np.log(dfs)
    return ts, dfs, lnp, monotone_cubic_slopes(ts, lnp), zero_rates_from_logdf(ts, lnp)


def kernel_args(scheme, t, ts, dfs, lnp, drv, zr):
    if scheme == "cubic":
        return (t, ts, dfs, lnp, drv)
    if scheme == "linzero":
        return (t, ts, dfs, zr)
    return (t, ts, dfs, lnp)


def run_micro(sizes):
    curve = two_curve_state().base_curves()["discount"]
    ts, dfs, lnp, drv, zr = knot_arrays(curve)
    rng = np.random.default_rng(0)
    span = ts[-1] + 2.0  # include the extrapolation branch
    batches = {n: rng.uniform(0.0, span, size=n) for n in sizes}

    print(f"kernel micro-benchmark ({ts.size} knots, queries over [0, {span:.0f}y])")
    print(f"{'scheme':<10}{'n':>9}{'numba':>12}{'numpy':>12}{'speedup':>9}{'max|diff|':>11}")
    for scheme in ("cubic", "loglinear", "linzero"):
        for n in sizes:
            args = kernel_args(scheme, batches[n], ts, dfs, lnp, drv, zr)
            inner = max(1, 200_000 // n)
            t_np = best_seconds(NUMPY_IMPLS[scheme], args, inner)
            if NUMBA_IMPLS is None:
                print(f"{scheme:<10}{n:>9}{'-':>12}{_us(t_np):>12}{'-':>9}{'-':>11}")
                continue
            t_nb = best_seconds(NUMBA_IMPLS[scheme], args, inner)
            gap = float(
                np.max(np.abs(NUMBA_IMPLS[scheme](*args) - NUMPY_IMPLS[scheme](*args)))
            )
            ratio = t_np / t_nb
            print(
                f"{scheme:<10}{n:>9}{_us(t_nb):>12}{_us(t_np):>12}"
                f"{ratio:>8.1f}x{gap:>11.1e}"
            )


def _us(seconds):
    if seconds >= 1e-3:
        return f"{seconds * 1e3:.2f}ms"
    return f"{seconds * 1e6:.1f}us"


def run_worker():
    """Measure end-to-end stages under whatever backend is active."""
    warm_up()
    state = two_curve_state()
    curves = state.base_curves()  # includes JIT warm-up of every kernel

    boot_s = best_seconds(lambda: two_curve_state().base_curves(), ())

    sets = state.quote_sets
    swaps = {
        q.end: q
        for q in sets["fwd_6M"]
        if q.kind is InstrumentKind.SWAP
    }
    ref = state.reference_date
    legs = [
        (1e6, swaps[add_months(ref, 60)]),
        (-4e5, swaps[add_months(ref, 120)]),
    ]

    def book_pv(c):
        return sum(
            notional * instrument_pv(q, q.quote, c["fwd_6M"], c["discount"])
            for notional, q in legs
        )

    ladder = delta_ladder(state, book_pv)
    ladder_s = best_seconds(delta_ladder, (state, book_pv))

    rng = np.random.default_rng(1)
    grid = rng.uniform(0.0, 32.0, size=1_000_000)
    disc = curves["discount"]
    dense_s = best_seconds(disc.discount_time, (grid,))

    print(json.dumps({
        "backend": BACKEND,
        "quotes": len(ladder),
        "bootstrap_ms": boot_s * 1e3,
        "ladder_ms": ladder_s * 1e3,
        "dense_ms": dense_s * 1e3,
    }))


def run_end_to_end():
    results = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, MULTICURVE_BACKEND=backend)
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--worker"],
            env=env,
            capture_output=True,
            text=True,
        )
        if proc.returncode != 0:
            print(f"worker for backend {backend} failed:\n{proc.stderr}", file=sys.stderr)
            continue
        results[backend] = json.loads(proc.stdout.splitlines()[-1])

    if len(results) < 2:
        return
    nb, npx = results["numba"], results["numpy"]
    if nb["backend"] != "numba":
        print("numba unavailable, end-to-end comparison skipped", file=sys.stderr)
        return
    print()
    print("end to end (fresh worker process per backend)")
    print(f"{'stage':<34}{'numba':>10}{'numpy':>10}{'speedup':>9}")
    stages = [
        ("bootstrap discount + 6M curves", "bootstrap_ms"),
        (f"delta ladder ({nb['quotes']} quotes)", "ladder_ms"),
        ("dense eval, 1e6 points", "dense_ms"),
    ]
    for name, key in stages:
        ratio = npx[key] / nb[key]
        print(f"{name:<34}{nb[key]:>8.2f}ms{npx[key]:>8.2f}ms{ratio:>8.1f}x")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="100,10000,1000000")
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args(argv)

    if args.worker:
        run_worker()
        return

    if NUMBA_IMPLS is not None:
        warm_up()
    else:
        print(f"active backend is {BACKEND}; numba columns unavailable\n")
    run_micro([int(s) for s in args.sizes.split(",")])
    run_end_to_end()


if __name__ == "__main__":
    main()
