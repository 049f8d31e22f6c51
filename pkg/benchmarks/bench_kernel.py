"""Throughput of the Riemann-sum kernel: compiled double-double, numpy
double-double fallback and the float64 fast path.

    python benchmarks/bench_kernel.py --M 1000000 --n 1 99 999
"""
from __future__ import annotations

import argparse
import time

import numpy as np
from mpmath import mpf

from sterr import _backend, _ddnumpy


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--M", type=int, default=10**6)
    ap.add_argument("--n", type=int, nargs="+", default=[1, 99, 999])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    h = mpf(1) / args.M
    impls = [("numpy-dd", _ddnumpy)]
    if _backend.COMPILED:
        impls.insert(0, ("compiled-dd", _backend._impl))
    else:
        print("compiled extension not available; benchmarking the fallback only")
    print(f"{'n':>6} {'impl':<12} {'seconds':>9} {'Mterm/s':>8}  agrees")
    for n in args.n:
        ref = None
        for name, impl in impls:
            out = {}

            def run():
                out["v"] = _backend.dd_chunk_sums(n, h, 1, args.M, impl=impl)

            t = _time(run, args.repeat)
            hi, lo = out["v"]
            same = "" if ref is None else ("bit-identical" if np.array_equal(hi, ref[0]) and np.array_equal(lo, ref[1]) else "DIFFERS")
            ref = ref or (hi, lo)
            print(f"{n:>6} {name:<12} {t:9.3f} {args.M / t / 1e6:8.2f}  {same}")
        t = _time(lambda: _backend.g_sum_f64(n, h, 1, args.M), args.repeat)
        print(f"{n:>6} {'float64':<12} {t:9.3f} {args.M / t / 1e6:8.2f}")


if __name__ == "__main__":
    main()
