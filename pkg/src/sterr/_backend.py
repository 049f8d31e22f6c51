"""Selects the Riemann-sum kernel implementation and owns its error model.

The compiled extension ``sterr._ddkernel`` is used when importable; otherwise
the numpy mirror ``sterr._ddnumpy`` takes over.  Setting ``STERR_PURE_PYTHON=1``
forces the fallback.  Both produce identical chunk sums.

Error model of the double-double path, per evaluated term g(u_i):
  * relative evaluation error <= 2**-96 (series truncations are held below
    2**-110, the remaining slack covers ~40 double-double roundings; the test
    suite checks the observed error against mpmath stays below 2**-100);
  * grid perturbation |u~_i - u_i| <= 2**-103 * u_i, and |g'| <= 3/2 on [0, 1];
  * each pairwise or chunk-combining addition contributes <= 2**-103 relative.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import mpmath
import numpy as np
from mpmath import mp, mpf

from . import _ddnumpy

try:
    if os.environ.get("STERR_PURE_PYTHON") == "1":
        raise ImportError("pure-python backend forced")
    from . import _ddkernel as _impl

    COMPILED = True
except ImportError:
    _impl = _ddnumpy
    COMPILED = False

BACKEND_NAME = "compiled" if COMPILED else "numpy"

CHUNK = 1 << 16
EXP_SCALE = 2048
EXP_TABLE_SIZE = 2400  # covers exponents down to -1.17; the kernel needs >= 1 - 3 ln 2
TERM_REL_DD = mpf(2) ** -96
ROUND_DD = mpf(2) ** -103
TERM_REL_F64 = mpf(2) ** -46
ROUND_F64 = mpf(2) ** -52
GPRIME_MAX = mpf(3) / 2


def _split_dd(x: mpf) -> tuple[float, float]:
    hi = float(x)
    with mp.workprec(256):
        lo = float(x - hi)
    return hi, lo


def _tables() -> tuple[np.ndarray, ...]:
    with mp.workprec(256):
        ex = [_split_dd(mpmath.exp(-mpf(j) / EXP_SCALE)) for j in range(EXP_TABLE_SIZE)]
        lg = [_split_dd(mpf(1) / (2 * j + 1)) for j in range(_impl.max_log_terms())]
        ty = [_split_dd(mpf(1) / mpmath.factorial(k)) for k in range(9)]
    cols = []
    for tab in (ex, lg, ty):
        cols.append(np.array([a for a, _ in tab]))
        cols.append(np.array([b for _, b in tab]))
    return tuple(cols)


_TABLES = _tables()
_impl.init_tables(*_TABLES)
if _impl is not _ddnumpy:
    _ddnumpy.init_tables(*_TABLES)


def log_series_terms(n: int, u_max: float) -> int:
    """Terms of the atanh series for log1p(u/n) keeping truncation below 2**-110."""
    z = u_max / (2 * n + u_max)
    z2 = z * z
    if z2 == 0:
        return 1
    for j in range(1, _impl.max_log_terms() + 1):
        if z2**j / ((2 * j + 1) * (1 - z2)) <= 2.0**-110:
            return j
    raise ValueError(f"log series does not converge fast enough for n={n}")


@dataclass(frozen=True)
class KernelSum:
    """Sum of g_n over a grid, with a certified absolute error budget."""

    value: mpf
    budget: mpf
    terms: int
    backend: str


def _chunk_groups(i_start: int, i_stop: int, threads: int) -> list[tuple[int, int]]:
    first = i_start // CHUNK
    last = (i_stop - 1) // CHUNK
    nchunks = last - first + 1
    per = max(1, math.ceil(nchunks / max(threads, 1)))
    groups = []
    for c0 in range(first, last + 1, per):
        a = max(c0 * CHUNK, i_start)
        b = min((c0 + per) * CHUNK, i_stop)
        groups.append((a, b))
    return groups


def dd_chunk_sums(n: int, h: mpf, i_start: int, i_stop: int, threads: int = 1, impl=None):
    """Chunk sums (hi, lo arrays) of g_n(i*h), i in [i_start, i_stop)."""
    impl = impl or _impl
    h_hi, h_lo = _split_dd(h)
    if i_stop <= i_start:
        return np.zeros(0), np.zeros(0)
    if float(h) * (i_stop - 1) > 1.0:
        raise ValueError("kernel grid must stay inside [0, 1]")
    terms = log_series_terms(n, float(h) * (i_stop - 1))
    groups = _chunk_groups(i_start, i_stop, threads)

    def run(ab):
        return impl.chunk_sums(n, h_hi, h_lo, ab[0], ab[1], CHUNK, terms)

    if threads > 1 and len(groups) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, groups))
    else:
        parts = [run(g) for g in groups]
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def combine_chunks(hi: np.ndarray, lo: np.ndarray) -> tuple[float, float]:
    """Double-double accumulation of chunk sums in ascending order."""
    sh, sl = 0.0, 0.0
    for a, b in zip(hi.tolist(), lo.tolist()):
        sh, sl = _ddnumpy.dd_add(sh, sl, a, b)
    return sh, sl


def g_sum_dd(n: int, h: mpf, i_start: int, i_stop: int, threads: int = 1) -> KernelSum:
    hi, lo = dd_chunk_sums(n, h, i_start, i_stop, threads)
    sh, sl = combine_chunks(hi, lo)
    count = max(i_stop - i_start, 0)
    with mp.workprec(160):
        value = mpf(sh) + mpf(sl)
        levels = math.ceil(math.log2(CHUNK)) + len(hi) + 2
        budget = value * (TERM_REL_DD + levels * ROUND_DD) + count * GPRIME_MAX * ROUND_DD
    return KernelSum(value, budget, count, BACKEND_NAME)


def g_values_f64(n: int, h: float, i_start: int, i_stop: int) -> np.ndarray:
    u = np.arange(i_start, i_stop, dtype=np.float64) * h
    return u * (1.0 - u) * np.exp(u - (n + 2) * np.log1p(u / n))


def g_sum_f64(n: int, h: mpf, i_start: int, i_stop: int, threads: int = 1) -> KernelSum:
    """Float64 fast path; summed with math.fsum per chunk, chunks in order."""
    hf = float(h)
    if hf * (i_stop - 1) > 1.0:
        raise ValueError("kernel grid must stay inside [0, 1]")
    parts = []
    for a in range(i_start, i_stop, CHUNK):
        parts.append(math.fsum(g_values_f64(n, hf, a, min(a + CHUNK, i_stop)).tolist()))
    total = math.fsum(parts)
    count = max(i_stop - i_start, 0)
    with mp.workprec(120):
        value = mpf(total)
        budget = value * (TERM_REL_F64 + 2 * ROUND_F64) + count * GPRIME_MAX * ROUND_F64
    return KernelSum(value, budget, count, "float64")


def g_sum(n: int, h: mpf, i_start: int, i_stop: int, bits: int, threads: int = 1) -> KernelSum:
    """Grid sum of g_n at the arithmetic matching ``bits`` (53: float64, else double-double)."""
    if bits <= 53:
        return g_sum_f64(n, h, i_start, i_stop, threads)
    return g_sum_dd(n, h, i_start, i_stop, threads)
