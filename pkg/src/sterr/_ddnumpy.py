"""Pure numpy mirror of the compiled double-double kernel.

Every function repeats the compiled operation sequence on float64 arrays, so
chunk sums agree bit for bit with ``sterr._ddkernel``.  Slower, but needs no
compiler.
"""
from __future__ import annotations

import numpy as np

_SPLITTER = 134217729.0

_tables: dict[str, np.ndarray] = {}


def init_tables(exp_hi, exp_lo, log_hi, log_lo, tay_hi, tay_lo) -> None:
    _tables.update(
        exp_hi=np.ascontiguousarray(exp_hi),
        exp_lo=np.ascontiguousarray(exp_lo),
        log_hi=np.ascontiguousarray(log_hi),
        log_lo=np.ascontiguousarray(log_lo),
        tay_hi=np.ascontiguousarray(tay_hi),
        tay_lo=np.ascontiguousarray(tay_lo),
    )


def max_log_terms() -> int:
    return 64


def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def two_prod(a, b):
    p = a * b
    t = _SPLITTER * a
    ahi = t - (t - a)
    alo = a - ahi
    t = _SPLITTER * b
    bhi = t - (t - b)
    blo = b - bhi
    return p, ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo


def dd_add(ah, al, bh, bl):
    sh, sl = two_sum(ah, bh)
    th, tl = two_sum(al, bl)
    e = sl + th
    sh, sl = quick_two_sum(sh, e)
    e = sl + tl
    return quick_two_sum(sh, e)


def dd_mul(ah, al, bh, bl):
    ph, pl = two_prod(ah, bh)
    e = pl + (ah * bl + al * bh)
    return quick_two_sum(ph, e)


def dd_mul_d(ah, al, b):
    ph, pl = two_prod(ah, b)
    e = pl + al * b
    return quick_two_sum(ph, e)


def dd_div(ah, al, bh, bl):
    q1 = ah / bh
    mh, ml = dd_mul_d(bh, bl, q1)
    rh, rl = dd_add(ah, al, -mh, -ml)
    q2 = rh / bh
    mh, ml = dd_mul_d(bh, bl, q2)
    rh, rl = dd_add(rh, rl, -mh, -ml)
    q3 = rh / bh
    qh, ql = quick_two_sum(q1, q2)
    return dd_add(qh, ql, q3, np.zeros_like(q3))


def kernel_g(idx: np.ndarray, h_hi: float, h_lo: float, n: float, log_terms: int):
    t = _tables
    zero = np.zeros(idx.shape)
    i = idx.astype(np.float64)
    uh, ul = dd_mul_d(np.full(idx.shape, h_hi), np.full(idx.shape, h_lo), i)
    dh, dl = dd_add(uh, ul, np.full(idx.shape, 2.0 * n), zero)
    zh, zl = dd_div(uh, ul, dh, dl)
    z2h, z2l = dd_mul(zh, zl, zh, zl)
    ph = np.full(idx.shape, t["log_hi"][log_terms - 1])
    pl = np.full(idx.shape, t["log_lo"][log_terms - 1])
    for j in range(log_terms - 2, -1, -1):
        mh, ml = dd_mul(ph, pl, z2h, z2l)
        ph, pl = dd_add(mh, ml, np.full(idx.shape, t["log_hi"][j]), np.full(idx.shape, t["log_lo"][j]))
    z2xh, z2xl = dd_mul_d(zh, zl, np.full(idx.shape, 2.0))
    lh, ll = dd_mul(z2xh, z2xl, ph, pl)
    mh, ml = dd_mul_d(lh, ll, np.full(idx.shape, n + 2.0))
    hh, hl = dd_add(uh, ul, -mh, -ml)
    scaled = -hh * 2048.0
    k = np.trunc(scaled)
    k = np.clip(k, 0, len(t["exp_hi"]) - 1).astype(np.int64)
    rh, rl = dd_add(hh, hl, k / 2048.0, zero)
    eh = np.full(idx.shape, t["tay_hi"][-1])
    el = np.full(idx.shape, t["tay_lo"][-1])
    for j in range(len(t["tay_hi"]) - 2, -1, -1):
        mh, ml = dd_mul(eh, el, rh, rl)
        eh, el = dd_add(mh, ml, np.full(idx.shape, t["tay_hi"][j]), np.full(idx.shape, t["tay_lo"][j]))
    eh, el = dd_mul(t["exp_hi"][k], t["exp_lo"][k], eh, el)
    oh, ol = dd_add(np.ones(idx.shape), zero, -uh, -ul)
    wh, wl = dd_mul(uh, ul, oh, ol)
    return dd_mul(wh, wl, eh, el)


def _pairwise(bh: np.ndarray, bl: np.ndarray):
    while len(bh) > 1:
        m = len(bh)
        half = m // 2
        sh, sl = dd_add(bh[0 : 2 * half : 2], bl[0 : 2 * half : 2], bh[1 : 2 * half : 2], bl[1 : 2 * half : 2])
        if m & 1:
            sh = np.append(sh, bh[m - 1])
            sl = np.append(sl, bl[m - 1])
        bh, bl = sh, sl
    return bh[0], bl[0]


def chunk_sums(n: int, h_hi: float, h_lo: float, i_start: int, i_stop: int, chunk: int, log_terms: int):
    if not _tables:
        raise RuntimeError("tables not initialised")
    if n < 1 or chunk < 1 or i_start < 0 or i_stop < i_start:
        raise ValueError("bad kernel arguments")
    if not 1 <= log_terms <= max_log_terms():
        raise ValueError("log_terms out of range")
    if i_stop == i_start:
        return np.zeros(0), np.zeros(0)
    first = i_start // chunk
    last = (i_stop - 1) // chunk
    out_hi = np.zeros(last - first + 1)
    out_lo = np.zeros(last - first + 1)
    with np.errstate(all="ignore"):
        for c in range(last - first + 1):
            a = max((first + c) * chunk, i_start)
            b = min((first + c + 1) * chunk, i_stop)
            gh, gl = kernel_g(np.arange(a, b, dtype=np.int64), h_hi, h_lo, float(n), log_terms)
            out_hi[c], out_lo[c] = _pairwise(gh, gl)
    return out_hi, out_lo
