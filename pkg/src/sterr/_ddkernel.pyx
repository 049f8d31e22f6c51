# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled double-double evaluation of the Riemann sums of the kernel

    g_n(u) = u (1 - u) exp(u - (n + 2) log1p(u / n)),   u_i = i * h,

summed per fixed-size chunk with a pairwise tree.  The operation sequence is
mirrored exactly by ``sterr._ddnumpy`` so both paths return identical bits.
"""
from libc.stdlib cimport malloc, free

import numpy as np

ctypedef struct dd:
    double hi
    double lo

cdef enum:
    MAX_LOG_TERMS = 64
    EXP_TERMS = 9

cdef double EXP_SCALE = 2048.0
cdef int TABLE_SIZE = 0
cdef double *TAB_HI = NULL
cdef double *TAB_LO = NULL
cdef dd LOG_COEF[MAX_LOG_TERMS]
cdef dd EXP_COEF[EXP_TERMS]


cdef inline dd two_sum(double a, double b) noexcept nogil:
    cdef dd r
    cdef double s = a + b
    cdef double bb = s - a
    r.hi = s
    r.lo = (a - (s - bb)) + (b - bb)
    return r


cdef inline dd quick_two_sum(double a, double b) noexcept nogil:
    cdef dd r
    cdef double s = a + b
    r.hi = s
    r.lo = b - (s - a)
    return r


cdef inline dd two_prod(double a, double b) noexcept nogil:
    cdef dd r
    cdef double p = a * b
    cdef double t = 134217729.0 * a
    cdef double ahi = t - (t - a)
    cdef double alo = a - ahi
    t = 134217729.0 * b
    cdef double bhi = t - (t - b)
    cdef double blo = b - bhi
    r.hi = p
    r.lo = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return r


cdef inline dd dd_add(dd a, dd b) noexcept nogil:
    cdef dd s = two_sum(a.hi, b.hi)
    cdef dd t = two_sum(a.lo, b.lo)
    cdef double e = s.lo + t.hi
    s = quick_two_sum(s.hi, e)
    e = s.lo + t.lo
    return quick_two_sum(s.hi, e)


cdef inline dd dd_neg(dd a) noexcept nogil:
    cdef dd r
    r.hi = -a.hi
    r.lo = -a.lo
    return r


cdef inline dd dd_from(double a) noexcept nogil:
    cdef dd r
    r.hi = a
    r.lo = 0.0
    return r


cdef inline dd dd_mul(dd a, dd b) noexcept nogil:
    cdef dd p = two_prod(a.hi, b.hi)
    cdef double e = p.lo + (a.hi * b.lo + a.lo * b.hi)
    return quick_two_sum(p.hi, e)


cdef inline dd dd_mul_d(dd a, double b) noexcept nogil:
    cdef dd p = two_prod(a.hi, b)
    cdef double e = p.lo + a.lo * b
    return quick_two_sum(p.hi, e)


cdef inline dd dd_div(dd a, dd b) noexcept nogil:
    cdef double q1 = a.hi / b.hi
    cdef dd r = dd_add(a, dd_neg(dd_mul_d(b, q1)))
    cdef double q2 = r.hi / b.hi
    r = dd_add(r, dd_neg(dd_mul_d(b, q2)))
    cdef double q3 = r.hi / b.hi
    cdef dd q = quick_two_sum(q1, q2)
    return dd_add(q, dd_from(q3))


cdef inline dd kernel_g(long i, dd h, double n, int log_terms) noexcept nogil:
    cdef dd u = dd_mul_d(h, <double>i)
    cdef dd z = dd_div(u, dd_add(u, dd_from(2.0 * n)))
    cdef dd z2 = dd_mul(z, z)
    cdef dd p = LOG_COEF[log_terms - 1]
    cdef int j
    for j in range(log_terms - 2, -1, -1):
        p = dd_add(dd_mul(p, z2), LOG_COEF[j])
    cdef dd lg = dd_mul(dd_mul_d(z, 2.0), p)
    cdef dd hexp = dd_add(u, dd_neg(dd_mul_d(lg, n + 2.0)))
    cdef int idx = <int>(-hexp.hi * EXP_SCALE)
    if idx < 0:
        idx = 0
    elif idx >= TABLE_SIZE:
        idx = TABLE_SIZE - 1
    cdef dd r = dd_add(hexp, dd_from(idx / EXP_SCALE))
    cdef dd t = EXP_COEF[EXP_TERMS - 1]
    for j in range(EXP_TERMS - 2, -1, -1):
        t = dd_add(dd_mul(t, r), EXP_COEF[j])
    cdef dd tab
    tab.hi = TAB_HI[idx]
    tab.lo = TAB_LO[idx]
    cdef dd e = dd_mul(tab, t)
    cdef dd w = dd_mul(u, dd_add(dd_from(1.0), dd_neg(u)))
    return dd_mul(w, e)


def init_tables(double[::1] exp_hi, double[::1] exp_lo,
                double[::1] log_hi, double[::1] log_lo,
                double[::1] tay_hi, double[::1] tay_lo):
    """Install the exp(-j/2048) table and the series coefficients."""
    global TABLE_SIZE, TAB_HI, TAB_LO
    cdef int m = exp_hi.shape[0]
    cdef int j
    if log_hi.shape[0] > MAX_LOG_TERMS or tay_hi.shape[0] != EXP_TERMS:
        raise ValueError("coefficient table size mismatch")
    if TAB_HI != NULL:
        free(TAB_HI)
        free(TAB_LO)
    TAB_HI = <double *> malloc(m * sizeof(double))
    TAB_LO = <double *> malloc(m * sizeof(double))
    if TAB_HI == NULL or TAB_LO == NULL:
        raise MemoryError()
    for j in range(m):
        TAB_HI[j] = exp_hi[j]
        TAB_LO[j] = exp_lo[j]
    TABLE_SIZE = m
    for j in range(log_hi.shape[0]):
        LOG_COEF[j].hi = log_hi[j]
        LOG_COEF[j].lo = log_lo[j]
    for j in range(EXP_TERMS):
        EXP_COEF[j].hi = tay_hi[j]
        EXP_COEF[j].lo = tay_lo[j]


def max_log_terms():
    return MAX_LOG_TERMS


def chunk_sums(long n, double h_hi, double h_lo, long i_start, long i_stop,
               long chunk, int log_terms):
    """Per-chunk double-double sums of g_n(i*h) for i in [i_start, i_stop).

    Chunk boundaries sit at absolute multiples of ``chunk``.  Returns two
    float64 arrays (hi, lo), one entry per chunk touched, in ascending order.
    """
    if TABLE_SIZE == 0:
        raise RuntimeError("tables not initialised")
    if n < 1 or chunk < 1 or i_start < 0 or i_stop < i_start:
        raise ValueError("bad kernel arguments")
    if log_terms < 1 or log_terms > MAX_LOG_TERMS:
        raise ValueError("log_terms out of range")
    cdef long first = i_start // chunk
    cdef long last = (i_stop - 1) // chunk if i_stop > i_start else first - 1
    cdef long nchunks = last - first + 1
    out_hi = np.zeros(max(nchunks, 0), dtype=np.float64)
    out_lo = np.zeros(max(nchunks, 0), dtype=np.float64)
    cdef double[::1] ohi = out_hi
    cdef double[::1] olo = out_lo
    if nchunks <= 0:
        return out_hi, out_lo
    cdef dd h
    h.hi = h_hi
    h.lo = h_lo
    cdef double dn = <double> n
    cdef dd *buf = <dd *> malloc(chunk * sizeof(dd))
    if buf == NULL:
        raise MemoryError()
    cdef long c, a, b, i, m, half, t
    try:
        with nogil:
            for c in range(nchunks):
                a = (first + c) * chunk
                b = a + chunk
                if a < i_start:
                    a = i_start
                if b > i_stop:
                    b = i_stop
                m = b - a
                for i in range(m):
                    buf[i] = kernel_g(a + i, h, dn, log_terms)
                while m > 1:
                    half = m // 2
                    for t in range(half):
                        buf[t] = dd_add(buf[2 * t], buf[2 * t + 1])
                    if m & 1:
                        buf[half] = buf[m - 1]
                    m = half + (m & 1)
                ohi[c] = buf[0].hi
                olo[c] = buf[0].lo
    finally:
        free(buf)
    return out_hi, out_lo
