from __future__ import annotations

import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from sterr.kernel import KernelParams, cubic, delta_x, grid_riemann, kernel_f, maximizer
from sterr.logint import PowE
from sterr.numerics import DomainError


def test_kernel_endpoints_and_value():
    assert kernel_f(3, 0) == 0
    assert kernel_f(3, 1) == 0
    assert math.isclose(float(kernel_f(1, 0.5)), 0.25 * math.exp(1.5) / 1.5**3, rel_tol=1e-15)


def test_kernel_domain():
    with pytest.raises(DomainError):
        kernel_f(1, 1.5)
    with pytest.raises(DomainError):
        KernelParams(0)


@pytest.mark.parametrize("n", [1, 7, 50, 100])
def test_log_space_matches_direct(n):
    for u in ("0.1", "0.37", "0.5", "0.9"):
        with mp.workprec(256):
            uu = mpf(u)
            direct = uu * (1 - uu) * mpmath.exp(n + uu) * mpmath.factorial(n) / (n + uu) ** (n + 2)
        got = kernel_f(n, uu, 192)
        with mp.workprec(256):
            assert abs(got - direct) <= abs(direct) * mpf(2) ** (-192 + 8)


def test_kernel_positive_and_unimodal():
    for n in (1, 2, 10, 100, 1000):
        u_star = maximizer(n).u_star
        vals = [kernel_f(n, mpf(i) / 1000, 64) for i in range(1001)]
        assert all(v > 0 for v in vals[1:-1])
        signs = [b > a for a, b in zip(vals, vals[1:])]
        flips = [i for i in range(1, len(signs)) if signs[i] != signs[i - 1]]
        assert len(flips) == 1
        assert abs(mpf(flips[0]) / 1000 - u_star) <= mpf(1) / 1000


def test_maximizer_n1():
    r = maximizer(1)
    assert math.isclose(float(r.u_star), 0.3611, abs_tol=1e-4)
    assert math.isclose(float(r.f_at_ustar), 0.356868728859, rel_tol=1e-11)
    # cross-check against the published width 2 f*/M at M = 10**6
    assert math.isclose(float(2 * r.f_at_ustar / 10**6), 7.1373745771830562e-7, rel_tol=1e-12)


def test_maximizer_large_n():
    r = maximizer(999)
    assert 0.4995 < r.u_star < 0.5


@pytest.mark.parametrize("n", [1, 3, 100, 10**4])
def test_maximizer_residual_and_range(n):
    r = maximizer(n)
    tol = mpf(2) ** -96
    u = r.u_star
    assert abs(r.residual) <= tol * (3 * u**2 + 2 * u + 1 + 2 * n)
    assert mpf(1) / 3 < u < mpf(1) / 2
    assert r.f_peak_upper >= r.f_at_ustar


def test_maximizer_precision_doubling():
    a, b = maximizer(5, p=192), maximizer(5, p=384)
    assert abs(a.u_star - b.u_star) <= 2 * mpf(2) ** -96


def test_maximizer_tolerance_floor():
    with pytest.raises(DomainError):
        maximizer(1, tol=mpf(2) ** -200)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 10**4))
def test_maximizer_is_cubic_root(n):
    r = maximizer(n, p=96)
    with mp.workprec(120):
        lo, hi = r.u_star - r.bracket, r.u_star + r.bracket
        assert cubic(n, lo) < 0 < cubic(n, hi)


def test_grid_riemann_small_m_against_mpmath():
    # Independent oracle: the same unimodal bound summed directly in mpmath.
    n, M = 4, 500
    enc, peak, _ = grid_riemann(n, mpf(1), M, 192)
    with mp.workprec(256):
        s = mpmath.fsum(kernel_f(n, mpf(i) / M, 224) for i in range(1, M))
        lo = (s - peak.f_at_ustar) / M
        hi = (s + peak.f_at_ustar) / M
        assert enc.lo <= lo and hi <= enc.hi
        assert enc.width - (hi - lo) < mpf(10) ** -25


def test_grid_riemann_fast_path_contains_precise():
    precise, _, _ = grid_riemann(9, mpf(1), 10**4, 192)
    fast, _, _ = grid_riemann(9, mpf(1), 10**4, 53)
    assert fast.contains(precise)


def test_delta_x_table_row():
    enc = delta_x(PowE(2), M=10**6)
    assert abs(enc.lo - mpf("0.23560593703797863551763")) < mpf("1e-16")


def test_delta_x_vanishing_range():
    # Delta(x) -> 0 as ln x approaches an integer from above.
    prev = None
    for a in ("2.01", "2.0001", "2.000001"):
        enc = delta_x(PowE(a), M=1000)
        assert enc.lo >= 0
        if prev is not None:
            assert enc.hi < prev.lo
        prev = enc
    assert prev.hi < mpf("1e-11")


def test_delta_x_monotone():
    a = delta_x(PowE("1.5"), M=10**5)
    b = delta_x(PowE("1.9"), M=10**5)
    assert a.hi < b.lo


def test_delta_x_domain():
    with pytest.raises(DomainError):
        delta_x(PowE(1))
