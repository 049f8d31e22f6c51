from __future__ import annotations

import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from sterr import constants
from sterr.bounds import (
    DeltaRecord,
    EpsilonMethod,
    Peak,
    delta_k_general,
    delta_k_riemann,
    delta_k_simple,
    epsilon_1_anchor,
    epsilon_explicit,
    epsilon_n_riemann,
    epsilon_n_riemann_all,
    epsilon_n_simple,
    epsilon_x_bounds,
    exp_power_bounds,
    f_integral,
    factorial_expr_bounds,
    floor_root_gap,
    floor_root_gap_bound,
    general_envelope_ratio,
    kappa_tau,
    riemann_enclosure,
    robbins_bounds,
)
from sterr.kernel import kernel_f, maximizer
from sterr.logint import PowE, epsilon_k
from sterr.numerics import DependencyError, DomainError


@pytest.fixture(scope="module")
def small_cache():
    """Records k = 2..101 at M = 10**4, 192 bits."""
    return {k: delta_k_riemann(k, 10**4, 192) for k in range(2, 102)}


def test_riemann_enclosure_constant():
    c = mpf(3)
    enc = riemann_enclosure(lambda u: c, 0, 1, 10, Peak(mpf("0.5"), c))
    assert enc.contains(c)
    # the upper sum runs over i = 1..M-1, so for a constant it is exactly c
    with mp.workprec(192):
        assert abs(enc.lo - (c - c / 10)) < mpf("1e-40") and abs(enc.hi - c) < mpf("1e-40")


def test_riemann_enclosure_parabola():
    enc = riemann_enclosure(lambda u: u * (1 - u), 0, 1, 100, Peak(mpf("0.5"), mpf("0.25")))
    assert enc.contains(mpf(1) / 6)


def test_riemann_enclosure_errors():
    with pytest.raises(DomainError):
        riemann_enclosure(lambda u: u, 0, 1, 1, Peak(mpf("0.5"), 1))
    with pytest.raises(DomainError):
        riemann_enclosure(lambda u: u, 0, 1, 10, Peak(mpf(2), 1))


def test_riemann_enclosure_matches_kernel_path():
    M = 2000
    peak = maximizer(1)
    generic = riemann_enclosure(lambda u: kernel_f(1, u, 192), 0, 1, M, peak)
    rec = delta_k_riemann(2, M)
    with mp.workprec(192):
        # same sums; they differ only by the double-double error budget
        assert abs(generic.hi - rec.S_upper) < mpf("1e-27")
        # the generic lower bound includes f(0) = 0, so both agree
        assert abs(generic.lo - rec.S_lower) < mpf("1e-27")


def test_delta_record_invariants():
    rec = delta_k_riemann(5, 10**4)
    with mp.workprec(256):
        assert rec.S_lower > 0
        excess = rec.delta - 2 * rec.f_at_ustar / rec.M
        assert 0 <= excess < rec.delta * mpf("1e-24")
    with pytest.raises(DomainError):
        delta_k_riemann(1, 10)
    with pytest.raises(DomainError):
        delta_k_riemann(2, 1)
    with pytest.raises(DomainError):
        DeltaRecord(2, 10, 53, mpf(2), mpf(1), mpf("0.4"), mpf(1))


@pytest.mark.parametrize("k", [2, 10, 100])
def test_delta_riemann_contains_quadrature(k):
    rec = delta_k_riemann(k, 10**5)
    with mp.workprec(192):
        q = mpmath.quad(lambda u: kernel_f(k - 1, u, 192), [0, maximizer(k - 1).u_star, 1])
    assert rec.enclosure.contains(q)


def test_delta_k_simple_examples():
    e = delta_k_simple(2)
    assert math.isclose(float(e.lo), 0.14077, abs_tol=5e-6)
    assert math.isclose(float(e.hi), 0.45408, abs_tol=5e-6)
    with mp.workprec(192):
        assert abs(mpf(constants.TABLE_2[2][0]) - e.lo - mpf(constants.TABLE_4[2][0])) < mpf("1e-15")
    assert e.contains(delta_k_riemann(10, 10**5).enclosure) is False
    assert delta_k_simple(10).contains(delta_k_riemann(10, 10**5).enclosure)
    with pytest.raises(DomainError):
        delta_k_simple(1)


def test_delta_k_simple_converges():
    widths = [delta_k_simple(k).width for k in (10, 100, 1000, 10000)]
    assert all(a > b for a, b in zip(widths, widths[1:]))
    e = delta_k_simple(10**6)
    assert e.hi / e.lo < 1 + mpf("1e-5")


def test_delta_k_general():
    rec = delta_k_riemann(2, 10**5)
    assert delta_k_general(2, 10**5).contains(rec.enclosure.mid)
    assert delta_k_general(1000, 10**5).width < delta_k_simple(1000).width
    ratios = [general_envelope_ratio(k) for k in (2, 10, 100, 10**4)]
    assert all(a > b for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] - 1 < mpf("1e-4")
    with pytest.raises(DomainError):
        delta_k_general(1)


def test_f_integral_against_quadrature():
    for m in (1, 50):
        with mp.workprec(120):
            q = mpmath.quad(lambda u: mpmath.exp((u - 0.5) ** 2 / (4 * m)) * u * (1 - u) / (m + u) ** 1.5, [0, 1])
        assert f_integral(m, 10**4).contains(q)


def test_robbins_contains_exact_log_factorial():
    for n in range(1, 171):
        with mp.workprec(256):
            true = mpmath.log(mpf(math.factorial(n)))
        assert robbins_bounds(n).contains(true)
    with pytest.raises(DomainError):
        robbins_bounds(0)


def test_factorial_expr_examples():
    e = factorial_expr_bounds(3, mpf("0.5"))
    with mp.workprec(192):
        assert e.contains(6 * mpmath.exp(mpf("3.5")) / mpf("3.5") ** 4)
        assert factorial_expr_bounds(1, 1).contains(mpmath.exp(2) / 4)
    for n in (1, 7, 40):
        r = robbins_bounds(n)
        f0 = factorial_expr_bounds(n, 0)
        with mp.workprec(192):
            # alpha = 0: Robbins scaled by e^n / n^(n+1), with the extra 1/(16n) slack on the left
            scale = n - (n + 1) * mpmath.log(n)
            assert abs(mpmath.log(f0.hi) - (r.hi + scale)) < mpf("1e-40")
    with pytest.raises(DomainError):
        factorial_expr_bounds(2, mpf("1.5"))


def test_exp_power_examples():
    e = exp_power_bounds(5, 0)
    assert e.contains(1)
    with mp.workprec(192):
        assert abs(e.lo - mpmath.exp(-mpf(1) / 80)) < mpf("1e-40")
        assert exp_power_bounds(1, 1).contains(mpf("0.5") ** mpf("1.5"))
        assert exp_power_bounds(10, mpf("0.5")).contains((mpf(10) / mpf("10.5")) ** mpf("10.5"))
    with pytest.raises(DomainError):
        exp_power_bounds(1, -mpf("0.1"))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 500), st.fractions(0, 1, max_denominator=1000))
def test_sandwiches_property(n, a):
    with mp.workprec(256):
        alpha = mpf(a.numerator) / a.denominator
        direct_f = mpmath.exp(mpmath.log(mpmath.factorial(n)) + n + alpha - (n + 1) * mpmath.log(n + alpha))
        direct_e = (mpf(n) / (n + alpha)) ** (n + mpf(1) / 2)
    assert factorial_expr_bounds(n, alpha).contains(direct_f)
    assert exp_power_bounds(n, alpha).contains(direct_e)


def test_epsilon_anchor():
    a = epsilon_1_anchor()
    with mp.workprec(192):
        assert abs(a.mid - mpf(constants.EPSILON_1)) < mpf("1e-18")
    assert a.width < mpf("1e-50")
    b = epsilon_n_riemann(1)
    assert math.isclose(float(b.lo), 0.8231640121031085, abs_tol=1e-16)
    assert b.lo == a.lo and b.hi == a.hi


def test_epsilon_n_riemann_missing_record():
    with pytest.raises(DependencyError, match="k=3"):
        epsilon_n_riemann(4, {2: delta_k_riemann(2, 100), 4: delta_k_riemann(4, 100)})


def test_epsilon_n_riemann_mixed_m():
    with pytest.raises(DependencyError):
        epsilon_n_riemann(3, {2: delta_k_riemann(2, 100), 3: delta_k_riemann(3, 200)})


def test_epsilon_width_equals_accumulated_delta(small_cache):
    b = epsilon_n_riemann(101, small_cache)
    assert b.method == EpsilonMethod.RIEMANN_TELESCOPE
    with mp.workprec(256):
        excess = (b.hi - b.lo) - b.accumulated_delta
        assert 0 <= excess <= epsilon_1_anchor().width + mpf("1e-50")


def test_all_matches_single(small_cache):
    allb = epsilon_n_riemann_all(101, small_cache)
    for n in (1, 2, 50, 101):
        one = epsilon_n_riemann(n, small_cache)
        assert (one.lo, one.hi) == (allb[n - 1].lo, allb[n - 1].hi)


@pytest.mark.parametrize("k", [2, 3, 7, 12, 20])
def test_telescoping_contains_direct_epsilon(small_cache, k):
    assert epsilon_n_riemann(k, small_cache).enclosure.contains(epsilon_k(k))


def test_kappa_tau_examples():
    kt = kappa_tau(2, epsilon_n_riemann(2, {2: delta_k_riemann(2, 10**6)}))
    assert math.isclose(float(kt.kappa_lo), 1.0425469052, abs_tol=1e-10)
    assert math.isclose(float(kt.kappa_hi), 0.9777512372, abs_tol=1e-10)
    assert kt.kappa_lo > 1 > kt.kappa_hi
    prods = [kappa_tau(s, epsilon_1_anchor()) for s in (10, 100, 1000)]
    assert all(abs(p.kappa_lo * p.kappa_hi - 1) < mpf(1) / p.s for p in prods)


@pytest.mark.parametrize("s", [10, 100])
def test_simple_bound_contains_riemann_next(small_cache, s):
    kt = kappa_tau(s, epsilon_n_riemann(s, small_cache))
    simple = epsilon_n_simple(s + 1, s, kt)
    assert simple.enclosure.contains(epsilon_n_riemann(s + 1, small_cache).enclosure)


def test_simple_bound_far_tail(small_cache):
    kt = kappa_tau(100, epsilon_n_riemann(100, small_cache))
    lim = epsilon_n_simple(math.inf, 100, kt)
    assert lim.lo == kt.tau_lo or abs(lim.lo - kt.tau_lo) < mpf("1e-50")
    b = epsilon_n_simple(2000, 100, kt)
    assert b.enclosure.contains(epsilon_k(2000))
    with pytest.raises(DomainError):
        epsilon_n_simple(100, 100, kt)


def test_explicit_envelope_contains_direct_epsilon():
    b = epsilon_explicit(2000)
    assert b.method == EpsilonMethod.EXPLICIT_17
    assert b.enclosure.contains(epsilon_k(2000))


def test_epsilon_x_bounds_small(small_cache):
    e = epsilon_x_bounds(PowE(1), small_cache)
    assert math.isclose(float(e.hi), 0.8231640121031085, abs_tol=1e-16)
    x = epsilon_x_bounds(PowE("10.5"), small_cache)
    lo11, hi10 = epsilon_n_riemann(11, small_cache).lo, epsilon_n_riemann(10, small_cache).hi
    assert x.lo == lo11 and x.hi == hi10
    with pytest.raises(DomainError):
        epsilon_x_bounds(2)


def test_epsilon_x_bounds_beyond_table():
    e = epsilon_x_bounds(PowE(2000))
    c = math.sqrt(2 * math.pi) / 3
    assert math.isclose(float(e.lo), c / math.sqrt(2001) - 3.5462e-6, abs_tol=1e-10)
    assert math.isclose(float(e.hi), c / math.sqrt(2000) + 2.1511e-6, abs_tol=1e-10)
    assert e.contains(epsilon_k(2000))


def test_floor_root_gap_examples():
    assert floor_root_gap(PowE(7)) == 0
    assert math.isclose(float(floor_root_gap(PowE("2.5"))), abs(1 / math.sqrt(2) - 1 / math.sqrt(2.5)), rel_tol=1e-14)
    assert floor_root_gap(PowE("2.5")) <= floor_root_gap_bound(PowE("2.5"))
    assert floor_root_gap(PowE("100.5")) <= floor_root_gap_bound(PowE("100.5"))
    assert math.isclose(float(floor_root_gap_bound(PowE("100.5"))), 4.96e-4, rel_tol=1e-2)
    with pytest.raises(DomainError):
        floor_root_gap(2)


def test_monotone_riemann_records(sweep_view):
    ks = list(sweep_view)
    assert len(ks) == 999
    for a, b in zip(ks, ks[1:]):
        assert sweep_view[b].S_upper < sweep_view[a].S_lower
