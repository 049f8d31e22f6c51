from __future__ import annotations

import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from sterr.logint import (
    EULER_GAMMA,
    PowE,
    epsilon,
    epsilon_k,
    li,
    li_n,
    li_star,
    truncation_index,
)
from sterr.numerics import DomainError

from oracles import quad_oracle, series_oracle


def test_euler_gamma_literal():
    with mp.workprec(256):
        assert abs(mpf(EULER_GAMMA) - mpmath.euler) < mpf(2) ** -250
        # exp/ln self-consistency of the stored literal
        g = mpf(EULER_GAMMA)
        assert abs(mpmath.log(mpmath.exp(g)) - g) < mpf(2) ** -250


def test_li_at_e():
    assert math.isclose(float(li(PowE(1))), 1.895117816355936756, rel_tol=1e-15)


def test_li_at_two():
    assert math.isclose(float(li(2)), 1.04516378011749278, rel_tol=1e-15)


def test_li_zero_and_domain():
    assert li(0) == 0
    for bad in (1, -1, PowE(0)):
        with pytest.raises(DomainError):
            li(bad)


@pytest.mark.parametrize("x", [2, PowE(1), 10, PowE(5)])
def test_li_matches_oracles(x):
    bits = 192
    with mp.workprec(bits + 64):
        xv = mpmath.exp(x.ln()) if isinstance(x, PowE) else mpf(x)
    got = li(x, bits)
    tol = abs(got) * mpf(2) ** (-bits + 10)
    assert abs(got - series_oracle(xv, bits)) <= tol
    assert abs(got - quad_oracle(xv, bits)) <= tol
    with mp.workprec(bits + 32):
        assert abs(got - mpmath.li(xv)) <= tol


def test_li_n_examples():
    with mp.workprec(192):
        assert math.isclose(float(li_n(PowE(2), 1)), float(mpmath.e**2 / 2), rel_tol=1e-15)
        assert math.isclose(float(li_n(PowE(1), 2)), float(2 * mpmath.e), rel_tol=1e-15)
        assert abs(li_n(PowE(3), 3) - mpf(14) / 27 * mpmath.exp(3)) < mpf(10) ** -50


def test_li_n_domain():
    with pytest.raises(DomainError):
        li_n(PowE(2), 0)
    with pytest.raises(DomainError):
        li_n(2, 1)


def test_li_star_examples():
    with mp.workprec(192):
        assert abs(li_star(PowE(1)) - mpmath.e) < mpf(10) ** -50
        assert abs(li_star(PowE(2)) - mpf(3) / 4 * mpmath.exp(2)) < mpf(10) ** -50
        assert abs(li_star(PowE("1.5")) - mpmath.exp(mpf("1.5")) * 8 / 9) < mpf(10) ** -50
    with pytest.raises(DomainError):
        li_star(2)


@pytest.mark.parametrize("m", [1, 2, 7, 40])
def test_li_star_at_integer_powers(m):
    assert li_star(PowE(m)) == li_n(PowE(m), m)


def test_truncation_index():
    t = truncation_index(PowE(5))
    assert (t.n_star, t.alpha, t.n_x) == (5, 0, 4)
    t = truncation_index(PowE("5.25"))
    assert (t.n_star, t.n_x) == (5, 5)
    assert math.isclose(float(t.alpha), 0.25)


def test_epsilon_values():
    assert math.isclose(float(epsilon(PowE(1))), 0.823164012103108479, abs_tol=1e-17)
    assert math.isclose(float(epsilon_k(1)), 0.823164012103108479, abs_tol=1e-17)
    e10 = epsilon_k(10)
    assert mpf("0.2640420034092351") <= e10 <= mpf("0.2640436853557264")
    e2, e5 = epsilon_k(2), epsilon_k(5)
    assert mpf("0.5875573613276722") <= e2 <= mpf("0.5875580750651299")
    assert mpf("0.3730720858991260") <= e5 <= mpf("0.3730734415998585")


def test_epsilon_large_argument():
    e = epsilon_k(1000)
    assert mpf("0.0264208377545706") <= e <= mpf("0.0264232319801236")
    # independent evaluation through mpmath's li with generous working precision
    with mp.workprec(1800):
        ref = li_star(PowE(1000), 1800) - mpmath.li(mpmath.exp(1000))
    assert abs(e - ref) < mpf(10) ** -50


def test_epsilon_k_domain():
    with pytest.raises(DomainError):
        epsilon_k(0)
    with pytest.raises(DomainError):
        epsilon(2)


def test_epsilon_decreasing_on_samples():
    xs = [PowE(mpf(1) + mpf(49) * i / 99) for i in range(100)]
    vals = [epsilon(x, 96) for x in xs]
    assert all(a > b for a, b in zip(vals, vals[1:]))


@settings(max_examples=25, deadline=None)
@given(st.floats(1.0, 50.0), st.floats(1e-3, 5.0))
def test_epsilon_decreasing_property(a, gap):
    x, y = PowE(a), PowE(a + gap)
    assert epsilon(y, 96) < epsilon(x, 96)


def test_li_precision_doubling_consistent():
    lo, hi = li(10, 192), li(10, 384)
    assert abs(lo - hi) <= abs(hi) * mpf(2) ** (-192 + 8)
