"""The logarithmic integral, its truncated asymptotic sums and the Stieltjes error.

Arguments may be ordinary numbers or :class:`PowE` instances.  ``PowE(k)``
stands for e**k with ln x taken as exactly ``k``, so integer exponents give a
fractional part of exactly zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import mpmath
from mpmath import mp, mpf

from .numerics import DomainError, PrecLike, as_precision, check_finite, exact, ln_factorial

# Euler-Mascheroni constant to 256 bits (78 significant digits).
EULER_GAMMA = "0.577215664901532860606512090082402431042159335939923598805767234884867726777664670937"

GUARD_BITS = 24


@dataclass(frozen=True)
class PowE:
    """The point x = e**exponent with an exactly known logarithm."""

    exponent: Union[int, str, float, mpf]

    def ln(self) -> mpf:
        return exact(self.exponent)


Arg = Union[int, float, str, mpf, PowE]


@dataclass(frozen=True)
class TruncationIndex:
    n_star: int
    alpha: mpf
    n_x: int


def _ln_and_x(arg: Arg, bits: int) -> tuple[mpf, mpf]:
    with mp.workprec(bits):
        if isinstance(arg, PowE):
            lnx = arg.ln()
            return lnx, mpmath.exp(lnx)
        x = +exact(arg)
        if x <= 0:
            raise DomainError(f"x must be > 0, got {x}")
        return mpmath.log(x), x


def _magnitude_bits(arg: Arg) -> int:
    """Extra bits so that values of size ~x keep full relative accuracy after cancellation."""
    if isinstance(arg, PowE):
        lnx = float(arg.ln())
    else:
        x = exact(arg)
        lnx = float(mpmath.log(x)) if x > 0 else 0.0
    return int(abs(lnx) / math.log(2)) + 1 if abs(lnx) > 1 else 0


def truncation_index(arg: Arg, p: PrecLike = None) -> TruncationIndex:
    bits = as_precision(p).bits + GUARD_BITS + _magnitude_bits(arg)
    lnx, _ = _ln_and_x(arg, bits)
    n_star = int(mpmath.floor(lnx))
    n_x = int(mpmath.ceil(lnx)) - 1
    with mp.workprec(bits):
        alpha = lnx - n_star
    return TruncationIndex(n_star, alpha, n_x)


def _ei_series(lnx: mpf, bits: int) -> mpf:
    """gamma + ln|t| + sum_{k>=1} t**k / (k * k!) at ``bits`` precision, t = ln x."""
    with mp.workprec(bits):
        t = lnx
        gamma = mpf(EULER_GAMMA)
        total = gamma + mpmath.log(abs(t))
        term = mpf(1)
        tol = mpf(2) ** (-bits - 8)
        small = 0
        k = 0
        while small < 3:
            k += 1
            term = term * t / k
            contrib = term / k
            total += contrib
            if k > abs(t) and abs(contrib) < tol * abs(total):
                small += 1
            else:
                small = 0
        return total


def li(arg: Arg, p: PrecLike = None) -> mpf:
    """Principal value of the integral of 1/ln t from 0 to x.

    Values for 0 < x < 1 come from the same series; that range is supported
    but not covered by the reproduction checks.
    """
    cfg = as_precision(p)
    if not isinstance(arg, PowE):
        x = exact(arg)
        if x == 0:
            return mpf(0)
        if x < 0:
            raise DomainError(f"li needs x >= 0, got {x}")
        if x == 1:
            raise DomainError("li has a logarithmic singularity at x = 1")
    elif exact(arg.exponent) == 0:
        raise DomainError("li has a logarithmic singularity at x = 1")
    # The series has alternating signs for x < 1; carry enough guard bits
    # to absorb the cancellation between terms of size ~e**|ln x|.
    bits = cfg.bits + GUARD_BITS + _magnitude_bits(arg) + 8
    lnx, _ = _ln_and_x(arg, bits)
    value = _ei_series(lnx, bits)
    with mp.workprec(cfg.bits):
        return check_finite(+value, "li(x)")


def _log_sum_terms(lnx: mpf, n: int, bits: int) -> mpf:
    """sum_{k=0}^{n-1} k!/ln^k x, each term built in log space."""
    with mp.workprec(bits):
        loglnx = mpmath.log(lnx)
        acc = mpf(0)
        for k in range(n):
            acc += mpmath.exp(ln_factorial(k, bits) - k * loglnx)
        return acc


def li_n(arg: Arg, n: int, p: PrecLike = None) -> mpf:
    """(x/ln x) * sum_{k=0}^{n-1} k!/ln^k x."""
    cfg = as_precision(p)
    if int(n) != n or n < 1:
        raise DomainError(f"li_n needs an integer n >= 1, got {n!r}")
    if n > 10**4:
        raise DomainError(f"li_n supports n <= 10**4, got {n}")
    bits = cfg.bits + GUARD_BITS
    lnx, _ = _ln_and_x(arg, bits)
    if lnx < 1:
        raise DomainError("li_n needs x >= e")
    with mp.workprec(bits):
        value = mpmath.exp(lnx - mpmath.log(lnx)) * _log_sum_terms(lnx, int(n), bits)
    with mp.workprec(cfg.bits):
        return check_finite(+value, "li_n(x)")


def _li_star_raw(lnx: mpf, bits: int) -> mpf:
    with mp.workprec(bits):
        n_star = int(mpmath.floor(lnx))
        alpha = lnx - n_star
        loglnx = mpmath.log(lnx)
        head = mpmath.exp(lnx - loglnx) * _log_sum_terms(lnx, n_star, bits)
        if alpha == 0:
            return head
        frac = alpha * mpmath.exp(lnx + ln_factorial(n_star, bits) - (n_star + 1) * loglnx)
        return frac + head


def li_star(arg: Arg, p: PrecLike = None) -> mpf:
    """Stieltjes approximation: truncation at n* = floor(ln x) plus the fractional term."""
    cfg = as_precision(p)
    bits = cfg.bits + GUARD_BITS
    lnx, _ = _ln_and_x(arg, bits)
    if lnx < 1:
        raise DomainError("li_star is defined for x >= e only")
    value = _li_star_raw(lnx, bits)
    with mp.workprec(cfg.bits):
        return check_finite(+value, "li_star(x)")


def epsilon(arg: Arg, p: PrecLike = None) -> mpf:
    """li_star(x) - li(x), evaluated with enough guard bits for the cancellation."""
    cfg = as_precision(p)
    bits = cfg.bits + GUARD_BITS + _magnitude_bits(arg) + 8
    lnx, _ = _ln_and_x(arg, bits)
    if lnx < 1:
        raise DomainError("epsilon is defined for x >= e only")
    with mp.workprec(bits):
        value = _li_star_raw(lnx, bits) - _ei_series(lnx, bits)
    with mp.workprec(cfg.bits):
        return check_finite(+value, "epsilon(x)")


def epsilon_k(k: int, p: PrecLike = None) -> mpf:
    """epsilon(e**k) with ln x taken as exactly k."""
    if int(k) != k or k < 1:
        raise DomainError(f"epsilon_k needs an integer k >= 1, got {k!r}")
    return epsilon(PowE(int(k)), p)
