"""Bounding formulas: Riemann enclosures, Robbins and related sandwiches,
Delta_k bounds and the telescoped enclosures of epsilon_n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Union

import mpmath
import numpy as np
from mpmath import mp, mpf

from . import constants
from .kernel import grid_riemann
from .logint import Arg, PowE, _ln_and_x, li
from .numerics import (
    DependencyError,
    DomainError,
    Enclosure,
    PrecLike,
    as_precision,
    compensated_sum,
    exact,
)

SQRT_2PI_TOL_BITS = 16


def _ulps(x: mpf, bits: int, count: int = 4) -> mpf:
    return abs(x) * count * mpf(2) ** (1 - bits)


def _enc(lo: mpf, hi: mpf, bits: int, count: int = 8) -> Enclosure:
    """Enclosure of closed-form endpoints evaluated at ``bits``, widened by a few ulps."""
    return Enclosure(lo - _ulps(lo, bits, count), hi + _ulps(hi, bits, count))


# --------------------------------------------------------------------------
# Riemann sums for unimodal integrands


@dataclass(frozen=True)
class Peak:
    u_star: mpf
    f_at_ustar: mpf


def riemann_enclosure(
    f: Callable[[mpf], mpf],
    a,
    b,
    M: int,
    peak,
    p: PrecLike = None,
) -> Enclosure:
    """[(sum_{i<M} f(x_i) - f*) h, (sum_{0<i<M} f(x_i) + f*) h] for unimodal f.

    ``f`` must return values accurate to 2**(-bits+8) relative.  ``peak`` is a
    :class:`~sterr.kernel.MaximizerResult` or anything with ``u_star`` and
    ``f_at_ustar``; an ``f_peak_upper`` attribute is preferred when present.
    """
    if int(M) != M or M < 2:
        raise DomainError(f"M must be an integer >= 2, got {M!r}")
    cfg = as_precision(p)
    bits = cfg.bits
    with mp.workprec(bits + 16):
        a, b = exact(a), exact(b)
        if not a < b:
            raise DomainError("riemann_enclosure needs a < b")
        u_star = exact(peak.u_star)
        if not a < u_star < b:
            raise DomainError(f"peak {u_star} lies outside ({a}, {b})")
        f_peak = exact(getattr(peak, "f_peak_upper", peak.f_at_ustar))
        step = (b - a) / M
        vals = [mpf(f(a + i * step)) for i in range(M)]
        interior = compensated_sum(vals[1:], bits + 16)
        left = interior + vals[0]
        lo = (left - f_peak) * step
        hi = (interior + f_peak) * step
        mag = sum(abs(v) for v in vals) * step + abs(f_peak) * step
        err = mag * (M * mpf(2) ** (-bits - 14) + mpf(2) ** (-bits + 9))
        return Enclosure(lo, hi).widen(err)


# --------------------------------------------------------------------------
# Delta_k


@dataclass(frozen=True)
class DeltaRecord:
    k: int
    M: int
    precision_bits: int
    S_lower: mpf
    S_upper: mpf
    u_star: mpf
    f_at_ustar: mpf

    def __post_init__(self) -> None:
        if self.k < 2 or self.M < 2:
            raise DomainError(f"bad delta record k={self.k} M={self.M}")
        if self.S_lower > self.S_upper:
            raise DomainError(f"delta record for k={self.k} has S_lower > S_upper")

    @property
    def delta(self) -> mpf:
        with mp.workprec(self.precision_bits + 16):
            return self.S_upper - self.S_lower

    @property
    def enclosure(self) -> Enclosure:
        return Enclosure(self.S_lower, self.S_upper)


def delta_k_riemann(k: int, M: int = 10**6, p: PrecLike = None, threads: int = 1) -> DeltaRecord:
    """Certified Riemann-sum bounds for Delta_k = integral of f_{k-1} over [0, 1]."""
    if int(k) != k or k < 2:
        raise DomainError(f"Delta_k has an integral form only for k >= 2, got {k!r}")
    if int(M) != M or M < 2:
        raise DomainError(f"M must be an integer >= 2, got {M!r}")
    cfg = as_precision(p)
    bits = cfg.bits
    enc, peak, _ = grid_riemann(int(k) - 1, mpf(1), int(M), bits, threads)
    # Round outward to the recorded precision so the record serialises exactly.
    lo = mpmath.fadd(enc.lo, 0, prec=bits, rounding="f")
    hi = mpmath.fadd(enc.hi, 0, prec=bits, rounding="c")
    u = mpmath.fadd(peak.u_star, 0, prec=bits)
    f = mpmath.fadd(peak.f_at_ustar, 0, prec=bits)
    return DeltaRecord(int(k), int(M), bits, lo, hi, u, f)


def delta_k_simple(k: int, p: PrecLike = None) -> Enclosure:
    """sqrt(2pi) e^(1/(12m+1) - 1/(8m)) / (6 k^1.5) <= Delta_k <= sqrt(2pi) e^(1/(12m)) / (6 m^1.5), m = k-1."""
    if int(k) != k or k < 2:
        raise DomainError(f"delta_k_simple needs k >= 2, got {k!r}")
    bits = as_precision(p).bits + 16
    m = int(k) - 1
    with mp.workprec(bits):
        r = mpmath.sqrt(2 * mpmath.pi)
        lo = r * mpmath.exp(mpf(1) / (12 * m + 1) - mpf(1) / (8 * m)) / (6 * mpf(k) ** 1.5)
        hi = r * mpmath.exp(mpf(1) / (12 * m)) / (6 * mpf(m) ** 1.5)
        return _enc(lo, hi, bits)


def _f_integrand_f64(m: int, u: np.ndarray) -> np.ndarray:
    return np.exp((u - 0.5) ** 2 / (4.0 * m)) * u * (1.0 - u) / (m + u) ** 1.5


def _f_log_slope(m: int, u: mpf) -> mpf:
    return (u - mpf(1) / 2) / (2 * m) + 1 / u - 1 / (1 - u) - mpf(3) / (2 * (m + u))


def f_integral(m: int, M: int = 10**5, p: PrecLike = None) -> Enclosure:
    """Enclosure of F(m) = int_0^1 e^((u-1/2)^2/(4m)) u(1-u) (m+u)^(-3/2) du.

    The integrand is log-concave on (0, 1): the second derivative of its log is
    1/(2m) - 1/u^2 - 1/(1-u)^2 + 3/(2(m+u)^2) <= 1/2 - 8 + 3/2 < 0.  It is
    therefore unimodal and the unimodal Riemann bound applies with the peak
    located by bisection on the log-derivative.
    """
    if int(m) != m or m < 1:
        raise DomainError(f"F(m) needs m >= 1, got {m!r}")
    bits = as_precision(p).bits
    with mp.workprec(bits + 16):
        lo_u, hi_u = mpf(0), mpf(1)
        while hi_u - lo_u > mpf(2) ** -60:
            mid = (lo_u + hi_u) / 2
            if _f_log_slope(m, mid) > 0:
                lo_u = mid
            else:
                hi_u = mid
        u = (lo_u + hi_u) / 2

        def G(v):
            return mpmath.exp((v - mpf(1) / 2) ** 2 / (4 * m)) * v * (1 - v) / (m + v) ** mpf(1.5)

        peak = G(u) * mpmath.exp(abs(_f_log_slope(m, u)) * (hi_u - lo_u)) * (1 + mpf(2) ** -40)
        # float64 grid sum; per-term relative error well under 2**-46, grid
        # perturbation 2**-52 with |G'| <= 1 on [0, 1].
        h = 1.0 / M
        vals = _f_integrand_f64(m, np.arange(M, dtype=np.float64) * h)
        interior = mpf(math.fsum(vals[1:].tolist()))
        budget = interior * (mpf(2) ** -46 + mpf(2) ** -52) + M * mpf(2) ** -52
        step = mpf(1) / M
        lo = (interior - peak) * step
        hi = (interior + peak) * step
        return Enclosure(lo, hi).widen(budget * step)


def delta_k_general(k: int, M_inner: int = 10**5, p: PrecLike = None) -> Enclosure:
    """sqrt(2pi) e^(1/(12m+1) - 1/(8m)) F(m) <= Delta_k <= sqrt(2pi) e^(1/(48m)) F(m), m = k-1."""
    if int(k) != k or k < 2:
        raise DomainError(f"delta_k_general needs k >= 2, got {k!r}")
    bits = as_precision(p).bits + 16
    m = int(k) - 1
    F = f_integral(m, M_inner, p)
    with mp.workprec(bits):
        r = mpmath.sqrt(2 * mpmath.pi)
        c_lo = r * mpmath.exp(mpf(1) / (12 * m + 1) - mpf(1) / (8 * m))
        c_hi = r * mpmath.exp(mpf(1) / (48 * m))
        return _enc(c_lo * F.lo, c_hi * F.hi, bits)


def general_envelope_ratio(k: int, p: PrecLike = None) -> mpf:
    """Ratio of the upper to the lower constant of :func:`delta_k_general`."""
    m = int(k) - 1
    with mp.workprec(as_precision(p).bits):
        return mpmath.exp(mpf(1) / (48 * m) - mpf(1) / (12 * m + 1) + mpf(1) / (8 * m))


# --------------------------------------------------------------------------
# Factorial sandwiches


def robbins_bounds(n: int, p: PrecLike = None) -> Enclosure:
    """ln-scale enclosure of n!: ln(sqrt(2 pi n) (n/e)^n) + [1/(12n+1), 1/(12n)]."""
    if int(n) != n or n < 1:
        raise DomainError(f"robbins_bounds needs an integer n >= 1, got {n!r}")
    if n > 10**6:
        raise DomainError(f"robbins_bounds supports n <= 10**6, got {n}")
    bits = as_precision(p).bits + 16
    with mp.workprec(bits):
        base = mpmath.log(2 * mpmath.pi * n) / 2 + n * mpmath.log(n) - n
        return _enc(base + mpf(1) / (12 * n + 1), base + mpf(1) / (12 * n), bits, 8 + int(math.log2(n + 1)))


def _check_alpha(alpha) -> mpf:
    a = exact(alpha)
    if not 0 <= a <= 1:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    return a


def factorial_expr_bounds(n: int, alpha, p: PrecLike = None) -> Enclosure:
    """Enclosure of n! e^(n+alpha) / (n+alpha)^(n+1)."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be an integer >= 1, got {n!r}")
    a = _check_alpha(alpha)
    bits = as_precision(p).bits + 16
    with mp.workprec(bits):
        r = mpmath.sqrt(2 * mpmath.pi) / mpmath.sqrt(n + a)
        q = a * (1 - a) / (4 * n)
        lo = r * mpmath.exp(mpf(1) / (12 * n + 1) - mpf(1) / (16 * n) - q)
        hi = r * mpmath.exp(mpf(1) / (12 * n) - q)
        return _enc(lo, hi, bits)


def exp_power_bounds(n: int, alpha, p: PrecLike = None) -> Enclosure:
    """Enclosure of (n/(n+alpha))^(n+1/2)."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be an integer >= 1, got {n!r}")
    a = _check_alpha(alpha)
    bits = as_precision(p).bits + 16
    with mp.workprec(bits):
        e = -a - a * (1 - a) / (4 * n)
        return _enc(mpmath.exp(e - mpf(1) / (16 * n)), mpmath.exp(e), bits)


# --------------------------------------------------------------------------
# epsilon_n


class EpsilonMethod:
    RIEMANN_TELESCOPE = "riemann-telescope"
    SIMPLE_S = "simple-s"
    EXPLICIT_17 = "explicit-17"


@dataclass(frozen=True)
class EpsilonBound:
    n: Union[int, float]
    lo: mpf
    hi: mpf
    method: str
    accumulated_delta: mpf

    @property
    def enclosure(self) -> Enclosure:
        return Enclosure(self.lo, self.hi)

    @property
    def width(self) -> mpf:
        return self.enclosure.width


_EPS1_CACHE: dict[int, Enclosure] = {}


def epsilon_1_anchor(p: PrecLike = None) -> Enclosure:
    """Certified enclosure of epsilon_1 = e - li(e), cross-checked against the stored literal."""
    bits = as_precision(p).bits
    if bits not in _EPS1_CACHE:
        work = max(bits, 64) + 32
        with mp.workprec(work):
            val = mpmath.e - li(PowE(1), work)
            enc = Enclosure(val, val).widen(abs(val) * mpf(2) ** (-work + 12))
        literal = mpf(constants.EPSILON_1)
        if abs(enc.mid - literal) > mpf("1e-15"):
            raise ArithmeticError(f"e - li(e) = {enc.mid} disagrees with the stored value {constants.EPSILON_1}")
        _EPS1_CACHE[bits] = enc
    return _EPS1_CACHE[bits]


DeltaSource = Mapping[int, DeltaRecord]


def _record(cache: DeltaSource, k: int) -> DeltaRecord:
    rec = cache.get(k) if hasattr(cache, "get") else None
    if rec is None:
        raise DependencyError(f"delta cache has no record for k={k}")
    return rec


def epsilon_n_riemann(n: int, cache: Optional[DeltaSource] = None, p: PrecLike = None) -> EpsilonBound:
    """[eps_1 - sum S_upper, eps_1 - sum S_lower] over k = 2..n."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be an integer >= 1, got {n!r}")
    cache = cache if cache is not None else {}
    recs = [_record(cache, k) for k in range(2, int(n) + 1)]
    Ms = {r.M for r in recs}
    if len(Ms) > 1:
        raise DependencyError(f"delta cache mixes partition sizes {sorted(Ms)}")
    bits = max([r.precision_bits for r in recs] + [as_precision(p).bits])
    anchor = epsilon_1_anchor(p if p is not None else bits)
    total = Enclosure.point(0)
    widths = []
    for r in recs:
        total = total + r.enclosure
        widths.append(r.delta)
    enc = anchor - total
    with mp.workprec(bits + 32):
        acc = mpmath.fsum(widths)
    return EpsilonBound(int(n), enc.lo, enc.hi, EpsilonMethod.RIEMANN_TELESCOPE, acc)


def epsilon_n_riemann_all(n_max: int, cache: DeltaSource, p: PrecLike = None) -> list:
    """:func:`epsilon_n_riemann` for every n = 1..n_max, sharing the running sums."""
    if int(n_max) != n_max or n_max < 1:
        raise DomainError(f"n_max must be an integer >= 1, got {n_max!r}")
    recs = [_record(cache, k) for k in range(2, int(n_max) + 1)]
    Ms = {r.M for r in recs}
    if len(Ms) > 1:
        raise DependencyError(f"delta cache mixes partition sizes {sorted(Ms)}")
    bits = max([r.precision_bits for r in recs] + [as_precision(p).bits])
    anchor = epsilon_1_anchor(p if p is not None else bits)
    out = [EpsilonBound(1, anchor.lo, anchor.hi, EpsilonMethod.RIEMANN_TELESCOPE, mpf(0))]
    total = Enclosure.point(0)
    acc = mpf(0)
    for r in recs:
        total = total + r.enclosure
        with mp.workprec(bits + 32):
            acc = acc + r.delta
        enc = anchor - total
        out.append(EpsilonBound(r.k, enc.lo, enc.hi, EpsilonMethod.RIEMANN_TELESCOPE, acc))
    return out


def accumulated_delta(n: int, cache: DeltaSource) -> mpf:
    recs = [_record(cache, k) for k in range(2, int(n) + 1)]
    with mp.workprec(max([r.precision_bits for r in recs] + [53]) + 32):
        return mpmath.fsum(r.delta for r in recs)


@dataclass(frozen=True)
class KappaTau:
    s: int
    kappa_lo: mpf
    kappa_hi: mpf
    tau_lo: mpf
    tau_hi: mpf


def kappa_tau(s: int, eps_s: Union[EpsilonBound, Enclosure], p: PrecLike = None) -> KappaTau:
    """kappa_lo = e^(1/(12s)), kappa_hi = e^(1/(12s+1) - 1/(8s)), tau = eps_s - (kappa/3) sqrt(2 pi / s)."""
    if int(s) != s or s < 1:
        raise DomainError(f"s must be an integer >= 1, got {s!r}")
    bits = as_precision(p).bits + 16
    with mp.workprec(bits):
        k_lo = mpmath.exp(mpf(1) / (12 * s))
        k_hi = mpmath.exp(mpf(1) / (12 * s + 1) - mpf(1) / (8 * s))
        root = mpmath.sqrt(2 * mpmath.pi / s) / 3
        t_lo = eps_s.lo - k_lo * root
        t_hi = eps_s.hi - k_hi * root
        t_lo -= _ulps(k_lo * root, bits, 8)
        t_hi += _ulps(k_hi * root, bits, 8)
    return KappaTau(int(s), k_lo, k_hi, t_lo, t_hi)


def epsilon_n_simple(n, s: int, kt: KappaTau, p: PrecLike = None) -> EpsilonBound:
    """tau + (kappa/3) sqrt(2 pi / n) on each side; ``n`` may be ``math.inf``."""
    if kt.s != s:
        raise DomainError(f"kappa/tau constants are for s={kt.s}, not s={s}")
    if not n > s:
        raise DomainError(f"epsilon_n_simple needs n > s, got n={n}, s={s}")
    bits = as_precision(p).bits + 16
    with mp.workprec(bits):
        if n == math.inf:
            root = mpf(0)
        else:
            root = mpmath.sqrt(2 * mpmath.pi / n) / 3
        lo = kt.tau_lo + kt.kappa_lo * root
        hi = kt.tau_hi + kt.kappa_hi * root
        lo -= _ulps(kt.kappa_lo * root, bits, 8)
        hi += _ulps(kt.kappa_hi * root, bits, 8)
    return EpsilonBound(n, lo, hi, EpsilonMethod.SIMPLE_S, mpf(0))


ASYMPTOTIC_FROM = 1000


def epsilon_x_bounds(arg: Arg, cache: Optional[DeltaSource] = None, p: PrecLike = None) -> Enclosure:
    """Enclosure of epsilon(x) from the discrete sandwich eps_{floor+1} < eps(x) <= eps_floor.

    Beyond e^1000 the explicit envelope with the s = 1000 constants is used;
    those constants come from the cache when it reaches k = 1000 and from the
    stored table (rounded outward by half a unit in the last place) otherwise.
    """
    cfg = as_precision(p)
    lnx, _ = _ln_and_x(arg, cfg.bits + 40)
    if lnx < 1:
        raise DomainError("epsilon_x_bounds needs x >= e")
    fl = int(mpmath.floor(lnx))
    cache = cache if cache is not None else {}
    if lnx <= ASYMPTOTIC_FROM:
        if lnx == fl:
            return epsilon_n_riemann(fl, cache, cfg).enclosure
        lower = epsilon_n_riemann(fl + 1, cache, cfg)
        upper = epsilon_n_riemann(fl, cache, cfg)
        return Enclosure(lower.lo, upper.hi)
    if all(k in cache for k in range(2, ASYMPTOTIC_FROM + 1)):
        kt = kappa_tau(ASYMPTOTIC_FROM, epsilon_n_riemann(ASYMPTOTIC_FROM, cache, cfg), cfg)
        lo_shift, hi_shift = kt.tau_lo, kt.tau_hi
    else:
        lo_shift = -(mpf(constants.C_LEFT) + mpf("5e-11"))
        hi_shift = mpf(constants.C_RIGHT) + mpf("5e-11")
    bits = cfg.bits + 16
    with mp.workprec(bits):
        c = mpmath.sqrt(2 * mpmath.pi) / 3
        lo = c / mpmath.sqrt(fl + 1) + lo_shift
        hi = c / mpmath.sqrt(fl) + hi_shift
        return _enc(lo, hi, bits)


def epsilon_explicit(n: int, p: PrecLike = None) -> EpsilonBound:
    """The explicit n > 1000 envelope with the stored s = 1000 constants."""
    if not n > ASYMPTOTIC_FROM:
        raise DomainError(f"the explicit envelope applies for n > {ASYMPTOTIC_FROM}")
    bits = as_precision(p).bits + 16
    with mp.workprec(bits):
        c = mpmath.sqrt(2 * mpmath.pi / n) / 3
        lo = c - mpf(constants.C_LEFT)
        hi = c + mpf(constants.C_RIGHT)
    return EpsilonBound(n, lo, hi, EpsilonMethod.EXPLICIT_17, mpf(0))


# --------------------------------------------------------------------------
# floor-root gap


def floor_root_gap(arg: Arg, p: PrecLike = None) -> mpf:
    """|1/sqrt(floor(ln x)) - 1/sqrt(ln x)|."""
    bits = as_precision(p).bits + 16
    lnx, _ = _ln_and_x(arg, bits)
    if lnx < 1:
        raise DomainError("floor_root_gap needs x >= e")
    with mp.workprec(bits):
        fl = mpmath.floor(lnx)
        return abs(1 / mpmath.sqrt(fl) - 1 / mpmath.sqrt(lnx))


def floor_root_gap_bound(arg: Arg, p: PrecLike = None) -> mpf:
    """The claimed bound 1/(2 (ln x)^(3/2)) on :func:`floor_root_gap`."""
    bits = as_precision(p).bits + 16
    lnx, _ = _ln_and_x(arg, bits)
    with mp.workprec(bits):
        return 1 / (2 * lnx ** mpf(1.5))
