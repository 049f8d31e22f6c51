"""The kernel f_n(u) = u(1-u) e^(n+u) n! / (n+u)^(n+2), its maximiser and Delta(x)."""
from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mp, mpf

from . import _backend
from .logint import Arg, PowE, _ln_and_x
from .numerics import DomainError, Enclosure, PrecLike, as_precision, exact, ln_factorial

DEFAULT_DELTA_M = 10**5


@dataclass(frozen=True)
class KernelParams:
    n: int

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"kernel index n must be an integer >= 1, got {self.n!r}")


@dataclass(frozen=True)
class MaximizerResult:
    u_star: mpf
    f_at_ustar: mpf
    residual: mpf
    bracket: mpf
    f_peak_upper: mpf


def _n(n) -> int:
    return n.n if isinstance(n, KernelParams) else KernelParams(n).n


def log_scale(n: int, bits: int) -> mpf:
    """ln of e^n n! / n^(n+2), the constant factor separating f_n from the grid kernel g_n."""
    with mp.workprec(bits):
        return n + ln_factorial(n, bits) - (n + 2) * mpmath.log(n)


def log_scale_error(n: int, bits: int) -> mpf:
    """Bound on the relative error of exp(log_scale(n, bits)).

    ln_factorial(n) carries at most n * ln(n!) * 2**(1-bits) absolute error;
    the remaining terms add a few roundings of size (n+2) ln n.
    """
    with mp.workprec(bits):
        lf = ln_factorial(n, bits)
        return (n * lf + 4 * (n + 2) * mpmath.log(n + 2) + n + 8) * mpf(2) ** (1 - bits)


def kernel_f(n, u, p: PrecLike = None) -> mpf:
    n = _n(n)
    cfg = as_precision(p)
    u = exact(u)
    if not 0 <= u <= 1:
        raise DomainError(f"kernel argument must lie in [0, 1], got {u}")
    if u == 0 or u == 1:
        return mpf(0)
    bits = cfg.bits + 16
    with mp.workprec(bits):
        val = mpmath.exp(
            mpmath.log(u) + mpmath.log(1 - u) + (n + u) + ln_factorial(n, bits) - (n + 2) * mpmath.log(n + u)
        )
    with mp.workprec(cfg.bits):
        return +val


def cubic(n: int, u: mpf) -> mpf:
    return ((u - 1) * u + (1 + 2 * n)) * u - n


def log_kernel_slope(n: int, u: mpf) -> mpf:
    """d/du ln f_n(u) = 1/u - 1/(1-u) + 1 - (n+2)/(n+u)."""
    return 1 / u - 1 / (1 - u) + 1 - mpf(n + 2) / (n + u)


def maximizer(n, tol=None, p: PrecLike = None) -> MaximizerResult:
    """Bisection for the unique root in (0, 1) of u^3 - u^2 + (1+2n)u - n.

    ``f_peak_upper`` bounds max f_n from above: ln f_n is concave, so
    ln f(u*) <= ln f(u) + |slope(u)| * |u* - u| for the returned u.
    """
    n = _n(n)
    cfg = as_precision(p)
    bits = cfg.bits + 16
    with mp.workprec(bits):
        tol = mpf(2) ** (-(cfg.bits // 2)) if tol is None else exact(tol)
        if tol < mpf(2) ** (-cfg.bits + 4):
            raise DomainError(f"tolerance {tol} finer than the working precision allows")
        lo, hi = mpf(0), mpf(1)
        # cubic(0) = -n < 0 < 1 + n = cubic(1) and the cubic is increasing on [0, 1].
        while hi - lo > tol:
            mid = (lo + hi) / 2
            if cubic(n, mid) < 0:
                lo = mid
            else:
                hi = mid
        u = (lo + hi) / 2
        res = cubic(n, u)
        f_u = kernel_f(n, u, bits)
        slope = abs(log_kernel_slope(n, u))
        peak_up = f_u * mpmath.exp(slope * (hi - lo)) * (1 + mpf(2) ** (-cfg.bits + 4))
    with mp.workprec(cfg.bits):
        return MaximizerResult(+u, +f_u, +res, +(hi - lo), +peak_up)


def grid_riemann(n: int, upper: mpf, M: int, bits: int, threads: int = 1) -> tuple[Enclosure, MaximizerResult, mpf]:
    """Unimodal Riemann enclosure of the integral of f_n over [0, upper], upper in (0, 1].

    Returns the enclosure, the maximiser of f_n, and the scaled interior
    sum  sum_{i=1}^{M-1} f_n(i*upper/M) (point value).
    """
    if M < 2:
        raise DomainError(f"M must be >= 2, got {M}")
    cfg = as_precision(bits)
    work = cfg.bits + 16
    peak = maximizer(n, p=cfg)
    with mp.workprec(work):
        upper = exact(upper)
        step = upper / M
        ks = _backend.g_sum(n, step, 1, M, cfg.bits, threads)
        scale = mpmath.exp(log_scale(n, work))
        scale_rel = log_scale_error(n, work)
        interior = ks.value * scale
        interior_err = ks.budget * scale + interior * scale_rel
        if upper >= peak.u_star:
            peak_val = peak.f_peak_upper
        else:
            # f_n is increasing on [0, upper]: the clipped peak sits at the right end.
            peak_val = kernel_f(n, upper, work) * (1 + mpf(2) ** (-cfg.bits + 4))
        lo = (interior - peak_val) * step
        hi = (interior + peak_val) * step
        err = interior_err * step + (abs(lo) + abs(hi)) * mpf(2) ** (-work + 4)
        enc = Enclosure(lo, hi).widen(err)
    return enc, peak, interior


def delta_x(arg: Arg, p: PrecLike = None, M: int = DEFAULT_DELTA_M, threads: int = 1) -> Enclosure:
    """Certified enclosure of Delta(x) = integral of f_n over [0, ln x - n], n = ceil(ln x) - 1."""
    cfg = as_precision(p)
    lnx, _ = _ln_and_x(arg, cfg.bits + 40)
    if lnx <= 1:
        raise DomainError("delta_x needs x > e")
    n = int(mpmath.ceil(lnx)) - 1
    with mp.workprec(cfg.bits + 40):
        alpha = lnx - n
    enc, _, _ = grid_riemann(n, alpha, M, cfg.bits, threads)
    # Delta(x) > 0; intersecting with [0, inf) keeps the enclosure certified.
    return Enclosure(max(enc.lo, mpf(0)), enc.hi) if enc.hi > 0 else enc


__all__ = [
    "KernelParams",
    "MaximizerResult",
    "PowE",
    "cubic",
    "delta_x",
    "grid_riemann",
    "kernel_f",
    "log_scale",
    "maximizer",
]
