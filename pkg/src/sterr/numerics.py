"""Precision-configurable scalars, certified enclosures and deterministic sums.

Scalars are :class:`mpmath.mpf` values evaluated under an explicit working
precision.  Enclosures carry a lower and an upper endpoint; arithmetic on them
rounds outward through mpmath's directed rounding, and transcendental chains
are widened with an explicitly tracked error budget.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import mpmath
from mpmath import mp, mpf

DEFAULT_BITS = 192
FAST_BITS = 53

Number = Union[int, float, str, mpf]


class DomainError(ValueError):
    """An argument lies outside the documented domain of an operation."""


class RangeError(ArithmeticError):
    """A non-finite value escaped a computation."""


class DependencyError(LookupError):
    """A required cached input (delta record, cache line) is missing or corrupt."""


class WideningPolicy(str, enum.Enum):
    PER_OP = "per-op"
    END_OF_CHAIN = "end-of-chain"


@dataclass(frozen=True)
class PrecisionConfig:
    bits: int = DEFAULT_BITS
    widening_policy: WideningPolicy = WideningPolicy.END_OF_CHAIN

    def __post_init__(self) -> None:
        if int(self.bits) != self.bits or self.bits < 53:
            raise DomainError(f"precision must be an integer >= 53 bits, got {self.bits!r}")
        object.__setattr__(self, "widening_policy", WideningPolicy(self.widening_policy))

    @property
    def unit(self) -> mpf:
        """2**(1 - bits): the relative spacing of representable values."""
        return mpf(2) ** (1 - self.bits)

    @property
    def digits(self) -> int:
        """Decimal digits needed to represent a value at this precision."""
        return math.ceil(self.bits * math.log10(2))

    def doubled(self) -> "PrecisionConfig":
        return PrecisionConfig(2 * self.bits, self.widening_policy)


PrecLike = Union[PrecisionConfig, int, None]


def as_precision(p: PrecLike) -> PrecisionConfig:
    if p is None:
        return PrecisionConfig()
    if isinstance(p, PrecisionConfig):
        return p
    return PrecisionConfig(int(p))


def exact(x: Number) -> mpf:
    """Convert to mpf without rounding mpf, int or float inputs."""
    if isinstance(x, mpf):
        return x
    if isinstance(x, int):
        with mp.workprec(max(x.bit_length(), 53)):
            return mpf(x)
    if isinstance(x, float):
        with mp.workprec(53):
            return mpf(x)
    with mp.workprec(max(mp.prec, 256)):
        return mpf(x)


def check_finite(x: mpf, what: str = "value") -> mpf:
    if not mpmath.isfinite(x):
        raise RangeError(f"{what} is not finite: {x}")
    return x


def rounding_budget(magnitude: Number, ops: int, p: PrecLike = None) -> mpf:
    """Error budget ``ops * 2**(-bits + 2) * |magnitude|`` for an operation chain."""
    cfg = as_precision(p)
    with mp.workprec(cfg.bits + 10):
        return ops * mpf(2) ** (-cfg.bits + 2) * abs(mpf(magnitude))


@dataclass(frozen=True)
class Enclosure:
    """Closed interval ``[lo, hi]`` certified to contain a true value."""

    lo: mpf
    hi: mpf

    def __post_init__(self) -> None:
        lo, hi = exact(self.lo), exact(self.hi)
        check_finite(lo, "enclosure lower endpoint")
        check_finite(hi, "enclosure upper endpoint")
        if lo > hi:
            raise DomainError(f"enclosure endpoints out of order: [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: Number) -> "Enclosure":
        x = exact(x)
        return cls(x, x)

    @property
    def width(self) -> mpf:
        return mpmath.fsub(self.hi, self.lo, rounding="c", prec=_endpoint_prec(self))

    @property
    def mid(self) -> mpf:
        return mpmath.fdiv(mpmath.fadd(self.lo, self.hi, exact=True), 2, prec=_endpoint_prec(self))

    def contains(self, x: Union[Number, "Enclosure"]) -> bool:
        if isinstance(x, Enclosure):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= exact(x) <= self.hi

    def strictly_inside(self, lo: Number, hi: Number) -> bool:
        return exact(lo) < self.lo and self.hi < exact(hi)

    def widen(self, budget: Number) -> "Enclosure":
        budget = exact(budget)
        if budget < 0:
            raise DomainError("negative error budget")
        prec = _endpoint_prec(self)
        return Enclosure(
            mpmath.fsub(self.lo, budget, rounding="f", prec=prec),
            mpmath.fadd(self.hi, budget, rounding="c", prec=prec),
        )

    def inflate_ulps(self, ulps: int = 2) -> "Enclosure":
        prec = _endpoint_prec(self)
        scale = max(abs(self.lo), abs(self.hi))
        return self.widen(ulps * mpf(2) ** (-prec + 1) * scale)

    def __neg__(self) -> "Enclosure":
        # unary minus on mpf rounds to the context precision; negate exactly
        return Enclosure(mpmath.fneg(self.hi, exact=True), mpmath.fneg(self.lo, exact=True))

    def __add__(self, other: Union["Enclosure", Number]) -> "Enclosure":
        other = _as_enclosure(other)
        prec = max(_endpoint_prec(self), _endpoint_prec(other))
        return Enclosure(
            mpmath.fadd(self.lo, other.lo, rounding="f", prec=prec),
            mpmath.fadd(self.hi, other.hi, rounding="c", prec=prec),
        )

    __radd__ = __add__

    def __sub__(self, other: Union["Enclosure", Number]) -> "Enclosure":
        return self + (-_as_enclosure(other))

    def __rsub__(self, other: Number) -> "Enclosure":
        return _as_enclosure(other) - self

    def scale(self, c: Number) -> "Enclosure":
        """Multiply by an exactly known scalar."""
        c = exact(c)
        prec = max(_endpoint_prec(self), c._mpf_[3])
        a = mpmath.fmul(self.lo, c, rounding="f", prec=prec)
        b = mpmath.fmul(self.hi, c, rounding="f", prec=prec)
        a_up = mpmath.fmul(self.lo, c, rounding="c", prec=prec)
        b_up = mpmath.fmul(self.hi, c, rounding="c", prec=prec)
        return Enclosure(min(a, b), max(a_up, b_up))

    def __str__(self) -> str:
        return f"[{mpmath.nstr(self.lo, 20)}, {mpmath.nstr(self.hi, 20)}]"


def _as_enclosure(x: Union[Enclosure, Number]) -> Enclosure:
    return x if isinstance(x, Enclosure) else Enclosure.point(x)


def _endpoint_prec(e: Enclosure) -> int:
    # Directed rounding at the larger of the context precision and the
    # endpoints' own mantissa lengths keeps exact operands exact.
    return max(mp.prec, e.lo._mpf_[3], e.hi._mpf_[3], 53)


def widen_outward(x: Number, error_budget: Number) -> Enclosure:
    """Return ``[x - error_budget, x + error_budget]`` rounded outward."""
    budget = exact(error_budget)
    if not mpmath.isfinite(budget) or budget < 0:
        raise DomainError(f"error budget must be finite and >= 0, got {error_budget}")
    return Enclosure.point(x).widen(budget)


# ln(n!) prefix tables, one per working precision.
_LN_FACT: dict[int, list[mpf]] = {}

LN_FACTORIAL_MAX = 10**6


def ln_factorial(n: int, p: PrecLike = None) -> mpf:
    """ln(n!) as the cumulative sum of ln(i), i = 2..n, at ``p`` bits."""
    if int(n) != n or n < 0:
        raise DomainError(f"ln_factorial needs an integer n >= 0, got {n!r}")
    n = int(n)
    if n > LN_FACTORIAL_MAX:
        raise DomainError(f"ln_factorial supports n <= {LN_FACTORIAL_MAX}, got {n}")
    bits = as_precision(p).bits
    table = _LN_FACT.setdefault(bits, [mpf(0), mpf(0)])
    if n >= len(table):
        with mp.workprec(bits):
            acc = table[-1]
            for i in range(len(table), n + 1):
                acc = acc + mpmath.log(i)
                table.append(acc)
    return table[n]


def compensated_sum(terms: Iterable[Number], p: PrecLike = None) -> mpf:
    """Neumaier-compensated sum at ``p`` bits; deterministic for a fixed order."""
    bits = as_precision(p).bits
    with mp.workprec(bits):
        s = mpf(0)
        c = mpf(0)
        for t in terms:
            t = check_finite(mpf(t), "summand")
            u = s + t
            if abs(s) >= abs(t):
                c += (s - u) + t
            else:
                c += (t - u) + s
            s = u
        return check_finite(s + c, "sum")


def chunked_sum(chunk_sums: Sequence[Number], p: PrecLike = None) -> mpf:
    """Combine per-chunk partial sums in ascending chunk order."""
    return compensated_sum(chunk_sums, p)


def to_decimal(x: Number, bits: int) -> str:
    """Decimal string with ceil(bits*log10 2) + 2 significant digits."""
    digits = math.ceil(bits * math.log10(2)) + 2
    return mpmath.libmp.to_str(exact(x)._mpf_, digits, strip_zeros=False)


def from_decimal(s: str, bits: int) -> mpf:
    with mp.workprec(bits):
        return mpf(s)
