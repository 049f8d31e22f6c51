"""Reproduction of the published tables, the conjecture band sweep, monotonicity
and the auxiliary inequality suites, collected into a serialisable report.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import mpmath
from mpmath import mp, mpf

from . import __version__, constants
from .bounds import (
    DeltaRecord,
    delta_k_simple,
    epsilon_1_anchor,
    epsilon_n_riemann_all,
    exp_power_bounds,
    factorial_expr_bounds,
    floor_root_gap,
    floor_root_gap_bound,
    kappa_tau,
    robbins_bounds,
)
from .logint import PowE, epsilon, li
from .numerics import DEFAULT_BITS, DomainError, PrecLike, as_precision, exact

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"
WARN_FACTOR = 10

CONJECTURE_NOTE = (
    "only the explicit band is checked; the o(.) statement of the conjecture is not checkable"
)


def fmt(x, digits: int = 25) -> str:
    if x is None:
        return ""
    return mpmath.nstr(exact(x), digits, min_fixed=-30, max_fixed=30)


@dataclass
class Check:
    name: str
    status: str
    margin: Optional[mpf] = None
    lhs: Optional[mpf] = None
    rhs: Optional[mpf] = None
    detail: str = ""
    width: Optional[mpf] = None

    @property
    def warning(self) -> bool:
        """Pass whose margin is below ten enclosure widths."""
        return (
            self.status == PASS
            and self.width is not None
            and self.margin is not None
            and self.margin < WARN_FACTOR * self.width
        )

    def record(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "warning": self.warning,
            "margin": fmt(self.margin),
            "lhs": fmt(self.lhs),
            "rhs": fmt(self.rhs),
            "detail": self.detail,
        }


@dataclass
class VerificationReport:
    checks: List[Check] = field(default_factory=list)
    metadata: Dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_records(self) -> List[dict]:
        return [c.record() for c in self.checks]

    def to_json(self, metadata: bool = True) -> str:
        doc: Dict[str, object] = {"checks": self.to_records()}
        if metadata:
            doc["metadata"] = self.metadata
        return json.dumps(doc, indent=2, sort_keys=False)

    def to_text(self) -> str:
        lines = []
        if self.metadata:
            lines.append("  ".join(f"{k}={v}" for k, v in self.metadata.items()))
        for c in self.checks:
            tag = c.status.upper() + (" (warning: margin < 10x width)" if c.warning else "")
            line = f"{c.name:<22} {tag}"
            if c.margin is not None:
                line += f"  margin={fmt(c.margin, 12)}"
            lines.append(line)
            if c.status == FAIL and c.lhs is not None:
                lines.append(f"    violated: {fmt(c.lhs)} <= {fmt(c.rhs)}")
            if c.detail:
                lines.extend("    " + d for d in c.detail.splitlines())
        lines.append("result: " + ("all checks passed" if self.ok else "FAILED"))
        return "\n".join(lines)


def _status(ok: bool) -> str:
    return PASS if ok else FAIL


# --------------------------------------------------------------------------
# epsilon_n sweeps


def band(k: int, bits: int):
    with mp.workprec(bits + 16):
        c = mpmath.sqrt(2 * mpmath.pi / k) / 3
        w = 1 / (12 * mpf(k) ** mpf(1.5))
        return c - w, c + w


def verify_epsilon1(p: PrecLike = None) -> Check:
    bits = max(as_precision(p).bits, DEFAULT_BITS)
    with mp.workprec(bits + 16):
        val = mpmath.e - li(PowE(1), bits)
        diff = abs(val - mpf(constants.EPSILON_1))
        tol = mpf("1e-15")
    return Check("epsilon1", _status(diff <= tol), tol - diff, val, mpf(constants.EPSILON_1),
                 "e - li(e) against the stored value, tolerance 1e-15")


def verify_conjecture_band(k_max: int, cache, p: PrecLike = None) -> Check:
    """Certified eps_k enclosures strictly inside (1/3)sqrt(2pi/k) -+ 1/(12 k^1.5)."""
    if k_max < 1:
        raise DomainError("k_max must be >= 1")
    bits = as_precision(p).bits
    eps = epsilon_n_riemann_all(k_max, cache, p)
    worst = None
    for e in eps:
        lo_b, hi_b = band(e.n, bits)
        m_lo, m_hi = e.lo - lo_b, hi_b - e.hi
        cand = (m_lo, lo_b, e.lo, e) if m_lo <= m_hi else (m_hi, e.hi, hi_b, e)
        if worst is None or cand[0] < worst[0]:
            worst = cand
    margin, lhs, rhs, e = worst
    detail = f"tightest at k={e.n}; {CONJECTURE_NOTE}"
    return Check("conjecture", _status(margin > 0), margin, lhs, rhs, detail, e.width)


def verify_positivity(k_max: int, cache, p: PrecLike = None) -> Check:
    if k_max < 1:
        raise DomainError("k_max must be >= 1")
    eps = epsilon_n_riemann_all(k_max, cache, p)
    e = min(eps, key=lambda b: b.lo)
    return Check("positivity", _status(e.lo > 0), e.lo, mpf(0), e.lo, f"smallest lower bound at n={e.n}", e.width)


def default_sample_xs(count: int = 100) -> List[PowE]:
    return [PowE(mpf(1) + mpf(49) * i / (count - 1)) for i in range(count)]


def verify_monotonicity(cache, sample_xs: Optional[Sequence] = None, p: PrecLike = None, k_max: Optional[int] = None) -> Check:
    """Delta enclosures strictly decreasing in k, and eps(x) decreasing on the sample."""
    bits = as_precision(p).bits
    ks = sorted(k for k in cache if k_max is None or k <= k_max)
    worst = None
    for a, b in zip(ks, ks[1:]):
        ra, rb = cache[a], cache[b]
        gap = ra.S_lower - rb.S_upper
        if worst is None or gap < worst[0]:
            worst = (gap, rb.S_upper, ra.S_lower, f"Delta_{b} < Delta_{a}", max(ra.delta, rb.delta))
    xs = default_sample_xs() if sample_xs is None else list(sample_xs)
    vals = [epsilon(x, bits) for x in xs]
    for i in range(len(vals) - 1):
        gap = vals[i] - vals[i + 1]
        if worst is None or gap < worst[0]:
            worst = (gap, vals[i + 1], vals[i], f"eps(x) at sample {i + 1} below sample {i}", None)
    if worst is None:
        return Check("monotonicity", SKIPPED, detail="nothing to compare")
    gap, lhs, rhs, where, width = worst
    detail = f"{len(ks)} delta records, {len(xs)} x samples; tightest: {where}"
    return Check("monotonicity", _status(gap > 0), gap, lhs, rhs, detail, width)


# --------------------------------------------------------------------------
# Tables

TABLE_COLUMNS = {
    1: ("n", "lower", "upper"),
    2: ("k", "S_lower", "delta"),
    3: ("s", "kappa_lo", "tau_lo", "kappa_hi", "tau_hi"),
    4: ("k", "S_lower_minus_simple_lower", "simple_upper_minus_S_upper"),
}


def _need(cache, ks: Iterable[int]) -> List[DeltaRecord]:
    out = []
    for k in ks:
        rec = cache.get(k)
        if rec is None:
            from .numerics import DependencyError

            raise DependencyError(
                f"delta cache has no record for k={k}; run `sterr sweep --k-max 1000 --M {constants.TABLE_M}`"
            )
        out.append(rec)
    return out


def compute_table(table_id: int, cache, p: PrecLike = None) -> List[tuple]:
    """Recomputed rows of a published table, as tuples of numbers."""
    bits = as_precision(p).bits
    if table_id == 2:
        return [(r.k, r.S_lower, r.delta) for r in _need(cache, constants.TABLE_ROWS)]
    if table_id == 4:
        rows = []
        for r in _need(cache, constants.TABLE_ROWS):
            simple = delta_k_simple(r.k, bits)
            with mp.workprec(bits + 16):
                rows.append((r.k, r.S_lower - simple.lo, simple.hi - r.S_upper))
        return rows
    if table_id in (1, 3):
        n_max = max(constants.TABLE_1_ROWS)
        eps = epsilon_n_riemann_all(n_max, cache, p)
        if table_id == 1:
            return [(n, eps[n - 1].lo, eps[n - 1].hi) for n in constants.TABLE_1_ROWS]
        rows = []
        for s in constants.TABLE_ROWS:
            kt = kappa_tau(s, eps[s - 1], p)
            rows.append((s, kt.kappa_lo, kt.tau_lo, kt.kappa_hi, kt.tau_hi))
        return rows
    raise DomainError(f"unknown table {table_id!r}; expected 1, 2, 3 or 4")


def reproduce_table(table_id: int, cache, p: PrecLike = None) -> Check:
    rows = compute_table(table_id, cache, p)
    published = {1: constants.TABLE_1, 2: constants.TABLE_2, 3: constants.TABLE_3, 4: constants.TABLE_4}[table_id]
    tol = mpf(constants.TABLE_TOLERANCE[table_id])
    rel_tol = mpf(constants.TABLE_2_DELTA_REL)
    cols = TABLE_COLUMNS[table_id]
    lines = [f"{'row':>5} {'column':<28} {'computed':>32} {'published':>32} {'diff':>10}"]
    worst = None
    positive = True
    with mp.workprec(256):
        for row in rows:
            key, vals = row[0], row[1:]
            for col, v, ref_s in zip(cols[1:], vals, published[key]):
                ref = mpf(ref_s)
                diff = abs(v - ref)
                if table_id == 2 and col == "delta":
                    margin = (rel_tol - diff / ref) * ref
                else:
                    margin = tol - diff
                if table_id == 4 and v <= 0:
                    positive = False
                    margin = min(margin, v)
                lines.append(f"{key:>5} {col:<28} {fmt(v, 23):>32} {ref_s:>32} {mpmath.nstr(diff, 3):>10}")
                if worst is None or margin < worst[0]:
                    worst = (margin, v, ref, key, col)
    margin, lhs, rhs, key, col = worst
    tol_text = "abs 1e-17 on S_lower, rel 1e-9 on delta" if table_id == 2 else f"abs {constants.TABLE_TOLERANCE[table_id]}"
    detail = f"tolerance {tol_text}; tightest cell: row {key}, {col}\n" + "\n".join(lines)
    if table_id == 4 and not positive:
        detail = "a gap column is not positive\n" + detail
    return Check(f"table{table_id}", _status(margin >= 0 and positive), margin, lhs, rhs, detail)


# --------------------------------------------------------------------------
# Inequality suites


def _inequality_check(name: str, points: Iterable, lhs_fn: Callable, rhs_fn: Callable, bits: int, label: Callable) -> Check:
    """Pass iff lhs <= rhs at every point; margin is the smallest rhs - lhs."""
    worst = None
    count = 0
    with mp.workprec(bits + 32):
        for pt in points:
            count += 1
            l, r = lhs_fn(*pt), rhs_fn(*pt)
            if worst is None or r - l < worst[0]:
                worst = (r - l, l, r, pt)
    margin, l, r, pt = worst
    return Check(name, _status(margin >= 0), margin, l, r, f"{count} grid points; tightest at {label(*pt)}")


def _grid(a, b, count: int, shrink_lo: bool = False, shrink_hi: bool = False) -> List[mpf]:
    a, b = exact(a), exact(b)
    eps = mpf("1e-6")
    a = a + eps if shrink_lo else a
    b = b - eps if shrink_hi else b
    return [a + (b - a) * i / (count - 1) for i in range(count)]


def _alphas() -> List[mpf]:
    return [mpf(i) / 10 for i in range(11)]


def verify_robbins(p: PrecLike = None, n_max: int = 170) -> Check:
    bits = as_precision(p).bits
    worst = None
    with mp.workprec(bits + 32):
        for n in range(1, n_max + 1):
            true = mpmath.log(mpf(math.factorial(n)))
            enc = robbins_bounds(n, bits)
            m = min(true - enc.lo, enc.hi - true)
            if worst is None or m < worst[0]:
                worst = (m, enc.lo if true - enc.lo <= enc.hi - true else true,
                         true if true - enc.lo <= enc.hi - true else enc.hi, n)
    m, l, r, n = worst
    return Check("robbins", _status(m >= 0), m, l, r, f"ln n! for n = 1..{n_max}; tightest at n={n}")


def _sandwich(name: str, bound_fn, direct_fn, bits: int) -> Check:
    worst = None
    with mp.workprec(bits + 32):
        for n in range(1, 51):
            for a in _alphas():
                true = direct_fn(n, a)
                enc = bound_fn(n, a, bits)
                lo_gap, hi_gap = true - enc.lo, enc.hi - true
                m = min(lo_gap, hi_gap)
                if worst is None or m < worst[0]:
                    worst = (m, (enc.lo, true) if lo_gap <= hi_gap else (true, enc.hi), n, a)
    m, (l, r), n, a = worst
    return Check(name, _status(m >= 0), m, l, r, f"n = 1..50, alpha = 0, 0.1, ..., 1; tightest at n={n}, alpha={fmt(a, 3)}")


def verify_factorial_expr(p: PrecLike = None) -> Check:
    def direct(n, a):
        return mpmath.exp(mpmath.log(mpmath.factorial(n)) + n + a - (n + 1) * mpmath.log(n + a))

    return _sandwich("factorial-expr", factorial_expr_bounds, direct, as_precision(p).bits)


def verify_exp_power(p: PrecLike = None) -> Check:
    def direct(n, a):
        return (mpf(n) / (n + a)) ** (n + mpf(1) / 2)

    return _sandwich("exp-power", exp_power_bounds, direct, as_precision(p).bits)


def verify_log_bound(p: PrecLike = None) -> Check:
    """-a - a(1-a)/(4n) - 1/(16n) <= (n + 1/2) ln(n/(n+a)) <= -a - a(1-a)/(4n)."""
    bits = as_precision(p).bits
    pts = [(n, a) for n in range(1, 51) for a in _alphas()]

    def mid(n, a):
        return (n + mpf(1) / 2) * mpmath.log(mpf(n) / (n + a))

    def upper(n, a):
        return -a - a * (1 - a) / (4 * n)

    lower = _inequality_check("log-bound", pts, lambda n, a: upper(n, a) - mpf(1) / (16 * n), mid, bits,
                              lambda n, a: f"n={n}, alpha={fmt(a, 3)}")
    high = _inequality_check("log-bound", pts, mid, upper, bits, lambda n, a: f"n={n}, alpha={fmt(a, 3)}")
    return lower if lower.margin <= high.margin else high


def verify_appendix_a(grid_density: int = 200, p: PrecLike = None) -> Check:
    """|1/sqrt(floor(ln x)) - 1/sqrt(ln x)| <= 1/(2 (ln x)^(3/2)) on ln x in [1, 50]."""
    bits = as_precision(p).bits
    pts = [(t,) for t in _grid(1, 50, grid_density * 49 + 1)]
    return _inequality_check(
        "appendix-a",
        pts,
        lambda t: floor_root_gap(PowE(t), bits),
        lambda t: floor_root_gap_bound(PowE(t), bits),
        bits,
        lambda t: f"ln x={fmt(t, 8)}",
    )


def _taylor(x: mpf, last: int) -> mpf:
    return mpmath.fsum(x**k / mpmath.factorial(k) for k in range(last + 1))


def verify_appendix_b(grid_density: int = 200, p: PrecLike = None) -> List[Check]:
    bits = as_precision(p).bits
    ms = range(0, 7)
    label = lambda x, m: f"x={fmt(x, 8)}, m={m}"  # noqa: E731
    pos = [(x, m) for m in ms for x in _grid(0, 1, grid_density + 1)]
    neg = [(x, m) for m in ms for x in _grid(-1, 0, grid_density + 1, shrink_lo=True)]
    both = [(x, m) for m in ms for x in _grid(-1, 1, 2 * grid_density + 1, shrink_lo=True, shrink_hi=True)]
    return [
        _inequality_check("appendix-b-lower", pos, lambda x, m: _taylor(x, m), lambda x, m: mpmath.exp(x), bits, label),
        _inequality_check("appendix-b-lower-neg", neg, lambda x, m: _taylor(x, 2 * m - 1),
                          lambda x, m: mpmath.exp(x), bits, label),
        _inequality_check(
            "appendix-b-upper",
            both,
            lambda x, m: mpmath.exp(x),
            lambda x, m: _taylor(x, 2 * m - 1) + x ** (2 * m) / ((1 - x) * mpmath.factorial(2 * m)),
            bits,
            label,
        ),
    ]


# --------------------------------------------------------------------------
# Registry

REGISTRY = (
    "epsilon1",
    "conjecture",
    "positivity",
    "monotonicity",
    "table1",
    "table2",
    "table3",
    "table4",
    "robbins",
    "factorial-expr",
    "exp-power",
    "log-bound",
    "appendix-a",
    "appendix-b-lower",
    "appendix-b-lower-neg",
    "appendix-b-upper",
)

GROUPS = {
    "tables": ("table1", "table2", "table3", "table4"),
    "appendix": ("robbins", "factorial-expr", "exp-power", "log-bound", "appendix-a", "appendix-b-lower",
                 "appendix-b-lower-neg", "appendix-b-upper"),
    "sweep": ("conjecture", "positivity", "monotonicity"),
    "appendix-b": ("appendix-b-lower", "appendix-b-lower-neg", "appendix-b-upper"),
}

NEEDS_CACHE = set(GROUPS["tables"]) | set(GROUPS["sweep"])


def expand(names: Iterable[str]) -> List[str]:
    out: List[str] = []
    for name in names:
        members = GROUPS.get(name, (name,))
        for m in members:
            if m not in REGISTRY:
                raise DomainError(f"unknown check {m!r}; known: {', '.join(REGISTRY + tuple(GROUPS))}")
            if m not in out:
                out.append(m)
    return [n for n in REGISTRY if n in out]


@dataclass
class VerifyConfig:
    precision_bits: int = DEFAULT_BITS
    M: int = constants.TABLE_M
    k_max: int = 1000
    checks: Sequence[str] = REGISTRY
    skip: Sequence[str] = ()
    grid_density: int = 200
    sample_xs: Optional[Sequence] = None


def run_all(config: VerifyConfig, cache=None) -> VerificationReport:
    """Run the selected checks in registry order; skipped ones are reported as such.

    ``cache`` is a mapping k -> DeltaRecord at ``config.M``; it is required when
    any cache-backed check is selected.
    """
    if config.k_max < 1:
        raise DomainError("k_max must be >= 1")
    selected = set(expand(config.checks))
    skipped = set(expand(config.skip)) if config.skip else set()
    p = config.precision_bits
    report = VerificationReport(metadata={
        "precision_bits": p,
        "M": config.M,
        "k_max": config.k_max,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "version": __version__,
    })
    appendix_b: Optional[List[Check]] = None
    for name in REGISTRY:
        if name not in selected:
            continue
        if name in skipped:
            report.checks.append(Check(name, SKIPPED, detail="skipped on request"))
            continue
        if name == "epsilon1":
            c = verify_epsilon1(p)
        elif name == "conjecture":
            c = verify_conjecture_band(config.k_max, cache, p)
        elif name == "positivity":
            c = verify_positivity(config.k_max, cache, p)
        elif name == "monotonicity":
            c = verify_monotonicity(cache, config.sample_xs, p, config.k_max)
        elif name.startswith("table"):
            c = reproduce_table(int(name[-1]), cache, p)
        elif name == "robbins":
            c = verify_robbins(p)
        elif name == "factorial-expr":
            c = verify_factorial_expr(p)
        elif name == "exp-power":
            c = verify_exp_power(p)
        elif name == "log-bound":
            c = verify_log_bound(p)
        elif name == "appendix-a":
            c = verify_appendix_a(config.grid_density, p)
        else:
            if appendix_b is None:
                appendix_b = verify_appendix_b(config.grid_density, p)
            c = next(b for b in appendix_b if b.name == name)
        report.checks.append(c)
    return report
