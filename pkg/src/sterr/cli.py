"""Command-line interface: ``sterr {eval,sweep,table,verify,cache}``.

Exit codes: 0 success, 1 check failure, 2 usage error, 3 dependency or I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import List, Optional, Sequence

import mpmath
from mpmath import mp

from . import constants, verify
from .bounds import accumulated_delta, delta_k_riemann
from .cache import DeltaCache, default_path
from .kernel import DEFAULT_DELTA_M, delta_x
from .logint import PowE, epsilon, li, li_n, li_star
from .numerics import DEFAULT_BITS, FAST_BITS, DependencyError, DomainError, RangeError, as_precision

log = logging.getLogger("sterr")

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_DEPENDENCY = 0, 1, 2, 3
SWEEP_M = 10**5
SAVE_EVERY = 25


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    try:
        value = int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return value


def _int_list(text: str) -> List[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma separated list of integers, got {text!r}")


def _bits(args) -> int:
    bits = FAST_BITS if getattr(args, "fast", False) else args.bits
    if bits < 53:
        raise UsageError("--bits must be >= 53")
    return bits


def _digits(bits: int) -> int:
    return as_precision(bits).digits


def _cache(args) -> DeltaCache:
    return DeltaCache.open(args.cache)


def _arg_x(args):
    if args.x_exp is not None:
        return PowE(args.x_exp)
    if args.x is not None:
        return args.x
    raise UsageError("give the point as --x VALUE or --x-exp K")


# --------------------------------------------------------------------------
# eval


def cmd_eval(args) -> int:
    bits = _bits(args)
    d = _digits(bits)
    if args.fn == "delta":
        if args.k is not None:
            rec = delta_k_riemann(args.k, args.M or constants.TABLE_M, bits, args.threads)
            lo, hi = rec.S_lower, rec.S_upper
        else:
            enc = delta_x(_arg_x(args), bits, args.M or DEFAULT_DELTA_M, args.threads)
            lo, hi = enc.lo, enc.hi
        print(mpmath.nstr(lo, d, strip_zeros=False))
        print(mpmath.nstr(hi, d, strip_zeros=False))
        return EXIT_OK
    if args.k is not None and args.x is None and args.x_exp is None:
        x = PowE(args.k)
    else:
        x = _arg_x(args)
    if args.fn == "li":
        val = li(x, bits)
    elif args.fn == "li_n":
        if args.n is None:
            raise UsageError("li_n needs --n")
        val = li_n(x, args.n, bits)
    elif args.fn == "li_star":
        val = li_star(x, bits)
    else:
        val = epsilon(x, bits)
    print(mpmath.nstr(val, d, strip_zeros=False))
    return EXIT_OK


# --------------------------------------------------------------------------
# sweep


def build_records(cache: DeltaCache, ks: Sequence[int], M: int, bits: int, threads: int, save: bool = True) -> int:
    """Compute the missing (k, M, bits) records; saves periodically.  Returns the number added."""
    todo = [k for k in ks if (k, M, bits) not in cache]
    added = 0
    for k in todo:
        cache.add(delta_k_riemann(k, M, bits, threads))
        added += 1
        if save and added % SAVE_EVERY == 0:
            cache.save()
            log.info("computed %d of %d records (k=%d)", added, len(todo), k)
    if save and added:
        cache.save()
    return added


def cmd_sweep(args) -> int:
    bits = _bits(args)
    if args.k_max < 2:
        raise UsageError("--k-max must be >= 2")
    ks = args.only if args.only else list(range(2, args.k_max + 1))
    if any(k < 2 or k > args.k_max for k in ks):
        raise UsageError("--only values must lie in [2, k-max]")
    cache = _cache(args)
    added = build_records(cache, ks, args.M, bits, args.threads)
    print(f"{added} new records ({len(ks) - added} already cached) in {cache.path}")
    view = cache.view(args.M, bits)
    if not view.missing(args.k_max):
        print(f"accumulated delta for k = 2..{args.k_max}: {mpmath.nstr(accumulated_delta(args.k_max, view), 18)}")
    return EXIT_OK


# --------------------------------------------------------------------------
# table


def _cell(x) -> str:
    if isinstance(x, int):
        return str(x)
    return verify.fmt(x, 23)


def render_table(table_id: int, rows, fmt_name: str) -> str:
    cols = verify.TABLE_COLUMNS[table_id]
    cells = [[_cell(v) for v in row] for row in rows]
    if fmt_name == "csv":
        return "\n".join([",".join(cols)] + [",".join(r) for r in cells])
    if fmt_name == "md":
        out = ["| " + " | ".join(cols) + " |", "|" + "|".join("---" for _ in cols) + "|"]
        out += ["| " + " | ".join(r) + " |" for r in cells]
        return "\n".join(out)
    if fmt_name == "json":
        return json.dumps([dict(zip(cols, r)) for r in cells], indent=2)
    raise UsageError(f"unknown format {fmt_name!r}")


def cmd_table(args) -> int:
    bits = _bits(args)
    cache = _cache(args)
    view = cache.view(args.M, bits)
    if args.build:
        need = constants.TABLE_ROWS if args.table_id in (2, 4) else range(2, 1001)
        build_records(cache, need, args.M, bits, args.threads)
        view = cache.view(args.M, bits)
    rows = verify.compute_table(args.table_id, view, bits)
    print(render_table(args.table_id, rows, args.format))
    return EXIT_OK


# --------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    bits = _bits(args)
    if args.k_max < 1:
        raise UsageError("--k-max must be >= 1")
    checks = list(verify.REGISTRY) if args.all or not args.check else args.check
    skip = list(args.skip or [])
    if args.skip_tables:
        skip.append("tables")
    try:
        selected = verify.expand(checks)
        verify.expand(skip)
    except DomainError as exc:
        raise UsageError(str(exc))
    view = None
    if verify.NEEDS_CACHE & set(selected):
        cache = _cache(args)
        need = set()
        if set(selected) & set(verify.GROUPS["sweep"]):
            need |= set(range(2, args.k_max + 1))
        if set(selected) & {"table1", "table3"}:
            need |= set(range(2, 1001))
        if set(selected) & {"table2", "table4"}:
            need |= set(constants.TABLE_ROWS)
        if args.build:
            build_records(cache, sorted(need), args.M, bits, args.threads)
        view = cache.view(args.M, bits)
        view.require(max(need))
    cfg = verify.VerifyConfig(
        precision_bits=bits, M=args.M, k_max=args.k_max, checks=selected, skip=skip, grid_density=args.grid_density
    )
    report = verify.run_all(cfg, view)
    print(report.to_json() if args.format == "json" else report.to_text())
    return EXIT_OK if report.ok else EXIT_CHECK


# --------------------------------------------------------------------------
# cache


def cmd_cache(args) -> int:
    cache = _cache(args)
    if args.action == "inspect":
        print(f"path: {cache.path}")
        print(f"records: {len(cache)}")
        for (M, p), ks in cache.groups().items():
            print(f"  M={M} precision_bits={p}: {len(ks)} records, k in [{ks[0]}, {ks[-1]}]")
        return EXIT_OK
    if args.M is None and args.bits is None and args.k_max is None and not args.all:
        raise UsageError("prune needs --M, --bits, --k-max or --all")
    removed = cache.prune(args.M, args.bits, args.k_max)
    cache.save()
    print(f"removed {removed} records")
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sterr", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, M_default=None, cache=True, threads=True):
        p.add_argument("--bits", type=int, default=DEFAULT_BITS, help="working precision in bits (default 192)")
        p.add_argument("--fast", action="store_true", help="53-bit fast mode")
        if M_default is not False:
            p.add_argument("--M", type=_positive_int, default=M_default, help="Riemann partition size")
        if cache:
            p.add_argument("--cache", default=None, help=f"delta cache file (default $STERR_CACHE or {default_path()})")
        if threads:
            p.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1,
                           help="worker threads; 1 gives the reference ordering")

    p = sub.add_parser("eval", help="evaluate li, li_n, li_star, epsilon or delta")
    p.add_argument("fn", choices=["li", "li_n", "li_star", "epsilon", "delta"])
    p.add_argument("--x", default=None, help="the point x as a decimal")
    p.add_argument("--x-exp", dest="x_exp", default=None, help="the point x = e**K with ln x exactly K")
    p.add_argument("--k", type=int, default=None, help="integer index: x = e**k, or Delta_k for delta")
    p.add_argument("--n", type=int, default=None, help="number of terms for li_n")
    common(p, None, cache=False)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="compute Delta_k records into the cache")
    p.add_argument("--k-max", dest="k_max", type=_positive_int, default=1000)
    p.add_argument("--only", type=_int_list, default=None, help="comma separated k values")
    common(p, SWEEP_M)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("table", help="emit a recomputed table (1-4)")
    p.add_argument("table_id", type=int, choices=[1, 2, 3, 4])
    p.add_argument("--format", choices=["csv", "md", "json"], default="md")
    p.add_argument("--build", action="store_true", help="compute missing cache records first")
    common(p, constants.TABLE_M)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("verify", help="run verification checks")
    p.add_argument("--all", action="store_true", help="run every registered check (default)")
    p.add_argument("--check", action="append", default=None,
                   help=f"check or group to run; repeatable. Checks: {', '.join(verify.REGISTRY)}; "
                        f"groups: {', '.join(verify.GROUPS)}")
    p.add_argument("--skip", action="append", default=None, help="check or group to mark skipped")
    p.add_argument("--skip-tables", action="store_true")
    p.add_argument("--k-max", dest="k_max", type=_positive_int, default=1000)
    p.add_argument("--grid-density", type=_positive_int, default=200)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--no-build", dest="build", action="store_false", help="fail instead of computing missing records")
    common(p, constants.TABLE_M)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("cache", help="inspect or prune the delta cache")
    p.add_argument("action", choices=["inspect", "prune"])
    p.add_argument("--cache", default=None)
    p.add_argument("--M", type=_positive_int, default=None)
    p.add_argument("--bits", type=int, default=None)
    p.add_argument("--k-max", dest="k_max", type=_positive_int, default=None, help="drop records with k above this")
    p.add_argument("--all", action="store_true", help="drop every record")
    p.set_defaults(func=cmd_cache)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        with mp.workprec(max(getattr(args, "bits", None) or DEFAULT_BITS, 53)):
            return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except DomainError as exc:
        print(f"sterr: domain error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DependencyError, OSError) as exc:
        msg = str(exc)
        if "no record" in msg and "sweep" not in msg:
            msg += "; run `sterr sweep` to build it"
        print(f"sterr: {msg}", file=sys.stderr)
        return EXIT_DEPENDENCY
    except RangeError as exc:
        print(f"sterr: range error: {exc}", file=sys.stderr)
        return EXIT_DEPENDENCY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
