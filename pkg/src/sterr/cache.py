"""On-disk cache of Delta_k records.

One CSV line per record::

    k,M,precision_bits,S_lower,S_upper,u_star,f_at_ustar

Values are decimal strings with ceil(p*log10 2) + 2 significant digits, which
read back bit-exactly at the recorded precision ``p``.
"""
from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import Dict, Iterable, Iterator, Optional, Tuple

from .bounds import DeltaRecord
from .numerics import DependencyError, from_decimal, to_decimal

HEADER = "k,M,precision_bits,S_lower,S_upper,u_star,f_at_ustar"
ENV_VAR = "STERR_CACHE"

Key = Tuple[int, int, int]


def default_path() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env).expanduser()
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "sterr" / "deltas.csv"


def format_record(r: DeltaRecord) -> str:
    p = r.precision_bits
    vals = [to_decimal(v, p) for v in (r.S_lower, r.S_upper, r.u_star, r.f_at_ustar)]
    return ",".join([str(r.k), str(r.M), str(p)] + vals)


def parse_record(line: str) -> DeltaRecord:
    parts = line.strip().split(",")
    if len(parts) != 7:
        raise ValueError(f"expected 7 fields, found {len(parts)}")
    k, M, p = (int(x) for x in parts[:3])
    if p < 53:
        raise ValueError(f"precision {p} below 53 bits")
    S_lo, S_hi, u, f = (from_decimal(x, p) for x in parts[3:])
    return DeltaRecord(k, M, p, S_lo, S_hi, u, f)


class DeltaView:
    """Read-only mapping k -> DeltaRecord for one (M, precision) pair."""

    def __init__(self, records: Dict[int, DeltaRecord], M: int, bits: int) -> None:
        self._records = records
        self.M = M
        self.bits = bits

    def get(self, k: int, default=None):
        return self._records.get(k, default)

    def __getitem__(self, k: int) -> DeltaRecord:
        if k not in self._records:
            raise DependencyError(f"delta cache has no record for k={k} at M={self.M}, p={self.bits}")
        return self._records[k]

    def __contains__(self, k: object) -> bool:
        return k in self._records

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._records))

    def __len__(self) -> int:
        return len(self._records)

    def missing(self, k_max: int) -> list:
        return [k for k in range(2, k_max + 1) if k not in self._records]

    def require(self, k_max: int) -> None:
        gaps = self.missing(k_max)
        if gaps:
            raise DependencyError(
                f"delta cache lacks {len(gaps)} record(s) at M={self.M}, p={self.bits} "
                f"(first missing k={gaps[0]}); run `sterr sweep --k-max {k_max} --M {self.M}`"
            )


class DeltaCache:
    """Records keyed by (k, M, precision_bits), backed by a CSV file."""

    def __init__(self, path: Optional[os.PathLike] = None) -> None:
        self.path = Path(path) if path is not None else default_path()
        self._records: Dict[Key, DeltaRecord] = {}

    @classmethod
    def open(cls, path: Optional[os.PathLike] = None) -> "DeltaCache":
        cache = cls(path)
        if cache.path.exists():
            cache.load()
        return cache

    def load(self) -> None:
        try:
            text = self.path.read_text()
        except OSError as exc:
            raise DependencyError(f"cannot read delta cache {self.path}: {exc}") from exc
        records: Dict[Key, DeltaRecord] = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip() or (lineno == 1 and line.strip() == HEADER):
                continue
            try:
                rec = parse_record(line)
            except (ValueError, ArithmeticError) as exc:
                raise DependencyError(f"{self.path}: corrupted cache line {lineno}: {exc}") from exc
            records[(rec.k, rec.M, rec.precision_bits)] = rec
        self._records = records

    def save(self) -> None:
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=".deltas-", suffix=".tmp")
            with os.fdopen(fd, "w") as fh:
                fh.write(HEADER + "\n")
                for key in sorted(self._records, key=lambda t: (t[1], t[2], t[0])):
                    fh.write(format_record(self._records[key]) + "\n")
            os.replace(tmp, self.path)
        except OSError as exc:
            raise DependencyError(f"cannot write delta cache {self.path}: {exc}") from exc

    def add(self, rec: DeltaRecord) -> bool:
        key = (rec.k, rec.M, rec.precision_bits)
        new = key not in self._records
        self._records[key] = rec
        return new

    def __contains__(self, key: object) -> bool:
        return key in self._records

    def __len__(self) -> int:
        return len(self._records)

    def records(self) -> Iterable[DeltaRecord]:
        return [self._records[k] for k in sorted(self._records, key=lambda t: (t[1], t[2], t[0]))]

    def view(self, M: int, bits: int) -> DeltaView:
        return DeltaView({k: r for (k, m, p), r in self._records.items() if m == M and p == bits}, M, bits)

    def groups(self) -> Dict[Tuple[int, int], list]:
        """(M, precision_bits) -> sorted list of k."""
        out: Dict[Tuple[int, int], list] = {}
        for k, m, p in self._records:
            out.setdefault((m, p), []).append(k)
        return {g: sorted(ks) for g, ks in sorted(out.items())}

    def prune(self, M: Optional[int] = None, bits: Optional[int] = None, k_max: Optional[int] = None) -> int:
        """Drop records matching every given filter (k_max drops k > k_max)."""
        drop = [
            key
            for key in self._records
            if (M is None or key[1] == M)
            and (bits is None or key[2] == bits)
            and (k_max is None or key[0] > k_max)
        ]
        for key in drop:
            del self._records[key]
        return len(drop)
