from __future__ import annotations

import os
import sys
from pathlib import Path

import pytest

from sterr.cache import DeltaCache, default_path
from sterr.cli import build_records

FULL_M = 10**6
FULL_BITS = 192
SWEEP_M = 10**5
SWEEP_BITS = 53


def _shared_cache() -> DeltaCache:
    # Reuses $STERR_CACHE (or the user cache) so the ten-minute sweep runs once.
    path = Path(os.environ.get("STERR_CACHE") or default_path())
    return DeltaCache.open(path)


@pytest.fixture(scope="session")
def shared_cache():
    return _shared_cache()


@pytest.fixture(scope="session")
def full_view(shared_cache):
    """Delta records k = 2..1000 at M = 10**6, 192 bits."""
    if build_records(shared_cache, range(2, 1001), FULL_M, FULL_BITS, os.cpu_count() or 1):
        shared_cache.save()
    return shared_cache.view(FULL_M, FULL_BITS)


@pytest.fixture(scope="session")
def sweep_view(shared_cache):
    """Delta records k = 2..1000 at M = 10**5 in 53-bit fast mode."""
    if build_records(shared_cache, range(2, 1001), SWEEP_M, SWEEP_BITS, 1):
        shared_cache.save()
    return shared_cache.view(SWEEP_M, SWEEP_BITS)


@pytest.fixture
def tmp_cache(tmp_path, monkeypatch):
    path = tmp_path / "deltas.csv"
    monkeypatch.setenv("STERR_CACHE", str(path))
    return path


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(lines):
        terminalreporter.write_line(lines[num])
