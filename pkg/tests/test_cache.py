from __future__ import annotations

import pytest

from sterr.bounds import delta_k_riemann
from sterr.cache import HEADER, DeltaCache, default_path, format_record, parse_record
from sterr.numerics import DependencyError


def test_default_path_from_env(tmp_cache):
    assert default_path() == tmp_cache


def test_record_round_trip_exact():
    for bits in (53, 192):
        rec = delta_k_riemann(7, 500, bits)
        line = format_record(rec)
        back = parse_record(line)
        assert back == rec
        assert format_record(back) == line


def test_digit_count():
    rec = delta_k_riemann(3, 100, 192)
    fields = format_record(rec).split(",")
    assert fields[:3] == ["3", "100", "192"]
    mantissa = fields[3].split("e")[0].replace(".", "").lstrip("0")
    assert len(mantissa) >= 60  # ceil(192 log10 2) + 2


def test_save_load_and_views(tmp_cache):
    c = DeltaCache.open()
    for k in (2, 3, 4):
        assert c.add(delta_k_riemann(k, 100, 53))
    assert not c.add(delta_k_riemann(2, 100, 53))
    c.add(delta_k_riemann(2, 200, 53))
    c.save()
    text = tmp_cache.read_text().splitlines()
    assert text[0] == HEADER and len(text) == 5
    d = DeltaCache.open()
    assert len(d) == 4
    v = d.view(100, 53)
    assert list(v) == [2, 3, 4] and v.missing(5) == [5]
    with pytest.raises(DependencyError, match="k=5"):
        v.require(5)
    assert d.groups() == {(100, 53): [2, 3, 4], (200, 53): [2]}
    assert d.prune(M=200) == 1 and len(d) == 3
    assert d.prune(k_max=2) == 2


def test_corrupted_line_names_line_number(tmp_cache):
    c = DeltaCache.open()
    c.add(delta_k_riemann(2, 100, 53))
    c.save()
    with tmp_cache.open("a") as fh:
        fh.write("3,100,53,not-a-number,1,1,1\n")
    with pytest.raises(DependencyError, match="line 3"):
        DeltaCache.open()


def test_unwritable_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    c = DeltaCache(blocker / "sub" / "deltas.csv")
    c.add(delta_k_riemann(2, 100, 53))
    with pytest.raises(DependencyError):
        c.save()
