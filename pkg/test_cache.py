"""
Tests for the SQLite L-value cache
"""

import json
import os
import sqlite3
import tempfile
from contextlib import closing
from pathlib import Path

import pytest

from analysis.lfunctions import Method, l_value
from database.lvalue_cache import (DB_FILENAME, LAYOUT_FILENAME, RECORD_SIZE, LValueCache,
                                   cache_key, lvalue_cache_get_or_compute, pack_record,
                                   records_in_order, unpack_record)
from harness.moments import fetch_lvalues


def test_record_survives_the_cache(tmp_path):
    cache = LValueCache(str(tmp_path))
    record = l_value(15, 0.5 + 0.25j)
    assert cache.put(record)
    assert cache.get(15, 0.5 + 0.25j) == record
    assert cache.get(15, 0.5 + 0.25j, Method.DIRECT_SERIES) is None
    assert cache.count_records() == 1

    layout = json.loads((tmp_path / LAYOUT_FILENAME).read_text(encoding="utf-8"))
    assert layout["record_size"] == RECORD_SIZE
    assert layout["byte_order"] == "little"


def test_packed_layout():
    record = l_value(7, 0.6)
    blob = pack_record(record)
    assert len(blob) == RECORD_SIZE
    assert unpack_record(blob, record.terms_used) == record
    assert unpack_record(blob[:-1]) is None
    assert cache_key(7, 0.6, Method.SMOOTHED_AFE) != cache_key(7, 0.6, Method.SMOOTHED_AFE, 2)
    assert cache_key(7, 0.6, Method.SMOOTHED_AFE) == cache_key(7, 0.6 + 0j, Method.SMOOTHED_AFE)


def test_corrupt_record_is_repaired(tmp_path):
    cache = LValueCache(str(tmp_path))
    cache.put(l_value(3, 0.5))
    with closing(sqlite3.connect(os.path.join(str(tmp_path), DB_FILENAME))) as conn:
        conn.execute("UPDATE lvalues SET record = zeroblob(?)", (RECORD_SIZE,))
        conn.commit()
    assert cache.get(3, 0.5) is None
    assert cache.repairs == 1

    # the recomputed record replaces the corrupt row
    record = cache.get_or_compute(3, 0.5)
    assert record == l_value(3, 0.5)
    assert cache.get(3, 0.5) == record
    assert cache.count_records() == 1


def test_deleted_database_is_rebuilt(tmp_path):
    cache = LValueCache(str(tmp_path))
    cache.put(l_value(5, 0.5))
    os.remove(os.path.join(str(tmp_path), DB_FILENAME))
    assert cache.get(5, 0.5) is None
    assert cache.put(l_value(5, 0.5))
    assert cache.count_records() == 1


def test_hit_and_miss_counters(tmp_path):
    cache = LValueCache(str(tmp_path))
    first = fetch_lvalues([1, 3, 5, 7], 0.6, cache)
    assert cache.stats()["misses"] == 4 and cache.stats()["hits"] == 0
    second = fetch_lvalues([1, 3, 5, 7, 11], 0.6, cache)
    stats = cache.stats()
    assert stats["hits"] == 4
    assert stats["misses"] == 5
    assert stats["records"] == 5
    assert all(second[d] == first[d] for d in first)
    assert [r.d for r in records_in_order(second, [11, 1])] == [11, 1]

    assert cache.clear()
    assert cache.count_records() == 0


def test_get_or_compute_helper(tmp_path):
    record = lvalue_cache_get_or_compute(21, 0.5, str(tmp_path))
    assert record == l_value(21, 0.5)
    assert LValueCache(str(tmp_path)).get(21, 0.5) == record


class _RecordingCache(LValueCache):
    def __init__(self, cache_dir):
        self.connections = []
        super().__init__(cache_dir)

    def _connect(self):
        conn = super()._connect()
        self.connections.append(conn)
        return conn


def test_connections_are_closed(tmp_path):
    cache = _RecordingCache(str(tmp_path))
    cache.put(l_value(11, 0.5))
    cache.get(11, 0.5)
    cache.get_many([11, 13], 0.5)
    cache.count_records()
    cache.clear()
    assert len(cache.connections) >= 5
    for conn in cache.connections:
        with pytest.raises(sqlite3.ProgrammingError):
            conn.execute("SELECT 1")


if __name__ == "__main__":
    print("🧪 Moment Lab - Cache Tests\n")

    tests = [
        test_record_survives_the_cache,
        test_packed_layout,
        test_corrupt_record_is_repaired,
        test_deleted_database_is_rebuilt,
        test_hit_and_miss_counters,
        test_get_or_compute_helper,
        test_connections_are_closed,
    ]
    failed = 0
    for test in tests:
        try:
            if test.__code__.co_argcount:
                test(Path(tempfile.mkdtemp()))
            else:
                test()
            print(f"  ✅ {test.__name__}")
        except Exception as e:
            failed += 1
            print(f"  ❌ {test.__name__}: {e!r}")

    print()
    print("✅ All tests completed!" if not failed else f"❌ {failed} test(s) failed")
