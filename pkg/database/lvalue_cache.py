"""
L-value Cache Module
Persistent SQLite cache of L-value records in a fixed little-endian binary layout
"""

import hashlib
import json
import logging
import os
import sqlite3
import struct
import zlib
from contextlib import closing
from typing import Dict, Iterable, List, Optional

from analysis.lfunctions import LValueRecord, Method, l_value
from utils.config import ACCURACY_VERSION, default_cache_dir

logger = logging.getLogger(__name__)

# u64 d, f64 Re s, f64 Im s, f64 Re L, f64 Im L, f64 error, u32 method/version
PAYLOAD_FORMAT = "<QdddddI"
CHECKSUM_FORMAT = "<I"
PAYLOAD_SIZE = struct.calcsize(PAYLOAD_FORMAT)
RECORD_SIZE = PAYLOAD_SIZE + struct.calcsize(CHECKSUM_FORMAT)
LAYOUT_VERSION = 1

DB_FILENAME = "lvalues.db"
LAYOUT_FILENAME = "layout.json"
BATCH = 500


def cache_key(d: int, s: complex, method: Method, version: int = ACCURACY_VERSION) -> str:
    """Content hash of (d, s rounded to 1e-15, method, accuracy version)"""
    s = complex(s)
    text = f"{int(d)}|{round(s.real, 15)!r}|{round(s.imag, 15)!r}|{method.value}|{version}"
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def pack_record(record: LValueRecord, version: int = ACCURACY_VERSION) -> bytes:
    tag = (version << 8) | record.method.code
    payload = struct.pack(PAYLOAD_FORMAT, record.d, record.s.real, record.s.imag,
                          record.value.real, record.value.imag, record.abs_error, tag)
    return payload + struct.pack(CHECKSUM_FORMAT, zlib.crc32(payload))


def unpack_record(blob: bytes, terms_used: int = 0) -> Optional[LValueRecord]:
    """
    Decode a stored record

    Args:
        blob (bytes): RECORD_SIZE bytes as written by pack_record
        terms_used (int): Term count kept alongside the blob

    Returns:
        Optional[LValueRecord]: The record, or None if the checksum fails
    """
    if blob is None or len(blob) != RECORD_SIZE:
        return None
    payload = bytes(blob[:PAYLOAD_SIZE])
    (checksum,) = struct.unpack(CHECKSUM_FORMAT, bytes(blob[PAYLOAD_SIZE:]))
    if zlib.crc32(payload) != checksum:
        return None
    d, s_re, s_im, v_re, v_im, error, tag = struct.unpack(PAYLOAD_FORMAT, payload)
    return LValueRecord(d, complex(s_re, s_im), complex(v_re, v_im), error,
                        Method.from_code(tag & 0xFF), int(terms_used))


class LValueCache:
    """Manages the SQLite L-value cache in one directory"""

    def __init__(self, cache_dir: Optional[str] = None, version: int = ACCURACY_VERSION):
        """
        Initialize the cache

        Args:
            cache_dir (Optional[str]): Directory for the database and layout sidecar
            version (int): Accuracy version mixed into every key
        """
        self.cache_dir = cache_dir or default_cache_dir()
        self.db_path = os.path.join(self.cache_dir, DB_FILENAME)
        self.layout_path = os.path.join(self.cache_dir, LAYOUT_FILENAME)
        self.version = version
        self.hits = 0
        self.misses = 0
        self.repairs = 0
        self.init_database()

    def init_database(self):
        """Create the directory, table and layout sidecar if they don't exist"""
        try:
            with closing(self._connect()) as conn:
                conn.commit()
            self._write_layout()
        except Exception as e:
            logger.error("Error initializing L-value cache in %s: %s", self.cache_dir, e)

    def _connect(self) -> sqlite3.Connection:
        # Re-created on every connection so a deleted cache file is rebuilt transparently
        os.makedirs(self.cache_dir, exist_ok=True)
        conn = sqlite3.connect(self.db_path, timeout=30)
        conn.execute("""
        CREATE TABLE IF NOT EXISTS lvalues (
            key TEXT PRIMARY KEY,
            d INTEGER NOT NULL,
            record BLOB NOT NULL,
            terms_used INTEGER NOT NULL DEFAULT 0,
            date_added TIMESTAMP DEFAULT CURRENT_TIMESTAMP
        )
        """)
        return conn

    def _write_layout(self):
        if os.path.exists(self.layout_path):
            return
        layout = {
            "layout_version": LAYOUT_VERSION,
            "byte_order": "little",
            "record_size": RECORD_SIZE,
            "fields": [
                {"name": "d", "type": "u64"},
                {"name": "s_re", "type": "f64"},
                {"name": "s_im", "type": "f64"},
                {"name": "value_re", "type": "f64"},
                {"name": "value_im", "type": "f64"},
                {"name": "abs_error", "type": "f64"},
                {"name": "method_version", "type": "u32",
                 "note": "accuracy version << 8 | method code"},
                {"name": "checksum", "type": "u32", "note": "crc32 of the preceding bytes"},
            ],
        }
        with open(self.layout_path, "w", encoding="utf-8") as handle:
            json.dump(layout, handle, indent=2, sort_keys=True)

    def get_many(self, ds: Iterable[int], s: complex,
                 method: Method = Method.SMOOTHED_AFE) -> Dict[int, LValueRecord]:
        """
        Look up cached records for several d at one s

        Args:
            ds (Iterable[int]): Odd square-free d values
            s (complex): Point
            method (Method): Evaluation method

        Returns:
            Dict[int, LValueRecord]: Records found, keyed by d; corrupt rows are skipped
        """
        keys = {cache_key(d, s, method, self.version): int(d) for d in ds}
        found: Dict[int, LValueRecord] = {}
        try:
            with closing(self._connect()) as conn:
                key_list = list(keys)
                for start in range(0, len(key_list), BATCH):
                    chunk = key_list[start:start + BATCH]
                    placeholders = ",".join("?" * len(chunk))
                    rows = conn.execute(
                        f"SELECT key, record, terms_used FROM lvalues WHERE key IN ({placeholders})",
                        chunk,
                    ).fetchall()
                    for key, blob, terms_used in rows:
                        record = unpack_record(blob, terms_used)
                        if record is None or record.d != keys[key]:
                            self.repairs += 1
                            logger.warning("Corrupt cache record for d=%d, recomputing", keys[key])
                            continue
                        found[record.d] = record
        except Exception as e:
            logger.error("Error reading L-value cache %s: %s", self.db_path, e)
        self.hits += len(found)
        self.misses += len(keys) - len(found)
        return found

    def get(self, d: int, s: complex, method: Method = Method.SMOOTHED_AFE) -> Optional[LValueRecord]:
        return self.get_many([d], s, method).get(int(d))

    def put_many(self, records: Iterable[LValueRecord]) -> bool:
        """
        Insert or replace records; only the harness main process writes

        Args:
            records (Iterable[LValueRecord]): Records to store

        Returns:
            bool: True if successful
        """
        rows = [(cache_key(r.d, r.s, r.method, self.version), r.d,
                 pack_record(r, self.version), r.terms_used) for r in records]
        try:
            with closing(self._connect()) as conn:
                conn.executemany(
                    "INSERT OR REPLACE INTO lvalues (key, d, record, terms_used) VALUES (?, ?, ?, ?)",
                    rows,
                )
                conn.commit()
            return True
        except Exception as e:
            logger.error("Error writing %d records to L-value cache: %s", len(rows), e)
            return False

    def put(self, record: LValueRecord) -> bool:
        return self.put_many([record])

    def get_or_compute(self, d: int, s: complex,
                       method: Method = Method.SMOOTHED_AFE) -> LValueRecord:
        record = self.get(d, s, method)
        if record is not None:
            return record
        record = l_value(d, s, method)
        self.put(record)
        return record

    def count_records(self) -> int:
        """Get total number of cached records"""
        try:
            with closing(self._connect()) as conn:
                return conn.execute("SELECT COUNT(*) FROM lvalues").fetchone()[0]
        except Exception as e:
            logger.error("Error counting cache records: %s", e)
            return 0

    def clear(self) -> bool:
        try:
            with closing(self._connect()) as conn:
                conn.execute("DELETE FROM lvalues")
                conn.commit()
            return True
        except Exception as e:
            logger.error("Error clearing L-value cache: %s", e)
            return False

    def stats(self) -> Dict[str, int]:
        return {"hits": self.hits, "misses": self.misses, "repairs": self.repairs,
                "records": self.count_records()}


def lvalue_cache_get_or_compute(d: int, s: complex, cache_dir: Optional[str] = None,
                                method: Method = Method.SMOOTHED_AFE) -> LValueRecord:
    """
    Cached L(s, chi^(8d)): returns the stored record or computes and stores it

    Args:
        d (int): Odd square-free d
        s (complex): Point
        cache_dir (Optional[str]): Cache directory; MOMENTLAB_CACHE_DIR or ./cache by default
        method (Method): Evaluation method

    Returns:
        LValueRecord: The record
    """
    return LValueCache(cache_dir).get_or_compute(d, s, method)


def records_in_order(found: Dict[int, LValueRecord], ds: Iterable[int]) -> List[LValueRecord]:
    return [found[int(d)] for d in ds]
