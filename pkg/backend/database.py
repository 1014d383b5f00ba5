"""
Database module for caching orbit polynomials
"""

import csv
import json
import logging
import sqlite3
from typing import Dict, List, Optional, Sequence, Tuple

from config import CACHE_PATH
from intpoly import IntPoly

logger = logging.getLogger("database")


class OrbitDatabase:
    """SQLite cache of the orbit entries (r_n, s_n) for each degree d"""

    def __init__(self, db_path: str = CACHE_PATH):
        if not db_path:
            raise ValueError("OrbitDatabase needs a file path (CACHE_PATH is empty)")
        self.db_path = db_path
        self.init_database()

    def get_connection(self):
        """Get database connection"""
        conn = sqlite3.connect(self.db_path)
        conn.row_factory = sqlite3.Row  # Return rows as dictionaries
        return conn

    def init_database(self):
        """Initialize database schema"""
        conn = self.get_connection()
        cursor = conn.cursor()

        # Orbit entries, coefficients as JSON arrays of decimal strings
        cursor.execute("""
            CREATE TABLE IF NOT EXISTS orbit_entries (
                d INTEGER NOT NULL,
                n INTEGER NOT NULL,
                r_coeffs TEXT NOT NULL,
                s_coeffs TEXT NOT NULL,
                r_degree INTEGER NOT NULL,
                s_degree INTEGER NOT NULL,
                created_at TEXT DEFAULT CURRENT_TIMESTAMP,
                PRIMARY KEY (d, n)
            )
        """)

        # Metadata table tracking how far each orbit is cached
        cursor.execute("""
            CREATE TABLE IF NOT EXISTS cache_metadata (
                d INTEGER PRIMARY KEY,
                max_n INTEGER NOT NULL,
                last_update TEXT
            )
        """)

        conn.commit()
        conn.close()

    def insert_entries_batch(self, d: int, entries: Sequence[Tuple[int, IntPoly, IntPoly]]) -> int:
        """Insert (n, r_n, s_n) rows in one transaction"""
        if not entries:
            return 0

        conn = self.get_connection()
        cursor = conn.cursor()
        inserted = 0

        try:
            for n, r, s in entries:
                cursor.execute("""
                    INSERT OR REPLACE INTO orbit_entries
                    (d, n, r_coeffs, s_coeffs, r_degree, s_degree)
                    VALUES (?, ?, ?, ?, ?, ?)
                """, (
                    d,
                    n,
                    json.dumps(r.to_json()["coeffs"]),
                    json.dumps(s.to_json()["coeffs"]),
                    r.degree,
                    s.degree,
                ))
                inserted += 1

            max_n = max(n for n, _, _ in entries)
            cursor.execute("""
                INSERT INTO cache_metadata (d, max_n, last_update)
                VALUES (?, ?, CURRENT_TIMESTAMP)
                ON CONFLICT(d) DO UPDATE SET
                    max_n = MAX(max_n, excluded.max_n),
                    last_update = CURRENT_TIMESTAMP
            """, (d, max_n))

            conn.commit()
            return inserted

        except sqlite3.Error as e:
            logger.error(f"Error inserting orbit entries for d={d}: {e}")
            conn.rollback()
            return 0

        finally:
            conn.close()

    def get_entries(self, d: int) -> List[Tuple[IntPoly, IntPoly]]:
        """Cached (r_n, s_n) for n = 1, 2, ... up to the first gap (the seed n = 0 is never stored)"""
        conn = self.get_connection()
        cursor = conn.cursor()

        cursor.execute("""
            SELECT n, r_coeffs, s_coeffs FROM orbit_entries
            WHERE d = ?
            ORDER BY n ASC
        """, (d,))

        entries = []
        for expected_n, row in enumerate(cursor.fetchall(), start=1):
            if row["n"] != expected_n:
                break
            r = IntPoly(tuple(int(c) for c in json.loads(row["r_coeffs"])))
            s = IntPoly(tuple(int(c) for c in json.loads(row["s_coeffs"])))
            entries.append((r, s))
        conn.close()

        return entries

    def get_max_n(self, d: int) -> int:
        """Highest cached n for d, -1 when nothing is cached"""
        conn = self.get_connection()
        cursor = conn.cursor()

        cursor.execute("SELECT max_n FROM cache_metadata WHERE d = ?", (d,))
        result = cursor.fetchone()
        conn.close()

        return result["max_n"] if result else -1

    def clear(self, d: Optional[int] = None):
        """Drop cached entries for one d, or everything"""
        conn = self.get_connection()
        cursor = conn.cursor()

        if d is None:
            cursor.execute("DELETE FROM orbit_entries")
            cursor.execute("DELETE FROM cache_metadata")
        else:
            cursor.execute("DELETE FROM orbit_entries WHERE d = ?", (d,))
            cursor.execute("DELETE FROM cache_metadata WHERE d = ?", (d,))

        conn.commit()
        conn.close()

    def get_statistics(self) -> List[Dict]:
        """Per-d summary of the cache"""
        conn = self.get_connection()
        cursor = conn.cursor()

        cursor.execute("""
            SELECT d, COUNT(*) as entries, MAX(n) as max_n,
                   MAX(r_degree) as max_r_degree, MAX(s_degree) as max_s_degree
            FROM orbit_entries
            GROUP BY d
            ORDER BY d ASC
        """)

        stats = [dict(row) for row in cursor.fetchall()]
        conn.close()

        return stats

    def export_to_json(self, filepath: str, d: int):
        """Export the cached orbit of d as a JSON list of {n, r, s}"""
        rows = [
            {"n": n, "r": r.to_json(), "s": s.to_json()}
            for n, (r, s) in enumerate(self.get_entries(d), start=1)
        ]

        with open(filepath, 'w') as f:
            json.dump(rows, f, indent=2)

    def export_to_csv(self, filepath: str, d: int):
        """Export one row per (n, name, power, coefficient)"""
        entries = self.get_entries(d)

        if not entries:
            return

        with open(filepath, 'w', newline='') as f:
            writer = csv.writer(f)
            writer.writerow(["d", "n", "name", "power", "coefficient"])
            for n, (r, s) in enumerate(entries, start=1):
                for name, poly in (("r", r), ("s", s)):
                    for power, c in enumerate(poly.coeffs):
                        writer.writerow([d, n, name, power, str(c)])
