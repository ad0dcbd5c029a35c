"""Database helpers for keeping a history of benchmark runs."""
from __future__ import annotations

import os
import sqlite3
from datetime import datetime
from pathlib import Path
from typing import List, Optional, Union

from .models import BenchReport

# Bench runs are only persisted when a path is given on the command line or
# through EULERTRIE_DB; a bare "--db" falls back to this file next to the
# project root.
_DEFAULT_DB_FILENAME = "eulertrie_bench.db"


def resolve_db_path(db_path: Optional[Union[str, Path]] = None) -> Path:
    """Return the resolved path to the SQLite database file."""
    if db_path is None:
        configured = os.getenv("EULERTRIE_DB")
        if configured:
            return Path(configured).expanduser().resolve()
        package_root = Path(__file__).resolve().parent
        return (package_root.parent / _DEFAULT_DB_FILENAME).resolve()
    if isinstance(db_path, Path):
        return db_path.expanduser().resolve()
    return Path(db_path).expanduser().resolve()


def get_connection(db_path: Optional[Union[str, Path]] = None) -> sqlite3.Connection:
    """Return a SQLite connection whose rows can be read by column name."""
    connection = sqlite3.connect(resolve_db_path(db_path))
    connection.row_factory = sqlite3.Row
    return connection


def initialize_db(connection: sqlite3.Connection) -> None:
    """Create the tables used by the bench history if they do not exist."""
    connection.executescript(
        """
        CREATE TABLE IF NOT EXISTS bench_runs (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            run_at TEXT NOT NULL,
            n INTEGER NOT NULL,
            cycles INTEGER NOT NULL,
            cap INTEGER NOT NULL,
            seed INTEGER NOT NULL,
            mode TEXT NOT NULL,
            max_trails INTEGER,
            m_total INTEGER NOT NULL,
            leaves INTEGER NOT NULL,
            walker_steps INTEGER NOT NULL,
            journal_entries INTEGER NOT NULL,
            transitions INTEGER NOT NULL,
            parse_build_seconds REAL NOT NULL,
            enumerate_seconds REAL NOT NULL,
            ratio REAL NOT NULL
        );
        """
    )
    connection.commit()


def utcnow_iso() -> str:
    """Return the current UTC timestamp formatted as ISO-8601 string."""
    return datetime.utcnow().replace(microsecond=0).isoformat() + "Z"


def record_bench_run(connection: sqlite3.Connection, report: BenchReport) -> int:
    """Store one bench report and return its row id."""
    cursor = connection.execute(
        """
        INSERT INTO bench_runs (
            run_at, n, cycles, cap, seed, mode, max_trails, m_total, leaves,
            walker_steps, journal_entries, transitions,
            parse_build_seconds, enumerate_seconds, ratio
        )
        VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
        """,
        (
            utcnow_iso(),
            report.spec.n,
            report.spec.cycles,
            report.spec.multiplicity_cap,
            report.spec.seed,
            report.spec.mode.value,
            report.max_trails,
            report.m_total,
            report.counters.leaves,
            report.counters.walker_steps,
            report.counters.compression_entries,
            report.counters.transitions,
            report.parse_build_seconds,
            report.enumerate_seconds,
            report.ratio,
        ),
    )
    connection.commit()
    return int(cursor.lastrowid)


def list_recent_bench_runs(connection: sqlite3.Connection, limit: int = 10) -> List[sqlite3.Row]:
    cursor = connection.execute(
        "SELECT * FROM bench_runs ORDER BY run_at DESC, id DESC LIMIT ?",
        (limit,),
    )
    return cursor.fetchall()
