from __future__ import annotations

from pathlib import Path

import pytest

from eulertrie.db import get_connection, initialize_db, list_recent_bench_runs, record_bench_run, resolve_db_path
from eulertrie.models import BenchReport, EnumerationMode, GenSpec, StepCounters


def _report(leaves: int) -> BenchReport:
    return BenchReport(
        spec=GenSpec(n=10, cycles=3, multiplicity_cap=2, seed=4, mode=EnumerationMode.NODE_DISTINCT),
        max_trails=100,
        m_total=40,
        counters=StepCounters(walker_steps=120, compression_entries=300, transitions=90, leaves=leaves),
        generate_seconds=0.01,
        parse_build_seconds=0.02,
        enumerate_seconds=0.5,
    )


def test_resolve_db_path_prefers_argument_then_environment(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("EULERTRIE_DB", str(tmp_path / "env.db"))

    assert resolve_db_path(tmp_path / "given.db") == (tmp_path / "given.db").resolve()
    assert resolve_db_path() == (tmp_path / "env.db").resolve()
    monkeypatch.delenv("EULERTRIE_DB")
    assert resolve_db_path().name == "eulertrie_bench.db"


def test_record_and_list_bench_runs(tmp_path: Path) -> None:
    connection = get_connection(tmp_path / "bench.db")
    initialize_db(connection)
    try:
        first = record_bench_run(connection, _report(leaves=10))
        second = record_bench_run(connection, _report(leaves=20))
        rows = list_recent_bench_runs(connection, limit=5)
    finally:
        connection.close()

    assert (first, second) == (1, 2)
    assert [row["id"] for row in rows] == [2, 1]
    assert rows[0]["mode"] == "node-distinct"
    assert rows[0]["leaves"] == 20
    assert rows[0]["ratio"] == pytest.approx(420 / 60)
    assert rows[1]["run_at"].endswith("Z")


def test_list_respects_limit(tmp_path: Path) -> None:
    connection = get_connection(tmp_path / "bench.db")
    initialize_db(connection)
    try:
        for leaves in range(4):
            record_bench_run(connection, _report(leaves))
        assert len(list_recent_bench_runs(connection, limit=2)) == 2
    finally:
        connection.close()
