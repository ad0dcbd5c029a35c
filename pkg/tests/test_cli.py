from __future__ import annotations

import io
from pathlib import Path
from typing import List

import pytest

from conftest import DOUBLE_EDGE, TWO_TRIANGLES
from eulertrie.cli import RunConfig, UsageError, build_parser, main
from eulertrie.compression import build_compressed


@pytest.fixture(autouse=True)
def _no_configured_db(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("EULERTRIE_DB", raising=False)
    monkeypatch.delenv("EULERTRIE_BRUTE_CAP", raising=False)


def _write(tmp_path: Path, name: str, text: str) -> str:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_no_command_prints_help(capsys: pytest.CaptureFixture[str]) -> None:
    assert main([]) == 0
    assert "usage" in capsys.readouterr().out


def test_check_circuit(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    path = _write(tmp_path, "triangles.txt", TWO_TRIANGLES)

    assert main(["check", path]) == 0
    assert capsys.readouterr().out.splitlines() == [
        "feasible circuit, start a",
        "5 nodes, 6 edge records, 6 edge copies",
    ]


def test_check_open_trail_from_stdin(monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]) -> None:
    monkeypatch.setattr("sys.stdin", io.StringIO(DOUBLE_EDGE))

    assert main(["check", "-", "--mode", "edge-distinct"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "feasible open trail from a to b"


def test_check_reports_infeasible_star(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    path = _write(tmp_path, "star.txt", "a b\na c\n")

    assert main(["check", path]) == 1
    assert capsys.readouterr().out.strip() == "infeasible: node a has degree imbalance +2"


def test_missing_file_is_a_usage_error(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["check", str(tmp_path / "missing.txt")]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_parse_errors_exit_with_two(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    path = _write(tmp_path, "parallel.txt", "a b\na b\n")

    assert main(["enumerate", path]) == 2
    assert "parallel edge a -> b at line 2" in capsys.readouterr().err


def test_unknown_start_node(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    path = _write(tmp_path, "triangles.txt", TWO_TRIANGLES)

    assert main(["enumerate", path, "--start", "zz"]) == 2
    assert "zz" in capsys.readouterr().err


def test_count_best(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    path = _write(tmp_path, "triangles.txt", TWO_TRIANGLES)

    assert main(["count", path]) == 0
    assert capsys.readouterr().out.strip() == "2"


def test_count_enumerate_with_cap(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    path = _write(tmp_path, "triangles.txt", TWO_TRIANGLES)

    assert main(["count", path, "--counter", "enumerate", "--max-trails", "1"]) == 0
    assert capsys.readouterr().out.strip() == "1 (cap reached)"


def test_count_modes_on_double_edge(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    path = _write(tmp_path, "double.txt", DOUBLE_EDGE)

    assert main(["count", path, "--mode", "node-distinct", "--counter", "enumerate"]) == 0
    assert main(["count", path, "--mode", "edge-distinct"]) == 0
    assert main(["count", path, "--mode", "edge-distinct", "--counter", "brute"]) == 0
    assert capsys.readouterr().out.split() == ["1", "2", "2"]


def test_best_counter_rejects_node_distinct(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    path = _write(tmp_path, "double.txt", DOUBLE_EDGE)

    assert main(["count", path, "--mode", "node-distinct"]) == 2
    assert "--counter best" in capsys.readouterr().err


def test_enumerate_trails_nodes(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    path = _write(tmp_path, "triangles.txt", TWO_TRIANGLES)

    assert main(["enumerate", path, "--format", "trails-nodes"]) == 0
    assert capsys.readouterr().out.splitlines() == ["a b c a d e a", "a d e a b c a"]


def test_enumerate_double_edge_copies(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    path = _write(tmp_path, "double.txt", DOUBLE_EDGE)

    assert main(["enumerate", path, "--mode", "edge-distinct", "--validate"]) == 0
    assert capsys.readouterr().out.splitlines() == ["e0 e2 e1", "e1 e2 e0"]


def test_enumerate_shared_trie(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    path = _write(tmp_path, "cycle.txt", "a b\nb c\nc a\n")

    assert main(["enumerate", path, "--format", "trie-shared"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert sum(1 for line in lines if line[0] in "LC") == 5
    assert sum(1 for line in lines if line.startswith("T ")) == 1


def test_enumerate_cap_note_goes_to_stderr(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    path = _write(tmp_path, "triangles.txt", TWO_TRIANGLES)

    assert main(["enumerate", path, "--max-trails", "1", "--format", "trie"]) == 0
    captured = capsys.readouterr()
    assert captured.out.splitlines()[0] == "root a"
    assert "cap reached" in captured.err


def test_enumerate_dot(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    path = _write(tmp_path, "triangles.txt", TWO_TRIANGLES)

    assert main(["enumerate", path, "--format", "dot"]) == 0
    assert capsys.readouterr().out.startswith("digraph trail_trie {")


def test_enumerate_infeasible_exits_with_one(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    path = _write(tmp_path, "split.txt", "a b\nb a\nc d\nd c\n")

    assert main(["enumerate", path]) == 1
    assert "not weakly connected" in capsys.readouterr().err


def test_bench_records_history(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    db_path = str(tmp_path / "bench.db")

    assert main(["--db", db_path, "bench", "--gen-n", "30", "--gen-cycles", "5", "--max-trails", "50"]) == 0
    out = capsys.readouterr().out
    assert "Work per (m_total + trails):" in out
    assert "Recorded bench run #1." in out

    assert main(["--db", db_path, "bench-history"]) == 0
    history = capsys.readouterr().out.splitlines()
    assert history[0].startswith("ID")
    assert len(history) == 3


def test_bench_builds_the_compressed_graph_once(
    monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]
) -> None:
    calls: List[int] = []

    def counting_build(*args, **kwargs):
        calls.append(1)
        return build_compressed(*args, **kwargs)

    monkeypatch.setattr("eulertrie.exploration.build_compressed", counting_build)

    assert main(["bench", "--gen-n", "30", "--gen-cycles", "5", "--max-trails", "5"]) == 0
    assert len(calls) == 1
    assert "Enumerate:" in capsys.readouterr().out


def test_bench_without_db_only_prints(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["bench", "--gen-n", "12", "--gen-cycles", "3", "--mode", "node-distinct", "--cap", "2"]) == 0
    assert "Recorded" not in capsys.readouterr().out


def test_bench_history_on_empty_db(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["--db", str(tmp_path / "empty.db"), "bench-history"]) == 0
    assert capsys.readouterr().out.strip() == "No bench runs have been recorded yet."


@pytest.mark.parametrize(
    "argv",
    [
        ["bench", "--cap", "3"],
        ["bench", "--gen-n", "0"],
        ["bench", "--max-trails", "0"],
        ["bench-history", "--limit", "0"],
    ],
)
def test_run_config_rejects_bad_flags(argv: list[str]) -> None:
    args = build_parser().parse_args(argv)

    with pytest.raises(UsageError):
        RunConfig.from_namespace(args)


def test_bench_defaults_to_a_trail_cap() -> None:
    config = RunConfig.from_namespace(build_parser().parse_args(["bench"]))

    assert config.max_trails == 10_000
