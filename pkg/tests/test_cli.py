"""
Tests for the treesat command line.
"""

import json
import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

import config
from automata.complement import equivalent
from cli import main
from formats.timbuk import dump_timbuk, load_timbuk

pytestmark = pytest.mark.integration


def last_json(text):
    """The JSON object at the end of a command's output"""
    return json.loads(text[text.index("{"):])


@pytest.fixture
def pair_file(tmp_path, pair_automaton):
    path = tmp_path / "pair.timbuk"
    dump_timbuk(pair_automaton, path, "pair")
    return str(path)


@pytest.fixture
def all_trees_file(tmp_path, all_trees_automaton):
    path = tmp_path / "all.timbuk"
    dump_timbuk(all_trees_automaton, path, "all")
    return str(path)


@pytest.fixture
def tv_file(tmp_path, tv_corpus):
    path = tmp_path / "tv.timbuk"
    dump_timbuk(tv_corpus[3], path, "tv")
    return str(path)


# ==================== Test: generate ====================


def test_generate_is_reproducible(tmp_path, capsys):
    """Test that the same seed writes byte-identical corpora"""
    args = ["generate", "--n", "4", "--td", "1.5", "--count", "3", "--seed", "7"]

    assert main(args + ["--out-dir", str(tmp_path / "one")]) == 0
    assert main(args + ["--out-dir", str(tmp_path / "two")]) == 0

    names = sorted(os.listdir(tmp_path / "one"))
    assert names == ["tv-0000.timbuk", "tv-0001.timbuk", "tv-0002.timbuk"]
    for name in names:
        one, two = tmp_path / "one" / name, tmp_path / "two" / name
        assert one.read_bytes() == two.read_bytes()
    assert last_json(capsys.readouterr().out)["count"] == 3


def test_generate_rejects_bad_density(tmp_path, capsys):
    """Test that invalid generator parameters exit with code 2"""
    code = main(["generate", "--n", "3", "--ad", "2.0", "--out-dir", str(tmp_path)])

    assert code == 2
    error = json.loads(capsys.readouterr().err)
    assert error["success"] is False
    assert error["error"] == 2


# ==================== Test: equiv ====================


def test_equiv_same_file(pair_file, capsys):
    """Test that a file is equivalent to itself"""
    assert main(["equiv", pair_file, pair_file, "--exact"]) == 0
    assert last_json(capsys.readouterr().out)["equivalent"] is True


def test_equiv_different_languages(pair_file, all_trees_file, capsys):
    """Test exit code 1 and a witness for different languages"""
    assert main(["equiv", pair_file, all_trees_file]) == 1
    assert last_json(capsys.readouterr().out)["equivalent"] is False

    assert main(["equiv", pair_file, all_trees_file, "--depth", "3"]) == 1
    result = last_json(capsys.readouterr().out)
    assert result["witness"] == "b"
    assert result["mode"] == "depth 3"


# ==================== Test: reduce ====================


@pytest.mark.parametrize("algo", ["heavy", "sat1", "sat2"])
def test_reduce_with_certification(tv_file, algo, capsys):
    """Test that each reducer certifies and prints Timbuk before the JSON result"""
    code = main(["reduce", tv_file, "--algo", algo, "--certify", "3"])

    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("Ops ")
    result = last_json(out)
    assert result["certification"] == "PASS"
    assert result["output"]["states"] <= result["input"]["states"]


def test_reduce_to_file_exact(tv_file, tmp_path, capsys):
    """Test --out with exact certification"""
    out_path = tmp_path / "reduced.timbuk"

    code = main(
        ["reduce", tv_file, "--x", "2", "--certify", "exact", "--out", str(out_path)]
    )

    result = json.loads(capsys.readouterr().out)
    assert code == 0
    assert result["certification"] == "PASS"
    assert equivalent(load_timbuk(out_path), load_timbuk(tv_file))


def test_reduce_rejects_bad_certify_value(tv_file, capsys):
    """Test that --certify takes a depth or 'exact'"""
    assert main(["reduce", tv_file, "--certify", "deep"]) == 2


def test_reduce_with_engine_flags(tv_file, capsys):
    """Test that cache and pre-refinement flags are accepted"""
    code = main(
        ["reduce", tv_file, "--cache", "global", "--prerefine", "2", "--certify", "3"]
    )

    assert code == 0
    assert last_json(capsys.readouterr().out)["certification"] == "PASS"


# ==================== Test: errors ====================


def test_parse_failure_exits_two(tmp_path, capsys):
    """Test that a malformed file gives an error JSON with its position"""
    path = tmp_path / "bad.timbuk"
    path.write_text(
        "Ops a:2 b:0\n\nAutomaton bad\nStates q\nFinal States q\n"
        "Transitions\na(q) -> q\n"
    )

    code = main(["stats", str(path)])

    error = json.loads(capsys.readouterr().err)
    assert code == 2
    assert error["line"] == 7


def test_missing_file_exits_two(tmp_path, capsys):
    """Test an unreadable input path"""
    assert main(["stats", str(tmp_path / "absent.timbuk")]) == 2
    assert "Cannot read" in json.loads(capsys.readouterr().err)["message"]


def test_complement_budget_exits_three(pair_file, monkeypatch, capsys):
    """Test that a determinization over budget exits with code 3"""
    monkeypatch.setattr(config, "MACRO_STATE_BUDGET", 1)

    assert main(["complement", pair_file]) == 3
    assert json.loads(capsys.readouterr().err)["budget"] == 1


# ==================== Test: complement, stats and bench ====================


def test_complement_pipeline(pair_file, tmp_path, capsys):
    """Test H+C+H with the result written to a file"""
    out_path = tmp_path / "comp.timbuk"

    args = ["complement", pair_file, "--pipeline", "H+C+H", "--out", str(out_path)]

    assert main(args) == 0

    summary = json.loads(capsys.readouterr().out)
    assert [step["name"] for step in summary["steps"]] == ["H", "C", "H"]
    assert summary["empty"] is False
    assert out_path.exists()


def test_stats(pair_file, capsys):
    """Test the statistics of a(b,b)"""
    assert main(["stats", pair_file]) == 0

    result = json.loads(capsys.readouterr().out)
    assert result["states"] == 2
    assert result["transitions"] == 2
    assert result["per_symbol"] == {"a": 1, "b": 1}
    assert result["violations"] == []


def test_bench_writes_csv(corpus_dir, tmp_path, capsys):
    """Test a bench run end to end"""
    csv_path = tmp_path / "report.csv"

    code = main(
        [
            "bench",
            "--corpus",
            str(corpus_dir),
            "--pipelines",
            "C,H+C",
            "--csv",
            str(csv_path),
        ]
    )

    result = json.loads(capsys.readouterr().out)
    assert code == 0
    assert result["rows"] == 8
    assert result["failures"] == 0
    assert [row["pipeline"] for row in result["summary"]] == ["C", "H+C"]
    assert csv_path.read_text().startswith("corpus_id,pipeline,")
