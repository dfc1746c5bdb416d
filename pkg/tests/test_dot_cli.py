"""DOT output well-formedness and the command line front end."""

import json
import subprocess
import sys

import pytest

from gr1kit import cli, parse_spec, refine_search, solve_spec
from gr1kit.abstraction import abstract_fts, label_edges
from gr1kit.dot import dot_counterstrategy, dot_fts, dot_labeled_fts, dot_search_tree

import fixtures
from oracles import check_dot


# ---------------------------------------------------------------------------
# DOT writers


def test_counterstrategy_dot_parses():
    cs = fixtures.four_state_machine()
    text = dot_counterstrategy(cs)
    nodes, edges = check_dot(text)
    assert nodes == {f"q{i}" for i in range(4)}
    assert ("q0", "q1") in edges and ("q3", "q1") in edges
    assert "doublecircle" in text
    assert "r & c" in text


def named(edges):
    return {(f"q{a}", f"q{b}") for a, b in edges}


def test_fts_dot_parses():
    cs = fixtures.four_state_machine()
    fts, preds = abstract_fts(cs)
    nodes, edges = check_dot(dot_fts(fts, preds))
    assert len(nodes) == fts.n_states
    assert set(edges) == named(fts.edges)


def test_fts_dot_marks_sink():
    from gr1kit.abstraction import Fts

    fts = Fts(3, 0, ((0, 1), (1, 2), (2, 2)), dummy=2)
    text = dot_fts(fts)
    check_dot(text)
    assert "(sink)" in text


def test_labeled_fts_dot_parses():
    spec = parse_spec(fixtures.REQUEST_GRANT_GFNR)
    cs = solve_spec(spec).counter_strategy
    lfts = label_edges(cs)
    nodes, edges = check_dot(dot_labeled_fts(lfts))
    assert set(edges) == named(lfts.fts.edges)


def test_search_tree_dot_parses():
    spec = parse_spec(fixtures.LIFT_STRICT)
    report = refine_search(spec, alpha=2, mode="all").report
    text = dot_search_tree(report)
    nodes, edges = check_dot(text)
    assert len(nodes) == len(report.nodes)
    # tree shape: every non-root node has exactly one parent
    assert len(edges) == len(nodes) - 1
    assert "root" in text
    assert "[inconsistent]" in text
    assert "[realizable]" in text


# ---------------------------------------------------------------------------
# CLI plumbing


def write_spec(tmp_path, text, name="spec.txt"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_check_realizable(tmp_path, capsys):
    path = write_spec(tmp_path, fixtures.LIFT)
    assert cli.main(["check", path]) == 0
    assert capsys.readouterr().out.strip() == "REALIZABLE"


def test_check_unrealizable_writes_dot(tmp_path, capsys):
    path = write_spec(tmp_path, fixtures.REQUEST_GRANT)
    dot_file = tmp_path / "cs.dot"
    assert cli.main(["check", path, "--dot", str(dot_file)]) == 1
    assert capsys.readouterr().out.strip() == "UNREALIZABLE"
    nodes, _ = check_dot(dot_file.read_text(encoding="utf-8"))
    assert nodes


def test_check_vacuous_note(tmp_path, capsys):
    text = "ENV_VARS a\nSYS_VARS x\nENV_INIT a & !a\n"
    path = write_spec(tmp_path, text)
    assert cli.main(["check", path]) == 0
    assert capsys.readouterr().out.strip() == "REALIZABLE (no legal environment start)"


def test_check_reads_stdin(capsys, monkeypatch):
    import io

    monkeypatch.setattr(sys, "stdin", io.StringIO(fixtures.LIFT))
    assert cli.main(["check", "-"]) == 0
    assert "REALIZABLE" in capsys.readouterr().out


def test_check_spec_error_exits_2(tmp_path, capsys):
    path = write_spec(tmp_path, "ENV_VARS a\nSYS_VARS x\nSYS_TRANS G(nosuch)\n")
    assert cli.main(["check", path]) == 2
    assert "error:" in capsys.readouterr().err


def test_check_missing_file_exits_2(tmp_path, capsys):
    assert cli.main(["check", str(tmp_path / "absent.txt")]) == 2
    assert "error:" in capsys.readouterr().err


def test_refine_prints_blocks_and_summary(tmp_path, capsys):
    path = write_spec(tmp_path, fixtures.LIFT_STRICT)
    code = cli.main([
        "refine", path, "--alpha", "2", "--all",
        "--p1", "b1,b2,b3", "--p2", "b1,b2,b3",
        "--p3", "b1,b2,b3", "--p4", "b1,b2,b3",
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "# refinement 1" in out
    assert "ENV_LIVENESS: GF(b1 | b2 | b3)" in out
    assert "# refinement 2" in out
    assert "ENV_TRANS: G(!b1 & !b2 & !b3 -> X(b1 | b2 | b3))" in out
    assert "# processed 1 counter-strategies, 3 candidates, 1 inconsistent" in out


def test_refine_realizable_spec(tmp_path, capsys):
    path = write_spec(tmp_path, fixtures.LIFT)
    assert cli.main(["refine", path]) == 0
    out = capsys.readouterr().out
    assert "# refinement 1" in out
    assert "# (spec is already realizable)" in out


def test_refine_with_no_candidates_fails(tmp_path, capsys):
    path = write_spec(tmp_path, fixtures.REQUEST_GRANT)
    code = cli.main([
        "refine", path, "--p1", "", "--p2", "", "--p3", "", "--p4", "",
    ])
    assert code == 1
    assert "no refinement found" in capsys.readouterr().out


def test_refine_json_and_dot_outputs(tmp_path, capsys):
    path = write_spec(tmp_path, fixtures.LIFT_STRICT)
    json_file = tmp_path / "report.json"
    dot_file = tmp_path / "tree.dot"
    code = cli.main([
        "refine", path, "--alpha", "2", "--all",
        "--json", str(json_file), "--dot", str(dot_file),
    ])
    assert code == 0
    capsys.readouterr()
    report = json.loads(json_file.read_text(encoding="utf-8"))
    assert report["alpha"] == 2
    assert ["GF(b1 | b2 | b3)"] in report["refinements"]
    assert report["counterstrategies_processed"] == 1
    assert {"candidate_time_ms", "total_time_ms", "nodes", "subsets"} <= set(report)
    check_dot(dot_file.read_text(encoding="utf-8"))


def test_bad_alpha_rejected(tmp_path, capsys):
    path = write_spec(tmp_path, fixtures.LIFT)
    with pytest.raises(SystemExit) as exc:
        cli.main(["refine", path, "--alpha", "0"])
    assert exc.value.code == 2


def test_module_entry_point(tmp_path):
    path = write_spec(tmp_path, fixtures.LIFT)
    proc = subprocess.run(
        [sys.executable, "-m", "gr1kit.cli", "check", path],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "REALIZABLE"


def test_console_script(tmp_path):
    path = write_spec(tmp_path, fixtures.REQUEST_GRANT)
    proc = subprocess.run(
        ["gr1kit", "check", path], capture_output=True, text=True
    )
    assert proc.returncode == 1
    assert proc.stdout.strip() == "UNREALIZABLE"
