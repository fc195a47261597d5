import io
import json
import subprocess
import sys

import pytest

from lemmatable.cli import main
from lemmatable.engine import EngineConfig, run
from lemmatable.grammars import load_bundled, path
from lemmatable.report import parse_trace_line
from lemmatable.syntax import parse_goal
from lemmatable.terms import clause_key

CLUSTER_QUERY = "x(C,[lijkt_te,ontwijken],R)"
SENTENCE = "x(s,['Frits',opzettelijk,'Marie',lijkt_te,ontwijken],[])"


def cli(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def trace_of(text):
    return [line for line in text.splitlines() if line[:1].isdigit()]


def test_cluster_trace_shape():
    code, text = cli("prove", "dutch_cg", CLUSTER_QUERY, "--trace")
    assert code == 0
    lines = [parse_trace_line(l)[0] for l in trace_of(text)]
    assert len(lines) == 19
    assert {l.table for l in lines} == {0, 1, 2}
    assert [l.item for l in lines] == list(range(1, 20))
    assert all(p < l.item for l in lines for p in l.parents)
    assert not [l for l in lines if l.table == 2 and l.tag == "S"]


def test_cluster_answer_body_abbreviated():
    code, text = cli("prove", "dutch_cg", CLUSTER_QUERY, "--trace", "--abbrev")
    assert code == 0
    full = "x(A,[lt,o],[]) ::- [add(s\\np\\np,B), add(s\\np/(s\\np),C), div(C,A/B)]"
    assert full in text.splitlines()
    s_lines = [l for l in trace_of(text) if l.startswith("0.") and " S " in l]
    assert any(l.endswith(full) for l in s_lines)


@pytest.mark.parametrize("agenda", ["fifo", "lifo"])
def test_trace_lines_reparse_to_logged_clauses(agenda):
    _, text = cli("prove", "dutch_cg", CLUSTER_QUERY, "--trace", "--agenda", agenda)
    result = run(*load_bundled("dutch_cg"), parse_goal(CLUSTER_QUERY), EngineConfig(agenda=agenda))
    for line in trace_of(text):
        tl, clause = parse_trace_line(line)
        item = result.item(tl.item)
        assert clause_key(clause) == clause_key(item.clause)
        assert tl.parents == item.parents and tl.table == item.table


def test_sentence_derivations():
    code, text = cli("prove", "dutch_cg", SENTENCE, "--derivations")
    assert code == 0
    assert "2 derivations" in text.splitlines()


def test_memo_loop_no_solutions():
    assert cli("prove", "memo_loop", "p")[0] == 1


def test_step_limit_exit():
    assert cli("prove", "dutch_cg", SENTENCE, "--max-steps", "5")[0] == 2


@pytest.mark.parametrize("argv", [
    ["prove", "dutch_cg", "x(C,"],
    ["prove", "no_such_program", "p"],
    ["prove", "dutch_cg", "p", "--agenda", "random"],
    ["prove", "dutch_cg", "p", "--max-steps", "0"],
    ["frobnicate"],
])
def test_usage_errors_exit_3(argv, capsys):
    with pytest.raises(SystemExit) as e:
        sys.exit(main(argv, io.StringIO()))
    assert e.value.code == 3


def test_program_file_path(tmp_path):
    f = tmp_path / "p.pl"
    f.write_text("q(a).\nq(b).\n")
    code, text = cli("prove", str(f), "q(X)")
    assert code == 0
    assert "q(a) ::- []" in text and "q(b) ::- []" in text


def test_bad_program_file_exit_3(tmp_path):
    f = tmp_path / "bad.pl"
    f.write_text("q(a ::- [].\n")
    assert cli("prove", str(f), "q(X)")[0] == 3


def test_json_layout():
    code, text = cli("prove", "dutch_cg", CLUSTER_QUERY, "--json", "--derivations")
    assert code == 0
    data = json.loads(text)
    assert set(data) == {"status", "steps", "query", "gamma", "answers", "tables", "items", "derivations"}
    assert data["status"] == "completed" and data["steps"] == 19
    assert len(data["items"]) == 19 and len(data["tables"]) == 3
    assert set(data["items"][0]) == {"id", "table", "tag", "parents", "clause", "selected", "duplicate_of"}
    assert set(data["tables"][0]) == {"index", "goal", "solutions", "parents", "members"}
    assert data["tables"][2]["solutions"] == []
    assert data["derivations"] == 2


def test_no_memo_flag():
    code, text = cli("prove", "right_recursive_dcg", "seq([a,b],S)", "--no-memo")
    assert code == 0 and "1 tables" in text


def test_no_dedup_flag(tmp_path):
    f = tmp_path / "dup.pl"
    f.write_text(":- memo(q(_)).\nq(a).\nq(a).\np(X) ::- [q(X)].\n")
    _, on = cli("prove", str(f), "p(X)")
    _, off = cli("prove", str(f), "p(X)", "--no-dedup")
    assert "% 1 answers" in on and "% 2 answers" in off


def test_compare_fixpoint_equal():
    code, text = cli("compare", "transitive_closure", "path(a,X)", "--oracle", "fixpoint")
    assert code == 0 and "verdict: EQUAL" in text


def test_compare_sld_bounded():
    code, text = cli("compare", "dutch_cg", CLUSTER_QUERY, "--oracle", "sld", "--depth", "50")
    assert code == 0 and "verdict: ENGINE-TERMINATES-ORACLE-BOUNDED" in text


def test_compare_memo_loop_equal():
    code, text = cli("compare", "memo_loop", "p", "--oracle", "sld", "--depth", "10")
    assert code == 0 and "verdict: EQUAL" in text
    assert "depth bound hit" in text


def test_compare_fixpoint_on_non_datalog():
    assert cli("compare", "dutch_cg", CLUSTER_QUERY, "--oracle", "fixpoint")[0] == 3


def test_compare_mismatch_exit_4(tmp_path):
    # the engine is cut off before finding anything, the oracle is exhaustive
    f = tmp_path / "p.pl"
    f.write_text(":- memo(q(_)).\nq(a).\np(X) ::- [q(X)].\n")
    code, text = cli("compare", str(f), "p(X)", "--oracle", "sld", "--max-steps", "1")
    assert code == 4 and "verdict: MISMATCH" in text


def test_programs_lists_assets():
    code, text = cli("programs")
    assert code == 0
    assert [l.split()[0] for l in text.splitlines()] == ["dutch_cg", "memo_loop",
                                                          "right_recursive_dcg", "transitive_closure"]
    assert str(path("dutch_cg")) in text


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lemmatable", "prove", "memo_loop", "p"],
                          capture_output=True, text=True)
    assert proc.returncode == 1
    assert "0 answers" in proc.stdout


def test_runaway_query_stops_at_step_limit():
    # seq(X, []) has infinitely many answers
    code, text = cli("prove", "right_recursive_dcg", "seq(X,[])", "--max-steps", "300")
    assert code == 2 and "step-limit" in text
