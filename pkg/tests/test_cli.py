import json

import pytest

from stonespace.cli import EXIT_INPUT, EXIT_OK, EXIT_VIOLATION, main

TWO_RUNS = """\
layout L { tracks = [A, B] }
family F1 over L { component stem = /1*/ cycle = "0" track = A }
family F2 over L { component stem = /1*/ cycle = "0" track = B }
family Bad over L { component stem = /1*/ cycle = "0" track = A }
class SB = sigma(L, [B])
check spectrum(F1) expect 1
"""


@pytest.fixture
def src(tmp_path):
    path = tmp_path / "two.tsf"
    path.write_text(TWO_RUNS)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_spectrum_of_corpus_entry(capsys):
    code, out, _ = run(capsys, "spectrum", "runs")
    assert code == EXIT_OK
    assert out["spectrum_theory"] == "1" and out["spectrum_structure"] == "1"
    assert out["relative"] is None and out["witnesses"] == ["|1"]


def test_relative_spectrum_needs_class(capsys, src):
    code, out, err = run(capsys, "relative-spectrum", src, "--family", "F2")
    assert code == EXIT_INPUT and "--class" in err
    code, out, _ = run(capsys, "relative-spectrum", src, "--family", "F2", "--class", "SB")
    assert code == EXIT_OK and out["relative"] == {"class": "SB", "value": "0"}


def test_closure_and_least_gen(capsys, src):
    code, out, _ = run(capsys, "closure", src, "--family", "F1")
    assert code == EXIT_OK and out["cardinality"] == "aleph0" and out["kernel_empty"]
    code, out, _ = run(capsys, "least-gen", "tagged-cantor", "--family", "T")
    assert code == EXIT_OK and out["exists"] is True
    code, out, _ = run(capsys, "least-gen", "full-cantor")
    assert out["exists"] is False and out["witness"]


def test_decompose(capsys):
    code, out, _ = run(capsys, "decompose", "runs")
    assert code == EXIT_OK
    assert out["t1"]["cardinality"] == "0" and all(out["checks"].values())


def test_disjointness_and_union(capsys, src):
    code, out, _ = run(capsys, "check-disjoint", src, "--family", "F1", "--family", "F2")
    assert code == EXIT_OK and out["disjoint"]
    code, out, _ = run(capsys, "check-disjoint", src, "--family", "F1", "--family", "Bad")
    assert not out["disjoint"] and out["pairs"][0]["witness_position"] == 0
    code, out, _ = run(capsys, "check-disjoint", src, "--family", "F1", "--family", "Bad", "--sigma", "A")
    assert out["disjoint"]
    code, out, _ = run(capsys, "union", src, "--family", "F1", "--family", "F2")
    assert code == EXIT_OK and out["union_has_least"] and out["agree"]
    code, _, err = run(capsys, "union", src, "--family", "F1", "--family", "Bad")
    assert code == EXIT_INPUT and "position 0" in err


def test_additivity(capsys, src, tmp_path):
    target = tmp_path / "add.json"
    code, out, _ = run(capsys, "additivity", src, "--family", "F1", "--family", "F2", "--json", str(target))
    assert code == EXIT_OK and out["equal"] and out["lhs"] == "2"
    assert json.loads(target.read_text()) == out


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "runs", "--point", "|1")
    assert code == EXIT_OK and out["engine"] and out["oracle"] and out["agree"]
    code, out, _ = run(capsys, "oracle", "runs", "--point", "01|0", "--depth", "6")
    assert code == EXIT_OK and not out["engine"] and out["agree"]
    code, _, err = run(capsys, "oracle", "runs")
    assert code == EXIT_INPUT and "--point" in err


def test_check_exit_codes(capsys, src, tmp_path):
    code, out, _ = run(capsys, "check", src)
    assert code == EXIT_OK and out["passed"]
    bad = tmp_path / "bad.tsf"
    bad.write_text(TWO_RUNS.replace("expect 1", "expect 3"))
    code, out, _ = run(capsys, "check", str(bad))
    assert code == EXIT_VIOLATION and not out["passed"]
    assert out["checks"][0]["actual"] == "1"


def test_corpus_command(capsys):
    code, out, _ = run(capsys, "corpus")
    assert code == EXIT_OK and out["passed"] and len(out["entries"]) >= 10
    code, out, _ = run(capsys, "corpus", "runs")
    assert list(out["entries"]) == ["runs"]
    code, _, err = run(capsys, "corpus", "nope")
    assert code == EXIT_INPUT


def test_input_errors(capsys, tmp_path):
    code, _, err = run(capsys, "spectrum", "no-such-thing")
    assert code == EXIT_INPUT and "no-such-thing" in err
    broken = tmp_path / "broken.tsf"
    broken.write_text("layout L { tracks = [R }\n")
    code, _, err = run(capsys, "spectrum", str(broken))
    assert code == EXIT_INPUT and "broken.tsf:1:24" in err
    code, _, err = run(capsys, "spectrum")
    assert code == EXIT_INPUT
    code, _, err = run(capsys, "spectrum", "runs", "--family", "Nope")
    assert code == EXIT_INPUT and "Nope" in err


def test_output_is_deterministic(capsys):
    main(["spectrum", "tagged-cantor"])
    first = capsys.readouterr().out
    main(["spectrum", "tagged-cantor"])
    assert capsys.readouterr().out == first
