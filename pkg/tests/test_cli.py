import json
from pathlib import Path

import jsonschema
import pytest
from referencing import Registry, Resource

from qcurvature.cli import main

ROOT = Path(__file__).resolve().parents[1]
EXAMPLES = ROOT / "docs" / "examples"
SCHEMAS = ROOT / "docs" / "schemas"


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def q_doc(rows, **extra):
    return {"format": 1, "kind": "q_difference", "dimension": len(rows), "matrix": rows, **extra}


def diff_doc(rows):
    return {"format": 1, "kind": "differential", "dimension": len(rows), "matrix": rows}


def run_json(capsys, argv):
    code = main(argv + ["--json", "-"])
    out = capsys.readouterr().out
    return code, out


@pytest.fixture(scope="module")
def validators():
    module_schema = json.loads((SCHEMAS / "module_document.schema.json").read_text())
    report_schema = json.loads((SCHEMAS / "report_document.schema.json").read_text())
    registry = Registry().with_resource(module_schema["$id"], Resource.from_contents(module_schema))
    return (
        jsonschema.Draft202012Validator(module_schema, registry=registry),
        jsonschema.Draft202012Validator(report_schema, registry=registry),
    )


def test_scan_consistent(tmp_path, capsys, validators):
    code, out = run_json(capsys, ["scan", write(tmp_path, "a.json", q_doc([["q^3"]]))])
    report = json.loads(out)
    assert code == 0 and report["results"]["conclusion"] == "consistent_with_trivial"
    validators[1].validate(report)
    assert "timing" not in report


def test_scan_nontrivial_lists_failures(tmp_path, capsys):
    code = main(["scan", write(tmp_path, "a.json", q_doc([["2"]]))])
    out = capsys.readouterr().out
    assert code == 10
    assert out.count("NOT identity") == 50


def test_parse_error_exit_two(capsys):
    code = main(["scan", str(EXAMPLES / "malformed.json")])
    err = capsys.readouterr().err
    assert code == 2 and "position" in err and "^" in err


@pytest.mark.parametrize("doc", [
    {"format": 2, "kind": "q_difference", "dimension": 1, "matrix": [["1"]]},
    {"format": 1, "kind": "other", "dimension": 1, "matrix": [["1"]]},
    {"format": 1, "kind": "q_difference", "dimension": 2, "matrix": [["1"]]},
    {"format": 1, "kind": "q_difference", "dimension": 1, "matrix": [[1]]},
    {"format": 1, "kind": "q_difference", "dimension": 2, "matrix": [["x", "x"], ["x", "x"]]},
    [1, 2],
])
def test_bad_documents_exit_two(tmp_path, capsys, doc):
    assert main(["scan", write(tmp_path, "bad.json", doc)]) == 2


def test_missing_file_and_bad_json(tmp_path, capsys):
    assert main(["scan", str(tmp_path / "nope.json")]) == 2
    path = tmp_path / "broken.json"
    path.write_text("{")
    assert main(["scan", str(path)]) == 2
    assert main(["scan", write(tmp_path, "d.json", diff_doc([["1/x"]]))]) == 2


def test_no_good_places_exit_three(tmp_path, capsys):
    assert main(["scan", write(tmp_path, "a.json", q_doc([["1/(q - 1)"]])), "--range", "1:1"]) == 3


def test_galois_examples(tmp_path, capsys, validators):
    code, out = run_json(capsys, ["galois-diagonal", str(EXAMPLES / "diagonal_torus.json")])
    report = json.loads(out)
    validators[1].validate(report)
    res = report["results"]
    assert code == 0 and res["torus_dimension"] == 1
    assert res["lattice_basis"] == [[-1, 1, 0], [0, 0, 1]]
    assert res["verification"]["failures"] == 0
    doc = {"format": 1, "kind": "diagonal_constants", "dimension": 1, "constants": ["q^2"]}
    code, out = run_json(capsys, ["galois-diagonal", write(tmp_path, "c.json", doc)])
    assert code == 0 and json.loads(out)["results"]["trivial"] is True


def test_galois_factorization_exit_four(tmp_path, capsys):
    doc = {"format": 1, "kind": "diagonal_constants", "dimension": 1, "constants": ["q^7 - 2"]}
    assert main(["galois-diagonal", write(tmp_path, "c.json", doc)]) == 4


def test_deform_specialize_roundtrip(tmp_path, capsys, validators):
    g = [["0", "1/x"], ["0", "0"]]
    out_path = tmp_path / "deformed.json"
    assert main(["deform", write(tmp_path, "g.json", diff_doc(g)), "--json", str(out_path)]) == 0
    capsys.readouterr()
    report = json.loads(out_path.read_text())
    validators[1].validate(report)
    module = report["results"]["module"]
    validators[0].validate(module)
    assert module["matrix"] == [["1", "q - 1"], ["0", "1"]]
    # a report is accepted as input through its results.module
    code, out = run_json(capsys, ["specialize", str(out_path)])
    assert code == 0 and json.loads(out)["results"]["module"]["matrix"] == g
    code, out = run_json(capsys, ["specialize", str(out_path), "--q-val", "3"])
    assert json.loads(out)["results"]["matrix"] == [["1", "2"], ["0", "1"]]


def test_specialize_errors_exit_five(tmp_path, capsys):
    assert main(["specialize", write(tmp_path, "a.json", q_doc([["2"]]))]) == 5
    assert main(["specialize", write(tmp_path, "b.json", q_doc([["1/(q - 2)"]])), "--q-val", "2"]) == 5


def test_diff_scan(capsys):
    assert main(["diff-scan", str(EXAMPLES / "half_diff.json")]) == 10
    assert "-1/8" in capsys.readouterr().out


def test_theta_solve(capsys, validators):
    code, out = run_json(capsys, ["theta-solve", str(EXAMPLES / "q_exponential.json"),
                                  "--at", "1/2", "--q-val", "2", "--order", "16"])
    report = json.loads(out)
    validators[1].validate(report)
    assert code == 0 and report["results"]["residual_contains_zero"] is True


@pytest.mark.parametrize("rows,at", [
    ([["1", "0"], ["0", "1/q"]], "1/2"),  # resonant exponents 1, q
    ([["3"]], "-1"),  # Theta vanishes at -1
    ([["x"]], "1/2"),  # pole of the system matrix at 0
])
def test_theta_solve_exit_five(tmp_path, capsys, rows, at):
    assert main(["theta-solve", write(tmp_path, "t.json", q_doc(rows)), "--at", at]) == 5


def test_theta_solve_flag_errors(tmp_path, capsys):
    path = write(tmp_path, "t.json", q_doc([["3"]]))
    assert main(["theta-solve", path, "--at", "1", "--q-val", "1"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["theta-solve", path, "--at", "abc"])
    assert exc.value.code == 2


def test_timing_only_on_request(tmp_path, capsys):
    path = write(tmp_path, "a.json", q_doc([["q"]]))
    _, out = run_json(capsys, ["scan", path, "--range", "1:5"])
    assert "timing" not in json.loads(out)
    _, out = run_json(capsys, ["scan", path, "--range", "1:5", "--timing"])
    assert json.loads(out)["timing"]["seconds"] >= 0


def test_corpus_documents_validate(validators):
    for path in sorted(EXAMPLES.glob("*.json")):
        validators[0].validate(json.loads(path.read_text()))


def corpus_commands():
    out = []
    for path in sorted(EXAMPLES.glob("*.json")):
        kind = json.loads(path.read_text())["kind"]
        if kind == "q_difference":
            out.append(["scan", str(path), "--range", "1:20"])
        elif kind == "differential":
            out.append(["diff-scan", str(path), "--range", "1:20"])
    return out


@pytest.mark.parametrize("argv", corpus_commands(), ids=lambda a: Path(a[1]).stem)
def test_parallel_reports_are_byte_identical(capsys, argv):
    code_seq, seq = run_json(capsys, argv)
    code_par, par = run_json(capsys, argv + ["--parallel"])
    _, again = run_json(capsys, argv)
    assert code_seq == code_par
    assert seq == par == again
