import io
import json

import pytest

from afspin.catalog import instantiate_family, source_text
from afspin.cli import main, parse_range
from afspin.spin import decide_spin

from test_series import TWO_HEADS


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def pcp(tmp_path):
    def write(text, name="g.pcp"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write


def test_parse_range():
    assert parse_range("1..4") == [1, 2, 3, 4]
    assert parse_range("1,3") == [1, 3]
    assert parse_range("2") == [2]
    assert parse_range("") == []


def test_check_json_f1(pcp):
    path = pcp(source_text("F1", {"k": 1}))
    code, out, _ = run("check", path, "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["spin"] is False and data["case"] == "b"


def test_check_matches_in_process(pcp):
    for fid, params in [("F2", {"k": 2, "l": 3}), ("F4", {"k": 3, "l": 1}), ("FLAT_C6", {})]:
        path = pcp(source_text(fid, params))
        _, out, _ = run("check", path, "--format", "json")
        assert json.loads(out) == decide_spin(instantiate_family(fid, params)).to_json()


def test_json_is_deterministic(pcp):
    path = pcp(source_text("F3", {"k": 2, "l": 2}))
    assert run("check", path, "--format", "json")[1] == run("check", path, "--format", "json")[1]


def test_check_params_flag(pcp):
    path = pcp(source_text("F1", {"k": 1}))
    _, out, _ = run("check", path, "--param", "k=2", "--format", "json")
    assert json.loads(out)["spin"] is True


def test_check_text_and_flags(pcp):
    path = pcp(source_text("F2", {"k": 1, "l": 1}))
    code, out, _ = run("check", path, "--series-auto", "--diagnostics")
    assert code == 0 and "spin: no" in out
    _, out, _ = run("check", path, "--diagnostics", "--format", "json")
    assert "diagnostics" in json.loads(out)


def test_missing_file():
    code, _, err = run("check", "missing.pcp")
    assert code == 1 and "file not found" in err


def test_parse_error_exit(pcp):
    code, _, err = run("check", pcp("group G { lattice a; relations { [a,e] = 1; } }"))
    assert code == 1 and "undeclared generator" in err


def test_out_of_scope_exit(pcp):
    assert run("check", pcp(source_text("KLEIN4")))[0] == 2
    assert run("check", pcp(TWO_HEADS))[0] == 2


def test_inconsistent_exit(pcp):
    src = source_text("F1").replace("alpha c alpha^-1 = c^-1;", "alpha c alpha^-1 = c;")
    code, out, err = run("check", pcp(src), "--format", "json")
    assert code == 3 and "consistency" in err
    assert json.loads(out)["stage_errors"][0]["stage"] == "consistency"
    assert run("validate", pcp(src))[0] == 3


def test_validate(pcp):
    code, out, _ = run("validate", pcp(source_text("F2")))
    assert code == 0 and "class 3" in out and "passed" in out
    code, out, _ = run("validate", pcp(source_text("F2")), "--format", "json")
    assert json.loads(out)["consistent"] is True


def test_catalog_roundtrip(pcp):
    code, out, _ = run("catalog", "--family", "F3", "--k", "2", "--l", "3")
    assert code == 0
    _, js, _ = run("check", pcp(out), "--format", "json")
    assert json.loads(js) == decide_spin(instantiate_family("F3", {"k": 2, "l": 3})).to_json()
    code, out, _ = run("catalog", "--list")
    assert code == 0 and "KLEIN4" in out
    assert run("catalog", "--family", "F1", "--k", "0")[0] == 1


def test_table_csv_rows():
    code, out, _ = run("table", "--family", "all", "--k", "1..4", "--l", "1..2", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) - 1 == 28


def test_table_family_subset_and_errors():
    code, out, _ = run("table", "--family", "F1,F4", "--k", "2", "--format", "json")
    assert code == 0 and {r["family"] for r in json.loads(out)} == {"F1", "F4"}
    assert run("table", "--family", "F7")[0] == 1
    assert run("table", "--k", "x..y")[0] == 1


def test_usage_errors():
    assert run()[0] == 1
    assert run("frobnicate")[0] == 1
    assert run("--help")[0] == 0
