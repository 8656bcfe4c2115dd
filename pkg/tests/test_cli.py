import io
import json
from pathlib import Path

import pytest

from reflcat.cli import run
from reflcat.errors import StructuralError
from reflcat.report import admissible_specs, classification_report, families_table, h2_table, parse_primes

GOLDEN = Path(__file__).parent / "golden"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_verify_h3():
    code, out, _ = call("verify", "H3:p=11,zeta=4")
    assert code == 0
    res = json.loads(out)
    assert res["ok"] and res["results"]["order"] == 120


def test_rank2_orders_divide_bound():
    code, out, _ = call("rank2", "--p", "7", "--sign", "-")
    assert code == 0
    res = json.loads(out)["results"]
    assert res["irreducible_orders"] and all(16 % o == 0 for o in res["irreducible_orders"])


def test_exit_codes():
    assert call("frobnicate")[0] == 2
    assert call("verify")[0] == 2
    assert call("verify", "A:n=3,p=5", "--bogus")[0] == 2
    assert call("build", "H3:p=7")[0] == 2
    assert call("build", "A:n=4,p=5")[0] == 2
    assert call("cohomology", "A:n=3,p=3", "--method", "bar", "--memory-budget", "1000")[0] == 3
    assert call("cohomology", "O:dim=3,p=5", "--method", "cyclic")[0] == 2


def test_json_is_deterministic():
    a = call("tables", "--table", "classification", "--p", "3,5", "--max-dim", "3")[1]
    b = call("tables", "--table", "classification", "--p", "3,5", "--max-dim", "3")[1]
    assert a == b
    obj = json.loads(a)
    assert obj["schema_version"] == 1
    assert a == json.dumps(obj, sort_keys=True, indent=2) + "\n"


def test_golden_classification_markdown():
    _, out, _ = call("tables", "--table", "classification", "--p", "5", "--max-dim", "3", "--format", "md")
    assert out == (GOLDEN / "classification_p5_d3.md").read_text()


@pytest.mark.parametrize("argv", [
    ("qspace", "--p", "5", "--dim", "4", "--disc", "-"),
    ("qspace", "--p", "7", "--gram", "[[0,1],[1,0]]", "--format", "md"),
    ("build", "E6:p=5"),
    ("cohomology", "I2:p=5,d=4,sign=+", "--degree", "1", "--method", "bar"),
    ("cohomology", "O2:dim=3,p=5", "--method", "stable"),
    ("obstruction", "O2:dim=3,p=5"),
    ("fusion", "A:n=1,p=5", "--constants"),
    ("fusion", "I2:p=7,d=8,sign=-", "--format", "md"),
    ("tables", "--table", "coxeter", "--p", "7"),
    ("tables", "--table", "families", "--p", "7", "--format", "md"),
])
def test_commands_succeed(argv):
    code, out, err = call(*argv)
    assert code == 0, err
    assert out


def test_qspace_output():
    res = json.loads(call("qspace", "--p", "5", "--dim", "4", "--disc", "-")[1])["results"]
    assert res["witt_sign"] == "-" and res["witt_index"] == 1


def test_fusion_tambara_yamagami_output():
    res = json.loads(call("fusion", "A:n=1,p=5", "--constants")[1])["results"]
    assert res["labels"] == 6 and res["reflection_category"]
    assert res["simples_per_component"] == {"0": 5, "1": 1}


def test_parse_primes():
    assert parse_primes("5") == [5]
    assert parse_primes("3,7") == [3, 7]
    assert parse_primes("2-13") == [3, 5, 7, 11, 13]
    for bad in ("4", "x", "", "8-10"):
        with pytest.raises((StructuralError, ValueError)):
            parse_primes(bad)


def test_dim2_rows_follow_divisibility():
    rows = classification_report(5, 2)["rows"]
    i2 = sorted(r["family"] for r in rows if r["family"].startswith("I_"))
    assert i2 == ["I_{2,5}(3)^-", "I_{2,5}(4)^+", "I_{2,5}(6)^-"]
    assert all(r["extensions"] == "unique up to twisting" for r in rows)


def test_h_rows_only_when_realizable():
    assert not [s for s in admissible_specs(7, 4) if s.family.startswith("H")]
    hs = [s for s in admissible_specs(11, 4) if s.family.startswith("H")]
    assert len(hs) == 4


def test_families_table_negative_row():
    rows = families_table(7, 3)["rows"]
    h3 = next(r for r in rows if r["family"].startswith("H_{3"))
    assert not h3["admissible"] and "48" in h3["reason"]


def test_h2_table_rows():
    rows = h2_table(5, 3)["rows"]
    assert [r["family"] for r in rows] == ["O_2(3,5)"]
    assert rows[0]["h2_published"] == "F_5"
    rows3 = h2_table(3, 8, tier="fast")["rows"]
    assert [r["family"] for r in rows3] == ["O_2(5,3)", "O_2(7,3)", "O_2^-(8,3)"]
    assert all(r["status"] == "unresolved" for r in rows3)


def test_large_inputs_are_formula_only():
    rows = classification_report(3, 8)["rows"]
    o25 = next(r for r in rows if r["family"] == "O_2(5,3)")
    assert o25["status"] == "unresolved" and o25["h2"] == "F_3"
    e7 = next(r for r in rows if r["family"].startswith("E_{7"))
    assert e7["status"] == "formula-only" and e7["order"] == 2903040
    assert e7["note"] == "published value, not recomputed in tier fast"
