import json

import pytest

from kutoral.cli import main, parse_element
from kutoral.series import UsageError
from kutoral.tensor import TensorElement


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_parse_element_text():
    x = parse_element("18*v^2[1,1] - 4[1,2] + v[2,1] + 1/3[1,3]", 2)
    assert x.coeff(1, 1, 2) == 18 and x.coeff(1, 2, 0) == -4 and x.coeff(2, 1, 1) == 1
    assert parse_element("0", 2) == TensorElement.zero()
    with pytest.raises(UsageError):
        parse_element("[1,1", 2)


def test_series(capsys):
    code, out = run(capsys, "series", "--p", "2", "--n", "2")
    assert code == 0 and "(4, 6*v, 4*v^2, 1*v^3)" in out.out
    code, out = run(capsys, "series", "--p", "2", "--n", "2", "--convention", "signed", "--format", "json")
    coeffs = json.loads(out.out)["result"]["coeffs"]
    assert code == 0 and [c["num"] for c in coeffs] == ["4", "-6", "4", "-1"]


def test_series_usage_error(capsys):
    assert run(capsys, "series", "--p", "4", "--n", "1")[0] == 2
    assert run(capsys, "bogus")[0] == 2


def test_nf_and_boundary(capsys):
    code, out = run(capsys, "boundary", "[1,3]")
    assert code == 0 and out.out.strip() == "18*v^2[1,1]"
    code, out = run(capsys, "nf", "4[1,1]")
    assert code == 0 and out.out.strip() == "0"
    code, out = run(capsys, "nf", "")
    assert code == 0 and out.out.strip() == "0"
    assert run(capsys, "nf", "garbage")[0] == 2


def test_nf_json_round_trip(capsys, tmp_path):
    src = tmp_path / "x.json"
    src.write_text(json.dumps(TensorElement.gen(1, 2, 4).to_json()))
    code, out = run(capsys, "nf", str(src), "--format", "json")
    assert code == 0
    back = TensorElement.from_json(json.loads(out.out)["result"], 2)
    assert back == TensorElement.gen(1, 1, -6, 1)


def test_ann_and_replay(capsys, tmp_path):
    dest = tmp_path / "ann.json"
    code, _ = run(capsys, "ann", "--p", "2", "--k", "2", "--format", "json", "--out", str(dest))
    assert code == 0
    doc = json.loads(dest.read_text())
    assert (doc["result"]["m0"], doc["result"]["m1"], doc["result"]["p2"]) == (6, 2, True)
    code, out = run(capsys, "verify", "replay", "--file", str(dest))
    assert code == 0 and "pass" in out.out


def test_ann_inconclusive(capsys):
    assert run(capsys, "ann", "--p", "2", "--k", "2", "--vmax", "3")[0] == 3


def test_homology(capsys):
    code, out = run(capsys, "homology", "--p", "2", "--k", "2", "--wmax", "4")
    assert code == 0 and "2  Z/2^2" in out.out


def test_verify_exit_codes(capsys):
    assert run(capsys, "verify", "ck")[0] == 0
    assert run(capsys, "verify", "teoosa", "--a", "2", "--b", "6")[0] == 0
    assert run(capsys, "verify", "replay")[0] == 2


def test_determinism(capsys):
    def payload():
        _, out = run(capsys, "verify", "lemma-torsion", "--format", "json")
        doc = json.loads(out.out)
        return json.dumps(doc["result"], sort_keys=True)

    assert payload() == payload()


def test_families_dump(capsys):
    code, out = run(capsys, "families", "dump", "--p", "3", "--k", "4", "--format", "json")
    doc = json.loads(out.out)["result"]
    assert code == 0 and doc["cd"]["4,1"] == [2, 1] and doc["q0"][0] == "-1"
