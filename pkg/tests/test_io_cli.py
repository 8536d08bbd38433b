import csv
import json
from fractions import Fraction as F

import pytest

from ucslab import cli
from ucslab.family import SetFamily
from ucslab.halfspace import HalfspaceSystem, make_row
from ucslab.io import InputError, family_from_json, family_to_json, system_from_json, system_to_json


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


# io -----------------------------------------------------------------------

def test_family_round_trip():
    f = SetFamily.from_sets(3, [[1], [1, 2], []])
    assert family_from_json(family_to_json(f)) == f
    assert family_from_json({"n": 3, "masks": ["0x1", "0x3", "0x0"]}) == f


@pytest.mark.parametrize("doc", [{"sets": [[1]]}, {"n": "3", "sets": []}, {"n": 2, "sets": [[3]]},
                                 {"n": 2}, {"n": 2, "sets": [1]}])
def test_family_errors(doc):
    with pytest.raises(InputError):
        family_from_json(doc)


def test_system_round_trip():
    s = HalfspaceSystem(3, (make_row([1, F(-1, 2), 0], F(1, 3)),))
    assert system_from_json(system_to_json(s)) == s


def test_system_bad_C():
    doc = {"n": 2, "rows": [{"omega": ["1", "1"], "delta": "1/2", "C": "3"}]}
    with pytest.raises(InputError):
        system_from_json(doc)


def test_invalid_json_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{")
    with pytest.raises(InputError):
        family_from_json(str(p))


# cli parsers --------------------------------------------------------------

def test_arg_parsers():
    assert cli.int_range("5") == [5]
    assert cli.int_range("4-6") == [4, 5, 6]
    assert cli.int_range("1,3") == [1, 3]
    assert cli.rational_list("1/2,3") == [F(1, 2), F(3)]
    assert cli.float_list("0.1,0.2") == [0.1, 0.2]


# exit codes -----------------------------------------------------------------

def test_verify_exit_codes(tmp_path, capsys):
    ok = write(tmp_path, "ok.json", {"n": 2, "sets": [[1], [1, 2]]})
    empty_only = write(tmp_path, "e.json", {"n": 2, "sets": [[]]})
    not_closed = write(tmp_path, "nc.json", {"n": 2, "sets": [[1], [2]]})
    assert cli.main(["verify", "--family", ok]) == 0
    assert cli.main(["verify", "--family", empty_only]) == 4
    assert cli.main(["verify", "--family", not_closed]) == 0
    assert "not union-closed" in capsys.readouterr().err
    assert cli.main(["verify", "--enumerate", "3", "--out", str(tmp_path)]) == 0
    assert cli.main(["verify", "--enumerate", "6"]) == 3
    assert cli.main(["verify", "--final-step", "13"]) == 3
    assert cli.main(["verify"]) == 2
    assert cli.main(["verify", "--family", str(tmp_path / "missing.json")]) == 2
    assert cli.main(["nonsense"]) == 2


def test_verify_violation_exit(monkeypatch, tmp_path):
    # a report that fails the predicate must map to exit 1
    from ucslab import family as fam
    real = fam.frankl_check

    def broken(f):
        rep = real(f)
        rep.holds = False
        return rep

    monkeypatch.setattr(fam, "frankl_check", broken)
    ok = write(tmp_path, "ok.json", {"n": 2, "sets": [[1], [1, 2]]})
    assert cli.main(["verify", "--family", ok]) == 1


def test_symbolic_caps(tmp_path):
    assert cli.main(["symbolic", "--scan", "--n", "9", "--out", str(tmp_path)]) == 3
    assert cli.main(["symbolic", "--scan", "--n", "3", "--out", str(tmp_path)]) == 2
    assert cli.main(["symbolic", "--out", str(tmp_path)]) == 2


# reports --------------------------------------------------------------------

def test_smooth_report_and_rerun(tmp_path):
    fam_path = write(tmp_path, "f.json", {"n": 2, "sets": [[1], [2]]})
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    args = ["smooth", "--family", fam_path, "--sigma-schedule", "0.2,0.1"]
    assert cli.main(args + ["--out", str(out1)]) == 0
    assert cli.main(args + ["--out", str(out2)]) == 0
    files1 = sorted(p.name for p in out1.iterdir())
    assert files1 == sorted(p.name for p in out2.iterdir())
    assert any(n.endswith(".png") for n in files1)
    for name in files1:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    csv_name = next(n for n in files1 if n.endswith(".csv"))
    with open(out1 / csv_name) as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["quantity", "sigma", "value", "reference", "abs_err"]
    assert {r["quantity"] for r in rows} == {"count", "r", "s", "l", "l_closure"}
    cfg = json.loads((out1 / csv_name.replace(".csv", ".config.json")).read_text())
    assert cfg["options"]["seed"] == 0


def test_kkt_report(tmp_path):
    fam_path = write(tmp_path, "f.json", {"n": 3, "sets": [[1], [1, 2], [1, 3], [1, 2, 3]]})
    assert cli.main(["kkt", "--family", fam_path, "--lambda", "0.5", "--sigma-schedule", "0.2",
                     "--out", str(tmp_path)]) == 0
    report = next(p for p in tmp_path.glob("kkt-*.json") if not p.name.endswith(".config.json"))
    doc = json.loads(report.read_text())
    assert doc["results"][0]["lambda"] == 0.5 and doc["results"][0]["residuals"]


def test_symbolic_reports(tmp_path):
    out = tmp_path / "sym"
    argv = ["symbolic", "--audit", "--scan", "--reduced", "--lambda-zero", "--n", "5",
            "--a-range", "1,2", "--out", str(out)]
    assert cli.main(argv) == 0
    names = sorted(p.name for p in out.iterdir())
    kinds = {n.split("-")[0] for n in names}
    assert kinds == {"audit", "scan", "reduced", "lambda0", "symbolic"}
    first = {n: (out / n).read_bytes() for n in names}
    assert cli.main(argv) == 0
    assert {n: (out / n).read_bytes() for n in names} == first
    with open(next(out.glob("scan-*.csv"))) as fh:
        rows = list(csv.DictReader(fh))
    assert [r["degrees_in_w2"] for r in rows] == ["3 3", "2 2"]
