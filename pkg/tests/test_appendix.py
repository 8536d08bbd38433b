import json
from pathlib import Path

import pytest

from ucslab.symbolic.appendix import _solve_unbound, appendix_audit, reference_forms
from ucslab.symbolic.expsum import exp_moment
from ucslab.symbolic.poly import MultiPoly, w
from ucslab.symbolic.tilde import build_tilde

from _criteria import audit_text

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="module")
def audit5():
    return appendix_audit(5)


def test_golden_and_stable():
    text = audit_text(5)
    assert text == audit_text(5)
    assert text == (GOLDEN / "audit_n5.json").read_text()


def test_divisible(audit5):
    assert audit5["all_divisible"]
    assert all(q["divisible"] for q in audit5["quantities"].values())


def test_agreement_pattern(audit5):
    q = audit5["quantities"]
    assert q["R2"]["comparisons"]["middle"]["agrees"]
    assert q["S2"]["comparisons"]["middle"]["agrees"]
    for key in ("R2", "S2", "L2", "L2_distinct"):
        c = q[key]["comparisons"]["final"]
        assert not c["agrees"] and c["diff_terms"] > 0


def test_unbound_symbols_flagged(audit5):
    s2 = audit5["quantities"]["S2"]["comparisons"]["final"]
    assert s2["unbound_symbols"] == ["a", "b"]
    # no choice of a, b reconciles the reference line with the enumeration
    assert s2["unbound_solution"] == {"solution": None, "free": []}
    assert audit5["unbound_symbols"] == ["a", "b"]


def test_diff_is_enumerated_minus_reference(audit5):
    entry = audit5["quantities"]["R2"]
    enumerated = MultiPoly.from_json(entry["enumerated_json"])
    reference = MultiPoly.from_json(entry["comparisons"]["final"]["reference_json"])
    diff = MultiPoly.from_json(entry["comparisons"]["final"]["diff_json"])
    assert enumerated - reference == diff
    assert enumerated == exp_moment(build_tilde("R", 2, 5), 1)


@pytest.mark.parametrize("n", [4, 6])
def test_middle_forms_other_n(n):
    forms = reference_forms(n)
    assert forms["R2"]["middle"] == exp_moment(build_tilde("R", 2, n), 1)
    assert forms["S2"]["middle"] == exp_moment(build_tilde("S", 2, n), 1)


def test_range():
    with pytest.raises(ValueError):
        appendix_audit(3)
    with pytest.raises(ValueError):
        appendix_audit(9)


def test_solve_unbound_finds_values():
    a, b = MultiPoly.var("a"), MultiPoly.var("b")
    diff = (a - 2) * w(2) + (b.scale(3) - 1) * w(5)
    assert _solve_unbound(diff, ["a", "b"]) == {"solution": {"a": "2", "b": "1/3"}, "free": []}
    assert _solve_unbound(a * b, ["a", "b"]) is None


def test_json_serialisable(audit5):
    json.dumps(audit5)
