"""JSON readers and writers for families, halfspace systems and reports."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .family import SetFamily
from .halfspace import HalfspaceError, HalfspaceSystem, Row


class InputError(ValueError):
    """Malformed input document."""


def _load(src) -> dict:
    if isinstance(src, dict):
        return src
    try:
        text = Path(src).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {src}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{src}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{src}: expected a JSON object")
    return doc


def family_from_json(src) -> SetFamily:
    """``{"n": 3, "sets": [[1], [2]]}`` or ``{"n": 3, "masks": ["0x1", "0x2"]}``."""
    doc = _load(src)
    try:
        n = doc["n"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise InputError("'n' must be an integer")
        if "sets" in doc:
            sets = doc["sets"]
            if not isinstance(sets, list) or not all(isinstance(s, list) for s in sets):
                raise InputError("'sets' must be a list of lists")
            return SetFamily.from_sets(n, sets)
        if "masks" in doc:
            return SetFamily(n, tuple(int(m, 16) if isinstance(m, str) else int(m) for m in doc["masks"]))
    except KeyError as exc:
        raise InputError(f"missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(str(exc)) from exc
    raise InputError("family needs 'sets' or 'masks'")


def family_to_json(family: SetFamily) -> dict:
    return {"n": family.n, "sets": family.as_lists()}


def _rational(v) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, (str, int)):
        raise InputError(f"rationals must be strings like '3/2' or integers, got {v!r}")
    try:
        return Fraction(v)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {v!r}") from exc


def system_from_json(src, validate: bool = True) -> HalfspaceSystem:
    """Rows as ``{"omega": ["1", "1"], "delta": "3/2"}``; an optional "C" is checked."""
    doc = _load(src)
    try:
        n = doc["n"]
        rows = []
        for i, r in enumerate(doc["rows"]):
            row = Row(tuple(_rational(w) for w in r["omega"]), _rational(r["delta"]))
            if "C" in r and _rational(r["C"]) != row.C:
                raise InputError(f"row {i}: C={r['C']} but omega sums to {row.C}")
            rows.append(row)
        system = HalfspaceSystem(n, tuple(rows))
    except KeyError as exc:
        raise InputError(f"missing field {exc}") from exc
    except (TypeError, HalfspaceError) as exc:
        raise InputError(str(exc)) from exc
    if validate:
        system.validate()
    return system


def system_to_json(system: HalfspaceSystem) -> dict:
    return {
        "n": system.n,
        "rows": [{"omega": [str(w) for w in r.omega], "delta": str(r.delta), "C": str(r.C)}
                 for r in system.rows],
    }


def dump(doc, path: Path) -> None:
    """Deterministic JSON: sorted keys, fixed indentation, trailing newline."""
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
