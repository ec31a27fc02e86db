"""CSV / JSON rendering of outcomes and verification reports."""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
from typing import Any, Iterable, Sequence

OUTCOME_COLUMNS = ("seed", "winner_id", "theta_bar", "gamma_realized", "payment_w",
                   "utility_w", "principal_utility", "social_welfare", "pi_star", "welfare_gap")


def fmt(value: Any) -> str:
    """Cell text: floats at 12 significant digits, lists joined with ';'."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    if isinstance(value, (list, tuple)):
        return ";".join(fmt(v) for v in value)
    if isinstance(value, enum.Enum):
        return str(value.value)
    return str(value)


def outcome_row(outcome) -> dict:
    return {c: getattr(outcome, c) for c in OUTCOME_COLUMNS}


def _csv(header: Sequence[str], rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(row.get(c)) for c in header])
    return buf.getvalue()


def _jsonable(obj: Any) -> Any:
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        d = {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        if hasattr(obj, "passed"):
            d["passed"] = obj.passed
        return d
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def to_json(obj: Any) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def render_outcomes(outcomes: Sequence, fmt_name: str = "csv") -> str:
    if fmt_name == "json":
        return to_json(list(outcomes))
    return _csv(OUTCOME_COLUMNS, (outcome_row(o) for o in outcomes))


def render_table(rows: Sequence[dict], fmt_name: str = "csv",
                 header: Sequence[str] | None = None) -> str:
    if fmt_name == "json":
        return to_json(list(rows))
    if header is None:
        header = []
        for r in rows:
            header.extend(k for k in r if k not in header)
    return _csv(header, rows)


def render_report(report, fmt_name: str = "json") -> str:
    """A VerificationReport / PaymentPropertyReport / CounterexampleResult.

    JSON is the full structure. CSV is the witness table, one row per
    counterexample (header only when there are none).
    """
    if fmt_name == "json":
        return to_json(report)
    witnesses = getattr(report, "counterexamples", None)
    if witnesses is None:
        witnesses = getattr(report, "violations", None)
    if witnesses is None:
        w = getattr(report, "witness", None)
        witnesses = [w] if w else []
    rows = [dict(w) for w in witnesses]
    header = ["index"]
    for r in rows:
        header.extend(k for k in r if k not in header)
    for i, r in enumerate(rows):
        r["index"] = i
    return _csv(header, rows)


def write_text(text: str, path: str | None) -> None:
    """Write ``text`` to ``path``, or to stdout when no path is given."""
    if path is None:
        import sys
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def write_report(report, path: str | None, fmt_name: str = "csv") -> None:
    if isinstance(report, (list, tuple)):
        write_text(render_outcomes(report, fmt_name), path)
    elif hasattr(report, "winner_id"):
        write_text(render_outcomes([report], fmt_name), path)
    else:
        write_text(render_report(report, fmt_name), path)
