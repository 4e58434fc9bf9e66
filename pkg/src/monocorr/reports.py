"""CSV/JSON serialization of audit reports and regression pins.

Floats are written with 17 significant digits so identical runs produce
identical bytes.  Rows are emitted sorted by (label, inequality).
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .bounds import AuditReport

CSV_FIELDS = ("label", "n", "inequality", "cov_num", "cov_den", "rhs_core", "ratio")
GRID_FIELDS = ("t", "s", "rho", "gamma", "cov", "rhs_core", "ratio")


def fmt(x) -> str:
    if x is None:
        return "vacuous"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _json_value(x):
    if isinstance(x, Fraction):
        return {"num": x.numerator, "den": x.denominator}
    if isinstance(x, float) and not math.isfinite(x):
        return fmt(x)
    if isinstance(x, dict):
        return {str(k): _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return x


def passes(ratio: Optional[float], pin: Optional[float]) -> bool:
    return pin is None or ratio is None or ratio >= pin


def report_row(rep: AuditReport, pins: Optional[Mapping[str, float]] = None,
               extra: Sequence[str] = ()) -> dict[str, str]:
    if isinstance(rep.cov, Fraction):
        num, den = str(rep.cov.numerator), str(rep.cov.denominator)
    else:
        num, den = fmt(rep.cov), ""
    row = {
        "label": rep.label,
        "n": "" if rep.n is None else str(rep.n),
        "inequality": rep.inequality,
        "cov_num": num,
        "cov_den": den,
        "rhs_core": fmt(rep.rhs_core),
        "ratio": fmt(rep.ratio),
    }
    for key in extra:
        row[key] = fmt(rep.metadata.get(key))
    if pins is not None:
        row["pass"] = "pass" if passes(rep.ratio, pins.get(rep.inequality)) else "fail"
    return row


def sort_reports(reports: Iterable[AuditReport]) -> list[AuditReport]:
    return sorted(reports, key=lambda r: (r.label, r.inequality))


def _open_for_write(path: str):
    d = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(d):
        raise OSError(f"output directory {d} does not exist")
    return open(path, "w", newline="", encoding="utf-8")


def render_csv(rows: Sequence[Mapping[str, str]], fields: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def write_report(
    reports: Sequence[AuditReport],
    path: str,
    pins: Optional[Mapping[str, float]] = None,
    extra: Sequence[str] = (),
) -> bool:
    """Write reports as CSV (or JSON for a ``.json`` path); True iff every pinned ratio holds."""
    if not reports:
        raise ValueError("no reports to write")
    ordered = sort_reports(reports)
    rows = [report_row(r, pins, extra) for r in ordered]
    if path.endswith(".json"):
        objs = []
        for rep, row in zip(ordered, rows):
            obj = dict(row)
            obj["descriptors"] = _json_value(rep.metadata.get("descriptors", []))
            objs.append(obj)
        text = json.dumps(objs, indent=2, sort_keys=False) + "\n"
    else:
        fields = list(CSV_FIELDS) + list(extra) + (["pass"] if pins is not None else [])
        text = render_csv(rows, fields)
    with _open_for_write(path) as fh:
        fh.write(text)
    return all(row.get("pass", "pass") == "pass" for row in rows)


def write_json(obj, path: str) -> None:
    with _open_for_write(path) as fh:
        fh.write(json.dumps(_json_value(obj), indent=2, sort_keys=True) + "\n")


def load_pins(path: str) -> Optional[dict[str, float]]:
    if not os.path.exists(path):
        return None
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"pins file {path} must hold a JSON object")
    return data


def update_pins(path: str, observed: Mapping[str, float]) -> dict[str, float]:
    """Pin mode: add every observed minimum not yet pinned; existing pins are never changed."""
    pins = load_pins(path) or {}
    fresh = {k: v for k, v in observed.items() if k not in pins}
    if fresh or not os.path.exists(path):
        pins.update(fresh)
        write_json(pins, path)
    return pins


def observed_minima(reports: Iterable[AuditReport]) -> dict[str, float]:
    out: dict[str, float] = {}
    for r in reports:
        ratio = r.ratio
        if ratio is None or math.isinf(ratio):
            continue
        out[r.inequality] = min(out.get(r.inequality, math.inf), ratio)
    return out
