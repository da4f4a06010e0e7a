"""Serialization of sweep records: CSV (bulk), JSON, and plot tables."""
from __future__ import annotations

import csv
import io
import json
from collections import OrderedDict
from typing import List

from ..errors import EmptyInput
from .sweep import TrialRecord


def records_to_csv(records: List[TrialRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TrialRecord.header())
    for rec in records:
        writer.writerow(rec.to_row())
    return buf.getvalue()


def records_from_csv(text: str) -> List[TrialRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != TrialRecord.header():
        raise ValueError("CSV header does not match TrialRecord fields")
    return [TrialRecord.from_row(row) for row in rows[1:]]


def plot_table(records: List[TrialRecord], axis: str = "rho"):
    """``[(x, success_rate)]`` grouped by the ``axis`` field, sorted by x.

    Errored records are left out.
    """
    if not records:
        raise EmptyInput("no records to tabulate")
    groups = OrderedDict()
    for rec in records:
        if rec.error is not None:
            continue
        groups.setdefault(getattr(rec, axis), []).append(bool(rec.support_match))
    return [(x, sum(v) / len(v)) for x, v in sorted(groups.items())]


def emit_report(records: List[TrialRecord], fmt: str, path, axis: str = "rho") -> None:
    """Write ``records`` as ``csv``, ``json`` or ``plotdata`` to ``path``."""
    if fmt == "csv":
        text = records_to_csv(records)
    elif fmt == "json":
        text = json.dumps([r.to_dict() for r in records], indent=2) + "\n"
    elif fmt == "plotdata":
        rows = plot_table(records, axis)
        text = f"{axis},success_rate\n" + "".join(f"{x!r},{y!r}\n" for x, y in rows)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    with open(path, "w", newline="") as fh:
        fh.write(text)
