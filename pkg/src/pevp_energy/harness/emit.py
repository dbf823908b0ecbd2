"""CSV and JSON output of campaign reports.

Floats are written with 17 significant digits, which round-trips every
double exactly.  Nothing time- or host-dependent goes into the payload, so
identical configurations give byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from ..pevp import EnsembleParams
from ..theory import expected_energy

__all__ = [
    "REPORT_FIELDS",
    "VIOLIN_FIELDS",
    "THEORY_FIELDS",
    "format_float",
    "violin_path",
    "report_rows",
    "violin_rows",
    "reports_to_csv",
    "violin_to_csv",
    "emit",
    "theory_table",
]

REPORT_FIELDS = (
    "N", "d", "r", "trials", "degenerate", "empirical_mean", "empirical_std",
    "stderr", "theory_s2", "difference", "z_score",
)
VIOLIN_FIELDS = ("N", "d", "bin_center", "count")
THEORY_FIELDS = ("N", "d", "r", "theory_s2", "theory_riemann", "term_first", "term_second", "term_third")


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def _cell(v):
    return format_float(v) if isinstance(v, float) else str(v)


def violin_path(output_path) -> Path:
    p = Path(output_path)
    return p.with_name(p.name + ".violin.csv")


def report_rows(reports) -> list[dict]:
    rows = []
    for rep in reports:
        p = rep.params
        rows.append({
            "N": p.N, "d": p.d, "r": p.r,
            "trials": rep.trials_completed, "degenerate": rep.trials_degenerate,
            "empirical_mean": rep.empirical_mean, "empirical_std": rep.empirical_std,
            "stderr": rep.stderr, "theory_s2": rep.theory_s2,
            "difference": rep.difference, "z_score": rep.z_score,
        })
    return rows


def violin_rows(reports) -> list[dict]:
    return [
        {"N": rep.params.N, "d": rep.params.d, "bin_center": float(c), "count": int(n)}
        for rep in reports
        for c, n in rep.violin
    ]


def _to_csv(rows, fields) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for row in rows:
        w.writerow([_cell(row[f]) for f in fields])
    return buf.getvalue()


def reports_to_csv(reports) -> str:
    return _to_csv(report_rows(reports), REPORT_FIELDS)


def violin_to_csv(reports) -> str:
    return _to_csv(violin_rows(reports), VIOLIN_FIELDS)


def _json_value(v):
    if isinstance(v, float):
        # NaN/inf are not JSON; keep them as strings the CSV side would print
        return v if math.isfinite(v) else format_float(v)
    return v


def emit(reports, cfg) -> list[Path]:
    """Write the reports to ``cfg.output_path``; returns the files written.

    CSV output also writes the violin bins to ``<output_path>.violin.csv``.
    JSON output writes one file holding both tables under ``reports`` and
    ``violin``.
    """
    out = Path(cfg.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    if cfg.format == "csv":
        vpath = violin_path(out)
        out.write_text(reports_to_csv(reports))
        vpath.write_text(violin_to_csv(reports))
        return [out, vpath]
    payload = {
        "reports": [{k: _json_value(v) for k, v in row.items()} for row in report_rows(reports)],
        "violin": violin_rows(reports),
    }
    out.write_text(json.dumps(payload, indent=1) + "\n")
    return [out]


def theory_table(N: int, pairs) -> str:
    rows = []
    for d, r in pairs:
        t = expected_energy(EnsembleParams(d, r))
        rows.append({
            "N": N, "d": d, "r": r, "theory_s2": t.s2_value, "theory_riemann": t.riemann_value,
            "term_first": t.term_first, "term_second": t.term_second, "term_third": t.term_third,
        })
    return _to_csv(rows, THEORY_FIELDS)
