"""Serialization of verification reports: number format, JSON, CSV.

The number format is fixed once here and reused by the CLI: 17
significant digits in scientific notation with no leading zeros in the
exponent, zero printed as "0e0", and a complex value printed as
"re<sign>im i" with no spaces. JSON reports carry the numeric fields
as plain JSON numbers produced by repr, which round-trips binary64
exactly; CSV reports use the identical column order.
"""

from __future__ import annotations

import csv
import io
import json

REPORT_FIELDS = (
    "identity_id",
    "seed",
    "trial_index",
    "params",
    "lhs_re",
    "lhs_im",
    "rhs_re",
    "rhs_im",
    "rel_error",
    "status",
    "condition_flag",
)


def format_float(value: float) -> str:
    """17-significant-digit scientific form, exponent without padding."""
    value = float(value)
    if value == 0:
        return "0e0"
    mantissa, exponent = f"{value:.16e}".split("e")
    return f"{mantissa}e{int(exponent)}"


def format_complex(value) -> str:
    value = complex(value)
    sign = "-" if value.imag < 0 else "+"
    return (f"{format_float(value.real)}{sign}"
            f"{format_float(abs(value.imag))}i")


def _outcome_record(outcome) -> dict:
    return {
        "identity_id": outcome.identity_id,
        "seed": outcome.seed,
        "trial_index": outcome.trial_index,
        "params": outcome.params,
        "lhs_re": outcome.lhs.real,
        "lhs_im": outcome.lhs.imag,
        "rhs_re": outcome.rhs.real,
        "rhs_im": outcome.rhs.imag,
        "rel_error": outcome.rel_error,
        "status": outcome.status,
        "condition_flag": outcome.condition_flag,
    }


def outcomes_to_json(outcomes) -> str:
    """JSON array of outcome records, one object per trial record."""
    return json.dumps([_outcome_record(o) for o in outcomes],
                      indent=2) + "\n"


def outcomes_to_csv(outcomes) -> str:
    """CSV with the JSON fields as columns, in the same order."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_FIELDS)
    for o in outcomes:
        rec = _outcome_record(o)
        row = []
        for field in REPORT_FIELDS:
            value = rec[field]
            if isinstance(value, bool):
                row.append("true" if value else "false")
            elif isinstance(value, float):
                row.append(repr(value))
            else:
                row.append(value)
        writer.writerow(row)
    return buf.getvalue()


def summarize(outcomes) -> dict:
    """Aggregate counts and the worst relative error of a suite run."""
    passes = sum(1 for o in outcomes if o.status == "pass")
    fails = sum(1 for o in outcomes if o.status == "fail")
    resampled = sum(1 for o in outcomes if o.status == "resampled_pole")
    skipped = sum(1 for o in outcomes if o.status == "skipped_scale")
    scored = [o.rel_error for o in outcomes if o.status in ("pass", "fail")]
    return {
        "records": len(outcomes),
        "passes": passes,
        "fails": fails,
        "resampled": resampled,
        "skipped": skipped,
        "max_rel_error": max(scored) if scored else 0.0,
        "flagged": sum(1 for o in outcomes if o.condition_flag),
        "aggregate_pass": fails == 0,
    }
