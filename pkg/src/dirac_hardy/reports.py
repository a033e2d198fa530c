"""JSON and CSV emission for reports; output is byte-stable for equal inputs."""

from __future__ import annotations

import csv
import json
from pathlib import Path

TRIAL_COLUMNS = ("trial", "seed", "quotient")
MAGNETIC_TRIAL_COLUMNS = TRIAL_COLUMNS + ("quotient_magnetic",)


def dumps(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(payload: dict, path) -> Path:
    path = Path(path)
    path.write_text(dumps(payload), encoding="utf-8")
    return path


def write_rows(columns, rows, path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return path


def write_trials(report, path) -> Path:
    magnetic = "magnetic_quotients" in report.extra
    return write_rows(MAGNETIC_TRIAL_COLUMNS if magnetic else TRIAL_COLUMNS, report.trial_rows(), path)
