"""
ResultTable: one statistic per row with its standard error and trial
count, emitted as CSV and as a JSON summary.
"""

import json
import math

import numpy as np
import pandas as pd

ECHO_COLUMNS = ["n", "c", "symmetry", "normalized", "seed", "trials"]
VALUE_COLUMNS = ["statistic", "value", "standard_error", "trial_count", "flag"]


def convert_to_json_serializable(obj):
    """
    Recursively convert numpy and container types to JSON-friendly values.
    Non-finite floats become None.
    """
    if isinstance(obj, set):
        return sorted(convert_to_json_serializable(item) for item in obj)
    elif isinstance(obj, np.ndarray):
        return convert_to_json_serializable(obj.tolist())
    elif isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    elif isinstance(obj, (int, np.integer)):
        return int(obj)
    elif isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    elif isinstance(obj, complex):
        return str(obj)
    elif isinstance(obj, dict):
        return {str(key): convert_to_json_serializable(value) for key, value in obj.items()}
    elif isinstance(obj, (list, tuple)):
        return [convert_to_json_serializable(item) for item in obj]
    else:
        return obj


class ResultTable:
    """
    Rows of (config echo, labels, statistic, value, standard error,
    trial count, flag).

    Label columns (m, ell, box, ...) follow the echo columns in order of
    first appearance; rows without a label leave it blank.
    """

    def __init__(self, experiment):
        self.experiment = experiment
        self.rows = []
        self.labels = []
        self.solver_failures = 0

    def __len__(self):
        return len(self.rows)

    def add(self, echo, statistic, value, standard_error=float("nan"), trial_count=0, flag="", **labels):
        for label in labels:
            if label not in self.labels:
                self.labels.append(label)
        row = {key: echo[key] for key in ECHO_COLUMNS}
        row.update(labels)
        row.update({
            "statistic": statistic,
            "value": float(value),
            "standard_error": float(standard_error),
            "trial_count": int(trial_count),
            "flag": flag,
        })
        self.rows.append(row)
        return row

    def extend(self, other):
        for row in other.rows:
            labels = {key: value for key, value in row.items() if key not in ECHO_COLUMNS + VALUE_COLUMNS}
            self.add(row, row["statistic"], row["value"], row["standard_error"], row["trial_count"], row["flag"], **labels)
        self.solver_failures += other.solver_failures
        return self

    def flag_rows(self, flag):
        """Append a flag to every row (e.g. solver_failures=<k>)."""
        for row in self.rows:
            row["flag"] = f"{row['flag']};{flag}" if row["flag"] else flag

    def record_failures(self, batch):
        self.solver_failures += batch.failure_count
        return batch

    def finish(self):
        if self.solver_failures:
            self.flag_rows(f"solver_failures={self.solver_failures}")
        return self

    @property
    def columns(self):
        return ECHO_COLUMNS + self.labels + VALUE_COLUMNS

    def to_frame(self):
        return pd.DataFrame(self.rows, columns=self.columns)

    def select(self, statistic, **labels):
        """Rows of one statistic, optionally filtered by label values."""
        return [
            row for row in self.rows
            if row["statistic"] == statistic and all(row.get(key) == value for key, value in labels.items())
        ]

    def value(self, statistic, **labels):
        rows = self.select(statistic, **labels)
        if len(rows) != 1:
            raise KeyError(f"{len(rows)} rows match {statistic!r} with {labels}")
        return rows[0]["value"]

    def to_csv(self, path=None):
        # float repr round-trips, so reruns write identical bytes
        return self.to_frame().to_csv(path, index=False, lineterminator="\n")

    def summary(self):
        return convert_to_json_serializable({
            "experiment": self.experiment,
            "columns": self.columns,
            "rows": self.rows,
        })

    def to_json(self, path=None):
        text = json.dumps(self.summary(), indent=2, sort_keys=False)
        if path is None:
            return text
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
        return text
