"""
Human-readable summaries of result tables for the terminal.
"""

import math

BANNER_WIDTH = 60


def _number(value):
    if value is None or (isinstance(value, float) and not math.isfinite(value)):
        return "n/a"
    return f"{value:.6g}"


def _labels(row, columns):
    return ", ".join(f"{key}={row[key]}" for key in columns if row.get(key) not in (None, ""))


def format_row(row, label_columns):
    """'statistic [labels]: value +/- se (N trials) [flag]'."""
    text = f"  {row['statistic']}"
    labels = _labels(row, label_columns)
    if labels:
        text += f" [{labels}]"
    text += f": {_number(row['value'])}"
    if isinstance(row["standard_error"], float) and math.isfinite(row["standard_error"]) and row["standard_error"] > 0:
        text += f" +/- {_number(row['standard_error'])}"
    if row["trial_count"]:
        text += f" ({row['trial_count']} trials)"
    if row["flag"]:
        text += f"  ! {row['flag']}"
    return text


def get_table_summary_text(table, max_rows=60):
    """
    Banner-framed summary of a ResultTable.

    Args:
        table: ResultTable
        max_rows: Rows printed before the listing is cut short

    Returns:
        str: Formatted summary text
    """
    summary = f"\n{table.experiment.upper()}\n"
    summary += f"{'=' * BANNER_WIDTH}\n"
    if table.rows:
        first = table.rows[0]
        summary += (
            f"n={first['n']}  c={first['c']}  symmetry={first['symmetry']}  "
            f"normalized={first['normalized']}  seed={first['seed']}  trials={first['trials']}\n\n"
        )
    for row in table.rows[:max_rows]:
        summary += format_row(row, table.labels) + "\n"
    if len(table.rows) > max_rows:
        summary += f"  ... {len(table.rows) - max_rows} more rows in the CSV\n"
    if table.solver_failures:
        summary += f"\n⚠ {table.solver_failures} trial(s) dropped after solver failures\n"
    summary += f"{'=' * BANNER_WIDTH}\n"
    return summary
