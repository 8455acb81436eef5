"""
Phase sweep over a (c, n) grid: one summary row per cell built from the
Poisson, delocalization and localization experiments.
"""

import logging
from dataclasses import replace

from errors import DomainError
from experiments.localization import delocalization_run, localization_run
from experiments.poisson_statistics import poisson_test
from experiments.result_table import ResultTable

logger = logging.getLogger(__name__)


def _row(table, statistic):
    rows = table.select(statistic)
    return rows[0] if rows else {"value": float("nan"), "standard_error": float("nan"), "trial_count": 0, "flag": ""}


def phase_cell(config):
    """Run the three experiments behind one grid cell (single n, single c)."""
    return {
        "poisson": poisson_test(config),
        "delocalization": delocalization_run(config),
        "localization": localization_run(config),
    }


def phase_sweep(config):
    """
    Grid of (c, n) -> mean gap ratio, median ipr * 2^n, median mass outside
    B_{m_n}(x).

    The row value is the gap-ratio mean; the two medians and their errors
    ride along as columns so that each cell is a single row.
    """
    couplings, levels = config.couplings, config.levels
    if not couplings or not levels:
        raise DomainError("phase sweep needs non-empty c and n lists")

    table = ResultTable("sweep")
    for c in couplings:
        for n in levels:
            cell = replace(config.at(n=n, c=c), n_values=None, c_values=None)
            logger.info("phase sweep cell c=%s n=%d", c, n)
            results = phase_cell(cell)
            ratio = _row(results["poisson"], "gap_ratio_mean")
            ipr = _row(results["delocalization"], "ipr_scaled_median")
            mass = _row(results["localization"], "mass_median")
            flags = sorted({flag for row in (ratio, ipr, mass) for flag in row["flag"].split(";")
                            if flag and not flag.startswith("solver_failures")})
            table.add(
                cell.echo(), "gap_ratio_mean", ratio["value"], ratio["standard_error"], ratio["trial_count"],
                ";".join(flags),
                ipr_scaled_median=ipr["value"],
                ipr_scaled_median_se=ipr["standard_error"],
                mass_median=mass["value"],
                mass_median_se=mass["standard_error"],
            )
            for result in results.values():
                table.solver_failures += result.solver_failures
    return table.finish()
