import logging
import math

import numpy as np
import pytest

from errors import DomainError, NumericalError
from experiments import truncation
from experiments.config import ExperimentConfig
from experiments.diagnostics import dos_run, sample_run, spectrum_run
from experiments.localization import delocalization_run, localization_run
from experiments.phase_diagram import phase_sweep
from experiments.poisson_statistics import component_counting, poisson_test
from experiments.result_table import ResultTable, convert_to_json_serializable
from experiments.trials import run_trials
from experiments.truncation import truncation_flow


def _square(trial):
    return trial * trial


def test_run_trials_returns_values_in_trial_order():
    batch = run_trials(_square, [3, 0, 2, 1], workers=1)
    assert batch.values == [0, 1, 4, 9]
    assert batch.failure_count == 0


def test_run_trials_drops_solver_failures(caplog):
    def flaky(trial):
        if trial == 2:
            raise NumericalError("no convergence")
        return trial

    with caplog.at_level(logging.WARNING):
        batch = run_trials(flaky, range(4), workers=1)
    assert batch.values == [0, 1, 3]
    assert batch.failed_trials == [2]
    assert "trial 2 dropped" in caplog.text


def test_config_validation(make_config):
    with pytest.raises(DomainError):
        make_config(trials=0)
    with pytest.raises(DomainError):
        make_config(n=4, m=5)
    config = make_config(n=6, m=6, n_values=[4, 6])
    assert config.levels == (4, 6)
    assert config.at(n=4).m == 4
    assert config.truncation_range == tuple(range(7))
    assert config.echo()["trials"] == 4


# -----------------------
# RESULT TABLE
# -----------------------
def test_result_table_columns_and_flags(make_config):
    echo = make_config().echo()
    table = ResultTable("demo")
    table.add(echo, "first", 1.5, 0.1, 4, m=2)
    table.add(echo, "second", 2.0, float("nan"), 4, "note", ell=1)
    assert table.columns[-5:] == ["statistic", "value", "standard_error", "trial_count", "flag"]
    assert table.labels == ["m", "ell"]
    table.flag_rows("solver_failures=1")
    assert [row["flag"] for row in table.rows] == ["solver_failures=1", "note;solver_failures=1"]
    assert table.value("first", m=2) == 1.5
    lines = table.to_csv().splitlines()
    assert lines[0].startswith("n,c,symmetry,normalized,seed,trials,m,ell,statistic")
    assert len(lines) == 3
    assert table.summary()["rows"][1]["standard_error"] is None


def test_json_conversion_handles_numpy_types():
    converted = convert_to_json_serializable({"a": np.float64(1.5), "b": np.arange(2), "c": {3}, "d": float("inf")})
    assert converted == {"a": 1.5, "b": [0, 1], "c": [3], "d": None}


# -----------------------
# TRUNCATION FLOW
# -----------------------
def test_truncation_flow_top_level_difference_is_zero(make_config):
    table = truncation_flow(make_config(n=5, trials=3, m_range=[5]))
    assert table.value("truncation_error", m=5) == 0.0
    assert table.select("truncation_log2_slope") == []


def test_truncation_flow_reports_every_level(make_config):
    config = make_config(n=6, trials=4, m_range=range(2, 7))
    table = truncation_flow(config)
    errors = [table.value("truncation_error", m=m) for m in range(2, 7)]
    assert all(error >= 0 for error in errors[:-1])
    assert errors[-1] == 0.0
    assert len(table.select("truncation_increment")) == 5
    assert math.isfinite(table.value("truncation_log2_slope"))
    assert table.value("truncation_reference_slope") == pytest.approx(-3.5)


def test_truncation_flow_rejects_bad_ranges(make_config):
    with pytest.raises(DomainError):
        truncation_flow(make_config(n=5, m_range=[]))
    with pytest.raises(DomainError):
        truncation_flow(make_config(n=5, m_range=[2, 7]))
    with pytest.raises(DomainError):
        truncation_flow(make_config(n=5, z=1 - 1j))


def test_failed_trials_flag_every_row(make_config, monkeypatch):
    original = truncation._truncation_traces

    def flaky(config, trial, levels):
        if trial == 1:
            raise NumericalError("forced")
        return original(config, trial, levels)

    monkeypatch.setattr(truncation, "_truncation_traces", flaky)
    table = truncation_flow(make_config(n=4, trials=3, m_range=[2, 3]))
    assert table.solver_failures == 1
    assert all("solver_failures=1" in row["flag"] for row in table.rows)
    assert table.select("truncation_error", m=2)[0]["trial_count"] == 2


def test_slow_start_is_flagged_and_tail_is_fitted_separately(make_config, monkeypatch):
    # plateau at small m, then geometric decay
    errors = {1: 1.2, 2: 1.0, 3: 0.9, 4: 0.5, 5: 0.125, 6: 0.0}
    monkeypatch.setattr(
        truncation, "_truncation_traces", lambda config, trial, levels: {m: 1.0 - errors[m] for m in levels}
    )
    table = truncation_flow(make_config(n=6, trials=2, m_range=range(2, 7)))
    full = table.select("truncation_log2_slope")[0]
    assert -1.0 < full["value"] < -0.9
    assert full["flag"] == "decreasing;slope_above_target"
    tail = table.select("truncation_tail_log2_slope")[0]
    assert tail["value"] == pytest.approx(-2.0)
    assert tail["m_from"] == 4
    assert tail["flag"] == ""


# -----------------------
# POISSON SIDE
# -----------------------
def test_poisson_test_reports_local_statistics(make_config):
    table = poisson_test(make_config(n=7, trials=4, window_eigenvalues=40))
    ratio = table.value("gap_ratio_mean")
    assert 0.0 < ratio < 1.0
    assert table.value("window_half_width") > 0
    assert table.value("density_at_energy") > 0
    assert 0.0 < table.value("laplace_functional") <= 1.0
    assert 0.0 < table.value("laplace_poisson_prediction") <= 1.0
    assert table.select("count_dispersion")
    assert all(row["flag"] == "" for row in table.rows)


def test_poisson_test_flags_exploratory_couplings(make_config):
    table = poisson_test(make_config(n=6, c=-2.0, trials=2, window_eigenvalues=20))
    assert all("exploratory" in row["flag"] for row in table.rows)


def test_poisson_test_is_reproducible(make_config):
    config = make_config(n=6, trials=3, window_eigenvalues=20)
    assert poisson_test(config).to_csv() == poisson_test(config).to_csv()


def test_counting_with_empty_box_counts_nothing(make_config):
    table = component_counting(make_config(n=6, trials=3, box_width=0.0))
    for ell in (1, 2, 3):
        assert table.value("x_count", ell=ell) == 0.0
    assert table.value("block_identity_max_error") <= 1e-10


def test_counting_sweep_reports_decay_fit(make_config):
    table = component_counting(make_config(n=6, trials=3, n_values=[5, 6]))
    assert len(table.select("x_count", ell=1)) == 2
    assert len(table.select("x_count_log2_slope")) == 1
    assert table.value("x_count_bound_shape", ell=1, m=5) == pytest.approx(4.0)


def test_counting_rejects_trivial_truncation(make_config):
    with pytest.raises(DomainError):
        component_counting(make_config(n=6, epsilon=0.01))


# -----------------------
# EIGENVECTOR SIDE
# -----------------------
def test_localization_run_over_a_small_sweep(make_config, caplog):
    config = make_config(n=6, trials=3, n_values=[5, 6], sites_per_trial=2)
    with caplog.at_level(logging.WARNING):
        table = localization_run(config)
    assert "2mu" in caplog.text
    assert table.value("two_mu_predicted") == pytest.approx(-1.225)
    assert "non_positive" in table.select("two_mu_predicted")[0]["flag"]
    for n in (5, 6):
        rate = table.select("conditioning_rate", m=math.ceil(0.75 * n))[0]["value"]
        assert 0.0 <= rate <= 1.0
        tail = table.select("green_tail_mean", m=math.ceil(0.75 * n))[0]["value"]
        assert tail >= 0
    assert len(table.select("mass_median_log2_slope")) == 1


def test_localization_rejects_exponents_outside_unit_interval(make_config):
    with pytest.raises(DomainError):
        localization_run(make_config(w=1.0))
    with pytest.raises(DomainError):
        localization_run(make_config(epsilon=0.0))


def test_delocalization_run_on_the_goe_side(make_config):
    table = delocalization_run(make_config(n=6, c=-2.0, trials=3))
    assert table.value("ipr_scaled_median") > 0
    assert table.value("sup_scaled_median") > 0
    assert table.value("sup_spread_scaled_median") > 0
    assert table.value("dos_l1_semicircle") >= 0
    assert table.value("ipr_porter_thomas_reference") == 3.0


def test_single_cell_sweep_matches_individual_experiments(make_config):
    config = make_config(n=5, trials=2, sites_per_trial=1, window_eigenvalues=10)
    sweep = phase_sweep(config)
    assert len(sweep) == 1
    row = sweep.rows[0]
    assert row["value"] == poisson_test(config).value("gap_ratio_mean")
    assert row["ipr_scaled_median"] == delocalization_run(config).value("ipr_scaled_median")
    assert row["mass_median"] == localization_run(config).value("mass_median") or (
        math.isnan(row["mass_median"])
    )


def test_sweep_rejects_empty_lists(make_config):
    with pytest.raises(DomainError):
        phase_sweep(make_config(n=5, c_values=()))


# -----------------------
# SINGLE-REALIZATION TOOLS
# -----------------------
def test_sample_diagnostics(make_config):
    table, arrays = sample_run(make_config(n=5, m=3))
    assert arrays["sample"].shape == (32, 32)
    assert table.value("support_violations") == 0
    assert table.value("hermiticity_error") == 0.0


def test_spectrum_diagnostics(make_config):
    table, arrays = spectrum_run(make_config(n=5))
    assert arrays["spectrum"].shape == (32,)
    assert table.value("residual") <= 1e-10
    assert table.value("trace_error") <= 1e-10
    assert table.value("eigenvalue_min") == arrays["spectrum"][0]


def test_dos_rows_per_bin(make_config):
    table, _ = dos_run(make_config(n=5, trials=2, dos_bins=10))
    assert len(table.select("density")) == 10
    assert table.value("dos_l1_semicircle") >= 0


def test_experiment_config_accepts_lists():
    from ensemble.parameters import EnsembleParams

    config = ExperimentConfig(EnsembleParams(n=4, c=1.0), m_range=[1, 2], c_values=[1.0, -2.0], workers=1)
    assert config.m_range == (1, 2)
    assert config.couplings == (1.0, -2.0)


def test_summary_text_lists_rows_and_failures(make_config):
    from reporting.table_text import get_table_summary_text

    table = ResultTable("demo")
    table.add(make_config().echo(), "gap_ratio_mean", 0.39, 0.01, 4, m=3)
    table.add(make_config().echo(), "empty", float("nan"))
    table.solver_failures = 2
    text = get_table_summary_text(table.finish(), max_rows=1)
    assert "DEMO" in text
    assert "gap_ratio_mean [m=3]: 0.39 +/- 0.01 (4 trials)" in text
    assert "1 more rows" in text
    assert "2 trial(s) dropped" in text


@pytest.mark.parametrize("run", [poisson_test, truncation_flow, delocalization_run])
def test_tables_do_not_depend_on_pool_size(make_config, run):
    serial = run(make_config(n=7, seed=109, trials=8, window_eigenvalues=40, workers=1))
    pooled = run(make_config(n=7, seed=109, trials=8, window_eigenvalues=40, workers=8))
    assert serial.to_csv() == pooled.to_csv()


def test_pooled_trials_come_back_in_trial_order():
    batch = run_trials(_square, range(12), workers=2)
    assert batch.values == [trial * trial for trial in range(12)]
