"""Config ingestion, sweep orchestration, slope fits, emission contracts."""

import json
import math
from pathlib import Path

import jsonschema
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fadecap import cli
from fadecap.cli import (
    OUTPUT_SCHEMA,
    GridSpec,
    SweepPoint,
    demo_config,
    emit,
    fit_preloglog_slope,
    load_config,
    parse_emitted,
    run_sweep,
    sweep_config_from_dict,
    sweep_config_to_dict,
    write_outputs,
)
from fadecap.converse import ConverseStats, upper_bound
from fadecap.direct import DirectStats, optimize_tau

LOG10 = math.log(10.0)
REPO_CONFIG = Path(__file__).resolve().parent.parent / "configs" / "demo.json"


def synthetic_points(num=6, slope=1.0, intercept=0.0):
    points = []
    for i in range(num):
        loglog = 1.0 + 0.5 * i
        value = slope * loglog + intercept
        points.append(
            SweepPoint(
                log_snr=math.exp(loglog),
                upper=value,
                lower=value,
                tau_star=1 + i,
                loglog_snr=loglog,
                ratio_upper=value / loglog,
                ratio_lower=value / loglog,
            )
        )
    return points


class TestConfig:
    def test_repo_demo_file_round_trips(self):
        config = load_config(REPO_CONFIG)
        assert config == demo_config()
        assert sweep_config_from_dict(sweep_config_to_dict(config)) == config

    def test_unknown_top_level_key_rejected(self):
        raw = sweep_config_to_dict(demo_config())
        raw["extra"] = 1
        with pytest.raises(ValueError, match="unknown keys"):
            sweep_config_from_dict(raw)

    def test_unknown_nested_key_rejected(self):
        raw = sweep_config_to_dict(demo_config())
        raw["grid"]["spacing"] = "log"
        with pytest.raises(ValueError, match="unknown keys"):
            sweep_config_from_dict(raw)
        raw = sweep_config_to_dict(demo_config())
        raw["channel"]["paths"][0]["color"] = "red"
        with pytest.raises(ValueError, match="unknown keys"):
            sweep_config_from_dict(raw)

    def test_schema_version_enforced(self):
        raw = sweep_config_to_dict(demo_config())
        raw["schema"] = 99
        with pytest.raises(ValueError, match="schema"):
            sweep_config_from_dict(raw)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            GridSpec(log10_snr_start=10.0, log10_snr_stop=5.0, points=4)
        with pytest.raises(ValueError):
            GridSpec(log10_snr_start=1.0, log10_snr_stop=2.0, points=1)


class TestRunSweep:
    def test_two_point_grid(self):
        config = demo_config()
        small = cli.SweepConfig(
            channel=config.channel,
            bound_params=config.bound_params,
            grid=GridSpec(log10_snr_start=20.0, log10_snr_stop=30.0, points=2),
            tau_max=16,
            seed=1,
            output_format="csv",
        )
        points, metadata = run_sweep(small)
        assert len(points) == 2
        assert points[0].log_snr < points[1].log_snr
        assert metadata["constants_certified"] is False
        assert metadata["config"]["grid"]["points"] == 2

    def test_loglog_domain_guard(self):
        config = demo_config()
        bad = cli.SweepConfig(
            channel=config.channel,
            bound_params=config.bound_params,
            grid=GridSpec(log10_snr_start=0.2, log10_snr_stop=10.0, points=3),
            tau_max=4,
            seed=1,
            output_format="csv",
        )
        with pytest.raises(ValueError, match="log log SNR"):
            run_sweep(bad)

    def test_demo_grid_frozen_bands_at_top(self):
        # bands frozen from the first evaluation of the implemented formulas
        points, _ = run_sweep(demo_config())
        top = points[-1]
        assert top.tau_star == 4
        assert 1.30 <= top.ratio_upper <= 1.34
        assert 0.31 <= top.ratio_lower <= 0.34

    def test_upper_dominates_lower_everywhere(self):
        points, _ = run_sweep(demo_config())
        assert all(p.upper >= p.lower for p in points)

    def test_gap_ratios_shrink_along_the_grid(self):
        points, _ = run_sweep(demo_config())
        upper_excess = [p.ratio_upper - 1.0 for p in points]
        lower_deficit = [1.0 - p.ratio_lower for p in points]
        assert all(b < a for a, b in zip(upper_excess, upper_excess[1:]))
        assert all(b < a for a, b in zip(lower_deficit, lower_deficit[1:]))

    def test_sweep_only_orchestrates_the_bound_modules(self):
        # every emitted value must equal a direct call into converse/direct
        config = demo_config()
        points, _ = run_sweep(config)
        cstats = ConverseStats.from_config(config.channel)
        dstats = DirectStats.from_config(config.channel)
        for p in points[:: len(points) // 4]:
            assert p.upper == upper_bound(p.log_snr, cstats, config.bound_params)
            tau_star, lower = optimize_tau(p.log_snr, dstats, config.tau_max)
            assert (p.tau_star, p.lower) == (tau_star, lower)
            assert p.loglog_snr == math.log(p.log_snr)
            assert p.ratio_upper == p.upper / p.loglog_snr


class TestSlopeFit:
    def test_exact_linear_data(self):
        fit = fit_preloglog_slope(synthetic_points(slope=1.0, intercept=0.3), "upper")
        assert fit.slope == pytest.approx(1.0, abs=1e-12)
        assert fit.intercept == pytest.approx(0.3, abs=1e-12)
        assert fit.residual == pytest.approx(0.0, abs=1e-12)

    def test_too_few_points(self):
        with pytest.raises(ValueError, match="at least 3"):
            fit_preloglog_slope(synthetic_points(num=2), "upper")

    def test_degenerate_grid(self):
        p = synthetic_points(num=1)[0]
        with pytest.raises(ValueError, match="degenerate"):
            fit_preloglog_slope([p, p, p], "upper")

    def test_unknown_series_name(self):
        with pytest.raises(ValueError):
            fit_preloglog_slope(synthetic_points(), "middle")

    @settings(max_examples=40, deadline=None)
    @given(
        slope=st.floats(min_value=-3.0, max_value=3.0),
        intercept=st.floats(min_value=-10.0, max_value=10.0),
    )
    def test_property_recovers_planted_line(self, slope, intercept):
        fit = fit_preloglog_slope(synthetic_points(num=7, slope=slope, intercept=intercept), "lower")
        assert fit.slope == pytest.approx(slope, abs=1e-9)
        assert fit.residual < 1e-9


class TestEmission:
    def test_single_point_csv_has_two_lines(self):
        text = emit(synthetic_points(num=1) * 1, "csv")
        assert len(text.strip().splitlines()) == 2
        assert text.splitlines()[0] == cli.CSV_HEADER

    def test_empty_points_rejected(self):
        with pytest.raises(ValueError):
            emit([], "csv")

    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_round_trip_bit_exact(self, fmt):
        points, _ = run_sweep(demo_config())
        assert parse_emitted(emit(points, fmt), fmt) == points

    @settings(max_examples=40, deadline=None)
    @given(st.floats(min_value=-1e300, max_value=1e300, allow_nan=False))
    def test_property_csv_floats_round_trip(self, value):
        point = SweepPoint(
            log_snr=max(value, 1e-300) if value > 0 else 3.0,
            upper=value,
            lower=value / 3.0,
            tau_star=7,
            loglog_snr=1.25,
            ratio_upper=value,
            ratio_lower=-value,
        )
        (back,) = parse_emitted(emit([point], "csv"), "csv")
        assert back == point

    def test_json_output_validates_against_documented_schema(self):
        points, _ = run_sweep(demo_config())
        jsonschema.validate(json.loads(emit(points, "json")), OUTPUT_SCHEMA)

    def test_write_outputs_and_sidecar(self, tmp_path):
        points, metadata = run_sweep(demo_config())
        out = tmp_path / "sweep.csv"
        sidecar = write_outputs(points, metadata, out, "csv")
        assert out.exists() and sidecar.name == "sweep.csv.meta.json"
        meta = json.loads(sidecar.read_text())
        assert meta["constants_certified"] is False
        assert meta["config"] == sweep_config_to_dict(demo_config())

    def test_write_failure_carries_path_context(self, tmp_path):
        points, metadata = run_sweep(demo_config())
        missing = tmp_path / "no" / "such" / "dir" / "sweep.csv"
        with pytest.raises(OSError, match="sweep.csv"):
            write_outputs(points, metadata, missing, "csv")


class TestMainEntry:
    def test_sweep_reproducible_byte_identical(self, tmp_path):
        out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(["sweep", "--config", str(REPO_CONFIG), "--output", str(out_a)]) == 0
        assert cli.main(["sweep", "--config", str(REPO_CONFIG), "--output", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()
        assert (tmp_path / "a.csv.meta.json").read_bytes() == (tmp_path / "b.csv.meta.json").read_bytes()

    def test_sweep_json_format_flag(self, tmp_path):
        out = tmp_path / "sweep.json"
        rc = cli.main(["sweep", "--config", str(REPO_CONFIG), "--output", str(out), "--format", "json"])
        assert rc == 0
        jsonschema.validate(json.loads(out.read_text()), OUTPUT_SCHEMA)

    def test_sweep_xi_override_flag_changes_bound(self, tmp_path):
        out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
        cli.main(["sweep", "--config", str(REPO_CONFIG), "--output", str(out_a)])
        cli.main(["sweep", "--config", str(REPO_CONFIG), "--output", str(out_b), "--xi", "1.0"])
        pa = parse_emitted(out_a.read_text(), "csv")
        pb = parse_emitted(out_b.read_text(), "csv")
        assert all(b.upper > a.upper for a, b in zip(pa, pb))  # xi=1 is far off-optimum here

    def test_sweep_fixed_tau_flag(self, tmp_path):
        out = tmp_path / "fixed.csv"
        rc = cli.main(["sweep", "--config", str(REPO_CONFIG), "--output", str(out), "--tau", "8"])
        assert rc == 0
        points = parse_emitted(out.read_text(), "csv")
        assert all(p.tau_star == 8 for p in points)
        dstats = DirectStats.from_config(demo_config().channel)
        from fadecap.direct import lower_bound

        assert points[-1].lower == lower_bound(points[-1].log_snr, 8, dstats)
        meta = json.loads((tmp_path / "fixed.csv.meta.json").read_text())
        assert meta["config"]["tau"] == 8

    def test_stats_subcommand(self, capsys):
        assert cli.main(["stats", "--config", str(REPO_CONFIG)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert len(payload["paths"]) == 3
        assert payload["alpha_total"] == pytest.approx(1.75)
        assert payload["constants_certified"] is False

    def test_verify_subcommand_quick(self, tmp_path, capsys):
        report_path = tmp_path / "report.json"
        rc = cli.main(
            [
                "verify",
                "--config", str(REPO_CONFIG),
                "--samples-mi", "5000",
                "--samples-moments", "20000",
                "--output", str(report_path),
            ]
        )
        assert rc == 0
        reports = json.loads(report_path.read_text())
        assert all(r["pass"] for r in reports)
        assert {"check", "lhs", "rhs", "std_error", "pass", "workers"} <= set(reports[0])

    def test_bad_config_is_a_clean_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"schema": 1, "grid": {}}))
        assert cli.main(["sweep", "--config", str(bad)]) == 1
        assert "error:" in capsys.readouterr().err
