"""
Tests for the nanoctl command line
"""

import pandas as pd
import pytest
import yaml
from typer.testing import CliRunner

from nanoctl.cli.commands import (
    dose_cmd,
    evaluate_cmd,
    grow_cmd,
    optimize_cmd,
    sample_cmd,
    simulate_cmd,
)
from nanoctl.cli.main import app
from nanoctl.core.exceptions import ConfigurationError, ScenarioError, ValidationError
from nanoctl.core.scenario import read_scenarios
from nanoctl.core.tumour import read_snapshot, type_counts

runner = CliRunner()

FAST_DESIGN = "1e-7,1e8,600,5000"


@pytest.fixture
def fast_config(tmp_path):
    """Small receptor pool and short circulation so simulations finish quickly"""
    path = tmp_path / "fast.yaml"
    path.write_text(
        "seed: 5\n"
        "host:\n"
        "  circulation_time: 500\n"
        "  receptors_per_cell: 200\n"
        "scenario:\n"
        "  depth_cells: 4\n"
    )
    return path


class TestDesignParsing:
    def test_parse_design(self):
        design = dose_cmd.parse_design(FAST_DESIGN)
        assert design.diffusion == 1e-7
        assert design.extravasated_count == 600

    @pytest.mark.parametrize("text", ["1,2,3", "a,b,c,d", "1e-7,1e8,-5,10"])
    def test_bad_design(self, text):
        with pytest.raises(ValidationError):
            dose_cmd.parse_design(text)

    def test_preset_and_design_conflict(self):
        with pytest.raises(ValidationError):
            dose_cmd.resolve_designs("homogeneous", [FAST_DESIGN])

    def test_unknown_preset(self):
        with pytest.raises(ValidationError):
            dose_cmd.resolve_designs("nope", None)

    def test_at_most_two_designs(self):
        with pytest.raises(ValidationError):
            dose_cmd.resolve_designs(None, [FAST_DESIGN] * 3)

    def test_preset_sizes(self):
        assert len(dose_cmd.resolve_designs("homogeneous", None)) == 1
        assert len(dose_cmd.resolve_designs("heterogeneous-1", None)) == 2


@pytest.fixture
def tumour_config(tmp_path):
    path = tmp_path / "tumour.yaml"
    path.write_text(
        "tumour:\n"
        "  lattice_dims: [16, 16, 16]\n"
        "  vp_initial_positions: [[4, 8, 8], [12, 8, 8]]\n"
        "  vp_max_count: 40\n"
        "  target_cell_count: 50\n"
    )
    return path


class TestGrowCmd:
    def test_snapshot_and_sidecar(self, tmp_path, tumour_config):
        path = grow_cmd.run(config_file=str(tumour_config), seed=7, out=str(tmp_path))
        assert (tmp_path / "tumour.o2").exists()
        snapshot = read_snapshot(path, oxygen_path=tmp_path / "tumour.o2")
        assert snapshot.dims == (16, 16, 16)
        assert sum(type_counts(snapshot).values()) > 2

    def test_sample_grown_tumour(self, tmp_path, tumour_config):
        snapshot = grow_cmd.run(config_file=str(tumour_config), seed=7, out=str(tmp_path))
        path = sample_cmd.run(str(snapshot), n=5, depth="auto", seed=7, out=str(tmp_path))
        assert len(read_scenarios(path)) == 5
        assert (tmp_path / "penetration_profile.csv").exists()

    def test_tumour_seed_reproduces_snapshot(self, tmp_path, tumour_config):
        tumour_config.write_text(tumour_config.read_text() + "  seed: 5\n")
        first = grow_cmd.run(config_file=str(tumour_config), out=str(tmp_path / "a"))
        second = grow_cmd.run(config_file=str(tumour_config), out=str(tmp_path / "b"))
        assert first.read_bytes() == second.read_bytes()

    def test_master_seed_wins_over_tumour_seed(self, tmp_path, tumour_config):
        tumour_config.write_text(tumour_config.read_text() + "  seed: 5\n")
        fallback = grow_cmd.run(config_file=str(tumour_config), out=str(tmp_path / "a"))
        same = grow_cmd.run(config_file=str(tumour_config), seed=5, out=str(tmp_path / "b"))
        other = grow_cmd.run(config_file=str(tumour_config), seed=6, out=str(tmp_path / "c"))
        assert fallback.read_bytes() == same.read_bytes()
        assert other.read_bytes() != same.read_bytes()


class TestSampleCmd:
    """Scenario file output"""

    def test_worst_case(self, tmp_path):
        path = sample_cmd.run(worst_case="hetero", out=str(tmp_path))
        (scenario,) = read_scenarios(path)
        assert len(scenario.compartments) == 23

    def test_unknown_worst_case(self, tmp_path):
        with pytest.raises(ScenarioError):
            sample_cmd.run(worst_case="mixed", out=str(tmp_path))

    def test_snapshot_required(self, tmp_path):
        with pytest.raises(ScenarioError):
            sample_cmd.run(out=str(tmp_path))

    @pytest.mark.parametrize("depth", ["0", "deep"])
    def test_bad_depth(self, tmp_path, depth):
        with pytest.raises(ScenarioError):
            sample_cmd.run(worst_case="homo", depth=depth, out=str(tmp_path))


class TestSimulateCmd:
    def test_outcomes_written(self, tmp_path, fast_config):
        frame = simulate_cmd.run(
            worst_case="homo",
            designs=[FAST_DESIGN],
            seeds=2,
            config_file=str(fast_config),
            out=str(tmp_path),
        )
        assert len(frame) == 2
        assert (tmp_path / "outcomes.csv").exists()
        assert (tmp_path / "profile_worst-homogeneous.csv").exists()
        assert frame["cc_total"].iloc[0] == 4

    def test_same_seed_same_outcome(self, tmp_path, fast_config):
        options = {"worst_case": "homo", "designs": [FAST_DESIGN], "config_file": str(fast_config)}
        first = simulate_cmd.run(out=str(tmp_path / "a"), **options)
        second = simulate_cmd.run(out=str(tmp_path / "b"), **options)
        pd.testing.assert_frame_equal(first, second)

    def test_trajectory(self, tmp_path, fast_config):
        simulate_cmd.run(
            worst_case="homo",
            designs=[FAST_DESIGN],
            trajectory=True,
            config_file=str(fast_config),
            out=str(tmp_path),
        )
        assert len(list(tmp_path.glob("trajectory_*.csv"))) == 1

    def test_scenario_source_required(self, tmp_path):
        with pytest.raises(ScenarioError):
            simulate_cmd.run(designs=[FAST_DESIGN], out=str(tmp_path))


class TestOptimizeAndEvaluate:
    def test_mock_bundle(self, tmp_path):
        bundle = optimize_cmd.run(seed=1, out=str(tmp_path), mock=True, generations=2)
        summary = pd.read_csv(bundle.summary)
        assert len(summary) == 2
        echoed = yaml.safe_load(bundle.config.read_text())
        assert echoed["seed"] == 1
        assert echoed["evolve"]["generations"] == 2

    def test_random_k_needs_scenario_file(self, tmp_path):
        config = tmp_path / "k.yaml"
        config.write_text("evolve:\n  scenario_mode: random_k\n  generations: 1\n")
        with pytest.raises(ConfigurationError):
            optimize_cmd.run(config_file=str(config), seed=1, out=str(tmp_path))

    def test_evaluate(self, tmp_path, fast_config):
        scenarios = sample_cmd.run(
            worst_case="homo", config_file=str(fast_config), out=str(tmp_path)
        )
        solution = tmp_path / "best_solution.yaml"
        solution.write_text(
            "designs:\n"
            "  - diffusion: 1.0e-7\n"
            "    binding_rate: 1.0e+8\n"
            "    extravasated_count: 600\n"
            "    payload_count: 5000\n"
            "    dose_mg_kg: 1.0\n"
        )
        path = evaluate_cmd.run(
            str(solution),
            str(scenarios),
            seeds=2,
            config_file=str(fast_config),
            out=str(tmp_path),
        )
        frame = pd.read_csv(path)
        assert len(frame) == 2
        assert frame["seed"].nunique() == 2


class TestCliApp:
    """Exit codes and output through the typer app"""

    def test_version(self):
        result = runner.invoke(app, ["version"])
        assert result.exit_code == 0
        assert "nanoctl" in result.output

    def test_dose_preset(self):
        result = runner.invoke(app, ["dose", "--preset", "homogeneous"])
        assert result.exit_code == 0
        assert "NP1" in result.output

    def test_dose_warns_outside_search_range(self):
        result = runner.invoke(app, ["dose", "--design", FAST_DESIGN])
        assert result.exit_code == 0
        assert "NP1 lies outside the search range" in result.output

    def test_dose_preset_inside_search_range(self):
        result = runner.invoke(app, ["dose", "--preset", "heterogeneous-1"])
        assert result.exit_code == 0
        assert "outside the search range" not in result.output

    def test_bad_design_exits_1(self):
        result = runner.invoke(app, ["dose", "--design", "1,2,3"])
        assert result.exit_code == 1
        assert "Error" in result.output

    def test_bad_pid_exits_1(self):
        result = runner.invoke(app, ["dose", "--preset", "homogeneous", "--pid", "2"])
        assert result.exit_code == 1

    def test_missing_snapshot_exits_1(self, tmp_path):
        result = runner.invoke(app, ["sample", str(tmp_path / "none.snap"), "-o", str(tmp_path)])
        assert result.exit_code == 1

    def test_invalid_config_exits_1(self, tmp_path):
        config = tmp_path / "bad.yaml"
        config.write_text("tissue:\n  backend: rk4\n")
        result = runner.invoke(app, ["dose", "--preset", "homogeneous", "-c", str(config)])
        assert result.exit_code == 1
        assert "tissue.backend" in result.output

    def test_seed_printed_when_omitted(self, tmp_path):
        args = ["optimize", "--mock", "--generations", "1", "-o", str(tmp_path)]
        result = runner.invoke(app, args)
        assert result.exit_code == 0
        assert "No seed given, using seed" in result.output

    def test_worst_case_sample(self, tmp_path):
        result = runner.invoke(app, ["sample", "--worst-case", "homo", "-o", str(tmp_path)])
        assert result.exit_code == 0
        assert (tmp_path / "scenarios.txt").exists()
