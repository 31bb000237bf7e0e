"""
Tests for scenario extraction, depth statistics and scenario files
"""

import numpy as np
import pytest

from nanoctl.core.exceptions import ScenarioError
from nanoctl.core.scenario import (
    CompartmentKind,
    Scenario,
    depth_stats,
    extract_scenarios,
    nearest_rank,
    penetration_profile,
    read_scenarios,
    scenario_counts,
    worst_case_heterogeneous,
    worst_case_homogeneous,
    write_scenarios,
)
from nanoctl.core.tumour import Agent, AgentType, TumourSnapshot

V, C, S, E = (
    CompartmentKind.VP,
    CompartmentKind.CC,
    CompartmentKind.CSC,
    CompartmentKind.ECM,
)


def line_snapshot() -> TumourSnapshot:
    """A vessel at x=0 followed by CC, CSC, a necrotic cell and CCs along x"""
    kinds = [
        AgentType.VP,
        AgentType.CC,
        AgentType.CSC,
        AgentType.NECROTIC,
        AgentType.CC,
        AgentType.CC,
    ]
    agents = [Agent(id=i, kind=k, pos=(i, 0, 0)) for i, k in enumerate(kinds)]
    return TumourSnapshot.from_agents(agents, (6, 1, 1))


class TestWorstCases:
    """Synthetic worst-case scenarios"""

    def test_homogeneous(self):
        scenario = worst_case_homogeneous()
        assert len(scenario.compartments) == 23
        assert scenario.compartments[0] == V
        assert scenario.count(C) == 22
        assert scenario.count(S) == 0

    def test_heterogeneous_stem_cell_positions(self):
        scenario = worst_case_heterogeneous()
        assert len(scenario.compartments) == 23
        assert scenario.compartments[14] == S
        assert scenario.compartments[18] == S
        assert scenario.count(C) == 20

    def test_heterogeneous_shallow_depth_drops_out_of_range_stem_cells(self):
        scenario = worst_case_heterogeneous(15)
        assert scenario.count(S) == 1

    def test_tokens(self):
        assert worst_case_homogeneous(3).tokens == "V C C C"


class TestScenarioModel:
    def test_rejects_missing_vessel(self):
        with pytest.raises(ValueError):
            Scenario(id="x", compartments=(C, C))

    def test_rejects_single_compartment(self):
        with pytest.raises(ValueError):
            Scenario(id="x", compartments=(V,))

    def test_counts_across_set(self):
        totals = scenario_counts([worst_case_homogeneous(), worst_case_heterogeneous()])
        assert totals[V] == 2
        assert totals[C] == 42
        assert totals[S] == 2
        assert totals[E] == 0


class TestNearestRank:
    """Nearest-rank percentile"""

    def test_hundred_values(self):
        assert nearest_rank(list(range(1, 101)), 95) == 95

    def test_rank_rounds_up(self):
        assert nearest_rank([10, 20, 30], 95) == 30
        assert nearest_rank([10, 20, 30], 50) == 20

    def test_unsorted_input(self):
        assert nearest_rank([5.0, 1.0, 3.0], 1) == 1.0

    def test_empty_sample(self):
        with pytest.raises(ScenarioError):
            nearest_rank([], 95)


class TestDepthStats:
    """Cell-to-vessel distances"""

    def test_line_distances(self):
        stats = depth_stats(line_snapshot())
        np.testing.assert_allclose(np.sort(stats.distances), [10.0, 20.0, 40.0, 50.0])
        assert stats.p95 == pytest.approx(50.0)
        assert stats.depth_cells == 5

    def test_requires_vessels(self):
        snapshot = TumourSnapshot.from_agents(
            [Agent(id=0, kind=AgentType.CC, pos=(0, 0, 0))], (2, 2, 2)
        )
        with pytest.raises(ScenarioError):
            depth_stats(snapshot)

    def test_requires_cells(self):
        snapshot = TumourSnapshot.from_agents(
            [Agent(id=0, kind=AgentType.VP, pos=(0, 0, 0))], (2, 2, 2)
        )
        with pytest.raises(ScenarioError):
            depth_stats(snapshot)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_p95_falls_as_vessels_densify(self, seed):
        """Cells stay put while vessels are added to a growing nested set"""
        dims = (16, 16, 16)
        grid = np.indices(dims).reshape(3, -1).T
        on_sites = grid.sum(axis=1) % 5 == 0
        sites = np.random.default_rng(seed).permutation(grid[on_sites])
        cells = [
            Agent(id=i, kind=AgentType.CC, pos=tuple(p))
            for i, p in enumerate(grid[~on_sites])
        ]

        p95 = []
        for n_vessels in (4, 16, 64, 256):
            vessels = [
                Agent(id=len(cells) + i, kind=AgentType.VP, pos=tuple(p))
                for i, p in enumerate(sites[:n_vessels])
            ]
            p95.append(depth_stats(TumourSnapshot.from_agents(cells + vessels, dims)).p95)
        assert all(dense <= sparse for sparse, dense in zip(p95, p95[1:]))
        assert p95[-1] < p95[0]

    def test_penetration_profile(self):
        rows = penetration_profile(np.array([5.0, 10.0, 15.0, 30.0]))
        assert [edge for edge, _, _ in rows] == [10.0, 20.0, 30.0]
        assert sum(count for _, count, _ in rows) == 4
        assert rows[-1][2] == pytest.approx(1.0)

    def test_penetration_profile_empty(self):
        assert penetration_profile(np.array([])) == []


class TestExtraction:
    """Ray sampling from snapshots"""

    def test_count_and_shape(self):
        scenarios = extract_scenarios(line_snapshot(), 10, depth_cells=5, rng_seed=3)
        assert len(scenarios) == 10
        assert all(len(s.compartments) == 6 for s in scenarios)
        assert all(s.compartments[0] == V for s in scenarios)
        assert len({s.id for s in scenarios}) == 10

    def test_labels_follow_the_lattice(self):
        """Every ray starts at the only vessel; only the +x ray meets cells"""
        scenarios = extract_scenarios(line_snapshot(), 200, depth_cells=5, rng_seed=11)
        along_x = (V, C, S, E, C, C)
        off_axis = (V, E, E, E, E, E)
        assert {s.compartments for s in scenarios} <= {along_x, off_axis}
        assert any(s.compartments == along_x for s in scenarios)

    def test_deterministic_per_seed(self):
        snapshot = line_snapshot()
        first = extract_scenarios(snapshot, 20, depth_cells=5, rng_seed=5)
        second = extract_scenarios(snapshot, 20, depth_cells=5, rng_seed=5)
        assert first == second

    def test_zero_scenarios(self):
        assert extract_scenarios(line_snapshot(), 0) == []

    def test_rejects_bad_depth(self):
        with pytest.raises(ScenarioError):
            extract_scenarios(line_snapshot(), 5, depth_cells=0)

    def test_rejects_vesselless_snapshot(self):
        snapshot = TumourSnapshot.from_agents(
            [Agent(id=0, kind=AgentType.CC, pos=(0, 0, 0))], (2, 2, 2)
        )
        with pytest.raises(ScenarioError):
            extract_scenarios(snapshot, 5)


class TestScenarioFiles:
    """Scenario file format"""

    def test_write_format(self, tmp_path):
        path = tmp_path / "scenarios.txt"
        write_scenarios([worst_case_homogeneous(2)], path)
        assert path.read_text() == "worst-homogeneous V C C\n"

    def test_round_trip(self, tmp_path):
        path = tmp_path / "out" / "scenarios.txt"
        scenarios = [worst_case_homogeneous(), worst_case_heterogeneous()]
        write_scenarios(scenarios, path)
        assert read_scenarios(path) == scenarios

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "scenarios.txt"
        path.write_text("a V C\n\nb V S E\n")
        assert [s.id for s in read_scenarios(path)] == ["a", "b"]

    def test_unknown_token_reports_line(self, tmp_path):
        path = tmp_path / "scenarios.txt"
        path.write_text("a V C\nb V X\n")
        with pytest.raises(ScenarioError) as exc_info:
            read_scenarios(path)
        assert exc_info.value.details["line"] == 2

    def test_missing_vessel_reports_line(self, tmp_path):
        path = tmp_path / "scenarios.txt"
        path.write_text("a C C\n")
        with pytest.raises(ScenarioError) as exc_info:
            read_scenarios(path)
        assert exc_info.value.details["line"] == 1

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioError):
            read_scenarios(tmp_path / "none.txt")
