"""
Tests for virtual tumour growth, oxygen relaxation and snapshot files
"""

from pathlib import Path

import numpy as np
import pytest

from nanoctl.core.config import PipelineConfig
from nanoctl.core.exceptions import SnapshotFormatError, ValidationError
from nanoctl.core.tumour import (
    Agent,
    AgentType,
    TumourConfig,
    TumourSnapshot,
    csc_fraction,
    grow_until,
    init,
    read_snapshot,
    sample_division,
    step,
    type_counts,
    write_snapshot,
)
from nanoctl.core.tumour.model import CC, CSC, NEC, VP
from nanoctl.core.tumour.oxygen import relax


def small_config(**overrides) -> TumourConfig:
    values = {
        "lattice_dims": (16, 16, 16),
        "vp_initial_positions": [(4, 8, 8), (12, 8, 8)],
        "vp_max_count": 40,
        "target_cell_count": 50,
        "seed": 7,
    }
    values.update(overrides)
    return TumourConfig(**values)


class TestTumourConfig:
    """Validation of growth parameters"""

    def test_defaults(self):
        config = TumourConfig()
        assert config.lattice_dims == (80, 80, 80)
        assert config.dediff_prob == 0.005
        assert config.csc_asym_prob == 0.99
        assert config.vp_max_count == 4000

    def test_rejects_inverted_oxygen_thresholds(self):
        with pytest.raises(ValueError):
            TumourConfig(o2_prolif_threshold=0.01, o2_necrosis_threshold=0.05)

    def test_rejects_unknown_field(self):
        with pytest.raises(ValueError):
            TumourConfig(grow_faster=True)


class TestInit:
    """Initial lattice state"""

    def test_single_cell_at_centre(self):
        state = init(small_config())
        assert state.live_count == 1
        assert state.kinds[8, 8, 8] == CC
        assert state.vp_count == 2

    def test_oxygen_relaxed_and_non_negative(self):
        state = init(small_config())
        assert state.oxygen.shape == (16, 16, 16)
        assert (state.oxygen >= 0).all()
        assert state.oxygen[4, 8, 8] > state.oxygen[0, 0, 0]

    def test_oxygen_peaks_at_vessels(self):
        state = init(small_config())
        vessels = state.kinds == VP
        assert state.oxygen[vessels].min() > state.oxygen[~vessels].max()

    def test_explicit_vessel_directions(self):
        state = init(small_config(), vp_directions=[(0, 1, 0), (0, -1, 0)])
        assert sorted(state.vp_directions.values()) == [(0, -1, 0), (0, 1, 0)]

    def test_rejects_vessel_outside_lattice(self):
        with pytest.raises(ValidationError) as exc_info:
            init(small_config(vp_initial_positions=[(20, 0, 0)]))
        assert "outside lattice" in exc_info.value.errors[0]["message"]

    def test_rejects_vessel_on_initial_cell(self):
        with pytest.raises(ValidationError):
            init(small_config(vp_initial_positions=[(8, 8, 8)]))

    def test_rejects_missing_vessels(self):
        with pytest.raises(ValidationError):
            init(small_config(vp_initial_positions=[]))

    def test_rejects_direction_count_mismatch(self):
        with pytest.raises(ValidationError):
            init(small_config(), vp_directions=[(1, 0, 0)])


class TestDivision:
    """Division outcome probabilities"""

    def test_cc_dedifferentiation_rate(self):
        config = TumourConfig()
        rng = np.random.default_rng(1)
        draws = [sample_division(CC, config, rng) for _ in range(100_000)]
        share = sum(1 for _, daughter in draws if daughter == CSC) / len(draws)
        assert share == pytest.approx(0.005, abs=0.001)
        assert all(parent == CC for parent, _ in draws)

    def test_csc_asymmetric_rate(self):
        config = TumourConfig()
        rng = np.random.default_rng(2)
        draws = [sample_division(CSC, config, rng) for _ in range(100_000)]
        asym = sum(1 for d in draws if d == (CSC, CC)) / len(draws)
        symmetric_csc = sum(1 for d in draws if d == (CSC, CSC)) / len(draws)
        assert asym == pytest.approx(0.99, abs=0.002)
        assert symmetric_csc == pytest.approx(0.0099, abs=0.002)

    def test_csc_symmetric_to_cancer_cells(self):
        config = TumourConfig(csc_asym_prob=0.0, csc_sym_two_csc_prob=0.0)
        rng = np.random.default_rng(3)
        assert sample_division(CSC, config, rng) == (CC, CC)

    def test_non_dividing_kinds_rejected(self):
        with pytest.raises(ValidationError):
            sample_division(NEC, TumourConfig(), np.random.default_rng(0))


class TestGrowth:
    """Stepping and growth to a target size"""

    def test_target_of_one_returns_initial_state(self):
        result = grow_until(init(small_config()), 1)
        assert result.steps == 0
        assert not result.stalled
        assert type_counts(result.snapshot)[AgentType.CC] == 1

    def test_reaches_target(self):
        result = grow_until(init(small_config()))
        counts = type_counts(result.snapshot)
        assert not result.stalled
        assert counts[AgentType.CC] + counts[AgentType.CSC] >= 50

    def test_same_seed_same_tumour(self):
        first = grow_until(init(small_config())).snapshot
        second = grow_until(init(small_config())).snapshot
        np.testing.assert_array_equal(first.ids, second.ids)
        np.testing.assert_array_equal(first.kinds, second.kinds)
        np.testing.assert_array_equal(first.positions, second.positions)

    def test_vessel_cap(self):
        result = grow_until(init(small_config(vp_max_count=3, vp_branch_freq=1.0)))
        assert type_counts(result.snapshot)[AgentType.VP] <= 3

    def test_one_agent_per_voxel(self):
        snapshot = grow_until(init(small_config())).snapshot
        assert len(np.unique(snapshot.positions, axis=0)) == len(snapshot)

    def test_starved_tumour_stalls(self):
        """Without oxygen the only cell turns necrotic and growth stalls"""
        state = init(small_config(o2_secretion=0.0, stall_patience=3, target_cell_count=10))
        result = grow_until(state)
        counts = type_counts(result.snapshot)
        assert result.stalled
        assert counts[AgentType.NECROTIC] == 1
        assert counts[AgentType.CC] == 0

    def test_stem_cells_survive_hypoxia_dormant(self):
        state = init(small_config(o2_secretion=0.0))
        state.kinds[8, 8, 8] = CSC
        step(state)
        assert state.kinds[8, 8, 8] == CSC
        assert state.dormant[8, 8, 8]

    def test_rejects_non_positive_target(self):
        with pytest.raises(ValidationError):
            grow_until(init(small_config()), 0)


class TestOxygen:
    """Jacobi relaxation of the oxygen field"""

    def test_uniform_fixed_point(self):
        """Uniform secretion s with decay k is stationary at s / k"""
        field = np.full((5, 5, 5), 2.0)
        result = relax(field, np.full((5, 5, 5), 0.02), np.zeros((5, 5, 5)), 1.0, 0.01, 50)
        np.testing.assert_allclose(result, 2.0)

    def test_point_source_symmetric(self):
        secretion = np.zeros((7, 7, 7))
        secretion[3, 3, 3] = 10.0
        result = relax(np.zeros((7, 7, 7)), secretion, np.zeros((7, 7, 7)), 1.0, 0.01, 200)
        assert result[2, 3, 3] == pytest.approx(result[4, 3, 3])
        assert result[3, 3, 3] > result[3, 3, 0] > 0

    def test_uptake_lowers_field(self):
        secretion = np.full((4, 4, 4), 0.1)
        without = relax(np.zeros((4, 4, 4)), secretion, np.zeros((4, 4, 4)), 1.0, 0.01, 100)
        with_uptake = relax(
            np.zeros((4, 4, 4)), secretion, np.full((4, 4, 4), 0.05), 1.0, 0.01, 100
        )
        assert (with_uptake < without).all()

    def test_input_not_modified(self):
        field = np.ones((3, 3, 3))
        relax(field, np.zeros((3, 3, 3)), np.zeros((3, 3, 3)), 1.0, 0.5, 10)
        assert (field == 1.0).all()

    def test_default_calibration_leaves_viable_rim(self):
        """A lone vessel in living tissue feeds division nearby and starves cells further out"""
        config = TumourConfig()
        dims = (25, 25, 25)
        secretion = np.zeros(dims)
        secretion[12, 12, 12] = config.o2_secretion
        field = relax(
            np.zeros(dims),
            secretion,
            np.full(dims, config.o2_uptake),
            config.o2_diffusion,
            config.o2_decay,
            2_000,
        )
        assert field[15, 12, 12] >= config.o2_prolif_threshold
        assert field[22, 12, 12] < config.o2_necrosis_threshold


class TestSnapshot:
    """Snapshot queries and the text file format"""

    @pytest.fixture
    def snapshot(self) -> TumourSnapshot:
        agents = [
            Agent(id=0, kind=AgentType.CC, pos=(1, 1, 1)),
            Agent(id=3, kind=AgentType.VP, pos=(0, 0, 0)),
            Agent(id=1, kind=AgentType.CSC, pos=(1, 2, 1), dormant=True),
            Agent(id=2, kind=AgentType.NECROTIC, pos=(2, 2, 2)),
            Agent(id=4, kind=AgentType.CC, pos=(3, 1, 0)),
        ]
        oxygen = np.arange(4 * 3 * 3, dtype=float).reshape(4, 3, 3) / 10
        return TumourSnapshot.from_agents(agents, (4, 3, 3), step=12, oxygen=oxygen)

    def test_type_counts(self, snapshot):
        assert type_counts(snapshot) == {
            AgentType.CC: 2,
            AgentType.CSC: 1,
            AgentType.VP: 1,
            AgentType.NECROTIC: 1,
        }

    def test_csc_fraction(self, snapshot):
        assert csc_fraction(snapshot) == pytest.approx(1 / 3)

    def test_csc_fraction_without_live_cells(self):
        empty = TumourSnapshot.from_agents([], (2, 2, 2))
        assert csc_fraction(empty) == 0.0

    def test_agents_in_id_order(self, snapshot):
        assert [a.id for a in snapshot.agents()] == [0, 1, 2, 3, 4]

    def test_kind_grid(self, snapshot):
        grid = snapshot.kind_grid()
        assert grid.shape == (4, 3, 3)
        assert np.count_nonzero(grid) == 5

    def test_file_round_trip(self, snapshot, tmp_path):
        path = tmp_path / "tumour.snap"
        o2_path = tmp_path / "tumour.o2"
        write_snapshot(snapshot, path, o2_path)

        lines = path.read_text().splitlines()
        assert lines[0] == "step=12 dims=4,3,3"
        assert lines[2] == "1,CSC,1,2,1,1"
        assert len(o2_path.read_text().splitlines()) == 4 * 3

        loaded = read_snapshot(path, o2_path)
        assert loaded.step == 12
        assert list(loaded.agents()) == list(snapshot.agents())
        np.testing.assert_allclose(loaded.oxygen, snapshot.oxygen)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SnapshotFormatError):
            read_snapshot(tmp_path / "missing.snap")

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "bad.snap"
        path.write_text("step=1\n")
        with pytest.raises(SnapshotFormatError) as exc_info:
            read_snapshot(path)
        assert exc_info.value.line == 1

    def test_malformed_record_reports_line(self, tmp_path):
        path = tmp_path / "bad.snap"
        path.write_text("step=0 dims=4,4,4\n0,CC,1,1,1,0\n1,XX,2,2,2,0\n")
        with pytest.raises(SnapshotFormatError) as exc_info:
            read_snapshot(path)
        assert exc_info.value.line == 3
        assert exc_info.value.details["line"] == 3

    def test_wrong_field_count(self, tmp_path):
        path = tmp_path / "bad.snap"
        path.write_text("step=0 dims=4,4,4\n0,CC,1,1,1\n")
        with pytest.raises(SnapshotFormatError) as exc_info:
            read_snapshot(path)
        assert exc_info.value.line == 2

    def test_shared_voxel_rejected(self, tmp_path):
        path = tmp_path / "bad.snap"
        path.write_text("step=0 dims=4,4,4\n0,CC,1,1,1,0\n1,CSC,1,1,1,0\n")
        with pytest.raises(SnapshotFormatError):
            read_snapshot(path)

    def test_agent_outside_lattice(self):
        with pytest.raises(ValidationError):
            TumourSnapshot.from_agents([Agent(id=0, kind=AgentType.CC, pos=(5, 0, 0))], (4, 4, 4))

    def test_snapshot_is_read_only(self, snapshot):
        with pytest.raises(ValueError):
            snapshot.kinds[0] = 0


REFERENCE_CONFIG = Path(__file__).parents[1] / "config" / "reference-tumour.yaml"


@pytest.mark.slow
class TestReferenceTumour:
    """Full 50 000-cell growth runs of the shipped reference configuration"""

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_stem_cell_share_and_necrotic_core(self, seed):
        config = PipelineConfig.load_from_file(REFERENCE_CONFIG).tumour
        snapshot = grow_until(init(config.model_copy(update={"seed": seed}))).snapshot
        assert 0.005 <= csc_fraction(snapshot) <= 0.02
        assert type_counts(snapshot)[AgentType.NECROTIC] > 0
