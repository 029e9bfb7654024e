"""Path-level excursion tracking against the batch engines and by hand."""

import numpy as np
import pytest

from axiswalk import _backend
from axiswalk._kernel_py import MODE_EXCURSION
from axiswalk.excursions import (
    ExcursionRecord,
    RecordThinner,
    WalkSummary,
    excursion_gain_sums,
    lln_statistic,
    records_from_arrays,
    summarize,
    track_excursions,
)
from axiswalk.models import LatticeState, ModelSpec, RngStream, simulate_path

QUARTER = ModelSpec("quarter-plane", 0.3)
COUPLED = ModelSpec("coupled-half-plane", 0.3)


def replay_path(model, seed, n_steps, start=(1, 1)):
    """Re-generate the exact path a no-leap engine run consumed."""
    states = []

    def obs(t, s):
        states.append(tuple(s))
        return True

    simulate_path(model, LatticeState(*start), n_steps, RngStream(seed, 0).generator(), obs)
    return states


class TestHandcraftedPaths:
    def test_single_excursion(self):
        path = [(1, 1), (1, 0), (2, 0), (2, 1)]
        recs = list(track_excursions(QUARTER, path))
        assert recs == [
            ExcursionRecord(index=1, entry_time=1, exit_time=3, z_entry=1, z_exit=2, axis="h")
        ]
        assert recs[0].duration == 2

    def test_unfinished_excursion_not_yielded(self):
        path = [(1, 1), (1, 0), (2, 0)]
        assert list(track_excursions(QUARTER, path)) == []

    def test_start_on_axis_counts_from_time_zero(self):
        path = [(3, 0), (4, 0), (4, 1)]
        recs = list(track_excursions(QUARTER, path))
        assert recs == [
            ExcursionRecord(index=1, entry_time=0, exit_time=2, z_entry=3, z_exit=4, axis="h")
        ]

    def test_coupled_ignores_vertical_axis(self):
        path = [(0, 2), (0, 1), (0, 0), (1, 0), (1, 1)]
        recs = list(track_excursions(COUPLED, path))
        assert recs == [
            ExcursionRecord(index=1, entry_time=2, exit_time=4, z_entry=0, z_exit=1, axis="h")
        ]
        # the quarter-plane reading of the same path enters at time 0
        recs = list(track_excursions(QUARTER, path))
        assert recs[0].entry_time == 0
        assert recs[0].axis == "v"

    def test_vertical_axis_label(self):
        path = [(1, 1), (0, 1), (1, 1)]
        recs = list(track_excursions(QUARTER, path))
        assert recs[0].axis == "v"
        assert recs[0].z_entry == 1

    def test_empty_path(self):
        assert list(track_excursions(QUARTER, [])) == []


class TestEngineAgreement:
    @pytest.mark.parametrize("kind_name,start", [("quarter-plane", (1, 1)), ("coupled-half-plane", (0, 3))])
    def test_tracker_matches_engine_records(self, kind_name, start):
        model = ModelSpec(kind_name, 0.3)
        limit = 40
        res = _backend.run_walk(
            RngStream(414, 0).bit_generator(),
            kind=model.kind_code,
            alpha=model.alpha,
            x0=start[0],
            y0=start[1],
            mode=MODE_EXCURSION,
            limit=limit,
            use_leap=False,
            record_dense=limit,
        )
        path = replay_path(model, 414, res["t"], start)
        assert path[-1] == (res["x"], res["y"])
        from_engine = records_from_arrays(res["records"])
        from_path = list(track_excursions(model, path))
        assert from_path == from_engine

    def test_summary_matches_engine_scalars(self):
        model = QUARTER
        res = _backend.run_walk(
            RngStream(911, 0).bit_generator(),
            kind=model.kind_code,
            alpha=model.alpha,
            x0=1,
            y0=1,
            mode=MODE_EXCURSION,
            limit=30,
            use_leap=False,
        )
        s = summarize(model, replay_path(model, 911, res["t"]))
        assert s.n_steps == res["t"]
        assert tuple(s.final_state) == (res["x"], res["y"])
        assert s.z_final == res["z_final"]
        assert s.z_min_final == res["z_min_final"]
        assert s.excursion_count == res["n_exc"]
        assert s.axis_time == res["axis_steps"]
        assert s.contact_time == res["contact_steps"]
        assert s.last_exit_time == res["last_exit"]
        assert s.renewal_age == s.n_steps - s.last_exit_time

    def test_gain_sums_match_engine(self):
        model = QUARTER
        limit = 50
        res = _backend.run_walk(
            RngStream(5, 0).bit_generator(),
            kind=model.kind_code,
            alpha=model.alpha,
            x0=1,
            y0=1,
            mode=MODE_EXCURSION,
            limit=limit,
            record_dense=limit,
            z_exit_limit=limit,
        )
        recs = records_from_arrays(res["records"])
        gain, cone = excursion_gain_sums(recs, limit, z_start=1)
        assert gain == res["sum_gain"]
        assert cone == res["sum_cone"]
        assert 1 + gain + cone == res["z_exit"][-1]


class TestGainSums:
    RECS = [
        ExcursionRecord(1, 2, 5, 4, 7, "h"),
        ExcursionRecord(2, 9, 11, 8, 6, "v"),
        ExcursionRecord(3, 12, 13, 6, 9, "h"),
    ]

    def test_telescoping_identity(self):
        gain, cone = excursion_gain_sums(self.RECS, 3, z_start=1)
        assert gain == (7 - 4) + (6 - 8) + (9 - 6)
        assert cone == (4 - 1) + (8 - 7) + (6 - 6)
        assert 1 + gain + cone == self.RECS[-1].z_exit

    def test_prefix(self):
        gain, cone = excursion_gain_sums(self.RECS, 1, z_start=1)
        assert (gain, cone) == (3, 3)

    def test_gap_detected(self):
        with pytest.raises(ValueError):
            excursion_gain_sums([self.RECS[0], self.RECS[2]], 2, z_start=1)

    def test_too_few(self):
        with pytest.raises(ValueError):
            excursion_gain_sums(self.RECS, 4, z_start=1)
        with pytest.raises(ValueError):
            excursion_gain_sums(self.RECS, 0, z_start=1)


class TestLlnStatistic:
    def test_scalar_value(self):
        assert lln_statistic(32.0, 16, 0.2) == pytest.approx(32.0 / 16 ** 1.25)

    def test_array(self):
        out = lln_statistic([10.0, 20.0], [4, 4], 0.5 - 1e-9)
        np.testing.assert_allclose(out, [10.0 / 4 ** 2, 20.0 / 4 ** 2], rtol=1e-6)

    def test_warns_outside_lln_regime(self):
        with pytest.warns(UserWarning):
            lln_statistic(5.0, 10, 0.7)


class TestRecordThinner:
    def test_dense_prefix_then_geometric(self):
        th = RecordThinner(dense_limit=5, growth=1.4)
        plan = th.planned_indices(60)
        assert plan[:5] == [1, 2, 3, 4, 5]
        tail = plan[5:]
        assert all(b >= int(a * 1.4) for a, b in zip(tail, tail[1:]))

    def test_should_record_agrees_with_plan(self):
        th = RecordThinner(dense_limit=7, growth=1.25)
        live = [i for i in range(1, 200) if th.should_record(i)]
        assert live == RecordThinner(7, 1.25).planned_indices(199)

    def test_matches_engine_indices(self):
        dense, growth, limit = 6, 1.3, 300
        res = _backend.run_walk(
            RngStream(88, 0).bit_generator(),
            kind=0,
            alpha=0.3,
            x0=1,
            y0=1,
            mode=MODE_EXCURSION,
            limit=limit,
            record_dense=dense,
            record_growth=growth,
        )
        assert list(res["records"][0]) == RecordThinner(dense, growth).planned_indices(limit)

    def test_disabled(self):
        th = RecordThinner(dense_limit=0)
        assert th.planned_indices(50) == []

    def test_bad_growth(self):
        with pytest.raises(ValueError):
            RecordThinner(dense_limit=3, growth=0.9)


def test_walk_summary_renewal_age():
    s = WalkSummary(
        n_steps=100,
        final_state=LatticeState(3, 7),
        z_final=7,
        z_min_final=3,
        excursion_count=4,
        axis_time=20,
        contact_time=20,
        last_exit_time=83,
    )
    assert s.renewal_age == 17
