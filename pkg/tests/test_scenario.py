import json
import math

import numpy as np
import pytest

from reachintent.errors import ScenarioFormatError
from reachintent.geometry import Goal, GoalSet
from reachintent.scenario import (
    LINEAR,
    MIN_JERK,
    Scenario,
    ScriptSegment,
    builtin_scenarios,
    default_goals,
    load_scenario,
    read_observations,
    save_scenario,
    scenario_from_dict,
    synthesize,
    write_observations,
)


def one_segment_scenario(noise_hand=0.0, noise_gaze=0.0, interpolation=LINEAR, rate=30.0,
                         duration=1.0, seed=5):
    goals = GoalSet((Goal(id="a", label="a", position=(1.0, 1.0, 1.0)),))
    return Scenario(
        name="unit",
        goals=goals,
        rate=rate,
        seed=seed,
        head_position=(0.0, -0.5, 1.6),
        hand_start=(0.0, 0.0, 1.0),
        gaze_start=(0.0, 1.0, 0.0),
        segments=(
            ScriptSegment(
                duration=duration,
                hand_to=(1.0, 1.0, 1.0),
                gaze_look_at=(1.0, 1.0, 1.0),
                interpolation=interpolation,
            ),
        ),
        noise_hand=noise_hand,
        noise_gaze=noise_gaze,
    )


class TestSynthesize:
    def test_sample_count_and_exact_endpoints(self):
        observations = synthesize(one_segment_scenario())
        assert len(observations) == 30
        assert observations[0].hand == pytest.approx([0.0, 0.0, 1.0])
        assert observations[-1].hand == pytest.approx([1.0, 1.0, 1.0])
        deltas = np.diff([obs.t for obs in observations])
        assert deltas == pytest.approx(np.full(29, 1.0 / 30.0))

    def test_same_seed_gives_identical_streams(self):
        a = synthesize(one_segment_scenario(noise_hand=0.01, noise_gaze=0.02))
        b = synthesize(one_segment_scenario(noise_hand=0.01, noise_gaze=0.02))
        for x, y in zip(a, b):
            assert np.array_equal(x.hand, y.hand)
            assert np.array_equal(x.head.forward, y.head.forward)

    def test_different_seed_changes_the_noise(self):
        a = synthesize(one_segment_scenario(noise_hand=0.01, seed=5))
        b = synthesize(one_segment_scenario(noise_hand=0.01, seed=6))
        assert any(not np.array_equal(x.hand, y.hand) for x, y in zip(a, b))

    def test_timestamps_strictly_increase(self):
        for scenario in builtin_scenarios().values():
            times = [obs.t for obs in synthesize(scenario)]
            assert all(b > a for a, b in zip(times, times[1:]))

    def test_gaze_directions_stay_unit_length(self):
        for obs in synthesize(one_segment_scenario(noise_gaze=0.05)):
            assert np.linalg.norm(obs.head.forward) == pytest.approx(1.0, abs=1e-9)

    def test_hand_speed_stays_within_profile_bounds(self):
        # Smooth interpolation peaks at 1.875x the average speed; allow for
        # the per-segment grid stretch plus a generous noise term.
        scenario = one_segment_scenario(noise_hand=0.003, interpolation=MIN_JERK, duration=2.0)
        observations = synthesize(scenario)
        segment_speed = np.linalg.norm(
            np.asarray(scenario.segments[0].hand_to) - scenario.hand_start
        ) / scenario.segments[0].duration
        for prev, cur in zip(observations, observations[1:]):
            speed = np.linalg.norm(cur.hand - prev.hand) / (cur.t - prev.t)
            assert speed <= 1.95 * segment_speed + 6.0 * scenario.noise_hand * scenario.rate

    def test_full_sweep_returns_to_the_entry_direction(self):
        goals = default_goals()
        scenario = Scenario(
            name="spin",
            goals=goals,
            rate=30.0,
            seed=1,
            head_position=(0.0, 0.0, 1.6),
            hand_start=(0.0, 0.3, 1.0),
            gaze_start=(0.0, 1.0, 0.0),
            segments=(
                ScriptSegment(duration=2.0, hand_to=(0.4, 0.3, 1.0), gaze_sweep_deg=360.0),
            ),
        )
        observations = synthesize(scenario)
        assert observations[0].head.forward == pytest.approx([0.0, 1.0, 0.0], abs=1e-9)
        assert observations[-1].head.forward == pytest.approx([0.0, 1.0, 0.0], abs=1e-9)
        mid = observations[len(observations) // 2]
        assert mid.head.forward @ np.array([0.0, 1.0, 0.0]) < -0.9


class TestBuiltins:
    def test_catalogue_contents(self):
        catalogue = builtin_scenarios()
        assert set(catalogue) == {"fig7_left", "fig7_middle", "fig7_right", "sweep_base"}

    def test_fig7_left_visits_goals_left_to_right(self):
        scenario = builtin_scenarios()["fig7_left"]
        labels = [label for _, _, label in scenario.segment_table() if label]
        assert labels == ["cylinder", "cube", "sphere"]

    def test_fig7_middle_revisits_the_cube_before_the_sphere(self):
        scenario = builtin_scenarios()["fig7_middle"]
        labels = [label for _, _, label in scenario.segment_table() if label]
        assert labels == ["cube", "cylinder", "cube", "sphere"]

    def test_fig7_right_sweeps_fully_away_and_returns(self):
        scenario = builtin_scenarios()["fig7_right"]
        sweep_total = sum(
            seg.gaze_sweep_deg for seg in scenario.segments if seg.gaze_sweep_deg is not None
        )
        assert sweep_total == pytest.approx(360.0)
        labels = [label for _, _, label in scenario.segment_table() if label]
        assert labels == ["sphere", "cube", "cylinder", "rotate_away", "sphere_return"]

    def test_all_builtins_synthesize(self):
        for name, scenario in builtin_scenarios().items():
            observations = synthesize(scenario)
            assert len(observations) > 50, name

    def test_goal_layout_is_the_committed_arc(self):
        goals = default_goals()
        for goal in goals:
            assert np.hypot(goal.position[0], goal.position[1]) == pytest.approx(1.5)
            assert goal.position[2] == pytest.approx(0.8)
        assert goals.ids() == ["cylinder", "cube", "sphere"]


class TestScenarioFiles:
    def test_round_trip_preserves_the_stream(self, tmp_path):
        scenario = builtin_scenarios()["fig7_left"]
        path = tmp_path / "scenario.json"
        save_scenario(scenario, path)
        loaded = load_scenario(path)
        first = synthesize(scenario)
        second = synthesize(loaded)
        assert len(first) == len(second)
        for a, b in zip(first, second):
            assert a.t == b.t
            assert np.array_equal(a.hand, b.hand)
            assert np.array_equal(a.head.forward, b.head.forward)

    def test_schema_field_is_checked(self, tmp_path):
        scenario = builtin_scenarios()["fig7_left"]
        path = tmp_path / "scenario.json"
        save_scenario(scenario, path)
        data = json.loads(path.read_text())
        data["schema"] = 2
        path.write_text(json.dumps(data))
        with pytest.raises(ScenarioFormatError):
            load_scenario(path)

    def test_malformed_documents_are_rejected(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ScenarioFormatError):
            load_scenario(path)
        with pytest.raises(ScenarioFormatError):
            scenario_from_dict({"schema": 1, "rate": 30.0})

    def test_gaze_start_accepts_look_at(self):
        scenario = builtin_scenarios()["fig7_left"]
        data = json.loads(json.dumps(__import__("reachintent.scenario", fromlist=["scenario_to_dict"]).scenario_to_dict(scenario)))
        data["gaze_start"] = {"look_at": [0.0, 1.5, 0.8]}
        loaded = scenario_from_dict(data)
        expected = np.array([0.0, 1.5, 0.8]) - scenario.head_position
        assert loaded.gaze_start == pytest.approx(expected / np.linalg.norm(expected))

    def test_observation_stream_round_trip(self, tmp_path):
        observations = synthesize(one_segment_scenario(noise_hand=0.002))
        path = tmp_path / "stream.jsonl"
        write_observations(observations, path)
        loaded = read_observations(path)
        assert len(loaded) == len(observations)
        for a, b in zip(observations, loaded):
            assert a.t == b.t
            assert np.array_equal(a.hand, b.hand)
            assert np.array_equal(a.head.position, b.head.position)
            assert np.array_equal(a.head.forward, b.head.forward)

    def test_bad_observation_line_is_reported(self, tmp_path):
        path = tmp_path / "stream.jsonl"
        path.write_text('{"t": 0.0}\n')
        with pytest.raises(ScenarioFormatError, match="line 1"):
            read_observations(path)


class TestValidation:
    def test_segment_needs_exactly_one_gaze_mode(self):
        with pytest.raises(ScenarioFormatError):
            ScriptSegment(duration=1.0, hand_to=(0, 0, 0))
        with pytest.raises(ScenarioFormatError):
            ScriptSegment(
                duration=1.0,
                hand_to=(0, 0, 0),
                gaze_look_at=(1, 1, 1),
                gaze_sweep_deg=90.0,
            )

    def test_scenario_needs_segments_and_positive_rate(self):
        goals = GoalSet((Goal(id="a", label="a", position=(1, 1, 1)),))
        with pytest.raises(ScenarioFormatError):
            Scenario(
                name="empty",
                goals=goals,
                rate=30.0,
                seed=0,
                head_position=(0, 0, 1.6),
                hand_start=(0, 0, 1),
                gaze_start=(0, 1, 0),
                segments=(),
            )
