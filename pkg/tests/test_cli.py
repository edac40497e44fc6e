import json
import socket
import subprocess
import sys
from pathlib import Path

import pytest

from reachintent.cli import main
from reachintent.scenario import builtin_scenarios, save_scenario


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "fig7_left.json"
    save_scenario(builtin_scenarios()["fig7_left"], path)
    return path


class TestReplay:
    def test_trace_has_one_row_per_observation(self, scenario_file, tmp_path):
        out = tmp_path / "trace.csv"
        code = main(["replay", str(scenario_file), "-o", str(out), "--deterministic"])
        assert code == 0
        lines = out.read_text().splitlines()
        data_rows = [line for line in lines if not line.startswith("#")][1:]
        from reachintent.scenario import load_scenario, synthesize

        assert len(data_rows) == len(synthesize(load_scenario(scenario_file)))

    def test_builtin_names_resolve(self, tmp_path):
        out = tmp_path / "trace.csv"
        assert main(["replay", "fig7_left", "-o", str(out), "--deterministic"]) == 0

    def test_malformed_scenario_exits_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{broken")
        assert main(["replay", str(bad), "-o", str(tmp_path / "x.csv")]) == 2

    def test_missing_scenario_exits_2(self, tmp_path):
        assert main(["replay", str(tmp_path / "nope.json"), "-o", str(tmp_path / "x.csv")]) == 2

    def test_overrides_show_up_in_the_header(self, scenario_file, tmp_path):
        out = tmp_path / "trace.csv"
        main([
            "replay", str(scenario_file), "-o", str(out),
            "--alpha", "0.4", "--beta", "0.02", "--deterministic",
        ])
        header = [line for line in out.read_text().splitlines() if line.startswith("#")]
        assert any("alpha=0.4" in line for line in header)
        assert any("beta=0.02" in line for line in header)

    def test_circle_pattern_flag(self, scenario_file, tmp_path):
        out = tmp_path / "trace.csv"
        code = main([
            "replay", str(scenario_file), "-o", str(out),
            "--pattern", "circle", "--deterministic",
        ])
        assert code == 0
        assert "# pattern=circle" in out.read_text()

    def test_jsonl_format(self, scenario_file, tmp_path):
        out = tmp_path / "trace.jsonl"
        main(["replay", str(scenario_file), "-o", str(out), "--format", "jsonl", "--deterministic"])
        lines = out.read_text().splitlines()
        meta = json.loads(lines[0])
        assert meta["goal_ids"] == ["cylinder", "cube", "sphere"]
        row = json.loads(lines[1])
        assert set(row) >= {"t", "per_goal", "argmax", "skipped"}


class TestSweep:
    def test_one_row_per_value(self, scenario_file, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main([
            "sweep", str(scenario_file), "--parameter", "alpha",
            "--values", "0.05,0.3,0.8", "-o", str(out), "--deterministic",
        ])
        assert code == 0
        rows = [line for line in out.read_text().splitlines() if not line.startswith("#")][1:]
        assert len(rows) == 3

    def test_unknown_parameter_exits_2(self, scenario_file, tmp_path):
        code = main([
            "sweep", str(scenario_file), "--parameter", "zeta",
            "--values", "0.1", "-o", str(tmp_path / "s.csv"),
        ])
        assert code == 2

    def test_empty_value_list_exits_2(self, scenario_file, tmp_path):
        code = main([
            "sweep", str(scenario_file), "--parameter", "alpha",
            "--values", "", "-o", str(tmp_path / "s.csv"),
        ])
        assert code == 2


class TestSynth:
    def test_synth_then_replay_matches_direct_replay(self, scenario_file, tmp_path):
        stream = tmp_path / "observations.jsonl"
        assert main(["synth", str(scenario_file), "-o", str(stream)]) == 0
        direct = tmp_path / "direct.csv"
        from_file = tmp_path / "from_file.csv"
        main(["replay", str(scenario_file), "-o", str(direct), "--deterministic"])
        main([
            "replay", str(scenario_file), "--observations", str(stream),
            "-o", str(from_file), "--deterministic",
        ])
        assert direct.read_bytes() == from_file.read_bytes()

    def test_sample_count_matches_duration_times_rate(self, tmp_path):
        from reachintent.scenario import Scenario, ScriptSegment, default_goals

        scenario = Scenario(
            name="flat",
            goals=default_goals(),
            rate=30.0,
            seed=2,
            head_position=(0, 0, 1.6),
            hand_start=(0, 0.3, 1.0),
            gaze_start=(0, 1, 0),
            segments=(
                ScriptSegment(duration=2.0, hand_to=(0.4, 0.9, 0.9), gaze_look_at=(0, 1.5, 0.8)),
            ),
        )
        path = tmp_path / "flat.json"
        save_scenario(scenario, path)
        stream = tmp_path / "flat.jsonl"
        main(["synth", str(path), "-o", str(stream)])
        assert len(stream.read_text().splitlines()) == 60


class TestDeterminism:
    @pytest.mark.parametrize("name", ["fig7_left", "fig7_middle", "fig7_right", "sweep_base"])
    def test_replays_are_byte_identical(self, name, tmp_path):
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        assert main(["replay", name, "-o", str(first), "--deterministic"]) == 0
        assert main(["replay", name, "-o", str(second), "--deterministic"]) == 0
        assert first.read_bytes() == second.read_bytes()


class TestServeErrors:
    def test_occupied_port_exits_3(self):
        with socket.socket() as blocker:
            blocker.bind(("127.0.0.1", 0))
            blocker.listen(1)
            port = blocker.getsockname()[1]
            proc = subprocess.run(
                [sys.executable, "-m", "reachintent.cli", "serve", "--bind", f"127.0.0.1:{port}"],
                capture_output=True,
                timeout=30,
            )
        assert proc.returncode == 3
