import pytest

from reachintent.metrics import (
    TraceRecord,
    argmax_switch_count,
    collapsed_argmax,
    commit_latency,
    commit_time,
    first_segment_starts,
    sweep_metrics,
    time_in_unknown,
    trace_csv,
    trace_jsonl,
)


def record(t, argmax, p=None, skipped=False):
    per_goal = p or {"a": 0.0, "b": 0.0}
    return TraceRecord(
        t=t,
        per_goal=per_goal,
        p_unknown=max(0.0, 1.0 - sum(per_goal.values())),
        p_irrational=0.0,
        argmax=argmax,
        phi=0.8,
        skipped=skipped,
    )


def run(labels, dt=0.1, skipped_at=()):
    return [
        record(i * dt, label, skipped=i in skipped_at) for i, label in enumerate(labels)
    ]


class TestArgmaxMetrics:
    def test_collapse_drops_consecutive_duplicates(self):
        records = run(["unknown", "unknown", "goal:a", "goal:a", "unknown"])
        assert collapsed_argmax(records) == ["unknown", "goal:a", "unknown"]
        assert argmax_switch_count(records) == 2

    def test_skipped_records_are_ignored(self):
        records = run(["unknown", "goal:a", "unknown"], skipped_at={1})
        assert collapsed_argmax(records) == ["unknown"]
        assert argmax_switch_count(records) == 0

    def test_time_in_unknown_sums_intervals(self):
        records = run(["unknown", "unknown", "goal:a", "unknown", "goal:a"], dt=0.5)
        # Records at 0.5 and 1.5 are preceded by a record 0.5 s earlier.
        assert time_in_unknown(records) == pytest.approx(1.0)


class TestCommit:
    def test_commit_requires_a_sustained_run(self):
        probs = [0.2, 0.6, 0.6, 0.4] + [0.8] * 10 + [0.3]
        records = [
            record(i * 0.1, "goal:a", p={"a": value, "b": 0.0}) for i, value in enumerate(probs)
        ]
        # The first run above 0.5 is too short; the sustained one starts at t=0.4.
        assert commit_time(records, "a") == pytest.approx(0.4)
        assert commit_latency(records, "a", start_t=0.2) == pytest.approx(0.2)

    def test_uncommitted_goal_returns_none(self):
        records = [record(i * 0.1, "unknown", p={"a": 0.3, "b": 0.1}) for i in range(30)]
        assert commit_time(records, "a") is None

    def test_commits_before_start_are_ignored(self):
        probs = [0.9] * 12 + [0.1] * 5 + [0.9] * 12
        records = [
            record(i * 0.1, "goal:a", p={"a": value, "b": 0.0}) for i, value in enumerate(probs)
        ]
        assert commit_time(records, "a", start_t=1.0) == pytest.approx(1.7)


class TestSweepMetrics:
    def test_summary_includes_per_goal_latencies(self):
        probs = [0.0] * 5 + [0.9] * 12
        records = [
            record(i * 0.1, "goal:a", p={"a": value, "b": 0.0}) for i, value in enumerate(probs)
        ]
        summary = sweep_metrics(records, "alpha", 0.3, {"a": 0.0, "b": 0.0})
        assert summary.commit_latency["a"] == pytest.approx(0.5)
        assert summary.commit_latency["b"] is None
        assert summary.mean_commit_latency(cap=2.0) == pytest.approx((0.5 + 2.0) / 2)

    def test_first_segment_starts_takes_the_earliest_label(self):
        table = [(0.0, 2.0, "a"), (2.0, 2.5, None), (2.5, 4.5, "b"), (4.5, 6.0, "a")]
        assert first_segment_starts(table) == {"a": 0.0, "b": 2.5}


class TestRendering:
    def test_csv_layout_and_determinism_flag(self):
        records = run(["unknown", "goal:a"])
        text = trace_csv(records, ["a", "b"], {"scenario": "unit"}, deterministic=True)
        lines = text.splitlines()
        assert lines[0] == "# scenario=unit"
        assert lines[1] == "t,a,b,p_unknown,p_irrational,argmax,phi,skipped"
        assert len(lines) == 4
        assert "generated" not in text
        with_clock = trace_csv(records, ["a", "b"], {}, deterministic=False)
        assert "generated" in with_clock

    def test_jsonl_carries_metadata_first(self):
        records = run(["unknown"])
        lines = trace_jsonl(records, ["a", "b"], {"seed": 7}, deterministic=True).splitlines()
        assert lines[0] == '{"goal_ids": ["a", "b"], "meta": {"seed": 7}}'
        assert len(lines) == 2
