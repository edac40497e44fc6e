"""Trace tables and the frozen metric definitions used by sweeps.

Metric definitions are part of the regression contract and must not drift:

* argmax switch: a change of argmax label between consecutive non-skipped
  records.
* time in unknown: the sum of timestamp deltas attributed to non-skipped
  records whose argmax is the unknown state (each record owns the interval
  since the previous record; the first record owns nothing).
* commit: the first time a goal's probability exceeds 0.5 and stays above
  it for 10 consecutive non-skipped records; the commit time is the
  timestamp of the first record of that run. Commit latency is measured
  from a given start time (session start, or a segment boundary when
  scoring a transition).
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass
from datetime import datetime, timezone

from .session import IntentEstimate

COMMIT_THRESHOLD = 0.5
COMMIT_RUN_LENGTH = 10


@dataclass(frozen=True)
class TraceRecord:
    """One flattened estimate row; column order follows the goal order."""

    t: float
    per_goal: dict[str, float]
    p_unknown: float
    p_irrational: float
    argmax: str
    phi: float | None
    skipped: bool


def to_records(estimates: list[IntentEstimate]) -> list[TraceRecord]:
    return [
        TraceRecord(
            t=est.t,
            per_goal=dict(est.per_goal),
            p_unknown=est.p_unknown,
            p_irrational=est.p_irrational,
            argmax=est.argmax_label,
            phi=est.phi,
            skipped=est.skipped,
        )
        for est in estimates
    ]


def _format_float(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def trace_csv(records: list[TraceRecord], goal_ids: list[str],
              metadata: dict | None = None, deterministic: bool = False) -> str:
    """Render records as CSV with `# key=value` header comment lines."""
    out = io.StringIO()
    meta = dict(metadata or {})
    if not deterministic:
        meta["generated"] = datetime.now(timezone.utc).isoformat()
    for key, value in meta.items():
        out.write(f"# {key}={value}\n")
    columns = ["t", *goal_ids, "p_unknown", "p_irrational", "argmax", "phi", "skipped"]
    out.write(",".join(columns) + "\n")
    for rec in records:
        row = [
            _format_float(rec.t),
            *(_format_float(rec.per_goal.get(gid, 0.0)) for gid in goal_ids),
            _format_float(rec.p_unknown),
            _format_float(rec.p_irrational),
            rec.argmax,
            _format_float(rec.phi),
            "true" if rec.skipped else "false",
        ]
        out.write(",".join(row) + "\n")
    return out.getvalue()


def trace_jsonl(records: list[TraceRecord], goal_ids: list[str],
                metadata: dict | None = None, deterministic: bool = False) -> str:
    """Render records as line-delimited JSON; first line carries metadata."""
    meta = dict(metadata or {})
    if not deterministic:
        meta["generated"] = datetime.now(timezone.utc).isoformat()
    lines = [json.dumps({"meta": meta, "goal_ids": goal_ids}, sort_keys=True)]
    for rec in records:
        lines.append(
            json.dumps(
                {
                    "t": rec.t,
                    "per_goal": {gid: rec.per_goal.get(gid, 0.0) for gid in goal_ids},
                    "p_unknown": rec.p_unknown,
                    "p_irrational": rec.p_irrational,
                    "argmax": rec.argmax,
                    "phi": rec.phi,
                    "skipped": rec.skipped,
                },
                sort_keys=True,
            )
        )
    return "\n".join(lines) + "\n"


def non_skipped(records: list[TraceRecord]) -> list[TraceRecord]:
    return [rec for rec in records if not rec.skipped]


def collapsed_argmax(records: list[TraceRecord]) -> list[str]:
    """Non-skipped argmax labels with consecutive duplicates collapsed."""
    sequence: list[str] = []
    for rec in non_skipped(records):
        if not sequence or sequence[-1] != rec.argmax:
            sequence.append(rec.argmax)
    return sequence


def argmax_switch_count(records: list[TraceRecord]) -> int:
    return max(0, len(collapsed_argmax(records)) - 1)


def time_in_unknown(records: list[TraceRecord]) -> float:
    active = non_skipped(records)
    total = 0.0
    for prev, rec in zip(active, active[1:]):
        if rec.argmax == "unknown":
            total += rec.t - prev.t
    return total


def commit_time(records: list[TraceRecord], goal_id: str, start_t: float = 0.0,
                threshold: float = COMMIT_THRESHOLD,
                run_length: int = COMMIT_RUN_LENGTH) -> float | None:
    """Timestamp at which the goal first commits at or after `start_t`."""
    run = 0
    run_start: float | None = None
    for rec in non_skipped(records):
        if rec.t < start_t:
            continue
        if rec.per_goal.get(goal_id, 0.0) > threshold:
            if run == 0:
                run_start = rec.t
            run += 1
            if run >= run_length:
                return run_start
        else:
            run = 0
            run_start = None
    return None


def commit_latency(records: list[TraceRecord], goal_id: str, start_t: float = 0.0,
                   **kwargs) -> float | None:
    """Seconds from `start_t` to the goal's commit, or None if it never commits."""
    committed = commit_time(records, goal_id, start_t, **kwargs)
    return None if committed is None else committed - start_t


@dataclass(frozen=True)
class SweepMetrics:
    """Summary of one replay inside a parameter sweep."""

    parameter: str
    value: float
    argmax_switch_count: int
    time_in_unknown: float
    commit_latency: dict[str, float | None]

    def mean_commit_latency(self, cap: float) -> float:
        """Mean commit latency over goals; uncommitted goals count as `cap`."""
        values = [cap if v is None else v for v in self.commit_latency.values()]
        return sum(values) / len(values) if values else 0.0


def sweep_metrics(records: list[TraceRecord], parameter: str, value: float,
                  goal_segments: dict[str, float]) -> SweepMetrics:
    """Compute the sweep summary for one replay.

    `goal_segments` maps each goal id to the time its approach segment
    starts, so commit latency is measured per transition rather than from
    session start.
    """
    latencies = {
        goal_id: commit_latency(records, goal_id, start_t=start)
        for goal_id, start in goal_segments.items()
    }
    return SweepMetrics(
        parameter=parameter,
        value=value,
        argmax_switch_count=argmax_switch_count(records),
        time_in_unknown=time_in_unknown(records),
        commit_latency=latencies,
    )


def first_segment_starts(segment_table: list[tuple[float, float, str | None]]) -> dict[str, float]:
    """Map each labelled goal to the start of its first approach segment."""
    starts: dict[str, float] = {}
    for start, _end, label in segment_table:
        if label is not None and label not in starts:
            starts[label] = start
    return starts


def sweep_csv(rows: list[SweepMetrics], goal_ids: list[str],
              metadata: dict | None = None, deterministic: bool = False) -> str:
    out = io.StringIO()
    meta = dict(metadata or {})
    if not deterministic:
        meta["generated"] = datetime.now(timezone.utc).isoformat()
    for key, value in meta.items():
        out.write(f"# {key}={value}\n")
    columns = ["parameter", "value", "argmax_switch_count", "time_in_unknown",
               *(f"commit_latency_{gid}" for gid in goal_ids)]
    out.write(",".join(columns) + "\n")
    for row in rows:
        cells = [
            row.parameter,
            repr(float(row.value)),
            str(row.argmax_switch_count),
            repr(float(row.time_in_unknown)),
            *(_format_float(row.commit_latency.get(gid)) for gid in goal_ids),
        ]
        out.write(",".join(cells) + "\n")
    return out.getvalue()
