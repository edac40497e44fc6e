#!/usr/bin/env python3
"""Replay the three committed goal-order scenarios and report their traces.

Prints, per scenario: the collapsed argmax sequence, the per-transition
commit latencies, and how long the estimator spent in the unknown state.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from reachintent import Session, SessionConfig, builtin_scenarios, synthesize
from reachintent import metrics


def main() -> None:
    for name in ("fig7_left", "fig7_middle", "fig7_right"):
        scenario = builtin_scenarios()[name]
        session = Session(SessionConfig(), scenario.goals)
        for obs in synthesize(scenario):
            session.observe(obs)
        records = metrics.to_records(session.export_trace())

        print(f"== {name} ({scenario.duration:.1f}s at {scenario.rate:.0f} Hz)")
        print("   argmax:", " -> ".join(metrics.collapsed_argmax(records)))
        for start, _end, label in scenario.segment_table():
            if label is None or label.startswith("rotate"):
                continue
            goal_id = label.split("_")[0]
            latency = metrics.commit_latency(records, goal_id, start_t=start)
            shown = "never" if latency is None else f"{latency:.3f}s"
            print(f"   commit {label:<14} (segment at {start:5.2f}s): {shown}")
        print(f"   time in unknown: {metrics.time_in_unknown(records):.2f}s")
        print()


if __name__ == "__main__":
    main()
