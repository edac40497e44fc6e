"""Scripted scenarios compiled into deterministic observation streams.

A scenario is a goal layout plus a list of segments, each moving the hand
toward a waypoint while the gaze either turns to fixate a world point or
sweeps around the vertical axis. Segments are sampled on a uniform global
grid at the scenario rate; within a segment the interpolation parameter is
stretched so the segment's last grid sample lands exactly on its endpoint,
which makes waypoints exact at every rate. Gaussian noise (hand position in
metres, gaze direction in radians) is drawn from a single seeded generator,
so identical scenarios always synthesize identical streams.

The builtin catalogue covers one goal-visit ordering per named entry: a
plain left-to-right pass, a revisiting order, a pass with a full rotation
away from every goal, and a noisier left-to-right pass used by parameter
sweeps.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ScenarioFormatError
from .geometry import Goal, GoalSet, HeadPose, as_vec3, normalize
from .session import Observation

SCHEMA_VERSION = 1

DEFAULT_GAZE_TURN_S = 0.4

# Gaze sweeps rotate about the world vertical.
SWEEP_AXIS = np.array([0.0, 0.0, 1.0])

LINEAR = "linear"
MIN_JERK = "min_jerk"


@dataclass(frozen=True)
class ScriptSegment:
    """One scripted motion: where the hand ends up and what the gaze does.

    Exactly one of `gaze_look_at` (a world point to fixate, reached within
    `gaze_turn_s`) and `gaze_sweep_deg` (rotation of the current gaze about
    the vertical, spread over the whole segment) must be given. `label`
    tags segments that approach a goal so metrics can find transition
    boundaries.
    """

    duration: float
    hand_to: np.ndarray
    gaze_look_at: np.ndarray | None = None
    gaze_sweep_deg: float | None = None
    interpolation: str = MIN_JERK
    label: str | None = None
    gaze_turn_s: float = DEFAULT_GAZE_TURN_S

    def __post_init__(self):
        if not self.duration > 0.0:
            raise ScenarioFormatError(f"segment duration must be > 0, got {self.duration!r}")
        object.__setattr__(self, "hand_to", as_vec3(self.hand_to, "segment hand_to"))
        if (self.gaze_look_at is None) == (self.gaze_sweep_deg is None):
            raise ScenarioFormatError("segment needs exactly one of gaze_look_at / gaze_sweep_deg")
        if self.gaze_look_at is not None:
            object.__setattr__(self, "gaze_look_at", as_vec3(self.gaze_look_at, "gaze_look_at"))
        if self.interpolation not in (LINEAR, MIN_JERK):
            raise ScenarioFormatError(f"unknown interpolation {self.interpolation!r}")
        if self.gaze_turn_s < 0.0:
            raise ScenarioFormatError("gaze_turn_s must be >= 0")


@dataclass(frozen=True)
class Scenario:
    """Declarative script: goals, sampling rate, seed, noise and segments."""

    name: str
    goals: GoalSet
    rate: float
    seed: int
    head_position: np.ndarray
    hand_start: np.ndarray
    gaze_start: np.ndarray
    segments: tuple[ScriptSegment, ...]
    noise_hand: float = 0.0
    noise_gaze: float = 0.0

    def __post_init__(self):
        if not self.rate > 0.0:
            raise ScenarioFormatError(f"rate must be > 0, got {self.rate!r}")
        if not self.segments:
            raise ScenarioFormatError("scenario needs at least one segment")
        if self.noise_hand < 0.0 or self.noise_gaze < 0.0:
            raise ScenarioFormatError("noise levels must be >= 0")
        object.__setattr__(self, "segments", tuple(self.segments))
        object.__setattr__(self, "head_position", as_vec3(self.head_position, "head_position"))
        object.__setattr__(self, "hand_start", as_vec3(self.hand_start, "hand_start"))
        gaze = as_vec3(self.gaze_start, "gaze_start")
        # Keep already-unit directions bit-for-bit so saved scenarios round-trip.
        if abs(float(np.linalg.norm(gaze)) - 1.0) > 1e-12:
            gaze = normalize(gaze, "gaze_start")
        object.__setattr__(self, "gaze_start", gaze)

    @property
    def duration(self) -> float:
        return float(sum(seg.duration for seg in self.segments))

    def segment_table(self) -> list[tuple[float, float, str | None]]:
        """(start time, end time, label) per segment."""
        table = []
        start = 0.0
        for seg in self.segments:
            table.append((start, start + seg.duration, seg.label))
            start += seg.duration
        return table


def _profile(tau: float, interpolation: str) -> float:
    if interpolation == LINEAR:
        return tau
    return tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau))


def _slerp(a: np.ndarray, b: np.ndarray, fraction: float) -> np.ndarray:
    cosine = float(np.clip(a @ b, -1.0, 1.0))
    angle = math.acos(cosine)
    if angle < 1e-9 or fraction >= 1.0:
        return b if fraction >= 1.0 else a if fraction <= 0.0 else b
    if angle > math.pi - 1e-9:
        # Antipodal: pivot through the vertical to keep the path defined.
        mid = normalize(np.cross(a, SWEEP_AXIS))
        if fraction <= 0.5:
            return _slerp(a, mid, fraction * 2.0)
        return _slerp(mid, b, (fraction - 0.5) * 2.0)
    s = math.sin(angle)
    return (math.sin((1.0 - fraction) * angle) * a + math.sin(fraction * angle) * b) / s


def _rotate_about(vector: np.ndarray, axis: np.ndarray, angle: float) -> np.ndarray:
    cos_a, sin_a = math.cos(angle), math.sin(angle)
    return (
        vector * cos_a
        + np.cross(axis, vector) * sin_a
        + axis * (axis @ vector) * (1.0 - cos_a)
    )


def synthesize(scenario: Scenario) -> list[Observation]:
    """Compile the scenario into a timestamped observation stream."""
    rng = np.random.default_rng(scenario.seed)
    dt = 1.0 / scenario.rate
    total = scenario.duration
    count = max(1, round(total * scenario.rate))
    times = np.arange(count) * dt

    # Per-sample segment assignment on the half-open [start, end) windows.
    boundaries = np.cumsum([seg.duration for seg in scenario.segments])
    segment_of = np.searchsorted(boundaries, times, side="right")
    segment_of = np.minimum(segment_of, len(scenario.segments) - 1)

    observations: list[Observation] = []
    hand_from = scenario.hand_start
    gaze_entry = scenario.gaze_start
    sample_index = 0
    for j, seg in enumerate(scenario.segments):
        sample_ids = np.nonzero(segment_of == j)[0]
        seg_start_t = float(boundaries[j] - seg.duration)
        if seg.gaze_look_at is not None:
            gaze_target = normalize(seg.gaze_look_at - scenario.head_position, "gaze target")
        last_local = max(1, len(sample_ids) - 1)
        for local, k in enumerate(sample_ids):
            t = float(times[k])
            tau = local / last_local if len(sample_ids) > 1 else 1.0
            hand = hand_from + _profile(tau, seg.interpolation) * (seg.hand_to - hand_from)
            if seg.gaze_look_at is not None:
                if seg.gaze_turn_s > 0.0:
                    turn = min(1.0, (t - seg_start_t) / seg.gaze_turn_s)
                else:
                    turn = 1.0
                gaze = _slerp(gaze_entry, gaze_target, turn)
            else:
                sweep = math.radians(seg.gaze_sweep_deg) * tau
                gaze = _rotate_about(gaze_entry, SWEEP_AXIS, sweep)
            hand_noise = rng.normal(0.0, scenario.noise_hand, 3)
            gaze_noise = rng.normal(0.0, scenario.noise_gaze, 3)
            observations.append(
                Observation(
                    t=t,
                    head=HeadPose(
                        position=scenario.head_position,
                        forward=normalize(gaze + gaze_noise),
                    ),
                    hand=hand + hand_noise,
                )
            )
            sample_index += 1
        hand_from = seg.hand_to
        if seg.gaze_look_at is not None:
            gaze_entry = gaze_target
        else:
            gaze_entry = _rotate_about(gaze_entry, SWEEP_AXIS, math.radians(seg.gaze_sweep_deg))
    return observations


# ---------------------------------------------------------------------------
# File formats


def _vec(value) -> list[float]:
    return [float(x) for x in value]


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "name": scenario.name,
        "rate": float(scenario.rate),
        "seed": int(scenario.seed),
        "head_position": _vec(scenario.head_position),
        "hand_start": _vec(scenario.hand_start),
        "gaze_start": {"direction": _vec(scenario.gaze_start)},
        "noise": {"hand_m": float(scenario.noise_hand), "gaze_rad": float(scenario.noise_gaze)},
        "goals": [
            {"id": g.id, "label": g.label, "position": _vec(g.position)} for g in scenario.goals
        ],
        "segments": [
            {
                "duration": float(seg.duration),
                "hand_to": _vec(seg.hand_to),
                "gaze": (
                    {"look_at": _vec(seg.gaze_look_at)}
                    if seg.gaze_look_at is not None
                    else {"sweep_deg": float(seg.gaze_sweep_deg)}
                ),
                "interpolation": seg.interpolation,
                "label": seg.label,
                "gaze_turn_s": float(seg.gaze_turn_s),
            }
            for seg in scenario.segments
        ],
    }


def scenario_from_dict(data: dict) -> Scenario:
    try:
        if data.get("schema") != SCHEMA_VERSION:
            raise ScenarioFormatError(
                f"unsupported scenario schema {data.get('schema')!r}, expected {SCHEMA_VERSION}"
            )
        head = as_vec3(data["head_position"], "head_position")
        gaze_raw = data["gaze_start"]
        if "direction" in gaze_raw:
            gaze_start = as_vec3(gaze_raw["direction"], "gaze_start")
        elif "look_at" in gaze_raw:
            gaze_start = as_vec3(gaze_raw["look_at"], "gaze_start look_at") - head
        else:
            raise ScenarioFormatError("gaze_start needs 'direction' or 'look_at'")
        goals = GoalSet(
            tuple(
                Goal(id=g["id"], label=g.get("label", g["id"]), position=g["position"])
                for g in data["goals"]
            )
        )
        segments = []
        for raw in data["segments"]:
            gaze = raw["gaze"]
            segments.append(
                ScriptSegment(
                    duration=float(raw["duration"]),
                    hand_to=raw["hand_to"],
                    gaze_look_at=gaze.get("look_at"),
                    gaze_sweep_deg=gaze.get("sweep_deg"),
                    interpolation=raw.get("interpolation", MIN_JERK),
                    label=raw.get("label"),
                    gaze_turn_s=float(raw.get("gaze_turn_s", DEFAULT_GAZE_TURN_S)),
                )
            )
        noise = data.get("noise", {})
        return Scenario(
            name=str(data.get("name", "unnamed")),
            goals=goals,
            rate=float(data["rate"]),
            seed=int(data["seed"]),
            head_position=head,
            hand_start=data["hand_start"],
            gaze_start=gaze_start,
            segments=tuple(segments),
            noise_hand=float(noise.get("hand_m", 0.0)),
            noise_gaze=float(noise.get("gaze_rad", 0.0)),
        )
    except ScenarioFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioFormatError(f"malformed scenario document: {exc}") from exc


def save_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=2) + "\n")


def load_scenario(path) -> Scenario:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"scenario file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioFormatError("scenario document must be a JSON object")
    return scenario_from_dict(data)


def write_observations(observations, path) -> None:
    """Line-delimited records: {t, head_pos, head_dir, hand_pos}."""
    with open(path, "w") as handle:
        for obs in observations:
            record = {
                "t": float(obs.t),
                "head_pos": _vec(obs.head.position),
                "head_dir": _vec(obs.head.forward),
                "hand_pos": _vec(obs.hand),
            }
            handle.write(json.dumps(record) + "\n")


def read_observations(path) -> list[Observation]:
    observations = []
    with open(path) as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                observations.append(
                    Observation(
                        t=float(record["t"]),
                        head=HeadPose(position=record["head_pos"], forward=record["head_dir"]),
                        hand=record["hand_pos"],
                    )
                )
            except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                raise ScenarioFormatError(f"bad observation on line {line_no}: {exc}") from exc
    return observations


# ---------------------------------------------------------------------------
# Builtin catalogue

# Desk-scale layout: three goals on a 1.5 m arc at 45 degree spacing, 0.8 m
# high, user standing at the arc centre.
_ARC_RADIUS = 1.5
_GOAL_HEIGHT = 0.8


def _arc_goal(goal_id: str, label: str, angle_deg: float) -> Goal:
    angle = math.radians(angle_deg)
    return Goal(
        id=goal_id,
        label=label,
        position=(_ARC_RADIUS * math.cos(angle), _ARC_RADIUS * math.sin(angle), _GOAL_HEIGHT),
    )


def default_goals() -> GoalSet:
    return GoalSet(
        (
            _arc_goal("cylinder", "green cylinder", 135.0),
            _arc_goal("cube", "red cube", 90.0),
            _arc_goal("sphere", "blue sphere", 45.0),
        )
    )


_HEAD = (0.0, 0.55, 1.55)
_HAND_HOME = (0.0, 0.55, 0.95)


def _visit(goals: GoalSet, goal_id: str, duration: float, *, dwell: float = 0.5,
           gaze_turn_s: float = 0.15) -> list[ScriptSegment]:
    position = goals.get(goal_id).position
    segments = [
        ScriptSegment(
            duration=duration,
            hand_to=position,
            gaze_look_at=position,
            label=goal_id,
            gaze_turn_s=gaze_turn_s,
        )
    ]
    if dwell > 0.0:
        segments.append(
            ScriptSegment(duration=dwell, hand_to=position, gaze_look_at=position)
        )
    return segments


def _ordered_visits(name: str, order: list[str], *, seed: int, noise_hand: float,
                    noise_gaze: float, durations: list[float] | None = None,
                    rate: float = 30.0, head=_HEAD, hand_start=_HAND_HOME) -> Scenario:
    goals = default_goals()
    segments: list[ScriptSegment] = []
    for i, goal_id in enumerate(order):
        duration = durations[i] if durations else 2.0
        segments.extend(_visit(goals, goal_id, duration))
    first = goals.get(order[0]).position
    return Scenario(
        name=name,
        goals=goals,
        rate=rate,
        seed=seed,
        head_position=head,
        hand_start=hand_start,
        gaze_start=np.asarray(first, dtype=np.float64) - np.asarray(head, dtype=np.float64),
        segments=tuple(segments),
        noise_hand=noise_hand,
        noise_gaze=noise_gaze,
    )


def _fig7_right() -> Scenario:
    """Sphere, cube, cylinder, then a full rotation away and back to sphere.

    The rotation is split into a short retreat (hand pulls back while the
    gaze starts turning) and a long stationary phase (the hand rests while
    the gaze completes the turn), matching how people actually turn around.
    """
    goals = default_goals()
    segments: list[ScriptSegment] = []
    for goal_id in ("sphere", "cube", "cylinder"):
        segments.extend(_visit(goals, goal_id, 2.0))
    retreat = np.asarray(_HAND_HOME, dtype=np.float64) + np.array([0.0, -0.25, 0.0])
    segments.append(
        ScriptSegment(
            duration=0.8,
            hand_to=retreat,
            gaze_sweep_deg=96.0,
            label="rotate_away",
        )
    )
    segments.append(
        ScriptSegment(duration=2.2, hand_to=retreat, gaze_sweep_deg=264.0)
    )
    # The reach back to the sphere first drifts through the region between
    # cube and sphere, which keeps the evidence ambiguous for a while after
    # the gaze comes back, before bending onto the sphere itself.
    sphere = goals.get("sphere").position
    waypoint = np.array([0.42, 1.0, 0.85])
    segments.append(
        ScriptSegment(
            duration=1.2,
            hand_to=waypoint,
            gaze_look_at=sphere,
            label="sphere_return",
            gaze_turn_s=0.3,
        )
    )
    segments.append(
        ScriptSegment(duration=1.6, hand_to=sphere, gaze_look_at=sphere)
    )
    segments.append(ScriptSegment(duration=0.5, hand_to=sphere, gaze_look_at=sphere))
    return Scenario(
        name="fig7_right",
        goals=goals,
        rate=30.0,
        seed=23,
        head_position=_HEAD,
        hand_start=_HAND_HOME,
        gaze_start=np.asarray(goals.get("sphere").position, dtype=np.float64)
        - np.asarray(_HEAD, dtype=np.float64),
        segments=tuple(segments),
        noise_hand=0.0005,
        noise_gaze=0.005,
    )


def _fig7_middle() -> Scenario:
    """Cube, cylinder, back to the cube, then the sphere.

    The final reach to the sphere is deliberately hesitant: the hand first
    drifts through the region between the twice-visited cube and the sphere
    while the gaze glances back at the cube, so the model stays torn between
    the two for a while before the path bends onto the sphere.
    """
    goals = default_goals()
    segments: list[ScriptSegment] = []
    for goal_id in ("cube", "cylinder", "cube"):
        segments.extend(_visit(goals, goal_id, 2.0))
    cube = goals.get("cube").position
    sphere = goals.get("sphere").position
    waypoint = np.array([0.5, 1.2, 0.82])
    segments.append(
        ScriptSegment(
            duration=0.9,
            hand_to=waypoint,
            gaze_look_at=cube,
            label="sphere",
            gaze_turn_s=0.15,
        )
    )
    segments.append(
        ScriptSegment(duration=1.6, hand_to=sphere, gaze_look_at=sphere, gaze_turn_s=0.3)
    )
    segments.append(ScriptSegment(duration=0.5, hand_to=sphere, gaze_look_at=sphere))
    return Scenario(
        name="fig7_middle",
        goals=goals,
        rate=30.0,
        seed=11,
        head_position=_HEAD,
        hand_start=_HAND_HOME,
        gaze_start=np.asarray(goals.get("cube").position, dtype=np.float64)
        - np.asarray(_HEAD, dtype=np.float64),
        segments=tuple(segments),
        noise_hand=0.0005,
        noise_gaze=0.005,
    )


# Seated-close pose for the sweep scenario: goal directions separate widely
# from a head just behind the arc, which is what lets high switching rates
# show up at all when the change-of-mind rate is cranked up.
_HEAD_SEATED = (0.0, 1.15, 1.25)
_HAND_SEATED = (0.0, 0.95, 0.9)


def builtin_scenarios() -> dict[str, Scenario]:
    """Named catalogue of committed scenarios."""
    return {
        "fig7_left": _ordered_visits(
            "fig7_left",
            ["cylinder", "cube", "sphere"],
            seed=7,
            noise_hand=0.0005,
            noise_gaze=0.005,
        ),
        "fig7_middle": _fig7_middle(),
        "fig7_right": _fig7_right(),
        "sweep_base": _ordered_visits(
            "sweep_base",
            ["cylinder", "cube", "sphere"],
            seed=51,
            noise_hand=0.006,
            noise_gaze=0.03,
            durations=[2.0, 2.0, 2.0],
            head=_HEAD_SEATED,
            hand_start=_HAND_SEATED,
        ),
    }
