"""Point-mass robot policies driven by the live intent estimates.

Two policies are provided. Conflict avoidance gives the robot its own goal
and makes it back off as soon as the human is confidently estimated to be
heading for the same one: it stops for that step and redraws a different
target at random. Teleoperation inverts the relationship: the robot adopts
the human's confidently-estimated goal as its own navigation target and
holds position while the estimate is unknown or irrational. In both modes a
stop gesture freezes the robot for the step.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InconsistencyError, InvalidInputError, ParameterError
from .geometry import GoalSet, as_vec3
from .gesture import Gesture
from .session import IntentEstimate

CONFLICT_AVOID = "conflict_avoid"
TELEOP = "teleop"


@dataclass(frozen=True)
class AgentConfig:
    """Policy selection and thresholds for the robot agent."""

    mode: str = CONFLICT_AVOID
    theta_conflict: float = 0.5
    theta_teleop: float = 0.7
    speed: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if self.mode not in (CONFLICT_AVOID, TELEOP):
            raise ParameterError(f"unknown agent mode {self.mode!r}")
        for name in ("theta_conflict", "theta_teleop"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise ParameterError(f"{name} must lie in (0, 1], got {value!r}")
        if self.speed < 0.0:
            raise ParameterError(f"speed must be >= 0, got {self.speed!r}")


@dataclass(frozen=True)
class RobotState:
    """Point-mass robot: position, current target goal, motion status."""

    position: np.ndarray
    target: str | None = None
    speed: float = 0.2
    stopped: bool = False

    def __post_init__(self):
        object.__setattr__(self, "position", as_vec3(self.position, "robot position"))
        if self.speed < 0.0:
            raise InvalidInputError(f"speed must be >= 0, got {self.speed!r}")


@dataclass(frozen=True)
class AgentEvent:
    kind: str  # "conflict" | "retarget" | "gesture_stop" | "arrived"
    detail: dict

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.detail}


def _move_toward(state: RobotState, target_pos: np.ndarray, dt: float) -> RobotState:
    offset = target_pos - state.position
    distance = float(np.linalg.norm(offset))
    if distance < 1e-12:
        return replace(state, stopped=False)
    step = min(state.speed * dt, distance)
    return replace(state, position=state.position + offset / distance * step, stopped=False)


def _draw_target(goals: GoalSet, rng: np.random.Generator, exclude: str | None) -> str | None:
    candidates = [gid for gid in goals.ids() if gid != exclude]
    if not candidates:
        return exclude  # single-goal degenerate case: nowhere else to go
    return candidates[int(rng.integers(len(candidates)))]


def agent_step(
    robot: RobotState,
    estimate: IntentEstimate,
    goals: GoalSet,
    gesture: Gesture,
    dt: float,
    config: AgentConfig,
    rng: np.random.Generator,
) -> tuple[RobotState, list[AgentEvent]]:
    """Advance the robot by one step against the latest estimate.

    Determinism: all randomness is drawn from the caller-held generator, so
    a seeded run over a fixed estimate trace always yields the same
    trajectory.
    """
    if dt <= 0.0:
        raise InvalidInputError(f"dt must be > 0, got {dt!r}")
    if robot.target is not None and robot.target not in goals.ids():
        raise InconsistencyError(f"robot target {robot.target!r} is not a current goal")

    if gesture == Gesture.STOP:
        return replace(robot, stopped=True), [AgentEvent("gesture_stop", {})]

    events: list[AgentEvent] = []
    if config.mode == CONFLICT_AVOID:
        if robot.target is None:
            target = _draw_target(goals, rng, exclude=None)
            events.append(AgentEvent("retarget", {"target": target}))
            return replace(robot, target=target, stopped=True), events
        argmax_is_target = (
            estimate.argmax.kind == "goal"
            and estimate.argmax_label == f"goal:{robot.target}"
        )
        if argmax_is_target and estimate.per_goal.get(robot.target, 0.0) > config.theta_conflict:
            new_target = _draw_target(goals, rng, exclude=robot.target)
            events.append(
                AgentEvent(
                    "conflict",
                    {
                        "previous_target": robot.target,
                        "target": new_target,
                        "p_target": estimate.per_goal[robot.target],
                    },
                )
            )
            return replace(robot, target=new_target, stopped=True), events
        return _move_toward(robot, goals.get(robot.target).position, dt), events

    # Teleoperation: follow the human's confidently-estimated goal.
    if estimate.argmax.kind == "goal":
        goal_id = estimate.argmax_label.removeprefix("goal:")
        if estimate.per_goal.get(goal_id, 0.0) > config.theta_teleop:
            moved = _move_toward(replace(robot, target=goal_id), goals.get(goal_id).position, dt)
            if robot.target != goal_id:
                events.append(AgentEvent("retarget", {"target": goal_id}))
            return moved, events
    return replace(robot, stopped=False), events
