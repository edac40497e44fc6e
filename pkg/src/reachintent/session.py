"""One streaming estimation session: observations in, intent estimates out.

A session owns the belief over ``[goals..., unknown, irrational]`` and all
evidence bookkeeping. Each observation either advances the model by one
propagate-then-emit step or is skipped as stationary: the candidate-point
construction divides by the travelled radius, so samples that moved less
than ``epsilon_motion`` carry no usable direction. Skipped samples leave the
belief untouched and, crucially, do not advance the previous-hand anchor,
so micro-jitter can never synthesize a spurious radius.

Goals can be added and removed mid-session. Edits rebuild the transition
matrix, patch the belief (new goals enter with zero mass; removed mass is
renormalized away) and restart the decoded-path history at the edit
boundary.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import geometry, hmm
from .errors import ParameterError, PreconditionError, StreamError
from .geometry import Goal, GoalSet, HeadPose, SamplePattern
from .hmm import HiddenState, HmmParams

DEFAULT_EPSILON_MOTION = 1e-3
DEFAULT_BACKPOINTER_WINDOW = 4096


@dataclass(frozen=True)
class SessionConfig:
    """Tunables for one estimation session."""

    params: HmmParams = field(default_factory=HmmParams)
    pattern: SamplePattern = field(default_factory=SamplePattern.sphere)
    epsilon_motion: float = DEFAULT_EPSILON_MOTION
    backpointer_window: int = DEFAULT_BACKPOINTER_WINDOW

    def __post_init__(self):
        if not self.epsilon_motion > 0.0:
            raise ParameterError(f"epsilon_motion must be > 0, got {self.epsilon_motion!r}")
        if self.backpointer_window < 1:
            raise ParameterError("backpointer_window must be >= 1")


@dataclass(frozen=True)
class Observation:
    """One timestamped input sample: head pose, hand position, optional joints."""

    t: float
    head: HeadPose
    hand: np.ndarray
    joints: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "hand", geometry.as_vec3(self.hand, "hand position"))


@dataclass(frozen=True)
class IntentEstimate:
    """Belief snapshot plus diagnostics for one observation.

    `skipped` marks stationary samples: the belief fields then repeat the
    held belief and the evidence diagnostics (v, s, phi, delta_gap) are None.
    """

    t: float
    per_goal: dict[str, float]
    p_unknown: float
    p_irrational: float
    argmax: HiddenState
    argmax_label: str
    phi: float | None
    delta_gap: float | None
    v: np.ndarray | None
    s: np.ndarray | None
    skipped: bool
    reset: bool = False


def _argmax_label(state: HiddenState, goal_ids: list[str]) -> str:
    if state.kind == "goal":
        return f"goal:{goal_ids[state.goal_index]}"
    return state.kind


class Session:
    """Single-writer streaming estimator over a mutable goal set."""

    def __init__(self, config: SessionConfig, goals: GoalSet):
        if len(goals) < 1:
            raise ParameterError("a session requires at least one goal")
        self._config = config
        self._goals = goals
        self._params = config.params
        self._transition = hmm.build_transition(self._params, len(goals))
        self._belief = hmm.initial_belief(len(goals))
        self._history = hmm.EmissionHistory(window=self._params.m)
        self._backptrs: deque[np.ndarray] = deque(maxlen=config.backpointer_window)
        self._prev_hand: np.ndarray | None = None
        self._prev_t: float | None = None
        self._estimates: list[IntentEstimate] = []

    @property
    def config(self) -> SessionConfig:
        return self._config

    @property
    def params(self) -> HmmParams:
        return self._params

    @property
    def goals(self) -> GoalSet:
        return self._goals

    @property
    def belief(self) -> np.ndarray:
        return self._belief.copy()

    @property
    def emission_history(self) -> hmm.EmissionHistory:
        return self._history

    def current_estimate(self) -> IntentEstimate | None:
        return self._estimates[-1] if self._estimates else None

    def _snapshot(self, t: float, *, skipped: bool, phi_value=None, gap=None,
                  v=None, s=None, reset=False) -> IntentEstimate:
        g = len(self._goals)
        belief = self._belief
        ids = self._goals.ids()
        argmax = hmm.state_from_index(int(np.argmax(belief)), g)
        estimate = IntentEstimate(
            t=float(t),
            per_goal={gid: float(belief[i]) for i, gid in enumerate(ids)},
            p_unknown=float(belief[g]),
            p_irrational=float(belief[g + 1]),
            argmax=argmax,
            argmax_label=_argmax_label(argmax, ids),
            phi=phi_value,
            delta_gap=gap,
            v=None if v is None else np.asarray(v, dtype=np.float64).copy(),
            s=None if s is None else np.asarray(s, dtype=np.float64).copy(),
            skipped=skipped,
            reset=reset,
        )
        self._estimates.append(estimate)
        return estimate

    def observe(self, obs: Observation) -> IntentEstimate:
        """Consume one observation and return the resulting estimate."""
        if self._prev_t is not None and obs.t <= self._prev_t:
            raise StreamError(
                f"non-monotonic timestamp: {obs.t!r} after {self._prev_t!r}"
            )
        self._prev_t = float(obs.t)

        if self._prev_hand is None:
            # Bootstrap: the first sample only anchors the previous-hand position.
            self._prev_hand = obs.hand.copy()
            return self._snapshot(obs.t, skipped=True)

        motion = obs.hand - self._prev_hand
        radius = float(np.linalg.norm(motion))
        if radius < self._config.epsilon_motion:
            return self._snapshot(obs.t, skipped=True)

        gaze_scores = geometry.gaze_validation(obs.head, self._goals)
        frame = geometry.orientation_frame(motion, obs.head.forward)
        points = geometry.sample_candidate_points(
            self._prev_hand,
            radius,
            self._config.pattern,
            orientation=frame,
            min_radius=self._config.epsilon_motion,
        )
        md = geometry.modulated_distance_matrix(points, obs.hand, self._goals)
        v = geometry.motion_validation(md, gaze_scores)
        row, phi_value = self._history.push(v)
        step = hmm.viterbi_step(self._belief, self._transition, row)
        self._belief = step.belief
        if step.reset:
            self._backptrs.clear()
        else:
            self._backptrs.append(step.backpointers)
        self._prev_hand = obs.hand.copy()
        return self._snapshot(
            obs.t,
            skipped=False,
            phi_value=float(phi_value),
            gap=float(hmm.delta_gap(v)),
            v=v,
            s=gaze_scores,
            reset=step.reset,
        )

    def add_goal(self, goal: Goal) -> None:
        """Insert a goal at runtime; it starts with zero belief mass."""
        new_goals = self._goals.with_goal(goal)  # rejects duplicate ids
        transition = hmm.build_transition(self._params, len(new_goals))
        g_old = len(self._goals)
        belief = np.insert(self._belief, g_old, 0.0)
        self._belief = belief / belief.sum()
        self._history.extend_goal()
        self._backptrs.clear()
        self._goals = new_goals
        self._transition = transition

    def remove_goal(self, goal_id: str) -> None:
        """Remove a goal; its belief mass is renormalized away."""
        index = self._goals.index_of(goal_id)  # rejects unknown ids
        if len(self._goals) == 1:
            raise ParameterError("a session requires at least one goal")
        new_goals = self._goals.without_goal(goal_id)
        belief = np.delete(self._belief, index)
        total = belief.sum()
        if total < 1e-12:
            belief = hmm.initial_belief(len(new_goals))
        else:
            belief = belief / total
        self._belief = belief
        self._history.drop_goal(index)
        self._backptrs.clear()
        self._goals = new_goals
        self._transition = hmm.build_transition(self._params, len(new_goals))

    def update_params(self, params: HmmParams) -> None:
        """Swap model parameters mid-session; the decoded path restarts here."""
        transition = hmm.build_transition(params, len(self._goals))
        self._params = params
        self._transition = transition
        self._history.resize_window(params.m)
        self._history.rows.clear()
        self._backptrs.clear()

    def decoded_path(self) -> list[HiddenState]:
        """Best state sequence over the stored decoding window."""
        if not self._backptrs:
            raise PreconditionError("no decoding steps recorded")
        return hmm.viterbi_path(list(self._backptrs), self._belief)

    def export_trace(self) -> list[IntentEstimate]:
        """All estimates emitted so far, in order."""
        return list(self._estimates)


def new_session(config: SessionConfig, goals: GoalSet) -> Session:
    """Convenience constructor mirroring Session(config, goals)."""
    return Session(config, goals)
