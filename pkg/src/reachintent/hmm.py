"""Hidden-state model over goals plus UNKNOWN and IRRATIONAL states.

The chain has g + 2 states in the fixed order ``[goal_1 .. goal_g, unknown,
irrational]``. Direct goal-to-goal hops are impossible: a change of mind
must pass through the unknown state, and the irrational state can only be
left through it as well. Decoding is an online max-product recursion with
per-step renormalization; the chain starts in the unknown state with
certainty, and every incoming evidence row triggers one propagate-then-emit
step, so the first decoded state is already one transition past that anchor.

Evidence rows are built from the motion-validation vector ``v``. When the
windowed evidence peak ``phi`` shows the user has recently been approaching
at least one goal (phi > 0.5), goals receive ``tanh(v_j)`` and the unknown
state ``tanh(1 - delta_gap)``, sharpening with the margin between the two
best-supported goals; otherwise all goal weight is dropped and the mass is
split between unknown (a small floor) and irrational (growing as phi falls).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, ParameterError, PreconditionError

DEFAULT_EVIDENCE_WINDOW = 30

# Emission weight the unknown state keeps while no goal is supported.
UNKNOWN_FLOOR = 0.1


@dataclass(frozen=True)
class HmmParams:
    """Transition-model parameters.

    alpha: tendency to abandon a committed goal back to unknown.
    beta:  readiness to commit from unknown to any single goal.
    gamma: rate of declaring the user irrational from unknown.
    delta: readiness to leave the irrational state again.
    m:     evidence window (number of validation vectors averaged for phi).
    """

    alpha: float = 0.3
    beta: float = 0.05
    gamma: float = 0.05
    delta: float = 0.1
    m: int = DEFAULT_EVIDENCE_WINDOW

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ParameterError(f"{name} must lie in [0, 1], got {value!r}")
        if not isinstance(self.m, int) or self.m < 1:
            raise ParameterError(f"m must be a positive integer, got {self.m!r}")

    def updated(self, **changes) -> "HmmParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class HiddenState:
    """One hidden state: a goal (by index), unknown, or irrational."""

    kind: str  # "goal" | "unknown" | "irrational"
    goal_index: int | None = None

    def __post_init__(self):
        if self.kind not in ("goal", "unknown", "irrational"):
            raise InvalidInputError(f"unknown state kind {self.kind!r}")
        if (self.kind == "goal") != (self.goal_index is not None):
            raise InvalidInputError("goal_index is set exactly for goal states")


UNKNOWN = HiddenState(kind="unknown")
IRRATIONAL = HiddenState(kind="irrational")


def goal_state(index: int) -> HiddenState:
    return HiddenState(kind="goal", goal_index=index)


def state_from_index(index: int, goal_count: int) -> HiddenState:
    if index < 0 or index >= goal_count + 2:
        raise InvalidInputError(f"state index {index} out of range for g={goal_count}")
    if index < goal_count:
        return goal_state(index)
    return UNKNOWN if index == goal_count else IRRATIONAL


def state_to_index(state: HiddenState, goal_count: int) -> int:
    if state.kind == "goal":
        if state.goal_index is None or state.goal_index >= goal_count:
            raise InvalidInputError(f"goal index {state.goal_index} out of range")
        return state.goal_index
    return goal_count if state.kind == "unknown" else goal_count + 1


def build_transition(params: HmmParams, goal_count: int) -> np.ndarray:
    """Dense (g+2)x(g+2) row-stochastic transition matrix.

    Goal rows keep 1-alpha and send alpha to unknown. The unknown row sends
    beta to every goal, keeps 1 - g*beta - gamma and sends gamma to
    irrational. The irrational row sends delta back to unknown and keeps the
    rest. Requires g*beta + gamma <= 1 so the unknown row stays a
    distribution.
    """
    if goal_count < 1:
        raise ParameterError(f"goal_count must be >= 1, got {goal_count}")
    leak = goal_count * params.beta + params.gamma
    if leak > 1.0:
        raise ParameterError(
            "unknown-state row is infeasible: goal_count*beta + gamma = "
            f"{goal_count}*{params.beta} + {params.gamma} = {leak!r} > 1"
        )
    n = goal_count + 2
    unknown = goal_count
    irrational = goal_count + 1
    T = np.zeros((n, n), dtype=np.float64)
    for i in range(goal_count):
        T[i, i] = 1.0 - params.alpha
        T[i, unknown] = params.alpha
    T[unknown, :goal_count] = params.beta
    T[unknown, unknown] = 1.0 - leak
    T[unknown, irrational] = params.gamma
    T[irrational, unknown] = params.delta
    T[irrational, irrational] = 1.0 - params.delta
    return T


def phi(history: Sequence[np.ndarray], window: int) -> float:
    """Peak of the componentwise mean over the last `window` vectors.

    Uses however many vectors exist when fewer than `window` have been
    recorded; an empty history is a precondition violation.
    """
    if window < 1:
        raise InvalidInputError(f"window must be >= 1, got {window}")
    vectors = list(history)[-window:]
    if not vectors:
        raise PreconditionError("phi requires at least one recorded validation vector")
    return float(np.mean(np.stack(vectors), axis=0).max())


def delta_gap(v: np.ndarray) -> float:
    """Gap between the largest and second-largest component of `v`.

    With a single goal the second-largest is defined as 0, so the gap equals
    the lone component.
    """
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise InvalidInputError(f"validation vector must be non-empty 1-d, got {arr.shape}")
    if arr.shape[0] == 1:
        return float(arr[0])
    top_two = np.partition(arr, -2)[-2:]
    return float(top_two[1] - top_two[0])


def emission_row(v: np.ndarray, phi_value: float) -> np.ndarray:
    """Normalized evidence row over [goals..., unknown, irrational].

    phi > 0.5 selects the rational branch: goal weights tanh(v_j), unknown
    weight tanh(1 - delta_gap(v)), zero irrational weight. Otherwise all
    goal weight is dropped: unknown keeps a small floor and irrational grows
    as phi falls. The row is normalized to sum to one; the normalizer
    cancels under per-step belief renormalization.
    """
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise InvalidInputError(f"validation vector must be non-empty 1-d, got {arr.shape}")
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise InvalidInputError(f"validation components must lie in [0, 1], got {arr}")
    if not 0.0 <= phi_value <= 1.0:
        raise InvalidInputError(f"phi must lie in [0, 1], got {phi_value!r}")
    g = arr.shape[0]
    row = np.zeros(g + 2, dtype=np.float64)
    if phi_value > 0.5:
        row[:g] = np.tanh(arr)
        row[g] = np.tanh(1.0 - delta_gap(arr))
    else:
        row[g] = np.tanh(UNKNOWN_FLOOR)
        row[g + 1] = np.tanh(1.0 - phi_value)
    total = row.sum()
    if total <= 0.0:  # unreachable for valid inputs; keep the row a distribution
        row[:] = 0.0
        row[g] = 1.0
        return row
    return row / total


def initial_belief(goal_count: int) -> np.ndarray:
    """Unit mass on the unknown state."""
    if goal_count < 1:
        raise ParameterError(f"goal_count must be >= 1, got {goal_count}")
    belief = np.zeros(goal_count + 2, dtype=np.float64)
    belief[goal_count] = 1.0
    return belief


@dataclass(frozen=True)
class ViterbiStep:
    """One decoding step: renormalized scores, backpointers, reset flag.

    `backpointers[j]` is the best predecessor of state j; it is None when
    every propagated score vanished and the belief was reset to the initial
    one.
    """

    belief: np.ndarray
    backpointers: np.ndarray | None
    reset: bool = False


def viterbi_step(prev: np.ndarray, transition: np.ndarray, row: np.ndarray) -> ViterbiStep:
    """One max-product update: propagate `prev` through `transition`, emit `row`.

    Ties in the predecessor argmax break toward the lowest state index. If
    every score is zero (the evidence row excludes all reachable states) the
    belief resets to the initial one and the step is flagged.
    """
    p = np.asarray(prev, dtype=np.float64)
    n = p.shape[0]
    if transition.shape != (n, n) or row.shape != (n,):
        raise InvalidInputError(
            f"dimension mismatch: prev {p.shape}, transition {transition.shape}, row {row.shape}"
        )
    propagated = p[:, None] * transition
    backptr = np.argmax(propagated, axis=0)
    scores = propagated[backptr, np.arange(n)] * row
    total = scores.sum()
    if total <= 0.0:
        return ViterbiStep(belief=initial_belief(n - 2), backpointers=None, reset=True)
    return ViterbiStep(belief=scores / total, backpointers=backptr, reset=False)


def viterbi_path(backpointers: Sequence[np.ndarray], final_belief: np.ndarray) -> list[HiddenState]:
    """Backtrace the best state sequence through stored backpointer rows.

    `backpointers[t]` must map each state at step t to its best predecessor;
    the first row points at the pre-observation anchor state, which is not
    part of the returned path. The path therefore has exactly one state per
    stored step.
    """
    rows = list(backpointers)
    if not rows:
        raise PreconditionError("no decoding steps recorded")
    goal_count = final_belief.shape[0] - 2
    state = int(np.argmax(final_belief))
    indices = [state]
    for bp in reversed(rows[1:]):
        state = int(bp[state])
        indices.append(state)
    indices.reverse()
    return [state_from_index(i, goal_count) for i in indices]


def batch_viterbi(
    transition: np.ndarray,
    initial: np.ndarray,
    rows: Sequence[np.ndarray],
) -> tuple[list[HiddenState], list[np.ndarray]]:
    """Whole-sequence decode over an emission history.

    Recomputes the full trellis in one pass and returns the decoded path
    plus the per-step renormalized score vectors. Same conventions as the
    online recursion (propagate-then-emit from `initial`, lowest-index tie
    breaks, reset on all-zero scores), against which it serves as an
    independent check.
    """
    if len(rows) == 0:
        raise PreconditionError("emission history must be non-empty")
    n = transition.shape[0]
    goal_count = n - 2
    k = len(rows)
    backptr = np.empty((k, n), dtype=np.int64)
    beliefs: list[np.ndarray] = []
    segment_start = 0  # trellis restarts after a reset step
    delta = np.asarray(initial, dtype=np.float64)
    for t, row in enumerate(rows):
        propagated = delta[:, None] * transition
        backptr[t] = np.argmax(propagated, axis=0)
        scores = propagated[backptr[t], np.arange(n)] * np.asarray(row, dtype=np.float64)
        total = scores.sum()
        if total <= 0.0:
            delta = initial_belief(goal_count)
            segment_start = t + 1
        else:
            delta = scores / total
        beliefs.append(delta)
    # Backtrace the final contiguous segment.
    path_indices = [int(np.argmax(delta))]
    for t in range(k - 1, segment_start, -1):
        path_indices.append(int(backptr[t][path_indices[-1]]))
    path_indices.reverse()
    path = [state_from_index(i, goal_count) for i in path_indices]
    return path, beliefs


class EmissionHistory:
    """Evidence bookkeeping: append-only rows plus the phi window.

    Holds the ring of recent validation vectors that phi averages over and
    the full list of emission rows produced so far. Goal edits adjust the
    ring in place (new goals enter with zero evidence, removed goals drop
    their component) and clear the accumulated rows, since rows of a
    different width are no longer comparable.
    """

    def __init__(self, window: int = DEFAULT_EVIDENCE_WINDOW):
        if window < 1:
            raise InvalidInputError(f"window must be >= 1, got {window}")
        self.window = window
        self.v_ring: deque[np.ndarray] = deque(maxlen=window)
        self.rows: list[np.ndarray] = []

    def push(self, v: np.ndarray) -> tuple[np.ndarray, float]:
        """Record one validation vector; returns (emission row, phi)."""
        vec = np.asarray(v, dtype=np.float64).copy()
        self.v_ring.append(vec)
        phi_value = phi(self.v_ring, self.window)
        row = emission_row(vec, phi_value)
        self.rows.append(row)
        return row, phi_value

    def extend_goal(self) -> None:
        ring = [np.append(vec, 0.0) for vec in self.v_ring]
        self.v_ring = deque(ring, maxlen=self.window)
        self.rows.clear()

    def drop_goal(self, index: int) -> None:
        ring = [np.delete(vec, index) for vec in self.v_ring]
        self.v_ring = deque(ring, maxlen=self.window)
        self.rows.clear()

    def resize_window(self, window: int) -> None:
        if window < 1:
            raise InvalidInputError(f"window must be >= 1, got {window}")
        self.window = window
        self.v_ring = deque(list(self.v_ring)[-window:], maxlen=window)
