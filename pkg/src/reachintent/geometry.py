"""Geometric evidence extraction for goal-intention estimation.

Each motion sample yields two per-goal evidence vectors:

* gaze validation ``s``: cosine alignment between the head's forward axis
  and the head-to-goal direction, clamped at zero, and
* motion validation ``v``: how decisively the hand moved toward each goal,
  scored against candidate points sampled around the previous hand position
  at the radius actually travelled, then gated componentwise by ``s``.

All positions are metres in a single fixed world frame. Every function here
is pure and deterministic; the streaming layer owns all mutable state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, PreconditionError

# Angular increment of the spiral sphere lattice.
GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))

# Below this head-to-goal distance the gaze direction is undefined and the
# goal receives zero gaze support.
GOAL_AT_HEAD_EPS = 1e-6

# Distance span below which a column of the candidate-distance matrix is
# treated as degenerate (all candidate points equidistant from the goal).
DEGENERATE_SPAN = 1e-9

UNIT_NORM_TOL = 1e-9

DEFAULT_SAMPLE_COUNT = 32

DEFAULT_MIN_RADIUS = 1e-3


def as_vec3(value, name: str = "vector") -> np.ndarray:
    """Coerce to a finite float64 array of shape (3,)."""
    arr = np.asarray(value, dtype=np.float64)
    if arr.shape != (3,):
        raise InvalidInputError(f"{name} must have shape (3,), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} must be finite, got {arr}")
    return arr


def normalize(vector: np.ndarray, name: str = "vector") -> np.ndarray:
    """Unit vector along `vector`; rejects near-zero input."""
    arr = as_vec3(vector, name)
    norm = float(np.linalg.norm(arr))
    if norm < 1e-12:
        raise InvalidInputError(f"cannot normalize near-zero {name}")
    return arr / norm


@dataclass(frozen=True)
class HeadPose:
    """Head position plus unit forward (gaze) direction, world frame."""

    position: np.ndarray
    forward: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", as_vec3(self.position, "head position"))
        fwd = as_vec3(self.forward, "head forward")
        if abs(float(np.linalg.norm(fwd)) - 1.0) > UNIT_NORM_TOL:
            raise InvalidInputError(
                f"head forward must be unit length, |f| = {np.linalg.norm(fwd)!r}"
            )
        object.__setattr__(self, "forward", fwd)


@dataclass(frozen=True)
class Goal:
    """A named reachable target at a fixed world position."""

    id: str
    label: str
    position: np.ndarray

    def __post_init__(self):
        if not self.id:
            raise InvalidInputError("goal id must be non-empty")
        object.__setattr__(self, "position", as_vec3(self.position, f"goal {self.id!r}"))


@dataclass(frozen=True)
class GoalSet:
    """Ordered collection of goals; the order is the canonical state order."""

    goals: tuple[Goal, ...]

    def __post_init__(self):
        object.__setattr__(self, "goals", tuple(self.goals))
        ids = [g.id for g in self.goals]
        if len(set(ids)) != len(ids):
            raise InvalidInputError(f"duplicate goal ids: {ids}")

    def __len__(self) -> int:
        return len(self.goals)

    def __iter__(self):
        return iter(self.goals)

    def ids(self) -> list[str]:
        return [g.id for g in self.goals]

    def positions(self) -> np.ndarray:
        """Goal positions stacked as a (g, 3) array."""
        return np.array([g.position for g in self.goals], dtype=np.float64)

    def index_of(self, goal_id: str) -> int:
        for i, g in enumerate(self.goals):
            if g.id == goal_id:
                return i
        raise InvalidInputError(f"unknown goal id {goal_id!r}")

    def get(self, goal_id: str) -> Goal:
        return self.goals[self.index_of(goal_id)]

    def with_goal(self, goal: Goal) -> "GoalSet":
        if goal.id in self.ids():
            raise InvalidInputError(f"duplicate goal id {goal.id!r}")
        return GoalSet(self.goals + (goal,))

    def without_goal(self, goal_id: str) -> "GoalSet":
        idx = self.index_of(goal_id)
        return GoalSet(self.goals[:idx] + self.goals[idx + 1 :])


@dataclass(frozen=True)
class SamplePattern:
    """How candidate points are placed around the previous hand position.

    ``sphere`` distributes `count` points on a spiral lattice over the full
    sphere (hand motion is three-dimensional); ``circle`` places them evenly
    on a circle inside the plane orthogonal to `normal`, for flat tabletop
    setups.
    """

    kind: str
    count: int = DEFAULT_SAMPLE_COUNT
    normal: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("sphere", "circle"):
            raise InvalidInputError(f"unknown sample pattern kind {self.kind!r}")
        if self.count < 4:
            raise InvalidInputError(f"sample count must be >= 4, got {self.count}")
        if self.kind == "circle":
            if self.normal is None:
                raise InvalidInputError("circle pattern requires a plane normal")
            object.__setattr__(self, "normal", normalize(self.normal, "plane normal"))
        elif self.normal is not None:
            raise InvalidInputError("sphere pattern takes no plane normal")

    @classmethod
    def sphere(cls, count: int = DEFAULT_SAMPLE_COUNT) -> "SamplePattern":
        return cls(kind="sphere", count=count)

    @classmethod
    def circle(cls, normal, count: int = DEFAULT_SAMPLE_COUNT) -> "SamplePattern":
        return cls(kind="circle", count=count, normal=as_vec3(normal, "plane normal"))


@dataclass(frozen=True)
class ModulatedDistances:
    """Distances of candidate points (rows) and of the hand to each goal.

    ``matrix[i, j]`` is the distance of candidate point i to goal j and
    ``hand[j]`` the current hand-to-goal distance.
    """

    matrix: np.ndarray
    hand: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        d = np.asarray(self.hand, dtype=np.float64)
        if m.ndim != 2 or d.ndim != 1 or m.shape[1] != d.shape[0]:
            raise InvalidInputError(
                f"distance shapes disagree: matrix {m.shape}, hand {d.shape}"
            )
        if m.shape[0] < 1 or m.shape[1] < 1:
            raise InvalidInputError("distance matrix must be non-empty")
        if np.any(m < 0) or np.any(d < 0):
            raise InvalidInputError("distances must be non-negative")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "hand", d)

    @property
    def goal_count(self) -> int:
        return self.matrix.shape[1]


def gaze_validation(head: HeadPose, goals: GoalSet) -> np.ndarray:
    """Per-goal gaze alignment scores in [0, 1].

    Score j is the cosine between the head's forward axis and the unit
    direction from the head to goal j, clamped at zero so that goals behind
    the user score zero. A goal within ``GOAL_AT_HEAD_EPS`` of the head has
    no defined direction and scores zero.
    """
    if abs(float(np.linalg.norm(head.forward)) - 1.0) > UNIT_NORM_TOL:
        raise InvalidInputError("head forward must be unit length")
    rel = goals.positions() - head.position
    dist = np.linalg.norm(rel, axis=1)
    scores = np.zeros(len(goals), dtype=np.float64)
    ok = dist >= GOAL_AT_HEAD_EPS
    if np.any(ok):
        cosines = rel[ok] @ head.forward / dist[ok]
        scores[ok] = np.clip(cosines, 0.0, 1.0)
    return scores


def orientation_frame(primary, secondary=None) -> np.ndarray:
    """Right-handed orthonormal frame with its first axis along `primary`.

    The frame is a deterministic function of its inputs and co-rotates with
    them, so candidate patterns generated in it track rigid motions of the
    scene instead of being pinned to the world axes. `secondary` (any vector
    not parallel to `primary`, typically the gaze direction) fixes the roll;
    without one, or when the two are parallel, the least-aligned world axis
    is used instead.

    Returns a 3x3 matrix whose columns are the frame axes.
    """
    e1 = normalize(primary, "frame primary axis")
    candidates = []
    if secondary is not None:
        candidates.append(as_vec3(secondary, "frame secondary axis"))
    axis = np.eye(3)[int(np.argmin(np.abs(e1)))]
    candidates.append(axis)
    for ref in candidates:
        rej = ref - (ref @ e1) * e1
        norm = float(np.linalg.norm(rej))
        if norm > 1e-9:
            e2 = rej / norm
            break
    else:  # pragma: no cover - second candidate is never parallel to e1
        raise InvalidInputError("could not build an orientation frame")
    e3 = np.cross(e1, e2)
    return np.column_stack((e1, e2, e3))


def _sphere_lattice(count: int) -> np.ndarray:
    """Unit-sphere spiral lattice, shape (count, 3); deterministic."""
    i = np.arange(count, dtype=np.float64)
    z = 1.0 - 2.0 * (i + 0.5) / count
    ring = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    theta = GOLDEN_ANGLE * i
    return np.column_stack((ring * np.cos(theta), ring * np.sin(theta), z))


def sample_candidate_points(
    center,
    radius: float,
    pattern: SamplePattern,
    orientation: np.ndarray | None = None,
    min_radius: float = DEFAULT_MIN_RADIUS,
) -> np.ndarray:
    """Candidate points at `radius` around `center`, shape (count, 3).

    `orientation` (a 3x3 rotation, e.g. from :func:`orientation_frame`)
    rotates the pattern; identity placement in world axes is the default.
    For the circle pattern only the first frame axis is used, projected into
    the sampling plane, to anchor the angular origin.

    Raises :class:`PreconditionError` when `radius` is below `min_radius`;
    samples that small carry no usable motion direction and are filtered
    upstream.
    """
    c = as_vec3(center, "center")
    if not math.isfinite(radius) or radius < min_radius:
        raise PreconditionError(
            f"sample radius must be >= {min_radius!r}, got {radius!r}"
        )
    if pattern.kind == "sphere":
        directions = _sphere_lattice(pattern.count)
        if orientation is not None:
            directions = directions @ orientation.T
    else:
        normal = pattern.normal
        in_plane_ref = None
        if orientation is not None:
            ref = orientation[:, 0]
            rej = ref - (ref @ normal) * normal
            if float(np.linalg.norm(rej)) > 1e-9:
                in_plane_ref = rej / np.linalg.norm(rej)
        if in_plane_ref is None:
            frame = orientation_frame(normal)
            in_plane_ref = frame[:, 1]
        other = np.cross(normal, in_plane_ref)
        angles = 2.0 * math.pi * np.arange(pattern.count) / pattern.count
        directions = (
            np.outer(np.cos(angles), in_plane_ref) + np.outer(np.sin(angles), other)
        )
    return c + radius * directions


def modulated_distance_matrix(points: np.ndarray, hand, goals: GoalSet) -> ModulatedDistances:
    """Distances of candidate points and of the hand to every goal."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 1:
        raise PreconditionError(f"points must be a non-empty (n, 3) array, got {pts.shape}")
    if len(goals) < 1:
        raise PreconditionError("goal set must be non-empty")
    h = as_vec3(hand, "hand position")
    positions = goals.positions()
    matrix = np.linalg.norm(pts[:, None, :] - positions[None, :, :], axis=2)
    hand_dist = np.linalg.norm(h - positions, axis=1)
    return ModulatedDistances(matrix=matrix, hand=hand_dist)


def motion_validation(md: ModulatedDistances, gaze_scores: np.ndarray) -> np.ndarray:
    """Per-goal motion evidence in [0, 1], gated by the gaze scores.

    For each goal the hand's current distance is ranked inside the span of
    candidate-point distances: 1 when the move was the best possible approach
    seen by the candidates, 0 when it was the worst. The finite candidate set
    may fail to bracket the actual distance, so the ratio is clamped to
    [0, 1]. A degenerate span (all candidates equidistant, e.g. a goal at the
    previous hand position) counts as a full approach unless the hand ended
    beyond the span.
    """
    s = np.asarray(gaze_scores, dtype=np.float64)
    if s.shape != (md.goal_count,):
        raise InvalidInputError(
            f"gaze vector length {s.shape} does not match goal count {md.goal_count}"
        )
    col_max = md.matrix.max(axis=0)
    col_min = md.matrix.min(axis=0)
    span = col_max - col_min
    ratio = np.empty(md.goal_count, dtype=np.float64)
    degenerate = span < DEGENERATE_SPAN
    regular = ~degenerate
    if np.any(regular):
        raw = (col_max[regular] - md.hand[regular]) / span[regular]
        ratio[regular] = np.clip(raw, 0.0, 1.0)
    if np.any(degenerate):
        ratio[degenerate] = np.where(
            md.hand[degenerate] <= col_max[degenerate] + DEGENERATE_SPAN, 1.0, 0.0
        )
    return ratio * s
