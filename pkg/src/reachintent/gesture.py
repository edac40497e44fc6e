"""Rule-based classification of hand actions from 21-joint skeletons.

The skeleton layout is wrist first, then four joints per finger (base,
middle, upper, tip) for thumb, index, middle, ring and pinky. Curl per
finger is the sum of the bend angles at its two interior joints, so a
straight finger scores 0 and a right angle at both joints scores pi.

The rule table, thresholds and label precedence are heuristic stand-ins for
a learned classifier; in particular the grasp-intent/grasped split rests on
a simple thumb-index aperture cue, not on contact sensing. They are meant
to give downstream consumers a usable stop/point control channel, not to be
a hand-tracking benchmark.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, UndefinedPoseError

JOINT_COUNT = 21
WRIST = 0
FINGER_NAMES = ("thumb", "index", "middle", "ring", "pinky")
# Joint indices (base, middle, upper, tip) per finger.
FINGER_JOINTS = {name: tuple(range(1 + 4 * i, 5 + 4 * i)) for i, name in enumerate(FINGER_NAMES)}
THUMB_TIP = FINGER_JOINTS["thumb"][3]
INDEX_TIP = FINGER_JOINTS["index"][3]

STRAIGHT_CURL_MAX = 0.5      # rad, per finger: at most this counts as extended
FOLDED_CURL_MIN = 1.5        # rad, per finger: at least this counts as folded
GRASP_APERTURE = 0.03        # m, thumb-tip to index-tip distance when holding
DEGENERATE_SEGMENT = 1e-9    # m, joint chain segments shorter than this are undefined

DEFAULT_GESTURE_WINDOW = 5


class Gesture(enum.Enum):
    GRASP_INTENT = "grasp_intent"
    GRASPED = "grasped"
    POINTING = "pointing"
    STOP = "stop"
    NONE = "none"


@dataclass(frozen=True)
class HandSkeleton:
    """21 world-frame joint positions, shape (21, 3)."""

    joints: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.joints, dtype=np.float64)
        if arr.shape != (JOINT_COUNT, 3):
            raise InvalidInputError(f"skeleton must have shape (21, 3), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("skeleton joints must be finite")
        object.__setattr__(self, "joints", arr)

    def aperture(self) -> float:
        """Thumb-tip to index-tip distance in metres."""
        return float(np.linalg.norm(self.joints[THUMB_TIP] - self.joints[INDEX_TIP]))


def _bend_angle(a: np.ndarray, b: np.ndarray) -> float:
    """Deviation from straight between two consecutive bone segments."""
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na < DEGENERATE_SEGMENT or nb < DEGENERATE_SEGMENT:
        raise UndefinedPoseError("coincident joints: bend angle undefined")
    cosine = float(np.clip(a @ b / (na * nb), -1.0, 1.0))
    return math.acos(cosine)


def finger_curl(skel: HandSkeleton) -> np.ndarray:
    """Per-finger curl angles in radians, ordered as FINGER_NAMES."""
    curls = np.empty(5, dtype=np.float64)
    for i, name in enumerate(FINGER_NAMES):
        j0, j1, j2, j3 = (skel.joints[j] for j in FINGER_JOINTS[name])
        curls[i] = _bend_angle(j1 - j0, j2 - j1) + _bend_angle(j2 - j1, j3 - j2)
    return curls


def classify_gesture(history: Sequence[HandSkeleton]) -> Gesture:
    """Label the most recent skeleton given a short history.

    Precedence on overlap: grasped > stop > pointing > grasp intent. Grasp
    intent additionally requires the thumb-index aperture to have strictly
    decreased across the whole history, so it needs at least two samples.
    """
    if len(history) < 1:
        raise InvalidInputError("gesture history must contain at least one skeleton")
    latest = history[-1]
    curls = finger_curl(latest)

    if latest.aperture() < GRASP_APERTURE:
        return Gesture.GRASPED
    if np.all(curls < STRAIGHT_CURL_MAX):
        return Gesture.STOP
    index_curl = curls[FINGER_NAMES.index("index")]
    others = np.delete(curls, FINGER_NAMES.index("index"))
    if index_curl < STRAIGHT_CURL_MAX and np.all(others > FOLDED_CURL_MIN):
        return Gesture.POINTING
    if 0.5 <= float(curls.mean()) <= 1.5 and len(history) >= 2:
        apertures = [skel.aperture() for skel in history]
        if all(b < a for a, b in zip(apertures, apertures[1:])):
            return Gesture.GRASP_INTENT
    return Gesture.NONE


def _finger_chain(base: np.ndarray, direction: np.ndarray, bend_axis: np.ndarray,
                  bend: float, segment: float = 0.03) -> list[np.ndarray]:
    """Four joints from `base`, bending by `bend` radians at each interior joint."""
    direction = direction / np.linalg.norm(direction)
    bend_axis = bend_axis / np.linalg.norm(bend_axis)
    joints = [base]
    current = direction
    for step in range(3):
        joints.append(joints[-1] + segment * current)
        if step < 2:
            current = _rotate(current, bend_axis, bend)
    return joints


def _rotate(vector: np.ndarray, axis: np.ndarray, angle: float) -> np.ndarray:
    cos_a, sin_a = math.cos(angle), math.sin(angle)
    return (
        vector * cos_a
        + np.cross(axis, vector) * sin_a
        + axis * (axis @ vector) * (1.0 - cos_a)
    )


def make_skeleton(finger_bends: dict[str, float] | None = None,
                  thumb_spread: float = 0.9) -> HandSkeleton:
    """Synthetic right-hand skeleton in a canonical palm-up frame.

    `finger_bends` maps finger names to the bend angle applied at each of
    the two interior joints (curl = 2 * bend). `thumb_spread` rotates the
    thumb away from the index finger in the palm plane; small values bring
    the thumb tip toward the index tip, which is how the pinch fixtures are
    built.
    """
    bends = {name: 0.0 for name in FINGER_NAMES}
    if finger_bends:
        unknown = set(finger_bends) - set(FINGER_NAMES)
        if unknown:
            raise InvalidInputError(f"unknown finger names: {sorted(unknown)}")
        bends.update(finger_bends)

    joints = np.zeros((JOINT_COUNT, 3), dtype=np.float64)
    bend_axis = np.array([1.0, 0.0, 0.0])  # fingers fold toward the palm (-z)
    x_offsets = {"index": -0.02, "middle": 0.0, "ring": 0.02, "pinky": 0.04}
    for name, x in x_offsets.items():
        base = np.array([x, 0.09, 0.0])
        chain = _finger_chain(base, np.array([0.0, 1.0, 0.0]), bend_axis, bends[name])
        joints[list(FINGER_JOINTS[name])] = chain
    thumb_dir = _rotate(np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0]), thumb_spread)
    thumb_base = np.array([-0.03, 0.03, 0.0])
    thumb_axis = _rotate(bend_axis, np.array([0.0, 0.0, 1.0]), thumb_spread)
    chain = _finger_chain(thumb_base, thumb_dir, thumb_axis, bends["thumb"])
    joints[list(FINGER_JOINTS["thumb"])] = chain
    return HandSkeleton(joints=joints)


def open_palm() -> HandSkeleton:
    """All fingers straight; thumb splayed well clear of the index tip."""
    return make_skeleton()


def pointing_hand() -> HandSkeleton:
    """Index straight, every other finger folded."""
    return make_skeleton({name: 0.9 for name in FINGER_NAMES if name != "index"})


def fist() -> HandSkeleton:
    """All fingers bent hard; curls land above 2 radians."""
    return make_skeleton({name: 1.2 for name in FINGER_NAMES})


def pinch(aperture: float = 0.02) -> HandSkeleton:
    """Thumb tip brought within `aperture` of the index tip."""
    skel = make_skeleton({name: 0.5 for name in FINGER_NAMES if name != "thumb"})
    joints = skel.joints.copy()
    index_tip = joints[INDEX_TIP]
    direction = joints[THUMB_TIP] - index_tip
    direction /= np.linalg.norm(direction)
    shift = (index_tip + aperture * direction) - joints[THUMB_TIP]
    joints[list(FINGER_JOINTS["thumb"])] += shift
    return HandSkeleton(joints=joints)


def closing_sequence(steps: int = 4) -> list[HandSkeleton]:
    """Half-curled hand whose aperture shrinks monotonically (grasp intent)."""
    frames = []
    for i in range(steps):
        skel = make_skeleton(
            {name: 0.45 for name in FINGER_NAMES},
            thumb_spread=0.9 - 0.12 * i,
        )
        frames.append(skel)
    return frames


GESTURE_FIXTURES = {
    "open_palm": open_palm,
    "pointing": pointing_hand,
    "fist": fist,
    "pinch": pinch,
}
