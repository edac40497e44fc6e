"""Shared test utilities: rotations, rigid transforms, brute-force decoding."""

import itertools

import numpy as np

from reachintent.geometry import GoalSet, Goal, HeadPose
from reachintent.hmm import state_to_index
from reachintent.session import Observation


def rotation_matrix(axis, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=np.float64)
    axis = axis / np.linalg.norm(axis)
    x, y, z = axis
    c, s = np.cos(angle), np.sin(angle)
    C = 1.0 - c
    return np.array(
        [
            [c + x * x * C, x * y * C - z * s, x * z * C + y * s],
            [y * x * C + z * s, c + y * y * C, y * z * C - x * s],
            [z * x * C - y * s, z * y * C + x * s, c + z * z * C],
        ]
    )


def transform_observation(obs: Observation, rotation: np.ndarray, translation) -> Observation:
    translation = np.asarray(translation, dtype=np.float64)
    return Observation(
        t=obs.t,
        head=HeadPose(
            position=rotation @ obs.head.position + translation,
            forward=rotation @ obs.head.forward,
        ),
        hand=rotation @ obs.hand + translation,
    )


def transform_goals(goals: GoalSet, rotation: np.ndarray, translation) -> GoalSet:
    translation = np.asarray(translation, dtype=np.float64)
    return GoalSet(
        tuple(
            Goal(id=g.id, label=g.label, position=rotation @ g.position + translation)
            for g in goals
        )
    )


def sequence_score(transition: np.ndarray, initial: np.ndarray, rows, indices) -> float:
    """Max-product score of one state sequence, maximizing over the anchor state."""
    n = transition.shape[0]
    score = max(initial[i] * transition[i, indices[0]] for i in range(n))
    score *= rows[0][indices[0]]
    for t in range(1, len(rows)):
        score *= transition[indices[t - 1], indices[t]] * rows[t][indices[t]]
    return score


def brute_force_best(transition: np.ndarray, initial: np.ndarray, rows):
    """Exhaustive max-product decode; returns (best score, best sequence)."""
    n = transition.shape[0]
    best_score, best_seq = -1.0, None
    for seq in itertools.product(range(n), repeat=len(rows)):
        score = sequence_score(transition, initial, rows, seq)
        if score > best_score:
            best_score, best_seq = score, seq
    return best_score, best_seq


def path_indices(path, goal_count: int) -> list[int]:
    return [state_to_index(state, goal_count) for state in path]
