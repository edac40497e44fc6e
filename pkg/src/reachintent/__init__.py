"""Streaming goal-intention estimation from head gaze and hand motion.

The core pipeline turns each observation (head pose + hand position) into
per-goal evidence, feeds it through a hidden-state model over
``[goals..., unknown, irrational]`` and decodes the running belief online.
Around that sit a scenario simulator, robot interaction policies, a
replay/sweep CLI and a WebSocket playground server.
"""

__version__ = "0.1.0"

from .errors import (
    InconsistencyError,
    InvalidInputError,
    ParameterError,
    PreconditionError,
    ReachIntentError,
    ScenarioFormatError,
    StreamError,
    UndefinedPoseError,
)
from .geometry import (
    Goal,
    GoalSet,
    HeadPose,
    ModulatedDistances,
    SamplePattern,
    gaze_validation,
    modulated_distance_matrix,
    motion_validation,
    orientation_frame,
    sample_candidate_points,
)
from .gesture import Gesture, HandSkeleton, classify_gesture, finger_curl
from .hmm import (
    HiddenState,
    HmmParams,
    batch_viterbi,
    build_transition,
    delta_gap,
    emission_row,
    initial_belief,
    phi,
    viterbi_path,
    viterbi_step,
)
from .robot import AgentConfig, AgentEvent, RobotState, agent_step
from .scenario import Scenario, ScriptSegment, builtin_scenarios, load_scenario, save_scenario, synthesize
from .session import IntentEstimate, Observation, Session, SessionConfig, new_session

__all__ = [
    "AgentConfig",
    "AgentEvent",
    "Goal",
    "GoalSet",
    "Gesture",
    "HandSkeleton",
    "HeadPose",
    "HiddenState",
    "HmmParams",
    "IntentEstimate",
    "InconsistencyError",
    "InvalidInputError",
    "ModulatedDistances",
    "Observation",
    "ParameterError",
    "PreconditionError",
    "ReachIntentError",
    "RobotState",
    "SamplePattern",
    "Scenario",
    "ScenarioFormatError",
    "ScriptSegment",
    "Session",
    "SessionConfig",
    "StreamError",
    "UndefinedPoseError",
    "agent_step",
    "batch_viterbi",
    "build_transition",
    "builtin_scenarios",
    "classify_gesture",
    "delta_gap",
    "emission_row",
    "finger_curl",
    "gaze_validation",
    "initial_belief",
    "load_scenario",
    "modulated_distance_matrix",
    "motion_validation",
    "new_session",
    "orientation_frame",
    "phi",
    "sample_candidate_points",
    "save_scenario",
    "synthesize",
    "viterbi_path",
    "viterbi_step",
]
