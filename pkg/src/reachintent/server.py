"""WebSocket boundary between the estimator core and interactive clients.

One connection owns one session; connections are independent and messages
on a connection are processed strictly in order. Every message carries a
``v: 1`` schema field. Incoming kinds: observation, goal_edit, param_update,
mode_toggle, gesture_pose, scenario_control. Outgoing kinds: estimate,
robot_update, gesture_label, snapshot, error. Every observation is answered
by exactly one estimate or one error; errors use code 400 for malformed
input, 409 for constraint violations and 422 for stream-order violations.
"""

from __future__ import annotations

import asyncio
import json
from collections import deque

import numpy as np
from aiohttp import WSMsgType, web

from . import __version__
from .errors import InvalidInputError, ParameterError, ReachIntentError, StreamError
from .geometry import Goal, GoalSet, HeadPose
from .gesture import DEFAULT_GESTURE_WINDOW, GESTURE_FIXTURES, Gesture, HandSkeleton, classify_gesture
from .robot import AgentConfig, RobotState, agent_step
from .scenario import builtin_scenarios, default_goals, synthesize
from .session import IntentEstimate, Observation, Session, SessionConfig

SCHEMA_VERSION = 1

ROBOT_HOME = (0.0, 2.3, 0.8)


def _vec(value) -> list[float]:
    return [float(x) for x in value]


class ConnectionState:
    """Per-connection session, robot agent and gesture bookkeeping."""

    def __init__(self, goals: GoalSet | None = None, config: SessionConfig | None = None):
        self.config = config or SessionConfig()
        self.session = Session(self.config, goals or default_goals())
        self.agent_config: AgentConfig | None = None
        self.robot: RobotState | None = None
        self.rng: np.random.Generator | None = None
        self.gesture_history: deque[HandSkeleton] = deque(maxlen=DEFAULT_GESTURE_WINDOW)
        self.last_gesture: Gesture = Gesture.NONE
        self.prev_obs_t: float | None = None
        self.scenario_name: str | None = None
        self.playback_request: str | None = None
        self.playback_stop = False

    def reset_session(self, goals: GoalSet) -> None:
        self.session = Session(self.config, goals)
        self.prev_obs_t = None


def error_message(code: int, detail: str) -> dict:
    return {"v": SCHEMA_VERSION, "type": "error", "code": code, "detail": detail}


def estimate_message(est: IntentEstimate) -> dict:
    argmax: dict = {"kind": est.argmax.kind}
    if est.argmax.kind == "goal":
        argmax["id"] = est.argmax_label.removeprefix("goal:")
    return {
        "v": SCHEMA_VERSION,
        "type": "estimate",
        "t": est.t,
        "per_goal": est.per_goal,
        "p_unknown": est.p_unknown,
        "p_irrational": est.p_irrational,
        "argmax": argmax,
        "phi": est.phi,
        "delta_gap": est.delta_gap,
        "skipped": est.skipped,
    }


def snapshot_message(state: ConnectionState) -> dict:
    params = state.session.params
    agent = None
    if state.agent_config is not None:
        agent = {
            "mode": state.agent_config.mode,
            "theta_conflict": state.agent_config.theta_conflict,
            "theta_teleop": state.agent_config.theta_teleop,
            "speed": state.agent_config.speed,
            "seed": state.agent_config.seed,
        }
    return {
        "v": SCHEMA_VERSION,
        "type": "snapshot",
        "goals": [
            {"id": g.id, "label": g.label, "position": _vec(g.position)}
            for g in state.session.goals
        ],
        "params": {
            "alpha": params.alpha,
            "beta": params.beta,
            "gamma": params.gamma,
            "delta": params.delta,
            "m": params.m,
        },
        "agent": agent,
        "scenario": state.scenario_name,
    }


def robot_update_message(state: ConnectionState, events) -> dict:
    robot = state.robot
    return {
        "v": SCHEMA_VERSION,
        "type": "robot_update",
        "position": _vec(robot.position),
        "target": robot.target,
        "stopped": robot.stopped,
        "events": [event.to_dict() for event in events],
    }


def _parse_observation(msg: dict) -> Observation:
    try:
        head = msg["head"]
        return Observation(
            t=float(msg["t"]),
            head=HeadPose(position=head["pos"], forward=head["forward"]),
            hand=msg["hand"],
        )
    except (KeyError, TypeError, ValueError, InvalidInputError) as exc:
        raise InvalidInputError(f"bad observation payload: {exc}") from exc


def _observe_and_respond(state: ConnectionState, obs: Observation) -> list[dict]:
    try:
        est = state.session.observe(obs)
    except StreamError as exc:
        return [error_message(422, str(exc))]
    out = [estimate_message(est)]
    if state.agent_config is not None and state.robot is not None:
        dt = 1.0 / 30.0 if state.prev_obs_t is None else obs.t - state.prev_obs_t
        state.robot, events = agent_step(
            state.robot,
            est,
            state.session.goals,
            state.last_gesture,
            max(dt, 1e-3),
            state.agent_config,
            state.rng,
        )
        out.append(robot_update_message(state, events))
    state.prev_obs_t = float(obs.t)
    return out


def _handle_observation(state: ConnectionState, msg: dict) -> list[dict]:
    return _observe_and_respond(state, _parse_observation(msg))


def _handle_goal_edit(state: ConnectionState, msg: dict) -> list[dict]:
    op = msg.get("op")
    if op == "add":
        raw = msg.get("goal")
        if not isinstance(raw, dict):
            return [error_message(400, "goal_edit add needs a goal object")]
        try:
            goal = Goal(
                id=str(raw["id"]),
                label=str(raw.get("label", raw["id"])),
                position=raw["position"],
            )
        except (KeyError, TypeError, ValueError) as exc:
            return [error_message(400, f"bad goal payload: {exc}")]
        try:
            state.session.add_goal(goal)
        except (ParameterError, InvalidInputError) as exc:
            return [error_message(409, str(exc))]
    elif op == "remove":
        goal_id = msg.get("id")
        if not isinstance(goal_id, str):
            return [error_message(400, "goal_edit remove needs an id")]
        try:
            state.session.remove_goal(goal_id)
        except (ParameterError, InvalidInputError) as exc:
            return [error_message(409, str(exc))]
    else:
        return [error_message(400, f"unknown goal_edit op {op!r}")]
    return [snapshot_message(state)]


def _handle_param_update(state: ConnectionState, msg: dict) -> list[dict]:
    changes = {}
    for name in ("alpha", "beta", "gamma", "delta", "m"):
        if name in msg:
            changes[name] = int(msg[name]) if name == "m" else float(msg[name])
    if not changes:
        return [error_message(400, "param_update carries no recognized parameters")]
    try:
        params = state.session.params.updated(**changes)
        state.session.update_params(params)
    except (ParameterError, TypeError, ValueError) as exc:
        return [error_message(409, str(exc))]
    return [snapshot_message(state)]


def _handle_mode_toggle(state: ConnectionState, msg: dict) -> list[dict]:
    mode = msg.get("mode")
    if mode in (None, "off"):
        state.agent_config = None
        state.robot = None
        state.rng = None
        return [snapshot_message(state)]
    try:
        config = AgentConfig(
            mode=str(mode),
            theta_conflict=float(msg.get("theta_conflict", 0.5)),
            theta_teleop=float(msg.get("theta_teleop", 0.7)),
            speed=float(msg.get("speed", 0.2)),
            seed=int(msg.get("seed", 0)),
        )
    except (ParameterError, TypeError, ValueError) as exc:
        return [error_message(400, f"bad agent config: {exc}")]
    state.agent_config = config
    state.rng = np.random.default_rng(config.seed)
    state.robot = RobotState(position=ROBOT_HOME, target=None, speed=config.speed)
    return [snapshot_message(state)]


def _handle_gesture_pose(state: ConnectionState, msg: dict) -> list[dict]:
    if "fixture" in msg:
        name = msg["fixture"]
        builder = GESTURE_FIXTURES.get(name)
        if builder is None:
            return [error_message(400, f"unknown gesture fixture {name!r}")]
        skeleton = builder()
    elif "joints" in msg:
        try:
            skeleton = HandSkeleton(joints=np.asarray(msg["joints"], dtype=np.float64))
        except (InvalidInputError, TypeError, ValueError) as exc:
            return [error_message(400, f"bad skeleton: {exc}")]
    else:
        return [error_message(400, "gesture_pose needs 'fixture' or 'joints'")]
    state.gesture_history.append(skeleton)
    gesture = classify_gesture(list(state.gesture_history))
    state.last_gesture = gesture
    return [{"v": SCHEMA_VERSION, "type": "gesture_label", "gesture": gesture.value}]


def _handle_scenario_control(state: ConnectionState, msg: dict) -> list[dict]:
    op = msg.get("op")
    name = msg.get("name")
    catalogue = builtin_scenarios()
    if op == "load":
        if name not in catalogue:
            return [error_message(400, f"unknown scenario {name!r}")]
        state.scenario_name = name
        state.reset_session(catalogue[name].goals)
        return [snapshot_message(state)]
    if op == "start":
        target = name or state.scenario_name
        if target not in catalogue:
            return [error_message(400, f"unknown scenario {target!r}")]
        if state.scenario_name != target:
            state.scenario_name = target
            state.reset_session(catalogue[target].goals)
        state.playback_request = target
        return [snapshot_message(state)]
    if op == "stop":
        state.playback_stop = True
        return [snapshot_message(state)]
    return [error_message(400, f"unknown scenario_control op {op!r}")]


_HANDLERS = {
    "observation": _handle_observation,
    "goal_edit": _handle_goal_edit,
    "param_update": _handle_param_update,
    "mode_toggle": _handle_mode_toggle,
    "gesture_pose": _handle_gesture_pose,
    "scenario_control": _handle_scenario_control,
}


def handle_message(state: ConnectionState, msg: dict) -> list[dict]:
    """Process one already-decoded client message; never raises."""
    if not isinstance(msg, dict):
        return [error_message(400, "message must be a JSON object")]
    if msg.get("v") != SCHEMA_VERSION:
        return [error_message(400, f"unsupported schema version {msg.get('v')!r}")]
    handler = _HANDLERS.get(msg.get("type"))
    if handler is None:
        return [error_message(400, f"unknown message type {msg.get('type')!r}")]
    try:
        return handler(state, msg)
    except ReachIntentError as exc:
        return [error_message(400, str(exc))]


async def _playback(ws: web.WebSocketResponse, state: ConnectionState, name: str) -> None:
    """Stream a builtin scenario through the session at its native rate."""
    sc = builtin_scenarios()[name]
    delay = 1.0 / sc.rate
    offset = state.prev_obs_t + delay if state.prev_obs_t is not None else 0.0
    for obs in synthesize(sc):
        if state.playback_stop:
            break
        shifted = Observation(t=obs.t + offset, head=obs.head, hand=obs.hand)
        for message in _observe_and_respond(state, shifted):
            await ws.send_json(message)
        await asyncio.sleep(delay)
    state.playback_stop = False


async def websocket_handler(request: web.Request) -> web.WebSocketResponse:
    ws = web.WebSocketResponse()
    await ws.prepare(request)
    state = ConnectionState()
    playback_task: asyncio.Task | None = None
    await ws.send_json(snapshot_message(state))
    try:
        async for raw in ws:
            if raw.type != WSMsgType.TEXT:
                break
            try:
                msg = json.loads(raw.data)
            except json.JSONDecodeError as exc:
                await ws.send_json(error_message(400, f"invalid JSON: {exc}"))
                continue
            for message in handle_message(state, msg):
                await ws.send_json(message)
            if state.playback_request is not None:
                name = state.playback_request
                state.playback_request = None
                state.playback_stop = False
                if playback_task is not None and not playback_task.done():
                    state.playback_stop = True
                    await playback_task
                    state.playback_stop = False
                playback_task = asyncio.create_task(_playback(ws, state, name))
            elif state.playback_stop and playback_task is not None:
                if not playback_task.done():
                    await playback_task
                playback_task = None
    finally:
        state.playback_stop = True
        if playback_task is not None and not playback_task.done():
            playback_task.cancel()
    return ws


async def health_handler(_request: web.Request) -> web.Response:
    return web.json_response({"status": "ok", "name": "reachintent", "version": __version__})


async def index_handler(request: web.Request) -> web.Response:
    static_dir = request.app[STATIC_DIR_KEY]
    if static_dir is None:
        return web.Response(
            text="reachintent stream server; connect a playground client to /ws",
            content_type="text/plain",
        )
    return web.FileResponse(static_dir / "index.html")


STATIC_DIR_KEY = web.AppKey("static_dir", object)


def make_app(static_dir=None) -> web.Application:
    from pathlib import Path

    app = web.Application()
    app[STATIC_DIR_KEY] = Path(static_dir) if static_dir else None
    app.router.add_get("/healthz", health_handler)
    app.router.add_get("/ws", websocket_handler)
    app.router.add_get("/", index_handler)
    if app[STATIC_DIR_KEY] is not None:
        app.router.add_static("/", app[STATIC_DIR_KEY])
    return app


def run_server(host: str, port: int, static_dir=None) -> None:
    """Run until interrupted; OSError (e.g. bind failure) propagates."""
    app = make_app(static_dir)
    web.run_app(app, host=host, port=port, print=None, handle_signals=True)
