// Wire types for the estimation server. Every frame is JSON with `v: 1`.

export const SCHEMA_VERSION = 1;

export type Vec3 = [number, number, number];

export interface GoalInfo {
  id: string;
  label: string;
  position: Vec3;
}

export interface ModelParams {
  alpha: number;
  beta: number;
  gamma: number;
  delta: number;
  m: number;
}

export interface ArgmaxState {
  kind: "goal" | "unknown" | "irrational";
  id?: string;
}

export interface EstimateMessage {
  v: 1;
  type: "estimate";
  t: number;
  per_goal: Record<string, number>;
  p_unknown: number;
  p_irrational: number;
  argmax: ArgmaxState;
  phi: number | null;
  delta_gap: number | null;
  skipped: boolean;
}

export interface SnapshotMessage {
  v: 1;
  type: "snapshot";
  goals: GoalInfo[];
  params: ModelParams;
  agent: {
    mode: string;
    theta_conflict: number;
    theta_teleop: number;
    speed: number;
    seed: number;
  } | null;
  scenario: string | null;
}

export interface RobotUpdateMessage {
  v: 1;
  type: "robot_update";
  position: Vec3;
  target: string | null;
  stopped: boolean;
  events: { kind: string; [key: string]: unknown }[];
}

export interface GestureLabelMessage {
  v: 1;
  type: "gesture_label";
  gesture: string;
}

export interface ErrorMessage {
  v: 1;
  type: "error";
  code: number;
  detail: string;
}

export type ServerMessage =
  | EstimateMessage
  | SnapshotMessage
  | RobotUpdateMessage
  | GestureLabelMessage
  | ErrorMessage;

const SERVER_TYPES = new Set([
  "estimate",
  "snapshot",
  "robot_update",
  "gesture_label",
  "error",
]);

export function decodeServerMessage(raw: string): ServerMessage | null {
  let parsed: unknown;
  try {
    parsed = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof parsed !== "object" || parsed === null) return null;
  const msg = parsed as { v?: unknown; type?: unknown };
  if (msg.v !== SCHEMA_VERSION || typeof msg.type !== "string") return null;
  if (!SERVER_TYPES.has(msg.type)) return null;
  return parsed as ServerMessage;
}

export function observationMessage(t: number, headPos: Vec3, forward: Vec3, hand: Vec3) {
  return {
    v: SCHEMA_VERSION,
    type: "observation",
    t,
    head: { pos: headPos, forward },
    hand,
  } as const;
}

export function paramUpdateMessage(changes: Partial<ModelParams>) {
  return { v: SCHEMA_VERSION, type: "param_update", ...changes } as const;
}

export function goalAddMessage(goal: GoalInfo) {
  return { v: SCHEMA_VERSION, type: "goal_edit", op: "add", goal } as const;
}

export function goalRemoveMessage(id: string) {
  return { v: SCHEMA_VERSION, type: "goal_edit", op: "remove", id } as const;
}

export function modeToggleMessage(mode: "conflict_avoid" | "teleop" | "off", seed = 0) {
  return { v: SCHEMA_VERSION, type: "mode_toggle", mode, seed } as const;
}

export function gestureFixtureMessage(fixture: string) {
  return { v: SCHEMA_VERSION, type: "gesture_pose", fixture } as const;
}

export function scenarioControlMessage(op: "load" | "start" | "stop", name?: string) {
  return { v: SCHEMA_VERSION, type: "scenario_control", op, ...(name ? { name } : {}) } as const;
}

export type ClientMessage =
  | ReturnType<typeof observationMessage>
  | ReturnType<typeof paramUpdateMessage>
  | ReturnType<typeof goalAddMessage>
  | ReturnType<typeof goalRemoveMessage>
  | ReturnType<typeof modeToggleMessage>
  | ReturnType<typeof gestureFixtureMessage>
  | ReturnType<typeof scenarioControlMessage>;
