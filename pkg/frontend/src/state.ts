// UI state as a pure function of the server-message history. Rendering
// reads this store; nothing in here touches the DOM, so replaying a
// recorded message log reproduces the exact same state (and chart).

import type {
  EstimateMessage,
  GoalInfo,
  ModelParams,
  RobotUpdateMessage,
  ServerMessage,
  Vec3,
} from "./protocol";

export const CHART_CAPACITY = 600; // 20 s at 30 Hz

export interface ChartPoint {
  t: number;
  perGoal: Record<string, number>;
  pUnknown: number;
  pIrrational: number;
  phi: number | null;
}

export interface ToastEntry {
  code: number;
  detail: string;
}

export interface UiState {
  goals: GoalInfo[];
  params: ModelParams | null;
  agentMode: string | null;
  scenario: string | null;
  /** Highlight target: a goal id, "unknown", or "irrational". */
  highlight: string;
  latest: EstimateMessage | null;
  chart: ChartPoint[];
  robot: { position: Vec3; target: string | null; stopped: boolean } | null;
  conflictFlash: number;
  gesture: string;
  errors: ToastEntry[];
  estimateCount: number;
  skippedCount: number;
}

export function initialUiState(): UiState {
  return {
    goals: [],
    params: null,
    agentMode: null,
    scenario: null,
    highlight: "unknown",
    latest: null,
    chart: [],
    robot: null,
    conflictFlash: 0,
    gesture: "none",
    errors: [],
    estimateCount: 0,
    skippedCount: 0,
  };
}

function highlightOf(estimate: EstimateMessage): string {
  if (estimate.argmax.kind === "goal") return estimate.argmax.id ?? "unknown";
  return estimate.argmax.kind;
}

function applyEstimate(state: UiState, msg: EstimateMessage): UiState {
  const next: UiState = {
    ...state,
    latest: msg,
    estimateCount: state.estimateCount + 1,
    skippedCount: state.skippedCount + (msg.skipped ? 1 : 0),
  };
  if (msg.skipped) return next;
  const point: ChartPoint = {
    t: msg.t,
    perGoal: { ...msg.per_goal },
    pUnknown: msg.p_unknown,
    pIrrational: msg.p_irrational,
    phi: msg.phi,
  };
  const chart = [...state.chart, point];
  if (chart.length > CHART_CAPACITY) chart.splice(0, chart.length - CHART_CAPACITY);
  next.chart = chart;
  next.highlight = highlightOf(msg);
  return next;
}

function applyRobot(state: UiState, msg: RobotUpdateMessage): UiState {
  const conflicted = msg.events.some((event) => event.kind === "conflict");
  return {
    ...state,
    robot: { position: msg.position, target: msg.target, stopped: msg.stopped },
    conflictFlash: conflicted ? state.conflictFlash + 1 : state.conflictFlash,
  };
}

/** Pure reducer: same state + same message always yields the same state. */
export function applyServerMessage(state: UiState, msg: ServerMessage): UiState {
  switch (msg.type) {
    case "estimate":
      return applyEstimate(state, msg);
    case "snapshot":
      return {
        ...state,
        goals: msg.goals,
        params: msg.params,
        agentMode: msg.agent?.mode ?? null,
        scenario: msg.scenario,
        robot: msg.agent ? state.robot : null,
      };
    case "robot_update":
      return applyRobot(state, msg);
    case "gesture_label":
      return { ...state, gesture: msg.gesture };
    case "error":
      return { ...state, errors: [...state.errors.slice(-4), { code: msg.code, detail: msg.detail }] };
    default:
      return state;
  }
}

export function replay(messages: ServerMessage[]): UiState {
  return messages.reduce(applyServerMessage, initialUiState());
}

/** Probability series must sum to one on every charted (non-skipped) point. */
export function chartSums(state: UiState): number[] {
  return state.chart.map(
    (point) =>
      Object.values(point.perGoal).reduce((a, b) => a + b, 0) + point.pUnknown + point.pIrrational,
  );
}
