// Control panel: model parameters, goal editing, agent mode, gesture
// fixtures, scenario playback, error toasts. DOM-building only; every
// action goes out through the send callback and the panel re-renders from
// snapshots, so the server stays the single source of truth.

import {
  gestureFixtureMessage,
  goalAddMessage,
  goalRemoveMessage,
  modeToggleMessage,
  paramUpdateMessage,
  scenarioControlMessage,
  type ClientMessage,
  type ModelParams,
} from "./protocol";
import type { UiState } from "./state";

const PARAM_KEYS: (keyof ModelParams)[] = ["alpha", "beta", "gamma", "delta", "m"];
const SCENARIOS = ["fig7_left", "fig7_middle", "fig7_right", "sweep_base"];
const FIXTURES = ["open_palm", "pointing", "pinch", "fist"];

export class ControlPanel {
  private inputs = new Map<string, HTMLInputElement>();
  private status: HTMLElement;
  private toasts: HTMLElement;
  private goalList: HTMLElement;
  private lastErrorCount = 0;

  constructor(
    root: HTMLElement,
    private send: (msg: ClientMessage) => boolean,
  ) {
    root.innerHTML = "";
    this.status = this.section(root, "session");
    const params = this.section(root, "parameters");
    for (const key of PARAM_KEYS) {
      const row = document.createElement("label");
      row.className = "param-row";
      row.textContent = key;
      const input = document.createElement("input");
      input.type = "number";
      input.step = key === "m" ? "1" : "0.01";
      input.addEventListener("change", () => {
        const value = key === "m" ? parseInt(input.value, 10) : parseFloat(input.value);
        if (!Number.isNaN(value)) this.send(paramUpdateMessage({ [key]: value }));
      });
      this.inputs.set(key, input);
      row.appendChild(input);
      params.appendChild(row);
    }

    const goals = this.section(root, "goals");
    this.goalList = document.createElement("div");
    goals.appendChild(this.goalList);
    const addButton = document.createElement("button");
    addButton.textContent = "add goal at random spot";
    addButton.addEventListener("click", () => {
      const id = `goal_${Date.now() % 100000}`;
      const x = (Math.random() - 0.5) * 2.4;
      const y = 0.6 + Math.random() * 1.2;
      this.send(goalAddMessage({ id, label: id, position: [x, y, 0.8] }));
    });
    goals.appendChild(addButton);

    const agent = this.section(root, "robot agent");
    for (const mode of ["off", "conflict_avoid", "teleop"] as const) {
      const button = document.createElement("button");
      button.textContent = mode;
      button.addEventListener("click", () => this.send(modeToggleMessage(mode)));
      agent.appendChild(button);
    }

    const gestures = this.section(root, "gesture fixtures");
    for (const fixture of FIXTURES) {
      const button = document.createElement("button");
      button.textContent = fixture;
      button.addEventListener("click", () => this.send(gestureFixtureMessage(fixture)));
      gestures.appendChild(button);
    }

    const scenarios = this.section(root, "scenario playback");
    const picker = document.createElement("select");
    for (const name of SCENARIOS) {
      const option = document.createElement("option");
      option.value = name;
      option.textContent = name;
      picker.appendChild(option);
    }
    scenarios.appendChild(picker);
    for (const op of ["start", "stop"] as const) {
      const button = document.createElement("button");
      button.textContent = op;
      button.addEventListener("click", () =>
        this.send(scenarioControlMessage(op, op === "start" ? picker.value : undefined)),
      );
      scenarios.appendChild(button);
    }

    this.toasts = this.section(root, "messages");
  }

  private section(root: HTMLElement, title: string): HTMLElement {
    const wrap = document.createElement("div");
    wrap.className = "panel-section";
    const heading = document.createElement("h3");
    heading.textContent = title;
    wrap.appendChild(heading);
    root.appendChild(wrap);
    return wrap;
  }

  render(state: UiState, connected: boolean): void {
    const latest = state.latest;
    this.status.querySelector("p")?.remove();
    const line = document.createElement("p");
    line.textContent = connected
      ? `connected · ${state.estimateCount} estimates (${state.skippedCount} skipped) · ` +
        `gesture: ${state.gesture} · agent: ${state.agentMode ?? "off"}` +
        (latest?.phi != null ? ` · phi ${latest.phi.toFixed(2)}` : "")
      : "disconnected — reconnecting with a fresh session…";
    this.status.appendChild(line);

    if (state.params) {
      for (const key of PARAM_KEYS) {
        const input = this.inputs.get(key)!;
        if (document.activeElement !== input) {
          input.value = String(state.params[key]);
        }
      }
    }

    this.goalList.innerHTML = "";
    for (const goal of state.goals) {
      const row = document.createElement("div");
      row.className = "goal-row";
      const name = document.createElement("span");
      name.textContent = `${goal.id} (${goal.position[0].toFixed(2)}, ${goal.position[1].toFixed(2)})`;
      if (state.highlight === goal.id) name.style.fontWeight = "bold";
      const remove = document.createElement("button");
      remove.textContent = "×";
      remove.addEventListener("click", () => this.send(goalRemoveMessage(goal.id)));
      row.append(name, remove);
      this.goalList.appendChild(row);
    }

    if (state.errors.length !== this.lastErrorCount) {
      this.lastErrorCount = state.errors.length;
      this.toasts.querySelectorAll("p").forEach((p) => p.remove());
      for (const error of state.errors.slice(-3)) {
        const toast = document.createElement("p");
        toast.className = "toast";
        toast.textContent = `error ${error.code}: ${error.detail}`;
        this.toasts.appendChild(toast);
      }
    }
  }
}
