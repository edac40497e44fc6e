// Rolling strip chart of the belief over every state plus the evidence peak.

import type { UiState } from "./state";
import { CHART_CAPACITY } from "./state";

const SERIES_COLORS: Record<string, string> = {
  cylinder: "#3a9e4f",
  cube: "#c94f41",
  sphere: "#3f6fc9",
  unknown: "#999999",
  irrational: "#e0483a",
  phi: "#f0dc78",
};
const FALLBACK = "#c08fd0";

export class StripChart {
  constructor(
    private ctx: CanvasRenderingContext2D,
    private width: number,
    private height: number,
  ) {}

  draw(state: UiState): void {
    const { ctx, width, height } = this;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#101214";
    ctx.fillRect(0, 0, width, height);
    ctx.strokeStyle = "#333";
    ctx.lineWidth = 1;
    for (const level of [0.25, 0.5, 0.75]) {
      const y = height * (1 - level);
      ctx.beginPath();
      ctx.moveTo(0, y);
      ctx.lineTo(width, y);
      ctx.stroke();
    }

    const points = state.chart;
    if (points.length < 2) return;
    const step = width / (CHART_CAPACITY - 1);
    const offset = CHART_CAPACITY - points.length;

    const seriesIds = [...state.goals.map((goal) => goal.id), "unknown", "irrational", "phi"];
    for (const id of seriesIds) {
      ctx.save();
      ctx.strokeStyle = SERIES_COLORS[id] ?? FALLBACK;
      ctx.lineWidth = id === "phi" ? 1 : 2;
      if (id === "phi") ctx.setLineDash([4, 3]);
      ctx.beginPath();
      let started = false;
      points.forEach((point, i) => {
        let value: number | null;
        if (id === "unknown") value = point.pUnknown;
        else if (id === "irrational") value = point.pIrrational;
        else if (id === "phi") value = point.phi;
        else value = point.perGoal[id] ?? 0;
        if (value === null) return;
        const x = (offset + i) * step;
        const y = this.height * (1 - value);
        if (!started) {
          ctx.moveTo(x, y);
          started = true;
        } else {
          ctx.lineTo(x, y);
        }
      });
      ctx.stroke();
      ctx.restore();
    }
  }
}
