// Top-down scene: goal glyphs, hand marker with trail, gaze arrow, robot.
// Pure draw-from-state; all mutable data lives in the UiState store.

import { HEAD_POSITION, worldToPixel, yawToForward, type Viewport } from "./mapping";
import type { Vec3 } from "./protocol";
import type { UiState } from "./state";

const GOAL_COLORS: Record<string, string> = {
  cylinder: "#3a9e4f",
  cube: "#c94f41",
  sphere: "#3f6fc9",
};
const FALLBACK_COLOR = "#8a8a8a";
const TRAIL_LENGTH = 90;

export class SceneView {
  private trail: Vec3[] = [];
  private robotTrail: Vec3[] = [];

  constructor(
    private ctx: CanvasRenderingContext2D,
    private view: Viewport,
  ) {}

  private glyphColor(id: string): string {
    return GOAL_COLORS[id] ?? FALLBACK_COLOR;
  }

  draw(state: UiState, hand: Vec3, yaw: number): void {
    const { ctx, view } = this;
    ctx.clearRect(0, 0, view.width, view.height);
    ctx.fillStyle = "#17191c";
    ctx.fillRect(0, 0, view.width, view.height);

    this.trail.push(hand);
    if (this.trail.length > TRAIL_LENGTH) this.trail.shift();
    if (state.robot) {
      this.robotTrail.push(state.robot.position);
      if (this.robotTrail.length > TRAIL_LENGTH) this.robotTrail.shift();
    }

    this.drawTrail(this.trail, "rgba(240, 220, 120, 0.35)");
    this.drawTrail(this.robotTrail, "rgba(140, 200, 255, 0.35)");

    for (const goal of state.goals) {
      const [px, py] = worldToPixel(view, goal.position);
      const highlighted = state.highlight === goal.id;
      ctx.save();
      ctx.lineWidth = highlighted ? 4 : 1.5;
      ctx.strokeStyle = highlighted ? "#ffffff" : "#444";
      ctx.fillStyle = this.glyphColor(goal.id);
      if (goal.id === "cube") {
        ctx.fillRect(px - 11, py - 11, 22, 22);
        ctx.strokeRect(px - 11, py - 11, 22, 22);
      } else {
        ctx.beginPath();
        ctx.arc(px, py, 12, 0, Math.PI * 2);
        ctx.fill();
        ctx.stroke();
      }
      ctx.fillStyle = "#d8d8d8";
      ctx.font = "12px system-ui";
      ctx.textAlign = "center";
      const probability = state.latest?.per_goal[goal.id];
      const tag = probability === undefined ? goal.id : `${goal.id} ${(probability * 100).toFixed(0)}%`;
      ctx.fillText(tag, px, py + 28);
      ctx.restore();
    }

    this.drawHead(yaw, state.highlight === "irrational");
    this.drawHand(hand);
    if (state.robot) this.drawRobot(state.robot.position, state.robot.stopped);

    if (state.highlight === "irrational") {
      this.banner("irrational: no known goal supports this motion", "#c94f41");
    } else if (state.highlight === "unknown") {
      this.banner("undecided", "#777");
    }
  }

  private drawTrail(points: Vec3[], style: string): void {
    if (points.length < 2) return;
    const { ctx, view } = this;
    ctx.save();
    ctx.strokeStyle = style;
    ctx.lineWidth = 2;
    ctx.beginPath();
    points.forEach((point, i) => {
      const [px, py] = worldToPixel(view, point);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
    ctx.restore();
  }

  private drawHead(yaw: number, irrational: boolean): void {
    const { ctx, view } = this;
    const [hx, hy] = worldToPixel(view, HEAD_POSITION);
    const forward = yawToForward(yaw);
    const tip: Vec3 = [
      HEAD_POSITION[0] + forward[0] * 0.8,
      HEAD_POSITION[1] + forward[1] * 0.8,
      HEAD_POSITION[2],
    ];
    const [tx, ty] = worldToPixel(view, tip);
    ctx.save();
    ctx.strokeStyle = irrational ? "#c94f41" : "#e8e8e8";
    ctx.lineWidth = 2.5;
    ctx.beginPath();
    ctx.moveTo(hx, hy);
    ctx.lineTo(tx, ty);
    ctx.stroke();
    const angle = Math.atan2(ty - hy, tx - hx);
    ctx.beginPath();
    ctx.moveTo(tx, ty);
    ctx.lineTo(tx - 9 * Math.cos(angle - 0.4), ty - 9 * Math.sin(angle - 0.4));
    ctx.lineTo(tx - 9 * Math.cos(angle + 0.4), ty - 9 * Math.sin(angle + 0.4));
    ctx.closePath();
    ctx.fillStyle = ctx.strokeStyle;
    ctx.fill();
    ctx.fillStyle = "#e8e8e8";
    ctx.beginPath();
    ctx.arc(hx, hy, 7, 0, Math.PI * 2);
    ctx.fill();
    ctx.restore();
  }

  private drawHand(hand: Vec3): void {
    const { ctx, view } = this;
    const [px, py] = worldToPixel(view, hand);
    ctx.save();
    ctx.fillStyle = "#f0dc78";
    ctx.beginPath();
    ctx.arc(px, py, 6, 0, Math.PI * 2);
    ctx.fill();
    ctx.restore();
  }

  private drawRobot(position: Vec3, stopped: boolean): void {
    const { ctx, view } = this;
    const [px, py] = worldToPixel(view, position);
    ctx.save();
    ctx.fillStyle = stopped ? "#b05555" : "#8cc8ff";
    ctx.beginPath();
    ctx.moveTo(px, py - 9);
    ctx.lineTo(px + 9, py + 7);
    ctx.lineTo(px - 9, py + 7);
    ctx.closePath();
    ctx.fill();
    ctx.restore();
  }

  private banner(text: string, color: string): void {
    const { ctx, view } = this;
    ctx.save();
    ctx.fillStyle = color;
    ctx.font = "bold 13px system-ui";
    ctx.textAlign = "center";
    ctx.fillText(text, view.width / 2, 22);
    ctx.restore();
  }
}
