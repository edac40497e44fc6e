// Coordinate plumbing between the 2D canvas and the 3D world the estimator
// lives in. The scene is viewed top-down: canvas x maps to world x, canvas y
// (down) maps to world -y. The hand moves on the table plane; the gaze is a
// yaw angle turned into a 3D forward vector by aiming at a point on the
// table a fixed look-ahead away, so the vertical component stays realistic.

import type { Vec3 } from "./protocol";

// Seated just behind the table: goal bearings separate widely enough for
// decisive estimates, and the fixed look-ahead keeps the gaze pitch close
// to the goals' actual elevation anywhere on the arc.
export const TABLE_HEIGHT = 0.8;
export const HEAD_POSITION: Vec3 = [0.0, 0.9, 1.4];
export const GAZE_LOOKAHEAD = 1.0;

export interface Viewport {
  width: number;
  height: number;
  /** World metres per canvas pixel. */
  scale: number;
  /** World coordinates of the canvas centre. */
  centerX: number;
  centerY: number;
}

export function defaultViewport(width: number, height: number): Viewport {
  // Frame the goal arc (|x| <= 1.5, y in [0, 2.4]) with a little margin.
  const scale = Math.max(3.6 / width, 3.2 / height);
  return { width, height, scale, centerX: 0.0, centerY: 1.1 };
}

export function pixelToWorld(view: Viewport, px: number, py: number): Vec3 {
  const x = view.centerX + (px - view.width / 2) * view.scale;
  const y = view.centerY - (py - view.height / 2) * view.scale;
  return [x, y, TABLE_HEIGHT];
}

export function worldToPixel(view: Viewport, world: Vec3): [number, number] {
  const px = view.width / 2 + (world[0] - view.centerX) / view.scale;
  const py = view.height / 2 - (world[1] - view.centerY) / view.scale;
  return [px, py];
}

/** Forward vector for a yaw angle (0 = straight ahead along +y, clockwise). */
export function yawToForward(yaw: number, head: Vec3 = HEAD_POSITION): Vec3 {
  const target: Vec3 = [
    head[0] + GAZE_LOOKAHEAD * Math.sin(yaw),
    head[1] + GAZE_LOOKAHEAD * Math.cos(yaw),
    TABLE_HEIGHT,
  ];
  return normalize([target[0] - head[0], target[1] - head[1], target[2] - head[2]]);
}

/** Yaw that points the gaze at a world position (inverse of yawToForward). */
export function yawTowards(world: Vec3, head: Vec3 = HEAD_POSITION): number {
  return Math.atan2(world[0] - head[0], world[1] - head[1]);
}

export function normalize(v: Vec3): Vec3 {
  const n = Math.hypot(v[0], v[1], v[2]);
  if (n < 1e-12) {
    throw new Error("cannot normalize a zero vector");
  }
  return [v[0] / n, v[1] / n, v[2] / n];
}
