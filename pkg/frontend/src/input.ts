// Pointer and wheel/key input turned into a 30 Hz observation stream.
// Timestamps are monotonic from a local clock; the hand rides the table
// plane under the pointer and the wheel (or arrow keys) turns the gaze yaw.

import { HEAD_POSITION, pixelToWorld, yawToForward, type Viewport } from "./mapping";
import { observationMessage } from "./protocol";
import type { Vec3 } from "./protocol";

export const STREAM_RATE_HZ = 30;
export const WHEEL_STEP = 0.06; // radians per wheel notch
export const KEY_STEP = 0.1;

export class InputLoop {
  private hand: Vec3;
  yaw = 0;
  private timer: ReturnType<typeof setInterval> | null = null;
  private t0 = 0;
  private ticks = 0;
  private lastT = -1;

  constructor(
    private view: Viewport,
    private send: (msg: ReturnType<typeof observationMessage>) => void,
    private now: () => number = () => performance.now(),
  ) {
    this.hand = pixelToWorld(view, view.width / 2, view.height * 0.8);
  }

  pointerMoved(px: number, py: number): void {
    this.hand = pixelToWorld(this.view, px, py);
  }

  wheelTurned(deltaY: number): void {
    this.yaw += Math.sign(deltaY) * WHEEL_STEP;
  }

  keyPressed(key: string): void {
    if (key === "ArrowLeft") this.yaw -= KEY_STEP;
    if (key === "ArrowRight") this.yaw += KEY_STEP;
  }

  get handPosition(): Vec3 {
    return this.hand;
  }

  /** One observation frame at the current pointer/yaw state. */
  sample(): ReturnType<typeof observationMessage> {
    if (this.ticks === 0) this.t0 = this.now();
    // Strictly monotonic even when the clock returns the same millisecond.
    const elapsed = Math.max(
      (this.now() - this.t0) / 1000,
      this.lastT + 1 / (2 * STREAM_RATE_HZ),
    );
    this.lastT = elapsed;
    this.ticks += 1;
    return observationMessage(elapsed, HEAD_POSITION, yawToForward(this.yaw), this.hand);
  }

  start(): void {
    if (this.timer !== null) return;
    this.timer = setInterval(() => this.send(this.sample()), 1000 / STREAM_RATE_HZ);
  }

  stop(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
    this.ticks = 0;
    this.lastT = -1;
  }
}
