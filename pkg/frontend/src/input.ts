/**
 * Glove emulation: pointer position maps to hand x/y, wheel (or keys) to z,
 * held keys to sustained gestures, and a slider to the thumb-index distance.
 * A fixed-rate tick emits hand_input frames so gesture holds are sustained —
 * holding the Ring key for 2 s genuinely produces 2 s of Ring samples.
 */

import { GestureLabel } from "./protocol.js";

export interface EmittedSample {
  t: number;
  pos: [number, number, number];
  quat: [number, number, number, number];
  fingerDist: number;
  gesture: GestureLabel;
}

export type SampleSink = (sample: EmittedSample) => void;

export const GESTURE_KEYS: Record<string, GestureLabel> = {
  f: GestureLabel.Fist, // clutch
  r: GestureLabel.Ring, // tracking toggle (hold 2 s)
  p: GestureLabel.Pinky, // energy
  t: GestureLabel.ThumbsUp,
};

export interface EmulatorOptions {
  /** emit rate in Hz; the gateway expects 60-120 */
  rateHz?: number;
  /** half-extent of the emulated hand workspace cube, meters */
  handHalf?: number;
  /** fully-open thumb-index distance, meters */
  fingerOpen?: number;
  now?: () => number;
}

export class GloveEmulator {
  /** normalized pointer position in [-1, 1]^2 */
  private nx = 0;
  private ny = 0;
  private z = 0;
  private fingerDist: number;
  private gesture = GestureLabel.None;
  private readonly rateHz: number;
  private readonly handHalf: number;
  private readonly fingerOpen: number;
  private readonly now: () => number;
  private timer: ReturnType<typeof setInterval> | null = null;
  private t0: number | null = null;
  private lastT = -Infinity;

  constructor(opts: EmulatorOptions = {}) {
    this.rateHz = opts.rateHz ?? 60;
    if (this.rateHz < 60 || this.rateHz > 120) {
      throw new Error("emit rate must be within 60-120 Hz");
    }
    this.handHalf = opts.handHalf ?? 0.2;
    this.fingerOpen = opts.fingerOpen ?? 0.08;
    this.fingerDist = this.fingerOpen;
    this.now = opts.now ?? (() => Date.now() / 1000);
  }

  /** Pointer position normalized to [-1, 1] on each axis. */
  setPointer(nx: number, ny: number): void {
    this.nx = clamp(nx, -1, 1);
    this.ny = clamp(ny, -1, 1);
  }

  /** Wheel/key depth, accumulated and clamped to the workspace. */
  adjustDepth(dz: number): void {
    this.z = clamp(this.z + dz, -this.handHalf, this.handHalf);
  }

  /** Finger slider, normalized 0 (closed) to 1 (open). */
  setFinger(openFraction: number): void {
    this.fingerDist = clamp(openFraction, 0, 1) * this.fingerOpen;
  }

  keyDown(key: string): void {
    const g = GESTURE_KEYS[key.toLowerCase()];
    if (g !== undefined) this.gesture = g;
  }

  keyUp(key: string): void {
    const g = GESTURE_KEYS[key.toLowerCase()];
    if (g !== undefined && this.gesture === g) {
      this.gesture = GestureLabel.None;
    }
  }

  get currentGesture(): GestureLabel {
    return this.gesture;
  }

  sample(): EmittedSample {
    if (this.t0 === null) this.t0 = this.now();
    let t = this.now() - this.t0;
    if (t <= this.lastT) {
      t = this.lastT + 1e-6; // keep the stream strictly monotone
    }
    this.lastT = t;
    return {
      t,
      pos: [this.nx * this.handHalf, this.ny * this.handHalf, this.z],
      quat: [1, 0, 0, 0],
      fingerDist: this.fingerDist,
      gesture: this.gesture,
    };
  }

  start(sink: SampleSink): void {
    if (this.timer) return;
    this.timer = setInterval(() => sink(this.sample()), 1000 / this.rateHz);
  }

  stop(): void {
    if (this.timer) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  get running(): boolean {
    return this.timer !== null;
  }
}

function clamp(v: number, lo: number, hi: number): number {
  return Math.min(Math.max(v, lo), hi);
}
