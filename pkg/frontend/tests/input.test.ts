import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { EmittedSample, GloveEmulator } from "../src/input.js";
import { GestureLabel } from "../src/protocol.js";

describe("GloveEmulator", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  function collect(em: GloveEmulator, ms: number): EmittedSample[] {
    const out: EmittedSample[] = [];
    em.start((s) => out.push(s));
    vi.advanceTimersByTime(ms);
    em.stop();
    return out;
  }

  it("emits at the configured rate", () => {
    const em = new GloveEmulator({ rateHz: 60, now: () => Date.now() / 1000 });
    const samples = collect(em, 1000);
    expect(samples.length).toBeGreaterThanOrEqual(55);
    expect(samples.length).toBeLessThanOrEqual(62);
  });

  it("rejects rates outside 60-120 Hz", () => {
    expect(() => new GloveEmulator({ rateHz: 30 })).toThrow();
    expect(() => new GloveEmulator({ rateHz: 240 })).toThrow();
  });

  it("timestamps are strictly monotone", () => {
    const em = new GloveEmulator({ rateHz: 120, now: () => Date.now() / 1000 });
    const samples = collect(em, 500);
    for (let i = 1; i < samples.length; i++) {
      expect(samples[i]!.t).toBeGreaterThan(samples[i - 1]!.t);
    }
  });

  it("pointer maps to the hand workspace and clamps", () => {
    const em = new GloveEmulator({ handHalf: 0.2 });
    em.setPointer(0.5, -2.0);
    const s = em.sample();
    expect(s.pos[0]).toBeCloseTo(0.1, 12);
    expect(s.pos[1]).toBeCloseTo(-0.2, 12);
  });

  it("depth accumulates and clamps", () => {
    const em = new GloveEmulator({ handHalf: 0.2 });
    for (let i = 0; i < 100; i++) em.adjustDepth(0.01);
    expect(em.sample().pos[2]).toBeCloseTo(0.2, 12);
  });

  it("finger slider maps 0..1 to 0..open distance", () => {
    const em = new GloveEmulator({ fingerOpen: 0.08 });
    em.setFinger(0.5);
    expect(em.sample().fingerDist).toBeCloseTo(0.04, 12);
    em.setFinger(2.0);
    expect(em.sample().fingerDist).toBeCloseTo(0.08, 12);
  });

  it("a held gesture key is sustained across the tick", () => {
    const em = new GloveEmulator({ rateHz: 60, now: () => Date.now() / 1000 });
    em.keyDown("r");
    const samples = collect(em, 2100); // > 2 s Ring hold
    expect(samples.length).toBeGreaterThan(100);
    expect(samples.every((s) => s.gesture === GestureLabel.Ring)).toBe(true);
  });

  it("key release returns to None; unrelated keyup does not", () => {
    const em = new GloveEmulator();
    em.keyDown("f");
    expect(em.currentGesture).toBe(GestureLabel.Fist);
    em.keyUp("r");
    expect(em.currentGesture).toBe(GestureLabel.Fist);
    em.keyUp("f");
    expect(em.currentGesture).toBe(GestureLabel.None);
  });
});
