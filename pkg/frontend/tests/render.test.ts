import { describe, expect, it } from "vitest";

import { DEFAULT_CAMERA, cubeCorners, project, rotateByQuat } from "../src/render.js";

describe("projection", () => {
  it("origin projects to the canvas center", () => {
    const [x, y] = project([0, 0, 0], DEFAULT_CAMERA, 320, 240);
    expect(x).toBe(320);
    expect(y).toBe(240);
  });

  it("up in world space is up on screen", () => {
    const [, y] = project([0, 0.1, 0], DEFAULT_CAMERA, 320, 240);
    expect(y).toBeLessThan(240);
  });

  it("scale is linear", () => {
    const [x1] = project([0.01, 0, 0], DEFAULT_CAMERA, 0, 0);
    const [x2] = project([0.02, 0, 0], DEFAULT_CAMERA, 0, 0);
    expect(x2).toBeCloseTo(2 * x1, 9);
  });
});

describe("rotateByQuat", () => {
  it("identity leaves vectors unchanged", () => {
    expect(rotateByQuat([1, 0, 0, 0], [1, 2, 3])).toEqual([1, 2, 3]);
  });

  it("quarter turn about z maps x to y", () => {
    const h = Math.SQRT1_2;
    const v = rotateByQuat([h, 0, 0, h], [1, 0, 0]);
    expect(v[0]).toBeCloseTo(0, 12);
    expect(v[1]).toBeCloseTo(1, 12);
    expect(v[2]).toBeCloseTo(0, 12);
  });

  it("preserves length", () => {
    const v = rotateByQuat([0.5, 0.5, 0.5, 0.5], [0.3, -0.4, 0.5]);
    const n = Math.hypot(...v);
    expect(n).toBeCloseTo(Math.hypot(0.3, -0.4, 0.5), 12);
  });
});

describe("cubeCorners", () => {
  it("returns 8 corners at the given half-extent", () => {
    const corners = cubeCorners(0.04);
    expect(corners.length).toBe(8);
    for (const c of corners) {
      for (const v of c) expect(Math.abs(v)).toBeCloseTo(0.04, 12);
    }
  });
});
