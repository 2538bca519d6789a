/**
 * Minimal 3D rendering of the instrument tip inside its workspace cube on a
 * 2D canvas: a fixed isometric projection, a wireframe cube, the tip as a
 * jaw-colored marker, and a short orientation axis triad.
 */

import { RobotState } from "./protocol.js";

export interface Camera {
  /** isometric yaw/pitch, radians */
  yaw: number;
  pitch: number;
  /** pixels per meter */
  scale: number;
}

export const DEFAULT_CAMERA: Camera = { yaw: Math.PI / 5, pitch: Math.PI / 7, scale: 2200 };

export function project(
  p: readonly [number, number, number],
  cam: Camera,
  cx: number,
  cy: number,
): [number, number] {
  const cy0 = Math.cos(cam.yaw);
  const sy0 = Math.sin(cam.yaw);
  const cp = Math.cos(cam.pitch);
  const sp = Math.sin(cam.pitch);
  const x1 = p[0] * cy0 + p[2] * sy0;
  const z1 = -p[0] * sy0 + p[2] * cy0;
  const y2 = p[1] * cp - z1 * sp;
  return [cx + x1 * cam.scale, cy - y2 * cam.scale];
}

export function rotateByQuat(
  q: readonly [number, number, number, number],
  v: readonly [number, number, number],
): [number, number, number] {
  const [w, x, y, z] = q;
  // t = 2 q_vec × v; v' = v + w t + q_vec × t
  const tx = 2 * (y * v[2] - z * v[1]);
  const ty = 2 * (z * v[0] - x * v[2]);
  const tz = 2 * (x * v[1] - y * v[0]);
  return [
    v[0] + w * tx + (y * tz - z * ty),
    v[1] + w * ty + (z * tx - x * tz),
    v[2] + w * tz + (x * ty - y * tx),
  ];
}

const CUBE_EDGES: Array<[number, number]> = [
  [0, 1], [1, 3], [3, 2], [2, 0],
  [4, 5], [5, 7], [7, 6], [6, 4],
  [0, 4], [1, 5], [2, 6], [3, 7],
];

export function cubeCorners(half: number): Array<[number, number, number]> {
  const corners: Array<[number, number, number]> = [];
  for (const sx of [-1, 1]) {
    for (const sy of [-1, 1]) {
      for (const sz of [-1, 1]) {
        corners.push([sx * half, sy * half, sz * half]);
      }
    }
  }
  return corners;
}

export function drawScene(
  ctx: CanvasRenderingContext2D,
  width: number,
  height: number,
  state: RobotState | null,
  tipCubeSide: number,
  cam: Camera = DEFAULT_CAMERA,
): void {
  ctx.clearRect(0, 0, width, height);
  const cx = width / 2;
  const cy = height / 2;

  ctx.strokeStyle = "#3a5a7a";
  ctx.lineWidth = 1;
  const corners = cubeCorners(tipCubeSide / 2).map((p) => project(p, cam, cx, cy));
  ctx.beginPath();
  for (const [a, b] of CUBE_EDGES) {
    const pa = corners[a]!;
    const pb = corners[b]!;
    ctx.moveTo(pa[0], pa[1]);
    ctx.lineTo(pb[0], pb[1]);
  }
  ctx.stroke();

  if (!state) return;
  const tip = state.pos;
  const [tx, ty] = project(tip, cam, cx, cy);

  // orientation triad
  const axes: Array<[[number, number, number], string]> = [
    [[0.012, 0, 0], "#e05555"],
    [[0, 0.012, 0], "#55c055"],
    [[0, 0, 0.012], "#5580e0"],
  ];
  for (const [axis, color] of axes) {
    const end = rotateByQuat(state.quat, axis);
    const [ex, ey] = project(
      [tip[0] + end[0], tip[1] + end[1], tip[2] + end[2]],
      cam,
      cx,
      cy,
    );
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(tx, ty);
    ctx.lineTo(ex, ey);
    ctx.stroke();
  }

  // tip marker: radius tracks the jaw opening, red while clutched
  const jawFrac = Math.max(0, Math.min(1, (state.jaw + 0.35) / 1.35));
  ctx.fillStyle = state.clutch ? "#d04040" : "#e8e8e8";
  ctx.beginPath();
  ctx.arc(tx, ty, 4 + 4 * jawFrac, 0, 2 * Math.PI);
  ctx.fill();
}
