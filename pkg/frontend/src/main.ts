/** Browser entry point: wires the emulator, client, reducer, and renderer. */

import { GatewayClient } from "./client.js";
import { GloveEmulator } from "./input.js";
import { GestureLabel } from "./protocol.js";
import { drawScene } from "./render.js";
import {
  downloadTrace,
  fetchReport,
  httpBase,
  startRecording,
  stopRecording,
} from "./session.js";
import { CockpitState, initialState, reduce } from "./state.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export function startCockpit(): void {
  const canvas = el<HTMLCanvasElement>("scene");
  const ctx = canvas.getContext("2d")!;
  const urlInput = el<HTMLInputElement>("url");
  const statusEl = el<HTMLElement>("status");
  const errorEl = el<HTMLElement>("error");
  const logEl = el<HTMLElement>("log");
  const reportEl = el<HTMLElement>("report");
  const finger = el<HTMLInputElement>("finger");

  let state: CockpitState = initialState();
  let client: GatewayClient | null = null;
  let lastGesture = GestureLabel.None;

  const emulator = new GloveEmulator({ rateHz: 60 });

  const indicators: Array<[string, (s: CockpitState) => boolean]> = [
    ["ind-clutch", (s) => s.clutch],
    ["ind-haptic", (s) => s.haptic],
    ["ind-tracking", (s) => s.tracking],
    ["ind-energy", (s) => s.energy],
    ["ind-recording", (s) => s.recording],
  ];

  function renderPanel(): void {
    statusEl.textContent = state.status;
    errorEl.textContent = state.lastError ?? "";
    for (const [id, get] of indicators) {
      el(id).classList.toggle("on", get(state));
    }
    logEl.textContent = state.eventLog
      .slice(-8)
      .map((e) => `${e.t.toFixed(3)}  ${e.name}`)
      .join("\n");
  }

  function renderLoop(): void {
    const robot = client?.takeState();
    if (robot) {
      state = reduce(state, robot);
    }
    const side = state.config["L_t"] ?? 0.08;
    drawScene(ctx, canvas.width, canvas.height, state.robot, side);
    renderPanel();
    requestAnimationFrame(renderLoop);
  }

  el("connect").addEventListener("click", () => {
    client?.close();
    state = initialState();
    state = { ...state, status: "connecting" };
    client = new GatewayClient(urlInput.value);
    client.onFrame = (frame) => {
      if (frame.type !== "robot_state") {
        state = reduce(state, frame); // robot_state flows via the mailbox
      }
    };
    client.onStatus = (s) => {
      if (s !== "open") state = { ...state, status: "disconnected" };
    };
    client.connect();
  });

  canvas.addEventListener("pointermove", (ev) => {
    const rect = canvas.getBoundingClientRect();
    const nx = ((ev.clientX - rect.left) / rect.width) * 2 - 1;
    const ny = 1 - ((ev.clientY - rect.top) / rect.height) * 2;
    emulator.setPointer(nx, ny);
  });
  canvas.addEventListener("wheel", (ev) => {
    ev.preventDefault();
    emulator.adjustDepth(-Math.sign(ev.deltaY) * 0.005);
  });
  window.addEventListener("keydown", (ev) => emulator.keyDown(ev.key));
  window.addEventListener("keyup", (ev) => emulator.keyUp(ev.key));
  finger.addEventListener("input", () => {
    emulator.setFinger(Number(finger.value) / 100);
  });

  emulator.start((sample) => {
    if (!client?.connected || !state.isOperator) return;
    if (sample.gesture !== lastGesture) {
      client.sendGesture(sample.gesture);
      lastGesture = sample.gesture;
    }
    state = { ...state, selectedGesture: sample.gesture };
    client.sendHandInput(sample.t, sample.pos, sample.quat, sample.fingerDist);
  });

  el("record").addEventListener("click", async () => {
    if (!client) return;
    const base = httpBase(client.url);
    if (!state.recording) {
      await startRecording(base);
      state = { ...state, recording: true };
    } else {
      await stopRecording(base);
      state = { ...state, recording: false };
      const report = await fetchReport(base);
      reportEl.textContent = JSON.stringify(report, null, 2);
      const trace = await downloadTrace(base);
      const blob = new Blob([trace], { type: "application/x-ndjson" });
      const a = document.createElement("a");
      a.href = URL.createObjectURL(blob);
      a.download = "session-trace.ndjson";
      a.click();
      URL.revokeObjectURL(a.href);
    }
  });

  requestAnimationFrame(renderLoop);
}

if (typeof document !== "undefined" && document.getElementById("scene")) {
  startCockpit();
}
