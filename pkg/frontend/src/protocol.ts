/**
 * Wire protocol v1: JSON text frames exchanged with the gateway.
 *
 * Serialization is canonical (sorted keys, compact separators) so that
 * serialize(parse(text)) === text for frames produced by either endpoint.
 */

export const PROTOCOL_VERSION = 1;

export const MESSAGE_TYPES = [
  "hello",
  "hand_input",
  "gesture_override",
  "robot_state",
  "event",
  "set_config",
  "ack",
  "error",
] as const;

export type MessageType = (typeof MESSAGE_TYPES)[number];

/** Gesture labels, matching the classifier's class indices. */
export enum GestureLabel {
  None = 0,
  Pinky = 1,
  Ring = 2,
  Fist = 3,
  ThumbsUp = 4,
}

export interface Frame {
  type: MessageType;
  v: number;
  [key: string]: unknown;
}

export interface RobotState extends Frame {
  type: "robot_state";
  t: number;
  pos: [number, number, number];
  quat: [number, number, number, number];
  jaw: number;
  clutch: boolean;
  tracking: boolean;
  haptic: boolean;
  at_goal: boolean;
}

export interface EventFrame extends Frame {
  type: "event";
  t: number;
  name: string;
}

export interface AckFrame extends Frame {
  type: "ack";
  role?: string;
  config?: Record<string, number>;
}

export interface ErrorFrame extends Frame {
  type: "error";
  code: string;
  message?: string;
}

export class ProtocolError extends Error {
  constructor(
    public readonly code: string,
    message: string,
  ) {
    super(`${code}: ${message}`);
  }
}

const REQUIRED: Record<MessageType, readonly string[]> = {
  hello: [],
  hand_input: ["t", "pos", "quat", "finger_dist"],
  gesture_override: ["label"],
  robot_state: ["t", "pos", "quat", "jaw", "clutch", "tracking", "haptic", "at_goal"],
  event: ["t", "name"],
  set_config: [],
  ack: [],
  error: ["code"],
};

const CONFIG_KEYS = new Set(["eta", "L_h", "L_t", "latency"]);

export function parse(text: string): Frame {
  let msg: unknown;
  try {
    msg = JSON.parse(text);
  } catch (e) {
    throw new ProtocolError("bad_json", String(e));
  }
  if (typeof msg !== "object" || msg === null || Array.isArray(msg)) {
    throw new ProtocolError("bad_frame", "frame must be a JSON object");
  }
  const frame = msg as Record<string, unknown>;
  if (frame.v !== PROTOCOL_VERSION) {
    throw new ProtocolError("bad_version", `unsupported version ${frame.v}`);
  }
  const mtype = frame.type;
  if (typeof mtype !== "string" || !(MESSAGE_TYPES as readonly string[]).includes(mtype)) {
    throw new ProtocolError("unknown_type", `unknown message type ${mtype}`);
  }
  for (const key of REQUIRED[mtype as MessageType]) {
    if (!(key in frame)) {
      throw new ProtocolError("missing_field", `${mtype} requires '${key}'`);
    }
  }
  if (mtype === "hand_input") {
    const pos = frame.pos as unknown[];
    const quat = frame.quat as unknown[];
    if (!Array.isArray(pos) || pos.length !== 3 || !Array.isArray(quat) || quat.length !== 4) {
      throw new ProtocolError("bad_field", "pos must be [3], quat must be [4] wxyz");
    }
    if ("landmarks" in frame && (frame.landmarks as unknown[]).length !== 21) {
      throw new ProtocolError("bad_field", "landmarks must have 21 entries");
    }
  }
  if (mtype === "set_config") {
    for (const key of Object.keys(frame)) {
      if (key !== "type" && key !== "v" && !CONFIG_KEYS.has(key)) {
        throw new ProtocolError("bad_field", `unknown config key '${key}'`);
      }
    }
  }
  return frame as Frame;
}

/** Canonical JSON: keys sorted recursively, no whitespace. */
export function serialize(msg: Frame | Record<string, unknown>): string {
  return canonicalJson(msg);
}

function canonicalJson(value: unknown): string {
  if (value === null || typeof value === "number" || typeof value === "boolean") {
    return JSON.stringify(value);
  }
  if (typeof value === "string") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return `[${value.map(canonicalJson).join(",")}]`;
  }
  const obj = value as Record<string, unknown>;
  const keys = Object.keys(obj).sort();
  const parts = keys.map((k) => `${JSON.stringify(k)}:${canonicalJson(obj[k])}`);
  return `{${parts.join(",")}}`;
}

export function hello(role: "operator" | "observer" = "operator"): Frame {
  return { type: "hello", v: PROTOCOL_VERSION, role };
}

export function handInput(
  t: number,
  pos: readonly number[],
  quat: readonly number[],
  fingerDist: number,
): Frame {
  return {
    type: "hand_input",
    v: PROTOCOL_VERSION,
    t,
    pos: [...pos],
    quat: [...quat],
    finger_dist: fingerDist,
  };
}

export function gestureOverride(label: GestureLabel): Frame {
  return { type: "gesture_override", v: PROTOCOL_VERSION, label };
}

export function setConfig(values: Partial<Record<"eta" | "L_h" | "L_t" | "latency", number>>): Frame {
  return { type: "set_config", v: PROTOCOL_VERSION, ...values };
}

export function isRobotState(f: Frame): f is RobotState {
  return f.type === "robot_state";
}

export function isEvent(f: Frame): f is EventFrame {
  return f.type === "event";
}

export function isAck(f: Frame): f is AckFrame {
  return f.type === "ack";
}

export function isError(f: Frame): f is ErrorFrame {
  return f.type === "error";
}
