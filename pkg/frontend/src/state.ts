/**
 * Cockpit state: a pure reducer over received frames.
 *
 * The UI never mutates teleoperation state locally — every displayed field
 * originates from a robot_state, event, ack, or error frame received from
 * the gateway, which is the single source of truth.
 */

import {
  AckFrame,
  ErrorFrame,
  EventFrame,
  Frame,
  GestureLabel,
  RobotState,
  isAck,
  isError,
  isEvent,
  isRobotState,
} from "./protocol.js";

export type ConnectionStatus =
  | "disconnected"
  | "connecting"
  | "operator"
  | "observer";

export interface LoggedEvent {
  t: number;
  name: string;
}

export interface CockpitState {
  status: ConnectionStatus;
  /** true when the hello negotiation granted the operator role */
  isOperator: boolean;
  /** latest server config snapshot from an ack frame */
  config: Record<string, number>;
  /** latest robot_state frame (latest-value mailbox; stale ones dropped) */
  robot: RobotState | null;
  /** indicator state derived only from received event frames */
  clutch: boolean;
  haptic: boolean;
  tracking: boolean;
  energy: boolean;
  eventLog: LoggedEvent[];
  lastError: string | null;
  recording: boolean;
  /** locally selected gesture being emulated (for display only) */
  selectedGesture: GestureLabel;
}

export const EVENT_LOG_LIMIT = 200;

export function initialState(): CockpitState {
  return {
    status: "disconnected",
    isOperator: false,
    config: {},
    robot: null,
    clutch: false,
    haptic: false,
    tracking: false,
    energy: false,
    eventLog: [],
    lastError: null,
    recording: false,
    selectedGesture: GestureLabel.None,
  };
}

export function reduce(state: CockpitState, frame: Frame): CockpitState {
  if (isRobotState(frame)) {
    return { ...state, robot: frame };
  }
  if (isEvent(frame)) {
    return applyEvent(state, frame);
  }
  if (isAck(frame)) {
    return applyAck(state, frame);
  }
  if (isError(frame)) {
    return applyError(state, frame);
  }
  return state;
}

function applyEvent(state: CockpitState, frame: EventFrame): CockpitState {
  const next: CockpitState = {
    ...state,
    eventLog: [...state.eventLog, { t: frame.t, name: frame.name }].slice(
      -EVENT_LOG_LIMIT,
    ),
  };
  switch (frame.name) {
    case "clutch_engaged":
      next.clutch = true;
      break;
    case "clutch_released":
      next.clutch = false;
      break;
    case "haptic_on":
      next.haptic = true;
      break;
    case "haptic_off":
      next.haptic = false;
      break;
    case "tracking_on":
      next.tracking = true;
      break;
    case "tracking_off":
      next.tracking = false;
      break;
    case "energy_on":
      next.energy = true;
      break;
    case "energy_off":
      next.energy = false;
      break;
  }
  return next;
}

function applyAck(state: CockpitState, frame: AckFrame): CockpitState {
  const next = { ...state };
  if (frame.role === "operator") {
    next.status = "operator";
    next.isOperator = true;
  } else if (frame.role === "observer") {
    next.status = "observer";
    next.isOperator = false;
  }
  if (frame.config) {
    next.config = { ...frame.config };
  }
  return next;
}

function applyError(state: CockpitState, frame: ErrorFrame): CockpitState {
  const text = frame.message ? `${frame.code}: ${frame.message}` : frame.code;
  const next = { ...state, lastError: text };
  if (frame.code === "operator_taken") {
    // surfaced distinctly: the connection stays up as an observer
    next.isOperator = false;
  }
  return next;
}
