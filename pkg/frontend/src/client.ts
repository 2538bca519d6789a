/**
 * Gateway client: one WebSocket, hello negotiation, reconnect with backoff,
 * and a latest-value mailbox for robot_state frames so rendering never lags
 * behind a bursty network receive path.
 */

import {
  Frame,
  GestureLabel,
  RobotState,
  gestureOverride,
  handInput,
  hello,
  isRobotState,
  parse,
  serialize,
  setConfig,
} from "./protocol.js";

/** Minimal WebSocket surface, satisfied by both browsers and the ws package. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ClientOptions {
  role?: "operator" | "observer";
  /** initial reconnect delay; doubles up to maxBackoffMs */
  backoffMs?: number;
  maxBackoffMs?: number;
  socketFactory?: SocketFactory;
}

export type ClientStatus = "disconnected" | "connecting" | "open";

function defaultFactory(url: string): SocketLike {
  const ws = globalThis.WebSocket;
  if (!ws) {
    throw new Error("no WebSocket implementation; pass socketFactory");
  }
  return new ws(url) as unknown as SocketLike;
}

export class GatewayClient {
  readonly url: string;
  status: ClientStatus = "disconnected";
  /** latest robot_state; consumed by the render loop via takeState() */
  private mailbox: RobotState | null = null;
  private socket: SocketLike | null = null;
  private backoff: number;
  private readonly initialBackoff: number;
  private readonly maxBackoff: number;
  private readonly role: "operator" | "observer";
  private readonly factory: SocketFactory;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  private closed = false;

  /** every parsed frame, in receive order (robot_state included) */
  onFrame: ((frame: Frame) => void) | null = null;
  onStatus: ((status: ClientStatus) => void) | null = null;

  constructor(url: string, opts: ClientOptions = {}) {
    this.url = url;
    this.role = opts.role ?? "operator";
    this.initialBackoff = opts.backoffMs ?? 250;
    this.maxBackoff = opts.maxBackoffMs ?? 5000;
    this.backoff = this.initialBackoff;
    this.factory = opts.socketFactory ?? defaultFactory;
  }

  connect(): void {
    if (this.socket || this.closed) return;
    this.setStatus("connecting");
    let sock: SocketLike;
    try {
      sock = this.factory(this.url);
    } catch {
      this.scheduleReconnect();
      return;
    }
    this.socket = sock;
    sock.onopen = () => {
      this.backoff = this.initialBackoff;
      this.setStatus("open");
      sock.send(serialize(hello(this.role)));
    };
    sock.onmessage = (ev) => {
      let frame: Frame;
      try {
        frame = parse(String(ev.data));
      } catch {
        return; // ignore unparseable frames; the socket stays up
      }
      if (isRobotState(frame)) {
        this.mailbox = frame; // newest wins
      }
      this.onFrame?.(frame);
    };
    sock.onclose = () => {
      this.socket = null;
      if (!this.closed) this.scheduleReconnect();
      this.setStatus("disconnected");
    };
    sock.onerror = () => {
      // onclose follows; nothing extra to do
    };
  }

  private scheduleReconnect(): void {
    if (this.closed || this.reconnectTimer) return;
    const delay = this.backoff;
    this.backoff = Math.min(this.backoff * 2, this.maxBackoff);
    this.reconnectTimer = setTimeout(() => {
      this.reconnectTimer = null;
      this.connect();
    }, delay);
  }

  close(): void {
    this.closed = true;
    if (this.reconnectTimer) {
      clearTimeout(this.reconnectTimer);
      this.reconnectTimer = null;
    }
    this.socket?.close();
    this.socket = null;
    this.setStatus("disconnected");
  }

  private setStatus(status: ClientStatus): void {
    if (status !== this.status) {
      this.status = status;
      this.onStatus?.(status);
    }
  }

  /** Drain the latest robot_state (or null if none arrived since last call). */
  takeState(): RobotState | null {
    const s = this.mailbox;
    this.mailbox = null;
    return s;
  }

  get connected(): boolean {
    return this.status === "open";
  }

  send(frame: Frame): boolean {
    if (!this.socket || this.status !== "open") return false;
    this.socket.send(serialize(frame));
    return true;
  }

  sendHandInput(t: number, pos: readonly number[], quat: readonly number[], fingerDist: number): boolean {
    return this.send(handInput(t, pos, quat, fingerDist));
  }

  sendGesture(label: GestureLabel): boolean {
    return this.send(gestureOverride(label));
  }

  sendConfig(values: Partial<Record<"eta" | "L_h" | "L_t" | "latency", number>>): boolean {
    return this.send(setConfig(values));
  }
}
