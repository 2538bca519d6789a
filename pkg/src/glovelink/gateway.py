"""WebSocket gateway: runs the live control loop and serves cockpit clients.

One asyncio event loop owns all teleop/sim state, so message handling and
tick tasks are serialized by construction. Clients connect over websocket
text frames (protocol v1). The first client whose hello claims the operator
role drives hand input; everyone else observes. Robot state is broadcast at
a fixed rate through a latest-value slot per client (slow clients drop
robot_state frames, never events). Plain HTTP GETs on /trace and /report,
and POSTs on /record/start and /record/stop, expose session recording.
"""

from __future__ import annotations

import asyncio
import http
import json
import time
from dataclasses import dataclass, field, replace

from websockets.asyncio.server import serve as ws_serve

from . import protocol
from .analytics import Trajectory, summarize
from .geometry import Pose, UnitQuat, Vec3
from .gesture import GestureMlp
from .handmodel import GestureLabel, HandFrame, N_LANDMARKS
from .pipeline import ControlPipeline
from .sessionio import (EventRecord, HandSample, SimState, StabilizedGesture,
                        TipGoal, TraceRecord, _record_to_json)
from .simpsm import SimConfig
from .teleop import ControlConfig

__all__ = ["Gateway", "SessionConfig", "run_server"]

EVENT_QUEUE_LIMIT = 10_000


@dataclass(frozen=True)
class SessionConfig:
    input_rate: float = 120.0  # expected hand stream rate, Hz
    broadcast_rate: float = 60.0  # robot_state broadcast rate, Hz
    tick_rate: float = 500.0  # simulated arm tick rate, Hz

    def __post_init__(self):
        if self.broadcast_rate > self.input_rate:
            raise ValueError("broadcast rate must not exceed input rate")


class _Client:
    def __init__(self, conn):
        self.conn = conn
        self.role = "observer"
        self.events: asyncio.Queue[str] = asyncio.Queue()
        self.latest_state: str | None = None
        self.state_waiter = asyncio.Event()
        self.sender: asyncio.Task | None = None

    def push_state(self, frame: str):
        self.latest_state = frame
        self.state_waiter.set()

    def push_event(self, frame: str) -> bool:
        if self.events.qsize() >= EVENT_QUEUE_LIMIT:
            return False
        self.events.put_nowait(frame)
        self.state_waiter.set()
        return True


class Gateway:
    def __init__(self, control_cfg: ControlConfig = ControlConfig(),
                 sim_cfg: SimConfig = SimConfig(),
                 session_cfg: SessionConfig = SessionConfig(),
                 model: GestureMlp | None = None,
                 auto_track: bool = False):
        self.session_cfg = session_cfg
        sim_cfg = replace(sim_cfg, tick_rate=session_cfg.tick_rate)
        self.pipeline = ControlPipeline(control_cfg, sim_cfg, model=model,
                                        auto_track=auto_track)
        self.clients: dict[object, _Client] = {}
        self.operator: _Client | None = None
        self.recording = False
        self.trace: list[TraceRecord] = []
        self.pipe_latencies_ms: list[float] = []
        self._last_t = 0.0
        self._t0: float | None = None
        self._server = None

    # -- control-loop state mutation (event-loop owned) --

    def _emit_event_records(self, t: float, events):
        for ev in events:
            frame = protocol.serialize(protocol.event_msg(t, ev.value))
            if self.recording:
                self.trace.append(EventRecord(t, ev))
            for c in list(self.clients.values()):
                if not c.push_event(frame):
                    asyncio.ensure_future(
                        c.conn.close(1013, "event backlog overflow"))

    def _now(self) -> float:
        """Server-owned session clock; client timestamps are not trusted."""
        if self._t0 is None:
            self._t0 = time.monotonic()
        return time.monotonic() - self._t0

    def handle_hand_input(self, msg: dict):
        t0 = time.perf_counter()
        t = self._now()
        if t <= self._last_t:
            t = self._last_t + 1e-6
        pose = Pose(Vec3(*msg["pos"]), UnitQuat(*msg["quat"]))
        if "landmarks" in msg:
            landmarks = tuple(
                Pose(Vec3(*lm[:3]), UnitQuat(*lm[3:7])) for lm in msg["landmarks"])
        else:
            landmarks = tuple(Pose.identity() for _ in range(N_LANDMARKS))
        frame = HandFrame(t, pose, landmarks)
        self.pipeline.advance_to(t)
        gesture, cmd, events = self.pipeline.process(
            frame, finger_dist=float(msg["finger_dist"]))
        self._last_t = t
        if self.recording:
            self.trace.append(HandSample(t, pose, landmarks,
                                         float(msg["finger_dist"])))
            self.trace.append(StabilizedGesture(t, gesture))
            if cmd is not None:
                self.trace.append(TipGoal(t, cmd.goal, cmd.jaw))
        self._emit_event_records(t, events)
        self.pipe_latencies_ms.append((time.perf_counter() - t0) * 1e3)

    def handle_gesture_override(self, msg: dict):
        self.pipeline.override_gesture = GestureLabel(int(msg["label"]))

    def handle_set_config(self, msg: dict) -> dict:
        cfg = self.pipeline.control_cfg
        updates = {}
        if "eta" in msg:
            # adjust the tip cube to realize the requested scaling factor
            updates["tip_cube"] = float(msg["eta"]) * cfg.hand_cube
        if "L_h" in msg:
            updates["hand_cube"] = float(msg["L_h"])
        if "L_t" in msg:
            updates["tip_cube"] = float(msg["L_t"])
        if updates:
            cfg = replace(cfg, **updates)
            self.pipeline.control_cfg = cfg
            self.pipeline.controller.cfg = cfg
        if "latency" in msg:
            sim_cfg = replace(self.pipeline.sim_cfg, latency=float(msg["latency"]))
            self.pipeline.sim_cfg = sim_cfg
            self.pipeline.sim.cfg = sim_cfg
        return self.config_snapshot()

    def config_snapshot(self) -> dict:
        cfg = self.pipeline.control_cfg
        return {
            "eta": cfg.eta,
            "L_h": cfg.hand_cube,
            "L_t": cfg.tip_cube,
            "latency": self.pipeline.sim_cfg.latency,
            "input_rate": self.session_cfg.input_rate,
            "broadcast_rate": self.session_cfg.broadcast_rate,
            "tick_rate": self.session_cfg.tick_rate,
        }

    def robot_state_msg(self) -> dict:
        sim = self.pipeline.sim
        ctl = self.pipeline.controller
        return protocol.robot_state(
            t=sim.now, pos=sim.tip.position.as_tuple(),
            quat=sim.tip.orientation.as_tuple(), jaw=sim.jaw,
            clutch=ctl.clutch.value == "engaged", tracking=ctl.tracking,
            haptic=ctl.haptic_on, at_goal=sim.at_goal)

    def report_summary(self) -> dict:
        hands = [r for r in self.trace if isinstance(r, HandSample)]
        sims = [r for r in self.trace if isinstance(r, SimState)]
        if len(hands) < 3 or len(sims) < 3:
            return {"duration_s": 0.0, "trans_mean_m": 0.0, "trans_std_m": 0.0,
                    "rot_mean_rad": 0.0, "rot_std_rad": 0.0, "delay_s": 0.0}
        hand_traj = Trajectory([h.t for h in hands],
                               [Pose(h.hand_pose.position, h.hand_pose.orientation)
                                for h in hands])
        sim_traj = Trajectory([s.t for s in sims], [s.pose for s in sims])
        try:
            return summarize(hand_traj, sim_traj,
                             self.pipeline.control_cfg).to_dict()
        except Exception:
            duration = hands[-1].t - hands[0].t
            return {"duration_s": duration, "trans_mean_m": 0.0,
                    "trans_std_m": 0.0, "rot_mean_rad": 0.0,
                    "rot_std_rad": 0.0, "delay_s": 0.0}

    # -- background tasks --

    async def _tick_task(self):
        dt = 1.0 / self.session_cfg.tick_rate
        while True:
            await asyncio.sleep(max(dt, 0.002))
            states = self.pipeline.advance_to(self._now())
            if self.recording and states:
                self.trace.extend(states)

    async def _broadcast_task(self):
        period = 1.0 / self.session_cfg.broadcast_rate
        loop = asyncio.get_event_loop()
        next_due = loop.time() + period
        while True:
            # absolute-deadline scheduling keeps the average rate on target
            await asyncio.sleep(max(next_due - loop.time(), 0.0))
            next_due += period
            if loop.time() > next_due + 1.0:
                next_due = loop.time() + period  # resync after a long stall
            frame = protocol.serialize(self.robot_state_msg())
            for c in list(self.clients.values()):
                c.push_state(frame)

    async def _sender_task(self, client: _Client):
        while True:
            await client.state_waiter.wait()
            client.state_waiter.clear()
            while not client.events.empty():
                await client.conn.send(client.events.get_nowait())
            if client.latest_state is not None:
                frame, client.latest_state = client.latest_state, None
                await client.conn.send(frame)

    # -- connection handling --

    async def _handle_message(self, client: _Client, text: str):
        # all replies go through the client's lossless queue, which keeps
        # outbound frames serialized with event broadcasts
        def reply(msg: dict):
            client.push_event(protocol.serialize(msg))

        try:
            msg = protocol.parse(text)
        except protocol.ProtocolError as e:
            reply(protocol.error_msg(e.code, e.message))
            return
        mtype = msg["type"]
        if mtype == "hello":
            requested = msg.get("role", "operator")
            if requested == "operator":
                if self.operator is None:
                    self.operator = client
                    client.role = "operator"
                else:
                    reply(protocol.error_msg("operator_taken",
                                             "another client is the operator"))
                    client.role = "observer"
            reply(protocol.ack(role=client.role, config=self.config_snapshot()))
        elif mtype == "hand_input":
            if client is not self.operator:
                reply(protocol.error_msg("not_operator",
                                         "only the operator may send hand_input"))
                return
            try:
                self.handle_hand_input(msg)
            except Exception as e:
                reply(protocol.error_msg("bad_input", str(e)))
        elif mtype == "gesture_override":
            if client is not self.operator:
                reply(protocol.error_msg("not_operator",
                                         "only the operator may override gestures"))
                return
            self.handle_gesture_override(msg)
        elif mtype == "set_config":
            reply(protocol.ack(config=self.handle_set_config(msg)))
        else:
            reply(protocol.error_msg("unexpected_type",
                                     f"server does not accept {mtype}"))

    async def _handler(self, conn):
        client = _Client(conn)
        self.clients[conn] = client
        client.sender = asyncio.ensure_future(self._sender_task(client))
        try:
            async for text in conn:
                await self._handle_message(client, text)
        finally:
            client.sender.cancel()
            del self.clients[conn]
            if self.operator is client:
                self.operator = None

    def _process_http(self, conn, request):
        path = request.path.split("?")[0]
        if "Upgrade" in request.headers:
            return None
        if path == "/trace":
            header = {"format": "glovelink-trace", "version": 1,
                      "config": self.config_snapshot()}
            lines = [json.dumps(header)]
            lines += [json.dumps(_record_to_json(r)) for r in self.trace]
            body = ("\n".join(lines) + "\n").encode()
            return conn.respond(http.HTTPStatus.OK, body.decode())
        if path == "/report":
            return conn.respond(http.HTTPStatus.OK,
                                json.dumps(self.report_summary()) + "\n")
        if path == "/record/start":
            self.trace = []
            self.recording = True
            return conn.respond(http.HTTPStatus.OK, '{"recording":true}\n')
        if path == "/record/stop":
            self.recording = False
            return conn.respond(http.HTTPStatus.OK, '{"recording":false}\n')
        if path == "/health":
            return conn.respond(http.HTTPStatus.OK, '{"ok":true}\n')
        return conn.respond(http.HTTPStatus.NOT_FOUND, "not found\n")

    async def serve(self, host: str = "127.0.0.1", port: int = 8765):
        """Run the gateway until cancelled."""
        async with ws_serve(self._handler, host, port,
                            process_request=self._process_http) as server:
            self._server = server
            tick = asyncio.ensure_future(self._tick_task())
            cast = asyncio.ensure_future(self._broadcast_task())
            try:
                await asyncio.Future()
            finally:
                tick.cancel()
                cast.cancel()


def run_server(host: str, port: int, control_cfg: ControlConfig,
               sim_cfg: SimConfig, model: GestureMlp | None = None,
               auto_track: bool = False):
    gw = Gateway(control_cfg, sim_cfg, model=model, auto_track=auto_track)
    asyncio.run(gw.serve(host, port))
