import asyncio
import json
import math
import urllib.request

import pytest
from websockets.asyncio.client import connect

from glovelink import protocol
from glovelink.gateway import Gateway, SessionConfig
from glovelink.simpsm import SimConfig
from glovelink.teleop import ControlConfig


def run_scenario(scenario, **gateway_kwargs):
    """Start a gateway on an ephemeral port and run the async scenario."""

    async def main():
        gw = Gateway(**gateway_kwargs)
        server_task = asyncio.ensure_future(gw.serve("127.0.0.1", 0))
        while gw._server is None:
            await asyncio.sleep(0.01)
        port = gw._server.sockets[0].getsockname()[1]
        try:
            return await asyncio.wait_for(scenario(gw, port), timeout=30)
        finally:
            server_task.cancel()
            try:
                await server_task
            except (asyncio.CancelledError, Exception):
                pass

    return asyncio.run(main())


async def recv_type(conn, mtype, timeout=5.0):
    """Receive frames until one of the given type arrives."""
    deadline = asyncio.get_event_loop().time() + timeout
    while True:
        remaining = deadline - asyncio.get_event_loop().time()
        msg = protocol.parse(await asyncio.wait_for(conn.recv(), remaining))
        if msg["type"] == mtype:
            return msg


async def http_get(port, path):
    url = f"http://127.0.0.1:{port}{path}"
    return await asyncio.to_thread(
        lambda: urllib.request.urlopen(url, timeout=5).read().decode())


class TestHandshake:
    def test_operator_ack_with_config(self):
        async def scenario(gw, port):
            async with connect(f"ws://127.0.0.1:{port}") as c:
                await c.send(protocol.serialize(protocol.hello("operator")))
                ack = await recv_type(c, "ack")
                return ack

        ack = run_scenario(scenario)
        assert ack["role"] == "operator"
        assert ack["config"]["eta"] == pytest.approx(0.2)
        assert ack["config"]["L_h"] == pytest.approx(0.40)
        assert ack["config"]["L_t"] == pytest.approx(0.08)

    def test_second_operator_rejected(self):
        async def scenario(gw, port):
            async with connect(f"ws://127.0.0.1:{port}") as a, \
                    connect(f"ws://127.0.0.1:{port}") as b:
                await a.send(protocol.serialize(protocol.hello("operator")))
                ack_a = await recv_type(a, "ack")
                await b.send(protocol.serialize(protocol.hello("operator")))
                err = await recv_type(b, "error")
                ack_b = await recv_type(b, "ack")
                return ack_a, err, ack_b

        ack_a, err, ack_b = run_scenario(scenario)
        assert ack_a["role"] == "operator"
        assert err["code"] == "operator_taken"
        assert ack_b["role"] == "observer"

    def test_operator_slot_released_on_disconnect(self):
        async def scenario(gw, port):
            async with connect(f"ws://127.0.0.1:{port}") as a:
                await a.send(protocol.serialize(protocol.hello("operator")))
                await recv_type(a, "ack")
            while gw.operator is not None:
                await asyncio.sleep(0.01)
            async with connect(f"ws://127.0.0.1:{port}") as b:
                await b.send(protocol.serialize(protocol.hello("operator")))
                return await recv_type(b, "ack")

        ack = run_scenario(scenario)
        assert ack["role"] == "operator"

    def test_observer_cannot_drive(self):
        async def scenario(gw, port):
            async with connect(f"ws://127.0.0.1:{port}") as a, \
                    connect(f"ws://127.0.0.1:{port}") as b:
                await a.send(protocol.serialize(protocol.hello("operator")))
                await recv_type(a, "ack")
                await b.send(protocol.serialize(protocol.hello("observer")))
                await recv_type(b, "ack")
                await b.send(protocol.serialize(
                    protocol.hand_input(0.0, [0, 0, 0], [1, 0, 0, 0], 0.1)))
                return await recv_type(b, "error")

        err = run_scenario(scenario)
        assert err["code"] == "not_operator"


class TestStreaming:
    def test_state_broadcast_rate(self):
        async def scenario(gw, port):
            async with connect(f"ws://127.0.0.1:{port}") as c:
                await c.send(protocol.serialize(protocol.hello("operator")))
                await recv_type(c, "ack")

                # drive hand input at ~120 Hz while counting robot_state
                states = []
                t_start = asyncio.get_event_loop().time()
                duration = 1.5

                async def pump():
                    i = 0
                    while asyncio.get_event_loop().time() - t_start < duration:
                        x = 0.02 * math.sin(i / 20)
                        await c.send(protocol.serialize(protocol.hand_input(
                            i / 120, [x, 0, 0], [1, 0, 0, 0], 0.1)))
                        i += 1
                        await asyncio.sleep(1 / 120)

                async def collect():
                    while asyncio.get_event_loop().time() - t_start < duration:
                        try:
                            msg = protocol.parse(await asyncio.wait_for(
                                c.recv(), 0.5))
                        except asyncio.TimeoutError:
                            continue
                        if msg["type"] == "robot_state":
                            states.append(asyncio.get_event_loop().time())

                await asyncio.gather(pump(), collect())
                return states

        stamps = run_scenario(scenario, auto_track=True)
        assert len(stamps) >= 3
        span = stamps[-1] - stamps[0]
        rate = (len(stamps) - 1) / span
        assert rate == pytest.approx(60.0, rel=0.10)

    def test_malformed_frame_keeps_connection(self):
        async def scenario(gw, port):
            async with connect(f"ws://127.0.0.1:{port}") as c:
                await c.send("{broken")
                err = await recv_type(c, "error")
                await c.send(protocol.serialize(protocol.hello("operator")))
                ack = await recv_type(c, "ack")
                return err, ack

        err, ack = run_scenario(scenario)
        assert err["code"] == "bad_json"
        assert ack["role"] == "operator"

    def test_set_config_round_trip(self):
        async def scenario(gw, port):
            async with connect(f"ws://127.0.0.1:{port}") as c:
                await c.send(protocol.serialize(protocol.hello("operator")))
                await recv_type(c, "ack")
                await c.send(protocol.serialize(
                    protocol.set_config(eta=0.25, latency=0.1)))
                return await recv_type(c, "ack")

        ack = run_scenario(scenario)
        assert ack["config"]["eta"] == pytest.approx(0.25)
        assert ack["config"]["latency"] == pytest.approx(0.1)

    def test_clutch_event_broadcast(self):
        async def scenario(gw, port):
            async with connect(f"ws://127.0.0.1:{port}") as c:
                await c.send(protocol.serialize(protocol.hello("operator")))
                await recv_type(c, "ack")
                await c.send(protocol.serialize(
                    protocol.hand_input(0.0, [0, 0, 0], [1, 0, 0, 0], 0.1)))
                await c.send(protocol.serialize(protocol.gesture_override(3)))
                await c.send(protocol.serialize(
                    protocol.hand_input(0.01, [0, 0, 0], [1, 0, 0, 0], 0.1)))
                return await recv_type(c, "event")

        ev = run_scenario(scenario, auto_track=True)
        assert ev["name"] == "clutch_engaged"


class TestHttp:
    def test_health(self):
        async def scenario(gw, port):
            return await http_get(port, "/health")

        assert json.loads(run_scenario(scenario)) == {"ok": True}

    def test_record_and_trace(self):
        async def scenario(gw, port):
            await http_get(port, "/record/start")
            async with connect(f"ws://127.0.0.1:{port}") as c:
                await c.send(protocol.serialize(protocol.hello("operator")))
                await recv_type(c, "ack")
                for i in range(30):
                    await c.send(protocol.serialize(protocol.hand_input(
                        i / 120, [0.01 * i, 0, 0], [1, 0, 0, 0], 0.1)))
                    await asyncio.sleep(1 / 120)
            await http_get(port, "/record/stop")
            return await http_get(port, "/trace")

        body = run_scenario(scenario, auto_track=True)
        lines = body.strip().splitlines()
        header = json.loads(lines[0])
        assert header["format"] == "glovelink-trace"
        kinds = {json.loads(l)["type"] for l in lines[1:]}
        assert {"hand", "gesture", "goal", "sim"} <= kinds

    def test_report_endpoint(self):
        async def scenario(gw, port):
            await http_get(port, "/record/start")
            async with connect(f"ws://127.0.0.1:{port}") as c:
                await c.send(protocol.serialize(protocol.hello("operator")))
                await recv_type(c, "ack")
                for i in range(240):
                    x = 0.04 * math.sin(2 * math.pi * i / 120)
                    await c.send(protocol.serialize(protocol.hand_input(
                        i / 120, [x, 0, 0], [1, 0, 0, 0], 0.1)))
                    await asyncio.sleep(1 / 240)
            await http_get(port, "/record/stop")
            return await http_get(port, "/report")

        rep = json.loads(run_scenario(scenario, auto_track=True))
        assert set(rep) == {"duration_s", "trans_mean_m", "trans_std_m",
                            "rot_mean_rad", "rot_std_rad", "delay_s"}
        assert all(math.isfinite(v) for v in rep.values())

    def test_unknown_path_404(self):
        async def scenario(gw, port):
            url = f"http://127.0.0.1:{port}/nope"

            def fetch():
                try:
                    urllib.request.urlopen(url, timeout=5)
                    return 200
                except urllib.error.HTTPError as e:
                    return e.code

            return await asyncio.to_thread(fetch)

        assert run_scenario(scenario) == 404
