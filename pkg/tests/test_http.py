from __future__ import annotations

import threading
import time

import httpx
import pytest
import uvicorn

from gridteams import events as ev
from gridteams.agents.client import run_tcp_agent
from gridteams.agents.policies import make_policy
from gridteams.net.http import create_app
from gridteams.events import EventRecord
from gridteams.scenario import generate
from gridteams.telemetry import agent_summaries, read_log
from gridteams.telemetry.log import EventLogReader

import json
import random


@pytest.fixture(scope="module")
def server(tmp_path_factory):
    log_dir = tmp_path_factory.mktemp("logs")
    app = create_app(log_dir=log_dir, tcp_port=0)
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="error")
    srv = uvicorn.Server(config)
    thread = threading.Thread(target=srv.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not srv.started:
        if time.time() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.02)
    port = srv.servers[0].sockets[0].getsockname()[1]
    yield {"app": app, "port": port, "log_dir": log_dir}
    srv.should_exit = True
    thread.join(timeout=5)


def base_url(server):
    return f"http://127.0.0.1:{server['port']}"


def test_healthz(server):
    reply = httpx.get(base_url(server) + "/healthz")
    assert reply.status_code == 200
    body = reply.json()
    assert body["ok"] is True
    assert isinstance(body["tcp_port"], int)


def test_create_session_validates_scenario(server):
    reply = httpx.post(base_url(server) + "/sessions", json={"scenario": {"bogus": 1}})
    assert reply.status_code == 422


def test_end_to_end_headless_service(server):
    scenario = generate({"rooms": "2x2", "colors": 3, "seq": 3, "density": 2, "slots": 4}, 31)
    reply = httpx.post(
        base_url(server) + "/sessions",
        json={
            "scenario": scenario.to_json_obj(),
            "pacing": "lockstep",
            "seed": 31,
            "session_id": "e2e-test",
        },
    )
    assert reply.status_code == 201, reply.text
    body = reply.json()
    tcp_port = body["tcp_port"]
    assert body["slots"] == ["s1", "s2", "s3", "s4"]

    threads = []
    clients = {}

    def connect(slot):
        clients[slot] = run_tcp_agent(
            "127.0.0.1", tcp_port, "e2e-test", slot, make_policy("greedy", random.Random(slot))
        )

    for slot in body["slots"]:
        t = threading.Thread(target=connect, args=(slot,), daemon=True)
        t.start()
        threads.append(t)
    for t in threads:
        t.join(timeout=120)
        assert not t.is_alive(), "agent connection did not finish"

    deadline = time.time() + 30
    status = None
    while time.time() < deadline:
        status = httpx.get(base_url(server) + "/sessions/e2e-test/status").json()
        if status["state"] == "closed":
            break
        time.sleep(0.05)
    assert status is not None and status["state"] == "closed", status
    assert status["result"]["completion"] is True

    log_reply = httpx.get(base_url(server) + "/sessions/e2e-test/log")
    assert log_reply.status_code == 200
    lines = [l for l in log_reply.text.splitlines() if l.strip()]
    records = [EventRecord.from_json_obj(json.loads(l)) for l in lines]
    assert records[0].kind == ev.SESSION_META
    assert records[-1].kind == ev.SESSION_END
    summaries = agent_summaries(records)
    assert len(summaries) == 4
    end = [r for r in records if r.kind == ev.END][0]
    assert sum(s.correct_drops for s in summaries) == end.payload["final_next_index"]
    assert all(c.fault_count == 0 for c in clients.values())


def test_status_unknown_session_404(server):
    reply = httpx.get(base_url(server) + "/sessions/nope/status")
    assert reply.status_code == 404


def test_websocket_join_and_play(server):
    # A lobby of two over WebSocket, driven through the in-process test client.
    from fastapi.testclient import TestClient
    from gridteams.net.protocol import decode, encode, Join, ActionMsg, Welcome, ObservationMsg

    scenario = generate({"rooms": "1x2", "colors": 2, "seq": 1, "density": 1, "slots": 2}, 8)
    app = server["app"]
    with TestClient(app) as tc:
        reply = tc.post(
            "/sessions",
            json={
                "scenario": scenario.to_json_obj(),
                "pacing": "lockstep",
                "seed": 8,
                "session_id": "ws-test",
            },
        )
        assert reply.status_code == 201
        with tc.websocket_connect("/ws/session/ws-test") as ws1, tc.websocket_connect(
            "/ws/session/ws-test"
        ) as ws2:
            ws1.send_text(encode(Join(player_kind="agent", display_name="a", slot="s1")).decode())
            welcome1 = decode(ws1.receive_text())
            assert isinstance(welcome1, Welcome) and welcome1.player == 1
            ws2.send_text(encode(Join(player_kind="agent", display_name="b", slot="s2")).decode())
            welcome2 = decode(ws2.receive_text())
            assert isinstance(welcome2, Welcome) and welcome2.player == 2
            # session auto-starts; both receive the start event then tick 0
            saw_obs = False
            for _ in range(8):
                message = decode(ws1.receive_text())
                if isinstance(message, ObservationMsg):
                    saw_obs = True
                    ws1.send_text(
                        encode(ActionMsg(action={"kind": "noop"}, tick=message.tick)).decode()
                    )
                    break
            assert saw_obs
