"""Networked service: HTTP session management plus TCP and WebSocket
transports speaking the same newline-delimited frame codec.

Each session runs as one asyncio task owning its engine (single logical
writer); connection handlers only enqueue decoded messages under the session
lock and pump per-connection outbound queues, so per-connection ordering is
preserved. Sessions share no mutable state and run in parallel freely.

Endpoints: POST /sessions, GET /sessions/{id}/status, GET /sessions/{id}/log,
GET /healthz, WS /ws/session/{id}. One TCP listener serves every session;
the first frame on a TCP connection must be a join carrying the session id.
"""

from __future__ import annotations

import asyncio
import os
import secrets
from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from ..scenario.io import ScenarioParseError, parse_scenario
from ..scenario.validate import validate
from ..telemetry.log import EventLogWriter, SimulatedClock, WallClock
from .protocol import (
    FrameDecoder,
    Join,
    Message,
    Welcome,
    decode,
    encode,
)
from .session import BROADCAST, SessionEngine

LOG_DIR_ENV = "GRIDTEAMS_LOG_DIR"
LOCKSTEP_WAIT_SECONDS = 10.0
SURVEY_GRACE_SECONDS = 120.0


class Connection:
    def __init__(self) -> None:
        self.queue: asyncio.Queue[bytes | None] = asyncio.Queue()
        self.player_id: int | None = None

    def send(self, frame: bytes) -> None:
        self.queue.put_nowait(frame)

    def close(self) -> None:
        self.queue.put_nowait(None)


class SessionHost:
    """Asyncio shell around one SessionEngine."""

    def __init__(self, engine: SessionEngine, pacing: str = "realtime"):
        self.engine = engine
        self.pacing = pacing
        self.lock = asyncio.Lock()
        self.connections: dict[int, Connection] = {}
        self.task: asyncio.Task | None = None
        self._actions_ready = asyncio.Event()
        self._survey_done = asyncio.Event()

    @property
    def status(self) -> str:
        if self.engine.closed:
            return "closed"
        if self.engine.ended:
            return "ended"
        if self.engine.started:
            return "running"
        return "lobby"

    def _route(self, outbound: list[tuple[int, Message]]) -> None:
        for target, message in outbound:
            frame = encode(message)
            if target == BROADCAST:
                for conn in self.connections.values():
                    conn.send(frame)
            else:
                conn = self.connections.get(target)
                if conn is not None:
                    conn.send(frame)

    async def join(self, join: Join, conn: Connection) -> Welcome | None:
        async with self.lock:
            reply = self.engine.handle_join(join)
            if not isinstance(reply, Welcome):
                conn.send(encode(reply))
                return None
            old = self.connections.get(reply.player)
            if old is not None and old is not conn:
                old.close()
            conn.player_id = reply.player
            self.connections[reply.player] = conn
            conn.send(encode(reply))
            if self.engine.all_filled and self.task is None:
                self.task = asyncio.get_running_loop().create_task(self._run())
            return reply

    async def client_message(self, player_id: int, message: Message) -> None:
        async with self.lock:
            self._route(self.engine.on_message(player_id, message))
            if self.engine.ended and self._all_surveys_in():
                self._survey_done.set()
            if self._lockstep_ready():
                self._actions_ready.set()

    async def disconnect(self, conn: Connection) -> None:
        async with self.lock:
            pid = conn.player_id
            if pid is not None and self.connections.get(pid) is conn:
                del self.connections[pid]
                self.engine.on_disconnect(pid)
                if self._lockstep_ready():
                    self._actions_ready.set()

    def _lockstep_ready(self) -> bool:
        if self.pacing != "lockstep" or not self.engine.started or self.engine.ended:
            return False
        connected = set(self.connections)
        return connected <= self.engine.actions_pending() or not connected

    def _all_surveys_in(self) -> bool:
        # The survey window stays open while human players have instruments
        # outstanding; agents never block it.
        humans = [s.player_id for s in self.engine.slots if s.taken_by == "human"]
        received = self.engine.surveys_received
        return all(
            (p, instrument) in received
            for p in humans
            for instrument in ("workflow", "relatedness")
        )

    async def _run(self) -> None:
        period = 1.0 / self.engine.tick_rate
        async with self.lock:
            self._route(self.engine.start())
        while True:
            async with self.lock:
                if self.engine.ended:
                    break
                self._actions_ready.clear()
                self._route(self.engine.tick_begin())
            if self.pacing == "lockstep":
                try:
                    await asyncio.wait_for(self._actions_ready.wait(), LOCKSTEP_WAIT_SECONDS)
                except asyncio.TimeoutError:
                    pass  # tick anyway; disconnected or stalled clients idle
            else:
                await asyncio.sleep(period)
            async with self.lock:
                if self.engine.ended:
                    break
                self._route(self.engine.tick_finish())
        if not self._all_surveys_in():
            try:
                await asyncio.wait_for(self._survey_done.wait(), SURVEY_GRACE_SECONDS)
            except asyncio.TimeoutError:
                pass
        async with self.lock:
            self.engine.close()
            for conn in self.connections.values():
                conn.close()

    async def abort(self) -> None:
        if self.task is not None:
            self.task.cancel()
        async with self.lock:
            if not self.engine.closed:
                self.engine.close()
            for conn in self.connections.values():
                conn.close()


def create_app(
    log_dir: str | Path | None = None,
    static_dir: str | Path | None = None,
    tcp_host: str = "127.0.0.1",
    tcp_port: int | None = None,
) -> FastAPI:
    """Build the service app; when ``tcp_port`` is given (0 for ephemeral)
    the raw TCP transport starts and stops with the app."""
    app = FastAPI(title="gridteams session server")
    sessions: dict[str, SessionHost] = {}
    app.state.sessions = sessions
    app.state.log_dir = Path(log_dir or os.environ.get(LOG_DIR_ENV, "session-logs"))
    app.state.tcp_port = None

    if tcp_port is not None:

        @app.on_event("startup")
        async def _start_tcp() -> None:
            app.state.tcp_server = await serve_tcp(app, tcp_host, tcp_port)
            app.state.tcp_port = app.state.tcp_server.sockets[0].getsockname()[1]

        @app.on_event("shutdown")
        async def _stop_tcp() -> None:
            app.state.tcp_server.close()

    @app.get("/healthz")
    async def healthz() -> dict[str, Any]:
        return {"ok": True, "sessions": len(sessions), "tcp_port": app.state.tcp_port}

    @app.post("/sessions")
    async def create_session(body: dict[str, Any]) -> JSONResponse:
        try:
            scenario_obj = body["scenario"]
        except KeyError:
            raise HTTPException(status_code=422, detail="body must carry a 'scenario' document")
        try:
            scenario, _warnings = parse_scenario(scenario_obj, strict=bool(body.get("strict", True)))
        except ScenarioParseError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        report = validate(scenario)
        if not report.ok:
            raise HTTPException(status_code=422, detail=report.render())
        pacing = body.get("pacing", "realtime")
        if pacing not in ("realtime", "lockstep"):
            raise HTTPException(status_code=422, detail="pacing must be realtime or lockstep")
        session_id = body.get("session_id") or f"{scenario.name}-{secrets.token_hex(4)}"
        if session_id in sessions:
            raise HTTPException(status_code=409, detail=f"session {session_id} already exists")
        seed = body.get("seed")
        register_session(
            app,
            scenario,
            seed=int(seed) if seed is not None else None,
            session_id=session_id,
            pacing=pacing,
        )
        engine = sessions[session_id].engine
        return JSONResponse(
            {
                "session_id": session_id,
                "ws_url": f"/ws/session/{session_id}",
                "tcp_port": app.state.tcp_port,
                "slots": [s.name for s in engine.slots],
                "pacing": pacing,
            },
            status_code=201,
        )

    @app.get("/sessions/{session_id}/status")
    async def session_status(session_id: str) -> dict[str, Any]:
        host = sessions.get(session_id)
        if host is None:
            raise HTTPException(status_code=404, detail="no such session")
        engine = host.engine
        result = engine.result
        return {
            "session_id": session_id,
            "state": host.status,
            "tick": engine.sim.state.tick,
            "slots": [
                {
                    "name": s.name,
                    "role": s.role,
                    "fill": s.fill,
                    "taken_by": s.taken_by,
                    "connected": s.connected,
                }
                for s in engine.slots
            ],
            "result": None
            if result is None
            else {
                "completion": result.completion,
                "duration_ticks": result.duration_ticks,
                "final_score": result.final_score,
                "final_next_index": result.final_next_index,
            },
        }

    @app.get("/sessions/{session_id}/log")
    async def session_log(session_id: str) -> Response:
        host = sessions.get(session_id)
        if host is None:
            raise HTTPException(status_code=404, detail="no such session")
        path = Path(host.engine.sink.path)
        if not path.exists():
            raise HTTPException(status_code=404, detail="log not started")
        return Response(
            content=path.read_bytes(),
            media_type="application/x-ndjson",
            headers={"Content-Disposition": f'attachment; filename="{session_id}.jsonl"'},
        )

    @app.websocket("/ws/session/{session_id}")
    async def ws_session(websocket: WebSocket, session_id: str) -> None:
        host = sessions.get(session_id)
        if host is None:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        conn = Connection()

        async def pump_out() -> None:
            while True:
                frame = await conn.queue.get()
                if frame is None:
                    break
                await websocket.send_text(frame.decode("utf-8"))

        sender = asyncio.create_task(pump_out())
        try:
            while True:
                text = await websocket.receive_text()
                message = decode(text.strip())
                if isinstance(message, Join) and conn.player_id is None:
                    await host.join(message, conn)
                elif conn.player_id is not None:
                    await host.client_message(conn.player_id, message)
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()
            await host.disconnect(conn)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def register_session(
    app: FastAPI,
    scenario,
    seed: int | None = None,
    session_id: str | None = None,
    pacing: str = "realtime",
) -> str:
    """Create a session on an app (used by POST /sessions and the serve CLI
    bootstrap)."""
    sessions: dict[str, SessionHost] = app.state.sessions
    session_id = session_id or f"{scenario.name}-{secrets.token_hex(4)}"
    seed = scenario.seed if seed is None else seed
    app.state.log_dir.mkdir(parents=True, exist_ok=True)
    log_path = app.state.log_dir / f"{session_id}.jsonl"
    resolved = scenario.resolve(seed_override=seed)
    clock = SimulatedClock(resolved.tick_rate) if pacing == "lockstep" else WallClock()
    sink = EventLogWriter(log_path, session_id, clock)
    engine = SessionEngine(resolved, session_id=session_id, seed=seed, sink=sink)
    sessions[session_id] = SessionHost(engine, pacing=pacing)
    return session_id


async def serve_tcp(app: FastAPI, host: str, port: int) -> asyncio.AbstractServer:
    """Raw TCP transport: first frame on a connection must be a join naming
    the session."""
    sessions: dict[str, SessionHost] = app.state.sessions

    async def handle(reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        conn = Connection()
        decoder = FrameDecoder()
        session_host: SessionHost | None = None

        async def pump_out() -> None:
            while True:
                frame = await conn.queue.get()
                if frame is None:
                    break
                writer.write(frame)
                await writer.drain()
            writer.close()

        sender = asyncio.create_task(pump_out())
        try:
            while True:
                data = await reader.read(65536)
                if not data:
                    break
                for message in decoder.feed(data):
                    if isinstance(message, Join) and conn.player_id is None:
                        target = sessions.get(message.session or "")
                        if target is None:
                            conn.send(
                                encode_error("UnknownSession", f"no session {message.session!r}")
                            )
                            continue
                        session_host = target
                        await session_host.join(message, conn)
                    elif session_host is not None and conn.player_id is not None:
                        await session_host.client_message(conn.player_id, message)
        finally:
            if session_host is not None:
                await session_host.disconnect(conn)
            conn.close()
            await asyncio.sleep(0)
            sender.cancel()

    return await asyncio.start_server(handle, host, port)


def encode_error(code: str, message: str) -> bytes:
    from .protocol import ErrorMsg

    return encode(ErrorMsg(code=code, message=message))


def run_server(
    host: str = "127.0.0.1",
    port: int = 8000,
    tcp_port: int | None = None,
    log_dir: str | Path | None = None,
    static_dir: str | Path | None = None,
    scenario=None,
    seed: int | None = None,
    session_id: str | None = None,
    pacing: str = "realtime",
) -> None:
    """Blocking entry point used by the serve CLI. The HTTP/WebSocket
    listener binds ``port``; the raw TCP transport binds ``port + 1`` unless
    overridden. When a scenario is given, one session is opened up front so
    players can join immediately."""
    import uvicorn

    app = create_app(
        log_dir=log_dir,
        static_dir=static_dir,
        tcp_host=host,
        tcp_port=tcp_port if tcp_port is not None else port + 1,
    )
    if scenario is not None:
        sid = register_session(app, scenario, seed=seed, session_id=session_id, pacing=pacing)
        print(f"session {sid} open: ws=/ws/session/{sid} http={host}:{port} tcp={host}:{tcp_port or port + 1}")
    uvicorn.run(app, host=host, port=port, log_level="warning")

