"""Synchronous lockstep driver for headless sessions.

Agents attach as frame-level clients: every message crosses the same
newline-delimited codec as the network transports, so the wire path is
exercised end to end, just without sockets. The tick advances when every
client has answered the tick's observation, which is what makes headless
runs both as-fast-as-possible and byte-for-byte reproducible.
"""

from __future__ import annotations

from typing import Protocol

from .protocol import FrameDecoder, Join, Message, Welcome, encode, decode
from .session import BROADCAST, Outbound, SessionEngine, SessionResult


class FrameClient(Protocol):
    """A client that consumes frames and may emit response frames."""

    def feed(self, frame: bytes) -> list[bytes]: ...


class LockstepDriver:
    def __init__(self, engine: SessionEngine, clients: dict[str, FrameClient]):
        """``clients`` maps slot names to frame clients; every slot must be
        agent-fillable and covered."""
        self.engine = engine
        self.clients: dict[int, FrameClient] = {}
        self._decoders: dict[int, FrameDecoder] = {}
        for slot_name in sorted(clients):
            welcome = engine.handle_join(
                Join(player_kind="agent", display_name=slot_name, slot=slot_name)
            )
            if not isinstance(welcome, Welcome):
                raise RuntimeError(f"join failed for slot {slot_name}: {welcome}")
            pid = welcome.player
            self.clients[pid] = clients[slot_name]
            self._decoders[pid] = FrameDecoder()
            self._feed(pid, welcome)

    def _feed(self, pid: int, message: Message) -> None:
        frames = self.clients[pid].feed(encode(message))
        for frame in frames:
            reply = decode(frame)
            self._dispatch(self.engine.on_message(pid, reply))

    def _dispatch(self, outbound: list[Outbound]) -> None:
        for target, message in outbound:
            if target == BROADCAST:
                for pid in sorted(self.clients):
                    self._feed(pid, message)
            elif target in self.clients:
                self._feed(target, message)

    def run(self) -> SessionResult:
        self._dispatch(self.engine.start())
        while not self.engine.ended:
            self._dispatch(self.engine.tick_begin())
            self._dispatch(self.engine.tick_finish())
        return self.engine.close()
