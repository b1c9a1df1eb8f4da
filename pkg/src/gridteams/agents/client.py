"""Frame-level agent client.

Adapts a policy to the wire protocol: frames in, frames out. The same class
serves the in-memory lockstep driver and the socket pumps, so agents are
integrated exactly the way a remote client would be. A capability guard
replaces any forbidden action a policy proposes with a noop and counts it
as a policy fault; shipped baselines must never trigger it.
"""

from __future__ import annotations

import logging
import socket

from ..net.protocol import (
    Ack,
    ActionMsg,
    ChatDeliverMsg,
    ChatSendMsg,
    FrameDecoder,
    ObservationMsg,
    Reject,
    SessionEventMsg,
    Welcome,
    encode,
)
from .policies import Policy

log = logging.getLogger(__name__)


class AgentClient:
    def __init__(self, policy: Policy):
        self.policy = policy
        self.decoder = FrameDecoder()
        self.welcome: Welcome | None = None
        self.fault_count = 0
        self._ref = 0

    def feed(self, frame: bytes) -> list[bytes]:
        out: list[bytes] = []
        for message in self.decoder.feed(frame):
            if isinstance(message, Welcome):
                self.welcome = message
                self.policy.on_welcome(message)
            elif isinstance(message, ChatDeliverMsg):
                self.policy.on_chat(message)
            elif isinstance(message, Reject):
                self.policy.on_reject(message)
            elif isinstance(message, Ack):
                self.policy.on_ack(message)
            elif isinstance(message, SessionEventMsg):
                self.policy.on_session_event(message)
            elif isinstance(message, ObservationMsg):
                action = self.policy.decide(message.observation)
                action = self._guard(action)
                if action["kind"] == "chat":
                    out.append(encode(ChatSendMsg(to=action["to"], body=action["body"])))
                else:
                    self._ref += 1
                    out.append(
                        encode(ActionMsg(action=action, tick=message.tick, ref=self._ref))
                    )
        return out

    def _guard(self, action: dict) -> dict:
        role = self.welcome.role if self.welcome else {}
        kind = action.get("kind")
        forbidden = (
            (kind == "clear" and not role.get("can_clear_blockage"))
            or (kind in ("grab", "drop") and role.get("carry_capacity", 1) == 0)
        )
        if forbidden:
            self.fault_count += 1
            log.warning("policy %s proposed forbidden %s; substituting noop", self.policy.name, kind)
            return {"kind": "noop"}
        return action


def run_tcp_agent(
    host: str,
    port: int,
    session: str,
    slot: str,
    policy: Policy,
    timeout: float = 60.0,
) -> AgentClient:
    """Connect one agent over raw TCP and pump frames until the server
    closes the connection (session end)."""
    from ..net.protocol import Join

    client = AgentClient(policy)
    with socket.create_connection((host, port), timeout=timeout) as sock:
        sock.sendall(
            encode(Join(player_kind="agent", display_name=slot, slot=slot, session=session))
        )
        while True:
            try:
                data = sock.recv(65536)
            except socket.timeout:
                break
            if not data:
                break
            for frame in client.feed(data):
                sock.sendall(frame)
    return client
