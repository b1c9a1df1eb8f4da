from .protocol import (
    Ack,
    ActionMsg,
    ChatDeliverMsg,
    ChatSendMsg,
    DecodeError,
    ErrorMsg,
    FrameDecoder,
    Join,
    ObservationMsg,
    Reject,
    SessionEventMsg,
    SurveyPromptMsg,
    SurveyResponseMsg,
    UnknownKindError,
    VersionError,
    Welcome,
    decode,
    encode,
)
from .session import SessionEngine, SessionResult, route_chat, ChatRouteError
from .lockstep import LockstepDriver

__all__ = [
    "Ack",
    "ActionMsg",
    "ChatDeliverMsg",
    "ChatRouteError",
    "ChatSendMsg",
    "DecodeError",
    "ErrorMsg",
    "FrameDecoder",
    "Join",
    "LockstepDriver",
    "ObservationMsg",
    "Reject",
    "SessionEngine",
    "SessionEventMsg",
    "SessionResult",
    "SurveyPromptMsg",
    "SurveyResponseMsg",
    "UnknownKindError",
    "VersionError",
    "Welcome",
    "decode",
    "encode",
]
