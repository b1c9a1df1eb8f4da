from __future__ import annotations

from pathlib import Path

import pytest

from gridteams.net.protocol import (
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

GOLDEN_DIR = Path(__file__).parent / "golden"

SAMPLES = [
    Join(player_kind="agent", display_name="bot1", slot="s1", session="sess-1"),
    Welcome(
        player=1,
        slot="s1",
        role={"id": "worker", "carry_capacity": 1},
        scenario_digest="abc123",
        session="sess-1",
        tick_rate=10,
        time_limit_ticks=600,
        sequence=(0, 1, 2),
        palette_size=3,
        chat_mode="free_text",
        chat_catalog=(),
        reconnect_token="tok",
        survey_tasks=("a", "b"),
    ),
    ObservationMsg(tick=4, observation={"player": 1, "blocks": []}),
    ActionMsg(action={"kind": "move", "direction": "north"}, tick=4, ref=9),
    Ack(tick=4, ref=9),
    Reject(reason="occupied", tick=4, ref=9),
    ChatSendMsg(to="all", body={"text": "room A has red"}),
    ChatSendMsg(to=2, body={"catalog": 3}),
    ChatDeliverMsg(sender=1, to="all", body={"text": "hi"}, tick=7),
    SessionEventMsg(event="sequence_advance", tick=12, payload={"next_index": 2}),
    SurveyPromptMsg(instrument={"instrument": "workflow"}),
    SurveyResponseMsg(instrument="workflow", workflow_choice=4),
    ErrorMsg(code="SessionFull", message="all slots are filled"),
]


@pytest.mark.parametrize("message", SAMPLES, ids=lambda m: m.KIND)
def test_round_trip_every_variant(message):
    assert decode(encode(message)) == message


def test_unknown_kind_rejected():
    frame = b'{"v":1,"kind":"FooBar"}'
    with pytest.raises(UnknownKindError) as err:
        decode(frame)
    assert "FooBar" in str(err.value)


def test_version_mismatch_is_explicit():
    with pytest.raises(VersionError):
        decode(b'{"v":99,"kind":"ack","tick":0}')
    with pytest.raises(DecodeError):
        decode(b'{"kind":"ack","tick":0}')  # missing version entirely


def test_malformed_frame_reports_byte_offset():
    decoder = FrameDecoder()
    good = encode(Ack(tick=1))
    with pytest.raises(DecodeError) as err:
        decoder.feed(good + b'{"v":1,"kind":"ack"\n')
    assert err.value.offset >= len(good)


def test_frame_decoder_handles_partial_feeds():
    decoder = FrameDecoder()
    frame = encode(Ack(tick=5, ref=1))
    assert decoder.feed(frame[:10]) == []
    messages = decoder.feed(frame[10:])
    assert messages == [Ack(tick=5, ref=1)]


def test_missing_required_field_is_malformed():
    with pytest.raises(DecodeError):
        decode(b'{"v":1,"kind":"chat_send","to":"all"}')  # no body


def test_welcome_golden_frame_stable():
    # Golden frame recorded from the first correct build; byte layout is part
    # of the compatibility contract within a major release.
    frame = encode(SAMPLES[1])
    golden = GOLDEN_DIR / "welcome.frame"
    assert frame == golden.read_bytes()


def test_all_sample_frames_golden_stable():
    golden = GOLDEN_DIR / "samples.jsonl"
    frames = b"".join(encode(m) for m in SAMPLES)
    assert frames == golden.read_bytes()
