"""Embedded post-session survey instruments.

Two instruments are captured: a single-choice team workflow pattern rating
and a per-task importance/relatedness rating pair, both on 1-5 scales.
Responses are stored verbatim as survey events; reliability analysis is out
of scope here and happens in external tools.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..events import SURVEY, EventRecord
from .log import EventLogWriter

WORKFLOW_CHOICES = {
    1: "Not a team task: members work alone, outside the team context",
    2: "Pooled/additive: members work separately and outputs simply add up",
    3: "Sequential: work flows from one member to the next, mostly one way",
    4: "Reciprocal: work moves back and forth between members over time",
    5: "Intensive: the whole team must diagnose and solve the task together",
}

RATING_MIN, RATING_MAX = 1, 5


class SurveyError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class SurveyResponse:
    player_id: int
    instrument: str  # "workflow" | "relatedness"
    workflow_choice: int | None = None
    relatedness_items: list[dict[str, Any]] = field(default_factory=list)
    # each item: {"task": str, "importance": 1..5, "relatedness": 1..5}

    def to_json_obj(self) -> dict[str, Any]:
        obj: dict[str, Any] = {"player": self.player_id, "instrument": self.instrument}
        if self.instrument == "workflow":
            obj["workflow_choice"] = self.workflow_choice
        else:
            obj["items"] = self.relatedness_items
        return obj


def survey_instruments(survey_tasks: list[str]) -> list[dict[str, Any]]:
    """Instrument descriptors sent to clients in survey prompts."""
    return [
        {
            "instrument": "workflow",
            "choices": [{"value": k, "label": v} for k, v in WORKFLOW_CHOICES.items()],
        },
        {
            "instrument": "relatedness",
            "tasks": list(survey_tasks),
            "scales": {
                "importance": {"min": RATING_MIN, "max": RATING_MAX},
                "relatedness": {"min": RATING_MIN, "max": RATING_MAX},
            },
        },
    ]


def validate_survey(
    response: SurveyResponse, meta: dict[str, Any]
) -> None:
    slots = {s["player"]: s for s in meta["slots"]}
    slot = slots.get(response.player_id)
    if slot is None:
        raise SurveyError("UnknownPlayer", f"player {response.player_id} not in this session")
    if slot["kind"] != "human":
        raise SurveyError(
            "RespondentError", "surveys are collected from human participants only"
        )
    if response.instrument == "workflow":
        if response.workflow_choice not in WORKFLOW_CHOICES:
            raise SurveyError("RangeError", "workflow_choice must be an integer 1..5")
    elif response.instrument == "relatedness":
        tasks = meta.get("survey_tasks", [])
        if len(response.relatedness_items) != len(tasks):
            raise SurveyError(
                "LengthError",
                f"{len(tasks)} task ratings declared by the scenario, "
                f"got {len(response.relatedness_items)}",
            )
        for i, item in enumerate(response.relatedness_items):
            for key in ("importance", "relatedness"):
                value = item.get(key)
                if not isinstance(value, int) or not (RATING_MIN <= value <= RATING_MAX):
                    raise SurveyError(
                        "RangeError", f"items[{i}].{key} must be an integer 1..5"
                    )
    else:
        raise SurveyError("UnknownInstrument", f"no instrument {response.instrument!r}")


def record_survey(
    sink: EventLogWriter, response: SurveyResponse, meta: dict[str, Any], tick: int
) -> EventRecord:
    """Validate and append one survey response after session end."""
    validate_survey(response, meta)
    record = EventRecord(tick=tick, kind=SURVEY, payload=response.to_json_obj())
    sink.append(record)
    return record
