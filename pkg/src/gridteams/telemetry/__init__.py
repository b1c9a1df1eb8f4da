from .log import (
    EventLogReader,
    EventLogWriter,
    OrderError,
    SimulatedClock,
    WallClock,
    read_log,
    record_event,
)
from .summaries import AgentSummary, agent_summaries
from .metrics import MetricSet, derived_metrics
from .surveys import (
    SurveyError,
    SurveyResponse,
    WORKFLOW_CHOICES,
    record_survey,
    survey_instruments,
)
from .export import export_table

__all__ = [
    "AgentSummary",
    "EventLogReader",
    "EventLogWriter",
    "MetricSet",
    "OrderError",
    "SimulatedClock",
    "SurveyError",
    "SurveyResponse",
    "WORKFLOW_CHOICES",
    "WallClock",
    "agent_summaries",
    "derived_metrics",
    "export_table",
    "read_log",
    "record_event",
    "record_survey",
    "survey_instruments",
]
