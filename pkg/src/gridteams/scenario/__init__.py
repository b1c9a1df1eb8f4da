from .model import (
    BlockPlacement,
    GeneratedBlocksSpec,
    GeneratedMapSpec,
    GenerationError,
    Scenario,
    ScenarioMetadata,
    SequenceSpec,
    Slot,
    scenario_digest,
)
from .io import ScenarioParseError, load, loads, save, dumps
from .generate import generate
from .validate import ValidationReport, validate
from .report import difficulty_summary, render_difficulty_report
from . import presets

__all__ = [
    "BlockPlacement",
    "GeneratedBlocksSpec",
    "GeneratedMapSpec",
    "GenerationError",
    "Scenario",
    "ScenarioMetadata",
    "ScenarioParseError",
    "SequenceSpec",
    "Slot",
    "ValidationReport",
    "difficulty_summary",
    "dumps",
    "generate",
    "load",
    "loads",
    "presets",
    "render_difficulty_report",
    "save",
    "scenario_digest",
    "validate",
]
