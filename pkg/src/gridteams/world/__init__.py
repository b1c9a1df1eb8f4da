from .types import (
    Action,
    Block,
    Bot,
    CellKind,
    GridMap,
    RoleSpec,
    Room,
    TargetSequence,
    WorldState,
    state_digest,
)
from .engine import (
    DropOutcome,
    EngineError,
    PerturbationError,
    apply_perturbation,
    chat_problem,
    chat_recipients,
    init_world,
    score_drop,
    step,
)
from .visibility import Observation, visible_view
from .sim import ReplayError, SimRun, replay

__all__ = [
    "Action",
    "Block",
    "Bot",
    "CellKind",
    "DropOutcome",
    "EngineError",
    "GridMap",
    "Observation",
    "PerturbationError",
    "ReplayError",
    "RoleSpec",
    "Room",
    "SimRun",
    "TargetSequence",
    "WorldState",
    "apply_perturbation",
    "chat_problem",
    "chat_recipients",
    "init_world",
    "replay",
    "score_drop",
    "state_digest",
    "step",
    "visible_view",
]
