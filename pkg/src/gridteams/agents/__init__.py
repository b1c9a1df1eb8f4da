from .policies import (
    GreedyCollector,
    PairCarrier,
    PairScout,
    RandomWalker,
    POLICIES,
    make_policy,
    parse_assignments,
)
from .client import AgentClient
from .batch import BatchSpec, HeadlessError, TrialOutcome, run_batch

__all__ = [
    "AgentClient",
    "BatchSpec",
    "GreedyCollector",
    "HeadlessError",
    "POLICIES",
    "PairCarrier",
    "PairScout",
    "RandomWalker",
    "TrialOutcome",
    "make_policy",
    "parse_assignments",
    "run_batch",
]
