"""Rubric domain types: feature rows, criterion weights, rating sheets.

Eight evaluation criteria, listed in their canonical report order. Ratings
are integers on a 0..10 scale; weights are 1, 2 or 3. Band descriptions for
raters live in data/criteria.md.
"""

from __future__ import annotations

from dataclasses import dataclass, field

CRITERIA = (
    "data_collection",
    "implementation_factors",
    "teaming_factors",
    "scenario_authoring",
    "task_features",
    "data_processing",
    "system_architecture",
    "agents",
)

CRITERION_LABELS = {
    "data_collection": "Data Collection & Performance Measures",
    "implementation_factors": "Implementation Factors",
    "teaming_factors": "Teaming Factors",
    "scenario_authoring": "Scenario Authoring",
    "task_features": "Task Features",
    "data_processing": "Data Processing",
    "system_architecture": "System Architecture",
    "agents": "Agents",
}

VALID_WEIGHTS = (1, 2, 3)
RATING_MIN, RATING_MAX = 0, 10


class RubricError(Exception):
    pass


class ZeroVarianceError(RubricError):
    pass


@dataclass(frozen=True)
class FeatureRow:
    feature: str
    criterion: str
    likert_strength: float  # 0 when not directly assessed, else in [1, 3]
    overlap_score: int  # 1..3
    priority_rank: int  # unique in 1..N

    def __post_init__(self) -> None:
        if self.criterion not in CRITERIA:
            raise RubricError(f"unknown criterion {self.criterion!r}")
        if not (self.likert_strength == 0 or 1.0 <= self.likert_strength <= 3.0):
            raise RubricError(
                f"likert_strength must be 0 (not assessed) or in [1, 3]; "
                f"got {self.likert_strength} for {self.feature!r}"
            )
        if self.overlap_score not in (1, 2, 3):
            raise RubricError(f"overlap_score must be 1..3, got {self.overlap_score}")


@dataclass
class CriterionWeights:
    """Per-criterion weighting outcome: group score, z, derived and final."""

    group_scores: dict[str, float]
    z_scores: dict[str, float]
    derived: dict[str, int]
    overrides: dict[str, tuple[int, str]] = field(default_factory=dict)

    @property
    def final(self) -> dict[str, int]:
        out = dict(self.derived)
        for criterion, (weight, _rationale) in self.overrides.items():
            out[criterion] = weight
        return out

    def to_json_obj(self) -> dict:
        return {
            "group_scores": {c: self.group_scores[c] for c in CRITERIA if c in self.group_scores},
            "z_scores": {c: self.z_scores[c] for c in CRITERIA if c in self.z_scores},
            "derived": {c: self.derived[c] for c in CRITERIA if c in self.derived},
            "overrides": {
                c: {"weight": w, "rationale": r} for c, (w, r) in sorted(self.overrides.items())
            },
            "final": {c: w for c, w in ((c, self.final[c]) for c in CRITERIA if c in self.final)},
        }


@dataclass(frozen=True)
class RatingSheet:
    evaluator: str
    testbed: str
    ratings: dict[str, int]  # criterion -> 0..10
    justifications: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        missing = [c for c in CRITERIA if c not in self.ratings]
        extra = [c for c in self.ratings if c not in CRITERIA]
        if missing or extra:
            raise RubricError(
                f"sheet for {self.testbed}/{self.evaluator} must cover exactly the "
                f"8 criteria; missing={missing} extra={extra}"
            )
        for criterion, rating in self.ratings.items():
            if not isinstance(rating, int) or not (RATING_MIN <= rating <= RATING_MAX):
                raise RubricError(
                    f"rating for {criterion} must be an integer 0..10, got {rating!r}"
                )


@dataclass(frozen=True)
class ScoreReport:
    testbed: str
    evaluator: str
    weighted: dict[str, int]  # criterion -> rating x weight
    total: int
    max_possible: int

    def to_json_obj(self) -> dict:
        return {
            "testbed": self.testbed,
            "evaluator": self.evaluator,
            "weighted": {c: self.weighted[c] for c in CRITERIA},
            "total": self.total,
            "max_possible": self.max_possible,
        }
