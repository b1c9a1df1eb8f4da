"""Criterion weight derivation.

Feature weight scores combine a Likert agreement strength and a theme
overlap score, scaled by 1/6, plus a priority adjustment: the top third of
the internal priority ranking gains a third of a point, the bottom third
loses one, and the middle band is untouched (for 23 features that splits
7 / 9 / 7). Group scores aggregate member features (mean by default; sum is
available for sensitivity analysis), z-scores locate each group against the
others, and weights band the z values into {1, 2, 3}: strictly above one
maps to 3, non-negative up to and including one maps to 2, negative maps
to 1. Boundary cases (exactly 0 or 1) deliberately map to 2. Overrides
replace a derived weight and must carry a written rationale.
"""

from __future__ import annotations

import math
from collections import defaultdict
from typing import Iterable

from .model import (
    CRITERIA,
    CriterionWeights,
    FeatureRow,
    RubricError,
    VALID_WEIGHTS,
    ZeroVarianceError,
)


def third_adjustment(rank: int, n: int) -> float:
    """Priority adjustment for a 1-based rank among n features."""
    if not (1 <= rank <= n):
        raise RubricError(f"rank {rank} outside 1..{n}")
    band = n // 3
    if rank <= band:
        return 1.0 / 3.0
    if rank > n - band:
        return -1.0 / 3.0
    return 0.0


def feature_weight_score(row: FeatureRow, n: int) -> float:
    return (row.likert_strength + row.overlap_score) / 6.0 + third_adjustment(
        row.priority_rank, n
    )


def criterion_weight_scores(
    rows: Iterable[FeatureRow], aggregation: str = "mean"
) -> dict[str, float]:
    """Group score per criterion from its member feature scores."""
    if aggregation not in ("mean", "sum"):
        raise RubricError(f"aggregation must be 'mean' or 'sum', got {aggregation!r}")
    rows = list(rows)
    ranks = sorted(r.priority_rank for r in rows)
    if ranks != list(range(1, len(rows) + 1)):
        raise RubricError(f"priority ranks must be a permutation of 1..{len(rows)}, got {ranks}")
    n = len(rows)
    groups: dict[str, list[float]] = defaultdict(list)
    for row in rows:
        groups[row.criterion].append(feature_weight_score(row, n))
    empty = [c for c in CRITERIA if c not in groups]
    if empty:
        raise RubricError(f"criteria with no features: {', '.join(empty)}")
    out: dict[str, float] = {}
    for criterion in CRITERIA:
        scores = groups[criterion]
        out[criterion] = sum(scores) / len(scores) if aggregation == "mean" else sum(scores)
    return out


def zscores(values: dict[str, float], population: bool = False) -> dict[str, float]:
    """Standard scores; sample (n-1) standard deviation by default."""
    if len(values) < 2:
        raise RubricError("z-scores need at least 2 values")
    xs = list(values.values())
    mean = sum(xs) / len(xs)
    ddof = 0 if population else 1
    variance = sum((x - mean) ** 2 for x in xs) / (len(xs) - ddof)
    if variance == 0.0:
        raise ZeroVarianceError("all group scores are equal; z-scores are undefined")
    sd = math.sqrt(variance)
    return {k: (v - mean) / sd for k, v in values.items()}


def weights_from_z(z_map: dict[str, float]) -> dict[str, int]:
    """Band z values into weights: z > 1 gives 3, 0 <= z <= 1 gives 2,
    z < 0 gives 1."""
    out: dict[str, int] = {}
    for criterion, z in z_map.items():
        if not math.isfinite(z):
            raise RubricError(f"z for {criterion} is not finite")
        if z > 1.0:
            out[criterion] = 3
        elif z >= 0.0:
            out[criterion] = 2
        else:
            out[criterion] = 1
    return out


def apply_overrides(
    group_scores: dict[str, float],
    z_map: dict[str, float],
    derived: dict[str, int],
    overrides: dict[str, tuple[int, str]],
) -> CriterionWeights:
    """Attach forced weights; every override needs a rationale on record."""
    for criterion, (weight, rationale) in overrides.items():
        if criterion not in derived:
            raise RubricError(f"override targets unknown criterion {criterion!r}")
        if weight not in VALID_WEIGHTS:
            raise RubricError(f"override weight for {criterion} must be 1, 2 or 3, got {weight}")
        if not rationale or not rationale.strip():
            raise RubricError(f"override for {criterion} requires a rationale")
    return CriterionWeights(
        group_scores=dict(group_scores),
        z_scores=dict(z_map),
        derived=dict(derived),
        overrides=dict(overrides),
    )
