from .model import (
    CRITERIA,
    CRITERION_LABELS,
    CriterionWeights,
    FeatureRow,
    RatingSheet,
    RubricError,
    ScoreReport,
    ZeroVarianceError,
)
from .weighting import (
    apply_overrides,
    criterion_weight_scores,
    feature_weight_score,
    third_adjustment,
    weights_from_z,
    zscores,
)
from .scoring import audit_totals, rater_discrepancies, weighted_total
from .io import (
    data_path,
    load_features,
    load_overrides,
    load_ratings,
    load_stated_totals,
    load_weights,
    load_zscores,
    save_weights,
    write_score_report,
)

__all__ = [
    "CRITERIA",
    "CRITERION_LABELS",
    "CriterionWeights",
    "FeatureRow",
    "RatingSheet",
    "RubricError",
    "ScoreReport",
    "ZeroVarianceError",
    "apply_overrides",
    "audit_totals",
    "criterion_weight_scores",
    "data_path",
    "feature_weight_score",
    "load_features",
    "load_overrides",
    "load_ratings",
    "load_stated_totals",
    "load_weights",
    "load_zscores",
    "rater_discrepancies",
    "save_weights",
    "third_adjustment",
    "weighted_total",
    "weights_from_z",
    "write_score_report",
    "zscores",
]
