"""Weighted testbed scoring, dual-rater discrepancy flags, total audits."""

from __future__ import annotations

from dataclasses import dataclass

from .model import CRITERIA, RatingSheet, RubricError, ScoreReport


def weighted_total(weights: dict[str, int], sheet: RatingSheet) -> ScoreReport:
    """Per-criterion rating x weight, summed; max is 10 x the weight sum."""
    missing = [c for c in CRITERIA if c not in weights]
    if missing:
        raise RubricError(f"weights missing criteria: {', '.join(missing)}")
    weighted = {c: sheet.ratings[c] * weights[c] for c in CRITERIA}
    return ScoreReport(
        testbed=sheet.testbed,
        evaluator=sheet.evaluator,
        weighted=weighted,
        total=sum(weighted.values()),
        max_possible=10 * sum(weights[c] for c in CRITERIA),
    )


@dataclass(frozen=True)
class Discrepancy:
    criterion: str
    a: int
    b: int

    @property
    def difference(self) -> int:
        return abs(self.a - self.b)


def rater_discrepancies(
    sheet_a: RatingSheet, sheet_b: RatingSheet, threshold: int = 2
) -> list[Discrepancy]:
    """Criteria whose ratings differ by strictly more than the threshold,
    flagged for evaluator discussion."""
    if sheet_a.testbed != sheet_b.testbed:
        raise RubricError(
            f"sheets rate different testbeds: {sheet_a.testbed!r} vs {sheet_b.testbed!r}"
        )
    out = []
    for criterion in CRITERIA:
        a, b = sheet_a.ratings[criterion], sheet_b.ratings[criterion]
        if abs(a - b) > threshold:
            out.append(Discrepancy(criterion=criterion, a=a, b=b))
    return out


@dataclass(frozen=True)
class TotalAudit:
    testbed: str
    evaluator: str
    recomputed: int
    stated: int | None

    @property
    def mismatch(self) -> bool:
        return self.stated is not None and self.stated != self.recomputed


def audit_totals(
    weights: dict[str, int],
    sheets: list[RatingSheet],
    stated_totals: dict[tuple[str, str], int] | None = None,
) -> list[TotalAudit]:
    """Recompute every sheet's total and flag any supplied stated total that
    disagrees; the recomputed value is authoritative."""
    stated_totals = stated_totals or {}
    audits = []
    for sheet in sheets:
        report = weighted_total(weights, sheet)
        audits.append(
            TotalAudit(
                testbed=sheet.testbed,
                evaluator=sheet.evaluator,
                recomputed=report.total,
                stated=stated_totals.get((sheet.testbed, sheet.evaluator)),
            )
        )
    return audits
