"""CSV and JSON input/output for the rubric toolkit.

Input files:
  features.csv       feature,criterion,likert,overlap,rank
  ratings.csv        testbed,evaluator,criterion,rating,justification
  overrides.csv      criterion,weight,rationale
  zscores.csv        criterion,z
  stated_totals.csv  testbed,evaluator,stated_total

The bundled data/ directory carries the reference transcriptions used as
golden fixtures by the test suite.
"""

from __future__ import annotations

import csv
import json
from importlib import resources
from pathlib import Path

from .model import CRITERIA, CriterionWeights, FeatureRow, RatingSheet, RubricError, ScoreReport


def data_path(name: str) -> Path:
    with resources.as_file(resources.files("gridteams.rubric").joinpath("data", name)) as p:
        return Path(p)


def _read_rows(path: str | Path, required: list[str]) -> list[dict[str, str]]:
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise RubricError(f"{path}: missing column(s) {', '.join(missing)}")
        return [row for row in reader]


def load_features(path: str | Path) -> list[FeatureRow]:
    rows = []
    for raw in _read_rows(path, ["feature", "criterion", "likert", "overlap", "rank"]):
        rows.append(
            FeatureRow(
                feature=raw["feature"],
                criterion=raw["criterion"],
                likert_strength=float(raw["likert"]),
                overlap_score=int(raw["overlap"]),
                priority_rank=int(raw["rank"]),
            )
        )
    return rows


def load_ratings(path: str | Path) -> list[RatingSheet]:
    grouped: dict[tuple[str, str], dict[str, int]] = {}
    notes: dict[tuple[str, str], dict[str, str]] = {}
    order: list[tuple[str, str]] = []
    for raw in _read_rows(path, ["testbed", "evaluator", "criterion", "rating"]):
        key = (raw["testbed"], raw["evaluator"])
        if key not in grouped:
            grouped[key] = {}
            notes[key] = {}
            order.append(key)
        criterion = raw["criterion"]
        if criterion in grouped[key]:
            raise RubricError(f"{path}: duplicate rating for {key} / {criterion}")
        grouped[key][criterion] = int(raw["rating"])
        notes[key][criterion] = raw.get("justification", "") or ""
    return [
        RatingSheet(testbed=t, evaluator=e, ratings=grouped[(t, e)], justifications=notes[(t, e)])
        for t, e in order
    ]


def load_overrides(path: str | Path) -> dict[str, tuple[int, str]]:
    out: dict[str, tuple[int, str]] = {}
    for raw in _read_rows(path, ["criterion", "weight", "rationale"]):
        out[raw["criterion"]] = (int(raw["weight"]), raw["rationale"])
    return out


def load_zscores(path: str | Path) -> dict[str, float]:
    return {
        raw["criterion"]: float(raw["z"])
        for raw in _read_rows(path, ["criterion", "z"])
    }


def load_stated_totals(path: str | Path) -> dict[tuple[str, str], int]:
    return {
        (raw["testbed"], raw["evaluator"]): int(raw["stated_total"])
        for raw in _read_rows(path, ["testbed", "evaluator", "stated_total"])
    }


def save_weights(weights: CriterionWeights, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(weights.to_json_obj(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_weights(path: str | Path) -> dict[str, int]:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    final = obj["final"]
    missing = [c for c in CRITERIA if c not in final]
    if missing:
        raise RubricError(f"{path}: weights missing criteria {', '.join(missing)}")
    return {c: int(final[c]) for c in CRITERIA}


def write_score_report(reports: list[ScoreReport], path: str | Path) -> Path:
    out = Path(path)
    with out.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["testbed", "evaluator", *CRITERIA, "total", "max_possible"])
        for report in reports:
            writer.writerow(
                [
                    report.testbed,
                    report.evaluator,
                    *[report.weighted[c] for c in CRITERIA],
                    report.total,
                    report.max_possible,
                ]
            )
    return out
