"""CSV export of session data.

Column orders are fixed and documented in the README; exporting the same
log twice produces byte-identical files.

events.csv    tick, wall_clock, kind, player, payload
              (one row per record, excluding the session_meta / session_end
              bookkeeping lines)
summaries.csv player, role, correct_drops, incorrect_drops, idle_ticks,
              rooms_entered, distance_cells, messages_total, messages_sent
metrics.csv   metric, value   (long format; latency_<i> per sequence index)
surveys.csv   player, instrument, field, value
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .. import events as ev
from ..events import EventRecord
from .metrics import derived_metrics
from .summaries import agent_summaries

TABLES = ("events", "summaries", "metrics", "surveys")


def export_table(records: list[EventRecord], table: str, out_path: str | Path) -> Path:
    if table not in TABLES:
        raise ValueError(f"unknown table {table!r}; expected one of {TABLES}")
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if table == "events":
            _write_events(writer, records)
        elif table == "summaries":
            _write_summaries(writer, records)
        elif table == "metrics":
            _write_metrics(writer, records)
        elif table == "surveys":
            _write_surveys(writer, records)
    return out


def _write_events(writer, records: list[EventRecord]) -> None:
    writer.writerow(["tick", "wall_clock", "kind", "player", "payload"])
    for rec in records:
        if rec.kind in (ev.SESSION_META, ev.SESSION_END):
            continue
        player = rec.payload.get("player", rec.payload.get("from", ""))
        writer.writerow(
            [
                rec.tick,
                rec.wall_clock or "",
                rec.kind,
                player,
                json.dumps(rec.payload, sort_keys=True, separators=(",", ":")),
            ]
        )


def _write_summaries(writer, records: list[EventRecord]) -> None:
    writer.writerow(
        [
            "player",
            "role",
            "correct_drops",
            "incorrect_drops",
            "idle_ticks",
            "rooms_entered",
            "distance_cells",
            "messages_total",
            "messages_sent",
        ]
    )
    for s in agent_summaries(records):
        writer.writerow(
            [
                s.player_id,
                s.role_id,
                s.correct_drops,
                s.incorrect_drops,
                s.idle_ticks,
                s.rooms_entered,
                s.distance_cells,
                sum(s.messages_sent.values()),
                json.dumps(s.messages_sent, sort_keys=True, separators=(",", ":")),
            ]
        )


def _write_metrics(writer, records: list[EventRecord]) -> None:
    metrics = derived_metrics(records)
    writer.writerow(["metric", "value"])
    writer.writerow(["mission_score", metrics.mission_score])
    writer.writerow(["score_per_minute", round(metrics.score_per_minute, 6)])
    writer.writerow(["duration_ticks", metrics.duration_ticks])
    writer.writerow(["completion", str(metrics.completion).lower()])
    writer.writerow(["communication_entropy", round(metrics.communication_entropy, 6)])
    for i, latency in enumerate(metrics.subtask_latencies):
        writer.writerow([f"latency_{i}", "" if latency is None else latency])
    for pid, fraction in sorted(metrics.idle_fractions.items()):
        writer.writerow([f"idle_fraction_{pid}", round(fraction, 6)])
    for pair, count in sorted(metrics.communication_counts.items()):
        writer.writerow([f"messages_{pair}", count])


def _write_surveys(writer, records: list[EventRecord]) -> None:
    writer.writerow(["player", "instrument", "field", "value"])
    for rec in records:
        if rec.kind != ev.SURVEY:
            continue
        p = rec.payload
        if p["instrument"] == "workflow":
            writer.writerow([p["player"], "workflow", "workflow_choice", p["workflow_choice"]])
        else:
            for i, item in enumerate(p["items"]):
                writer.writerow([p["player"], "relatedness", f"task_{i}", item["task"]])
                writer.writerow(
                    [p["player"], "relatedness", f"importance_{i}", item["importance"]]
                )
                writer.writerow(
                    [p["player"], "relatedness", f"relatedness_{i}", item["relatedness"]]
                )
