"""Derived team metrics over a session log.

Discovery, for subtask latency, is the first tick at which any player's
observation contained a block of the needed color (as perceived, so a noisy
reading counts); analysts who prefer a different construction can recompute
from the raw observation events.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Any

from .. import events as ev
from ..events import EventRecord
from .summaries import agent_summaries, session_duration, session_meta

DEFAULT_POINTS_PER_CORRECT = 10


@dataclass
class MetricSet:
    mission_score: int
    score_per_minute: float
    subtask_latencies: list[int | None]
    idle_fractions: dict[int, float]
    communication_counts: dict[str, int]  # "from->to" keys
    communication_entropy: float
    duration_ticks: int = 0
    completion: bool = False

    def to_json_obj(self) -> dict[str, Any]:
        return {
            "mission_score": self.mission_score,
            "score_per_minute": self.score_per_minute,
            "subtask_latencies": self.subtask_latencies,
            "idle_fractions": {str(k): v for k, v in sorted(self.idle_fractions.items())},
            "communication_counts": dict(sorted(self.communication_counts.items())),
            "communication_entropy": self.communication_entropy,
            "duration_ticks": self.duration_ticks,
            "completion": self.completion,
        }


def shannon_entropy(counts: list[int]) -> float:
    total = sum(counts)
    if total == 0:
        return 0.0
    entropy = 0.0
    for c in counts:
        if c > 0:
            p = c / total
            entropy -= p * math.log2(p)
    return entropy


def derived_metrics(
    records: list[EventRecord], points_per_correct: int = DEFAULT_POINTS_PER_CORRECT
) -> MetricSet:
    meta = session_meta(records)
    duration, _complete = session_duration(records)
    sequence: list[int] = meta["goal_sequence"]
    tick_rate: int = meta["tick_rate"]

    correct_total = 0
    completion = False
    drop_tick_for_index: dict[int, int] = {}
    discovery_tick: dict[int, int] = {}
    senders: Counter = Counter()
    pair_counts: Counter = Counter()

    for rec in records:
        p = rec.payload
        if rec.kind == ev.SCORE and p["outcome"] == "correct":
            correct_total += 1
            drop_tick_for_index[p["next_index"] - 1] = rec.tick
        elif rec.kind == ev.OBSERVATION:
            for entry in p["blocks"]:
                color = entry["color"]
                if isinstance(color, int) and color not in discovery_tick:
                    discovery_tick[color] = rec.tick
        elif rec.kind == ev.CHAT_SEND:
            senders[p["from"]] += 1
            pair_counts[f"{p['from']}->{p['to']}"] += 1
        elif rec.kind == ev.END:
            completion = p.get("completion", False)

    latencies: list[int | None] = []
    for i, color in enumerate(sequence):
        drop = drop_tick_for_index.get(i)
        found = discovery_tick.get(color)
        if drop is None or found is None:
            latencies.append(None)
        else:
            latencies.append(drop - found)

    minutes = duration / tick_rate / 60.0 if duration else 0.0
    score = correct_total * points_per_correct
    summaries = agent_summaries(records)
    idle_fractions = {
        s.player_id: (s.idle_ticks / duration if duration else 0.0) for s in summaries
    }
    return MetricSet(
        mission_score=score,
        score_per_minute=score / minutes if minutes else 0.0,
        subtask_latencies=latencies,
        idle_fractions=idle_fractions,
        communication_counts={k: v for k, v in sorted(pair_counts.items())},
        communication_entropy=shannon_entropy(list(senders.values())),
        duration_ticks=duration,
        completion=completion,
    )
