"""Difficulty knob report: the authoring-facing summary of a scenario.

Seven knobs: required scoring rate (time pressure), palette size, block
density (information density), signal-to-noise, sensing noise, perturbation
count, and the declared interdependency design level.
"""

from __future__ import annotations

from typing import Any

from .model import GeneratedBlocksSpec, Scenario


def difficulty_summary(scenario: Scenario) -> dict[str, Any]:
    resolved = scenario.resolve()
    minutes = resolved.time_limit_ticks / resolved.tick_rate / 60.0
    if isinstance(scenario.blocks, GeneratedBlocksSpec):
        decoy_fraction = scenario.blocks.decoy_ratio
    else:
        total = len(resolved.blocks)
        seq_colors = set(resolved.sequence)
        decoys = sum(1 for b in resolved.blocks if b.color not in seq_colors)
        decoy_fraction = decoys / total if total else 0.0
    rooms = resolved.map_spec.rooms
    return {
        "time_pressure": round(len(resolved.sequence) / minutes, 4),  # drops per minute
        "palette_size": resolved.palette_size,
        "info_density": round(len(resolved.blocks) / len(rooms), 4) if rooms else 0.0,
        "signal_to_noise": round(1.0 - decoy_fraction, 4),
        "sense_noise_prob": resolved.sense_noise_prob,
        "perturbation_count": len(resolved.perturbations),
        "interdependency_design": resolved.metadata.interdependency,
    }


KNOB_LABELS = {
    "time_pressure": "time pressure (correct drops needed per minute)",
    "palette_size": "block colors in the palette",
    "info_density": "information density (blocks per room)",
    "signal_to_noise": "signal-to-noise (1 - decoy fraction)",
    "sense_noise_prob": "sensing noise probability",
    "perturbation_count": "scheduled perturbations",
    "interdependency_design": "interdependency design level",
}


def render_difficulty_report(scenario: Scenario) -> str:
    knobs = difficulty_summary(scenario)
    width = max(len(label) for label in KNOB_LABELS.values())
    lines = [f"scenario: {scenario.name}"]
    for key, label in KNOB_LABELS.items():
        lines.append(f"  {label.ljust(width)}  {knobs[key]}")
    return "\n".join(lines)
