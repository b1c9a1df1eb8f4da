"""GridTeams: a cooperative block-delivery grid world for teaming studies.

Teams of humans and scripted agents explore rooms, discover colored blocks,
and deliver them to a drop zone in a prescribed order. The package bundles
the deterministic world engine, a declarative scenario format with a
procedural generator, an authoritative network session server, JSONL
telemetry with derived team metrics and survey capture, reference agent
policies, and a weighted multi-criteria evaluation toolkit for comparing
research testbeds.
"""

__version__ = "0.1.0"

PROTOCOL_VERSION = 1
SCENARIO_SCHEMA_VERSION = 1
