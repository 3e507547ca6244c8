"""Three-agent exploration of a 1-interval-connected dynamic ring."""

from dynring.identifiers import (
    AgentId,
    duplicate_bits,
    modified_id,
    pair_from_index,
    pair_index,
    value_of,
)
from dynring.engine import SimulationConfig, SimulationOutcome, run, verify_trace

__all__ = [
    "AgentId",
    "SimulationConfig",
    "SimulationOutcome",
    "duplicate_bits",
    "modified_id",
    "pair_from_index",
    "pair_index",
    "run",
    "value_of",
    "verify_trace",
]

__version__ = "0.1.0"
