"""Exploration protocols, with and without chirality."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from dynring.protocol import achiral, chiral
from dynring.protocol.common import (
    AgentVars,
    MoveIntent,
    Observation,
    PeerView,
    ProtocolViolation,
    State,
    after_move,
)


@dataclass(frozen=True)
class Protocol:
    name: str
    achiral: bool
    phase_length: Callable[[int, int], int]
    transition: Callable
    meeting_only: bool = False


CHIRAL = Protocol("chiral", False, chiral.phase_length, chiral.transition)
ACHIRAL = Protocol("achiral", True, achiral.phase_length, achiral.transition_achiral)


def get_protocol(mode: str, meeting_only: bool = False) -> Protocol:
    base = {"chiral": CHIRAL, "achiral": ACHIRAL}[mode]
    if meeting_only:
        return Protocol(base.name, base.achiral, base.phase_length, base.transition, True)
    return base


__all__ = [
    "ACHIRAL",
    "CHIRAL",
    "AgentVars",
    "MoveIntent",
    "Observation",
    "PeerView",
    "Protocol",
    "ProtocolViolation",
    "State",
    "after_move",
    "get_protocol",
]
