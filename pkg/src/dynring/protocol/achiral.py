"""Direction agreement without chirality, and the achiral exploration wrapper.

Before its first meeting an agent follows a schedule driven by its modified
identifier. At the first meeting the agents adopt the right-hand direction
of the larger identifier as "clockwise"; from then on the chiral roles run
unchanged on top of that agreed direction.
"""

from __future__ import annotations

from dynring.identifiers import modified_id_length, value_of
from dynring.protocol import chiral
from dynring.protocol.common import AgentVars, MoveIntent, Observation, ProtocolViolation, State
from dynring.ring import Dir


def ca_phase_length(k: int, j: int) -> int:
    return 2**j * modified_id_length(k)


def phase_length(k: int, j: int) -> int:
    return 2 ** (j + k) * modified_id_length(k)


def ca_direction(mid: str, phase: int, round_in_phase: int) -> Dir:
    """Direction for one round of the contiguous-agreement schedule.

    Round ``i`` of phase ``j`` reads bit ``i + 1`` of ``duplicate_bits(mid, 2**j)``,
    i.e. bit ``i // 2**j + 1`` of ``mid``.
    """
    if not (0 <= round_in_phase < 2**phase * len(mid)):
        raise ValueError(f"round {round_in_phase} outside phase {phase}")
    return Dir.LEFT if mid[round_in_phase >> phase] == "0" else Dir.RIGHT


def meeting_intent_achiral(id_bits: str, mid: str, phase: int, round_in_phase: int) -> MoveIntent:
    k = len(id_bits)
    block_len = 2 ** (phase + k)
    if not (0 <= round_in_phase < block_len * len(mid)):
        raise ValueError(f"round {round_in_phase} outside phase {phase}")
    block, offset = divmod(round_in_phase, block_len)
    if offset >= value_of(id_bits) << phase:
        return None
    return Dir.LEFT if mid[block] == "0" else Dir.RIGHT


def _agree(v: AgentVars, obs: Observation) -> None:
    informed = [p for p in obs.peers if p.vars.agreed is not None]
    if informed:
        p = informed[0]
        v.agreed = p.vars.agreed if p.same_orientation else p.vars.agreed.opposite
        return
    top = max(obs.peers, key=lambda p: p.vars.val)
    if v.val > top.vars.val:
        v.agreed = Dir.RIGHT
    else:
        v.agreed = Dir.RIGHT if top.same_orientation else Dir.LEFT


def transition_achiral(v: AgentVars, obs: Observation, round_index: int):
    """Agree on a direction at the first meeting, then run the chiral roles."""
    if not v.achiral:
        raise ProtocolViolation("achiral", f"agent {v.id} not configured for the achiral protocol", round_index)
    if v.agreed is None and v.state is State.SEARCH and obs.meeting:
        v = v.clone()
        _agree(v, obs)
    return chiral.transition(v, obs, round_index)
