"""Meeting schedule and the five exploration roles for agents with chirality.

All directions produced here are private; "clockwise" means the agent's
``agreed`` direction (``Dir.RIGHT`` when agents share an orientation).
The achiral variant reuses these roles once a direction has been agreed.
"""

from __future__ import annotations

from dynring.identifiers import value_of
from dynring.protocol.common import (
    AgentVars,
    MoveIntent,
    Observation,
    PeerView,
    ProtocolViolation,
    State,
    stime_cutoff,
)
from dynring.ring import Dir

# a terminate decision carries no intent
Step = tuple[AgentVars, MoveIntent, bool]


def phase_length(k: int, j: int) -> int:
    return 2 ** (j + k)


def meeting_intent_chiral(id_bits: str, round_in_phase: int, phase: int) -> MoveIntent:
    """Try to move clockwise for the first ``val * 2**phase`` rounds of the phase."""
    k = len(id_bits)
    if not (0 <= round_in_phase < phase_length(k, phase)):
        raise ValueError(f"round {round_in_phase} outside phase {phase} of length {phase_length(k, phase)}")
    if round_in_phase < value_of(id_bits) * 2**phase:
        return Dir.RIGHT
    return None


def new_vars(id_bits: str, achiral: bool = False) -> AgentVars:
    from dynring.identifiers import modified_id

    return AgentVars(
        id=id_bits,
        k=len(id_bits),
        val=value_of(id_bits),
        achiral=achiral,
        agreed=None if achiral else Dir.RIGHT,
        mid=modified_id(id_bits),
    )


def _cw(v: AgentVars) -> Dir:
    return v.agreed


def _ccw(v: AgentVars) -> Dir:
    return v.agreed.opposite


def _knows(v: AgentVars) -> bool:
    return v.rsize is not None


def _mismatch(v: AgentVars, peers: list[PeerView]) -> bool:
    return any(_knows(v) != _knows(p.vars) for p in peers)


def _settled_met(obs: Observation) -> bool:
    return any(p.new and p.vars.state is State.SETTLED for p in obs.peers)


def _violation(rule: str, v: AgentVars, obs: Observation, rnd: int) -> ProtocolViolation:
    seen = ", ".join(f"{p.vars.id}:{p.vars.state.value}{'*' if p.new else ''}" for p in obs.peers)
    return ProtocolViolation(rule, f"agent {v.id} ({v.state.value}) saw [{seen}]", rnd)


# -- Look: knowledge passed on before anyone computes --------------------------


def deduce(v: AgentVars, obs: Observation) -> AgentVars:
    """Infer the ring size on returning to the settled agent in the same direction."""
    if v.rsize is not None or v.sbound is not None or not _settled_met(obs):
        return v
    learns = (
        (v.state is State.SEARCH and v.winner)
        or v.state is State.FORWARD
        or (v.state is State.BOUNCE and v.met_settled_in_run == 1)
    )
    if learns and v.scount is not None:
        v = v.clone()
        v.rsize = v.scount
    return v


def absorb(v: AgentVars, obs: Observation) -> AgentVars:
    """The settled agent takes the ring size (and TTime) from whoever just learned it."""
    if v.state is not State.SETTLED or v.rsize is not None or not obs.meeting:
        return v
    for p in obs.peers:
        if not p.new or p.vars.rsize is None:
            continue
        v = v.clone()
        v.rsize = p.vars.rsize
        if p.vars.ttime is not None:
            v.ttime = p.vars.ttime
        elif v.achiral:
            v.stime_cutoff = stime_cutoff(v.k, v.rsize)
        else:
            v.countdown = 2 * v.rsize
            v.countdown_cw = None
        break
    return v


# -- Compute ------------------------------------------------------------------


def _terminate(v: AgentVars) -> Step:
    v.state = State.TERMINATED
    v.countdown = None
    return v, None, True


def _start_countdown(v: AgentVars, rounds: int, cw: bool | None) -> None:
    v.countdown = rounds
    v.countdown_cw = cw


def _set_sbound(v: AgentVars, bound: int, cw: bool) -> None:
    v.sbound = bound
    _start_countdown(v, bound, cw)


def _deadlines(v: AgentVars) -> bool:
    """Whether a standing obligation says to stop now."""
    if v.countdown is not None and v.countdown <= 0:
        return True
    if v.rsize is not None and v.ttime is not None and v.ttime > 16 * v.rsize:
        return True
    if v.stime_cutoff is not None and v.stime > v.stime_cutoff:
        return True
    return False


def _move(v: AgentVars, cw: bool | None) -> Step:
    if v.countdown is not None:
        v.countdown -= 1
        cw = v.countdown_cw
    if cw is None:
        return v, None, False
    return v, (_cw(v) if cw else _ccw(v)), False


def _become_bounce(v: AgentVars) -> None:
    v.state = State.BOUNCE
    v.bsteps = 0
    v.bblocked = 0
    v.met_settled_in_run = 0
    v.scount = None
    v.run += 1


def _become_return(v: AgentVars) -> None:
    v.state = State.RETURN
    v.rsteps = 0
    v.scount = None
    v.run += 1


def _form_bounce(v: AgentVars) -> None:
    _become_bounce(v)
    v.ttime = 0
    v.run = 0


def _form_forward(v: AgentVars) -> None:
    v.state = State.FORWARD
    v.fsteps = 0
    v.ttime = 0


def _learned_size_as_winner(v: AgentVars) -> None:
    if v.achiral:
        v.stime_cutoff = stime_cutoff(v.k, v.rsize)
    else:
        _start_countdown(v, 2 * v.rsize, True)


def _schedule_intent(v: AgentVars) -> MoveIntent:
    if v.achiral:
        from dynring.protocol.achiral import meeting_intent_achiral

        return meeting_intent_achiral(v.id, v.mid, v.phase, v.round_in_phase)
    if v.round_in_phase < v.val << v.phase:
        return Dir.RIGHT
    return None


def _search(v: AgentVars, obs: Observation, rnd: int) -> Step:
    peers = obs.peers
    if obs.meeting:
        if _mismatch(v, peers):
            return _terminate(v)
        if not v.first_met:
            v.first_met = True
            if len(peers) == 2:
                if all(p.vars.state is State.SEARCH and not p.vars.first_met for p in peers):
                    ranked = sorted([v.val] + [p.vars.val for p in peers])
                    if v.val == ranked[0]:
                        v.state = State.SETTLED
                        return v, None, False
                    if v.val == ranked[1]:
                        _form_bounce(v)
                        return _move(v, False)
                    _form_forward(v)
                    v.winner = True
                    v.scount = 0
                    return _move(v, True)
                _form_bounce(v)
                return _move(v, False)
            p = peers[0].vars
            if p.state is State.SEARCH and not p.winner:
                if v.val < p.val:
                    v.state = State.SETTLED
                    return v, None, False
                v.winner = True
                v.scount = 0
                v.cw_mode = True
                return _move(v, True)
            if p.state is State.SEARCH and p.winner:
                _form_bounce(v)
                return _move(v, False)
            if p.state is State.SETTLED:
                v.cw_mode = True
                return _move(v, True)
            raise _violation("search.first", v, obs, rnd)
        searching = [p for p in peers if p.vars.state is State.SEARCH]
        if len(peers) == 2:
            if len(searching) != 1:
                raise _violation("search.3.3", v, obs, rnd)
            target = searching[0].vars
        else:
            target = peers[0].vars
        if target.state is State.SEARCH:
            if not target.winner:
                if not v.winner or v.rsize is not None:
                    raise _violation("search.3.1.1", v, obs, rnd)
                _form_forward(v)
                v.cw_mode = True
                return _move(v, True)
            if target.rsize is None:
                _form_bounce(v)
                return _move(v, False)
            return _terminate(v)
        if target.state is State.SETTLED:
            if v.winner and v.rsize is not None and v.countdown is None and v.stime_cutoff is None:
                _learned_size_as_winner(v)
            elif not v.winner and target.rsize is not None:
                return _terminate(v)
        else:
            raise _violation("search.3", v, obs, rnd)
    if _deadlines(v):
        return _terminate(v)
    if v.countdown is not None or v.cw_mode:
        return _move(v, True)
    return v, _schedule_intent(v), False


def _settled(v: AgentVars, obs: Observation, rnd: int) -> Step:
    peers = obs.peers
    if obs.meeting:
        if len(peers) == 2 and any(p.vars.state is State.FORWARD for p in peers):
            return _terminate(v)
        if any(p.vars.sbound is not None for p in peers):
            return _terminate(v)
        if v.rsize is not None and any(p.vars.rsize is None for p in peers):
            return _terminate(v)
    if _deadlines(v):
        return _terminate(v)
    return _move(v, None)


def _forward(v: AgentVars, obs: Observation, rnd: int) -> Step:
    peers = obs.peers
    if obs.meeting:
        if len(peers) == 2 or _mismatch(v, peers):
            return _terminate(v)
        peer = peers[0]
        p = peer.vars
        if v.sbound is not None:
            if p.state is State.SETTLED:
                return _terminate(v)
        elif v.rsize is not None:
            pass
        elif p.state is State.SETTLED:
            raise _violation("forward.2.2", v, obs, rnd)
        elif p.state is State.BOUNCE:
            _set_sbound(v, v.fsteps + p.bsteps, True)
        elif p.state is State.RETURN:
            if obs.own_tag.arrived and not peer.tag.arrived:
                _set_sbound(v, v.fsteps + p.bsteps, True)
            elif peer.tag.arrived and not obs.own_tag.arrived:
                if p.rsteps <= 2 * p.bsteps:
                    _set_sbound(v, v.fsteps + p.bsteps + 1, True)
            else:
                raise _violation("forward.2.4", v, obs, rnd)
        else:
            raise _violation("forward.2", v, obs, rnd)
    if _deadlines(v):
        return _terminate(v)
    return _move(v, True)


def _bounce(v: AgentVars, obs: Observation, rnd: int) -> Step:
    peers = obs.peers
    if obs.meeting:
        if len(peers) == 2 or _mismatch(v, peers):
            return _terminate(v)
        p = peers[0].vars
        if v.sbound is not None:
            if p.state is State.SETTLED:
                return _terminate(v)
        elif p.state is State.SETTLED:
            if v.met_settled_in_run == 0:
                v.met_settled_in_run = 1
                v.scount = 0
            elif v.met_settled_in_run == 1 and v.rsize is not None:
                v.met_settled_in_run = 2
                _become_return(v)
                return _move(v, True)
            else:
                raise _violation("bounce.2.2", v, obs, rnd)
        elif p.state is State.FORWARD:
            _set_sbound(v, p.fsteps + v.bsteps, False)
        else:
            raise _violation("bounce.2", v, obs, rnd)
    if _deadlines(v):
        return _terminate(v)
    if v.countdown is None and v.bblocked > v.bsteps:
        _become_return(v)
        return _move(v, True)
    return _move(v, False)


def _return(v: AgentVars, obs: Observation, rnd: int) -> Step:
    peers = obs.peers
    if obs.meeting:
        if len(peers) == 2 or _mismatch(v, peers):
            return _terminate(v)
        peer = peers[0]
        p = peer.vars
        if v.sbound is not None:
            if p.state is State.SETTLED:
                return _terminate(v)
        elif v.rsize is not None or p.state is State.SETTLED:
            pass
        elif p.state is State.FORWARD:
            if peer.tag.arrived and not obs.own_tag.arrived:
                _set_sbound(v, p.fsteps + v.bsteps, False)
            elif obs.own_tag.arrived and not peer.tag.arrived:
                if v.rsteps <= 2 * v.bsteps:
                    _set_sbound(v, p.fsteps + v.bsteps + 1, False)
                else:
                    _become_bounce(v)
                    return _move(v, False)
            else:
                raise _violation("return.2.2", v, obs, rnd)
        else:
            raise _violation("return.2", v, obs, rnd)
    if _deadlines(v):
        return _terminate(v)
    return _move(v, True)


_DISPATCH = {
    State.SEARCH: _search,
    State.SETTLED: _settled,
    State.FORWARD: _forward,
    State.BOUNCE: _bounce,
    State.RETURN: _return,
}


def transition(v: AgentVars, obs: Observation, round_index: int) -> Step:
    """One Compute step. Returns ``(new_vars, intent, terminate)``.

    The returned vars are also what the agent discloses to peers.
    """
    if v.state is State.TERMINATED:
        raise ProtocolViolation("transition", f"agent {v.id} already terminated", round_index)
    return _DISPATCH[v.state](v.clone(), obs, round_index)
