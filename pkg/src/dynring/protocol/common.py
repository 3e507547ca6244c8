"""Agent state, observations and the pieces shared by both protocol variants."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from dynring.ring import Dir, Tag


class State(str, Enum):
    SEARCH = "search"
    SETTLED = "settled"
    FORWARD = "forward"
    BOUNCE = "bounce"
    RETURN = "return"
    TERMINATED = "terminated"


class ProtocolViolation(RuntimeError):
    """An observation that cannot occur under the model; aborts the run."""

    def __init__(self, rule: str, detail: str, round_index: int | None = None):
        self.rule = rule
        self.detail = detail
        self.round_index = round_index
        super().__init__(f"[{rule}] round {round_index}: {detail}")


# A move intent is a private direction, or None for staying put.
MoveIntent = Dir | None


@dataclass
class AgentVars:
    """Everything an agent remembers and discloses to co-located agents.

    Directions named "clockwise" by the protocol are the agent's private
    ``agreed`` direction; with chirality that is simply ``Dir.RIGHT``.
    """

    id: str
    k: int
    val: int
    achiral: bool = False
    state: State = State.SEARCH
    winner: bool = False
    first_met: bool = False
    cw_mode: bool = False
    scount: int | None = None
    fsteps: int = 0
    bsteps: int = 0
    rsteps: int = 0
    bblocked: int = 0
    ttime: int | None = None
    rsize: int | None = None
    sbound: int | None = None
    run: int = 0
    countdown: int | None = None
    countdown_cw: bool | None = None
    met_settled_in_run: int = 0
    stime_cutoff: int | None = None
    phase: int = 0
    round_in_phase: int = 0
    clock: int = 0
    agreed: Dir | None = Dir.RIGHT
    mid: str = ""

    def clone(self) -> "AgentVars":
        new = object.__new__(AgentVars)
        new.__dict__.update(self.__dict__)
        return new

    @property
    def stime(self) -> int:
        return self.clock

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["state"] = self.state.value
        d["agreed"] = self.agreed.value if self.agreed is not None else None
        return d


@dataclass(slots=True)
class PeerView:
    """One co-located agent as seen during Look."""

    vars: AgentVars
    tag: Tag
    new: bool
    same_orientation: bool
    index: int = -1


@dataclass(slots=True)
class Observation:
    peers: list[PeerView] = field(default_factory=list)
    own_tag: Tag = Tag.STAYED
    n_hint: int | None = None

    @property
    def meeting(self) -> bool:
        return any(p.new for p in self.peers)


def log2_ceil(n: int) -> int:
    return (n - 1).bit_length()


def stime_cutoff(k: int, n: int) -> int:
    return k * k * 2 ** (k + log2_ceil(n) + 4)


def after_move(v: AgentVars, tag: Tag, phase_length) -> AgentVars:
    """Counter bookkeeping for the Move just performed; called once per round."""
    v = v.clone()
    v.clock += 1
    v.round_in_phase += 1
    if v.round_in_phase >= phase_length(v.k, v.phase):
        v.phase += 1
        v.round_in_phase = 0
    if v.ttime is not None:
        v.ttime += 1
    if tag.arrived:
        if v.state is State.FORWARD:
            v.fsteps += 1
        elif v.state is State.BOUNCE:
            v.bsteps += 1
        elif v.state is State.RETURN:
            v.rsteps += 1
        if v.scount is not None:
            v.scount += 1
    elif tag is Tag.BLOCKED and v.state is State.BOUNCE:
        v.bblocked += 1
    return v
