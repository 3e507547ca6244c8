"""The synchronous Look-Compute-Move round loop, traces and verdicts."""

from __future__ import annotations

import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from dynring import adversary as adv
from dynring.identifiers import IdentifierError, parse_ids
from dynring.protocol import AgentVars, Observation, PeerView, ProtocolViolation, State, after_move, get_protocol
from dynring.protocol.chiral import absorb, deduce, new_vars
from dynring.protocol.common import log2_ceil
from dynring.ring import GlobalDir, Tag, edge_crossed, is_new_meeting, resolve_moves, to_global

log = logging.getLogger("dynring")

MODES = ("chiral", "achiral")
PROTOCOLS = ("explore", "meeting")
TRACE_LEVELS = ("summary", "full")


class ConfigError(ValueError):
    """A configuration that violates its own invariants; ``field`` names the culprit."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


def exploration_bound(n: int, k: int, mode: str) -> int:
    if mode == "chiral":
        return 2 ** (k + log2_ceil(n) + 3) + 23 * n
    return k * k * 2 ** (k + log2_ceil(n) + 4) + 23 * n


def meeting_bound(n: int, k: int, mode: str) -> int:
    if mode == "chiral":
        return 2 ** (k + log2_ceil(n) + 2)
    return k * k * 2 ** (k + log2_ceil(n) + 3)


@dataclass
class SimulationConfig:
    n: int
    ids: tuple[str, ...]
    positions: tuple[int, ...]
    orientations: tuple[bool, ...] = (True, True, True)
    mode: str = "chiral"
    adversary: dict = field(default_factory=lambda: {"kind": "none"})
    max_rounds: int | None = None
    trace_level: str = "summary"
    protocol: str = "explore"

    def __post_init__(self):
        self.ids = tuple(self.ids)
        self.positions = tuple(self.positions)
        self.orientations = tuple(bool(o) for o in self.orientations)
        self.validate()

    @property
    def k(self) -> int:
        return len(self.ids[0])

    @property
    def bound(self) -> int:
        if self.protocol == "meeting":
            return meeting_bound(self.n, self.k, self.mode)
        return exploration_bound(self.n, self.k, self.mode)

    @property
    def round_cap(self) -> int:
        return self.max_rounds if self.max_rounds is not None else 4 * self.bound

    def validate(self) -> None:
        if not isinstance(self.n, int) or self.n < 3:
            raise ConfigError("n", f"ring size must be an integer >= 3, got {self.n!r}")
        if len(self.ids) != 3:
            raise ConfigError("ids", f"exactly three identifiers required, got {len(self.ids)}")
        try:
            parse_ids(self.ids)
        except IdentifierError as e:
            raise ConfigError("ids", str(e)) from None
        if len(self.positions) != 3:
            raise ConfigError("positions", "exactly three positions required")
        for p in self.positions:
            if not isinstance(p, int) or not 0 <= p < self.n:
                raise ConfigError("positions", f"position {p!r} outside 0..{self.n - 1}")
        if len(self.orientations) != 3:
            raise ConfigError("orientations", "exactly three orientations required")
        if self.mode not in MODES:
            raise ConfigError("mode", f"expected one of {MODES}, got {self.mode!r}")
        if self.mode == "chiral" and len(set(self.orientations)) != 1:
            raise ConfigError("orientations", "chiral mode requires equal orientations")
        if self.protocol not in PROTOCOLS:
            raise ConfigError("protocol", f"expected one of {PROTOCOLS}, got {self.protocol!r}")
        if self.trace_level not in TRACE_LEVELS:
            raise ConfigError("trace_level", f"expected one of {TRACE_LEVELS}, got {self.trace_level!r}")
        if self.max_rounds is not None and (not isinstance(self.max_rounds, int) or self.max_rounds < 1):
            raise ConfigError("max_rounds", f"must be a positive integer, got {self.max_rounds!r}")
        if not isinstance(self.adversary, dict) or "kind" not in self.adversary:
            raise ConfigError("adversary", "expected an object with a 'kind' key")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "ids": list(self.ids),
            "positions": list(self.positions),
            "orientations": list(self.orientations),
            "mode": self.mode,
            "protocol": self.protocol,
            "adversary": self.adversary,
            "max_rounds": self.max_rounds,
            "trace_level": self.trace_level,
        }

    @classmethod
    def from_json(cls, doc: dict, base_dir: Path | None = None) -> "SimulationConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config", "expected a JSON object")
        known = {"n", "ids", "positions", "orientations", "mode", "protocol", "adversary", "max_rounds", "trace_level"}
        extra = set(doc) - known
        if extra:
            raise ConfigError(sorted(extra)[0], "unknown field")
        for req in ("n", "ids", "positions"):
            if req not in doc:
                raise ConfigError(req, "missing required field")
        adversary = doc.get("adversary", {"kind": "none"})
        if isinstance(adversary, dict) and adversary.get("kind") == "scripted" and "path" in adversary and base_dir:
            p = Path(adversary["path"])
            if not p.is_absolute():
                adversary = {**adversary, "path": str(base_dir / p)}
        try:
            return cls(
                n=doc["n"],
                ids=tuple(doc["ids"]),
                positions=tuple(doc["positions"]),
                orientations=tuple(doc.get("orientations", (True, True, True))),
                mode=doc.get("mode", "chiral"),
                adversary=adversary,
                max_rounds=doc.get("max_rounds"),
                trace_level=doc.get("trace_level", "summary"),
                protocol=doc.get("protocol", "explore"),
            )
        except TypeError as e:
            raise ConfigError("config", str(e)) from None


def load_config(path: str | Path) -> SimulationConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError("config", f"cannot read {path}: {e}") from None
    return SimulationConfig.from_json(doc, base_dir=path.parent)


@dataclass
class SimulationOutcome:
    mode: str
    protocol: str
    n: int
    k: int
    explored: bool
    all_terminated: bool
    rounds_elapsed: int
    bound: int
    bound_satisfied: bool
    first_meeting_round: int | None
    termination_rounds: list[int | None]
    violation: dict | None = None
    verdicts: list[dict] = field(default_factory=list)
    shortcut: dict | None = None

    @property
    def ok(self) -> bool:
        if self.violation is not None or not all(v["ok"] for v in self.verdicts):
            return False
        if self.protocol == "meeting":
            return self.first_meeting_round is not None and self.bound_satisfied
        return self.explored and self.all_terminated and self.bound_satisfied

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "protocol": self.protocol,
            "n": self.n,
            "k": self.k,
            "explored": self.explored,
            "all_terminated": self.all_terminated,
            "rounds_elapsed": self.rounds_elapsed,
            "bound": self.bound,
            "bound_satisfied": self.bound_satisfied,
            "first_meeting_round": self.first_meeting_round,
            "termination_rounds": self.termination_rounds,
            "violation": self.violation,
            "verdicts": self.verdicts,
            "shortcut": self.shortcut,
            "ok": self.ok,
        }


# -- invariant checking --------------------------------------------------------

VERDICT_NAMES = (
    "one_missing_edge",
    "move_consistency",
    "settled_static",
    "single_settled",
    "rsize_correct",
    "sbound_range",
    "no_early_termination",
    "counter_bookkeeping",
    "ttime_monotone",
)


class TraceChecker:
    """Per-round invariant checks over trace records (see :func:`verify_trace`)."""

    def __init__(self, n: int):
        self.n = n
        self.visited: set[int] = set()
        self.failures: dict[str, tuple[int, str]] = {}
        self.steps: dict[tuple, int] = defaultdict(int)
        self.blocks: dict[tuple, int] = defaultdict(int)
        self.last: dict[int, dict] = {}

    def _fail(self, name: str, rnd: int, detail: str) -> None:
        self.failures.setdefault(name, (rnd, detail))

    def feed(self, rec: dict) -> None:
        n = self.n
        t = rec["round"]
        missing = rec["missing"]
        if len(missing) > 1 or any(not 0 <= e < n for e in missing):
            self._fail("one_missing_edge", t, f"missing edges {missing}")
        agents = rec["agents"]
        for a in agents:
            self.visited.add(a["pos"])
        settled = 0
        for a in agents:
            i = a["index"]
            v = a["vars"]
            state = a["state"]
            pos, nxt = a["pos"], a["next_pos"]
            prev = self.last.get(i)
            if prev is not None and prev["next_pos"] != pos:
                self._fail("move_consistency", t, f"agent {i} jumped from {prev['next_pos']} to {pos}")
            intent = a["intent"]
            tag = a["tag"]
            if intent is None:
                ok = nxt == pos and tag == "stayed"
            else:
                g = GlobalDir(intent)
                e = edge_crossed(pos, g, n)
                if tag == "blocked":
                    ok = nxt == pos and e in missing
                else:
                    want = (pos + 1) % n if g is GlobalDir.CW else (pos - 1) % n
                    ok = nxt == want and e not in missing and tag == f"arrived_{intent}"
            if not ok:
                self._fail("move_consistency", t, f"agent {i}: intent {intent}, tag {tag}, {pos}->{nxt}")
            if state == "settled":
                settled += 1
                if nxt != pos or intent is not None:
                    self._fail("settled_static", t, f"settled agent {i} moves {pos}->{nxt}")
            if v.get("rsize") is not None and v["rsize"] != n:
                self._fail("rsize_correct", t, f"agent {i} has RSize {v['rsize']}, ring size {n}")
            sb = v.get("sbound")
            if sb is not None and not n <= sb <= 3 * n:
                self._fail("sbound_range", t, f"agent {i} has SBound {sb} outside [{n}, {3 * n}]")
            if a["terminated"] and len(self.visited) < n:
                self._fail(
                    "no_early_termination", t, f"agent {i} terminated with {len(self.visited)}/{n} nodes visited"
                )
            if state == "forward" or v.get("fsteps", 0) or state in ("bounce", "return"):
                if v.get("fsteps") != self.steps[(i, "forward")]:
                    self._fail("counter_bookkeeping", t, f"agent {i} FSteps {v.get('fsteps')} != {self.steps[(i, 'forward')]}")
            run = v.get("run")
            if state == "bounce":
                if v.get("bsteps") != self.steps[(i, "bounce", run)] or v.get("bblocked") != self.blocks[(i, run)]:
                    self._fail("counter_bookkeeping", t, f"agent {i} bounce counters disagree with its moves")
            if state == "return" and v.get("rsteps") != self.steps[(i, "return", run)]:
                self._fail("counter_bookkeeping", t, f"agent {i} RSteps disagree with its moves")
            if prev is not None:
                pt, ct = prev["vars"].get("ttime"), v.get("ttime")
                if pt is not None and ct is not None and ct != pt + 1 and state != "terminated":
                    self._fail("ttime_monotone", t, f"agent {i} TTime {pt} -> {ct}")
            if tag.startswith("arrived"):
                if state == "forward":
                    self.steps[(i, "forward")] += 1
                elif state in ("bounce", "return"):
                    self.steps[(i, state, run)] += 1
            elif tag == "blocked" and state == "bounce":
                self.blocks[(i, run)] += 1
            self.last[i] = a
            self.visited.add(nxt)
        if settled > 1:
            self._fail("single_settled", t, f"{settled} settled agents")

    def verdicts(self) -> list[dict]:
        out = []
        for name in VERDICT_NAMES:
            if name in self.failures:
                rnd, detail = self.failures[name]
                out.append({"name": name, "ok": False, "round": rnd, "detail": detail})
            else:
                out.append({"name": name, "ok": True, "round": None, "detail": ""})
        return out


def verify_trace(trace: Iterable[dict], config: SimulationConfig) -> list[dict]:
    """Re-check every per-round invariant on a recorded trace.

    Returns one verdict per invariant: ``{"name", "ok", "round", "detail"}``.
    """
    checker = TraceChecker(config.n)
    for rec in trace:
        checker.feed(rec)
    return checker.verdicts()


# -- the round loop --------------------------------------------------------------

# Fields that only count rounds; they never change behaviour on their own
# unless a deadline is attached (checked separately in _stall_safe).
_CLOCK_FIELDS = ("clock", "phase", "round_in_phase")


def lone_termination_round(v: AgentVars, t: int) -> int | None:
    """Round at which an agent that can never meet anyone again terminates.

    Without meetings only the countdown, TTime and STime deadlines can stop
    it, and each of those advances by exactly one per round.
    """
    waits = []
    if v.countdown is not None:
        waits.append(max(v.countdown, 0))
    if v.rsize is not None and v.ttime is not None:
        waits.append(max(0, 16 * v.rsize + 1 - v.ttime))
    if v.stime_cutoff is not None:
        waits.append(max(0, v.stime_cutoff + 1 - v.clock))
    return t + min(waits) if waits else None


def _stall_safe(v: AgentVars) -> bool:
    if v.countdown is not None or v.stime_cutoff is not None:
        return False
    if v.state is State.SEARCH and not v.cw_mode and v.val != 0:
        return False
    return True


def _stall_key(v: AgentVars) -> tuple:
    d = dict(v.__dict__)
    for f in _CLOCK_FIELDS:
        del d[f]
    if v.rsize is None:
        del d["ttime"]
    return tuple(d.items())


def _observations(
    vars_: list[AgentVars],
    groups: list[list[int]],
    tags: list[Tag],
    orient: tuple[bool, ...],
    first_round: bool,
) -> dict[int, Observation]:
    out = {}
    for g in groups:
        for i in g:
            peers = [
                PeerView(
                    vars=vars_[j],
                    tag=tags[j],
                    new=first_round or is_new_meeting(tags[i], tags[j]),
                    same_orientation=orient[i] == orient[j],
                    index=j,
                )
                for j in g
                if j != i
            ]
            out[i] = Observation(peers=peers, own_tag=tags[i])
    return out


def run(config: SimulationConfig) -> tuple[SimulationOutcome, list[dict]]:
    """Simulate one configuration until every agent has terminated or the round cap is hit."""
    proto = get_protocol(config.mode, meeting_only=config.protocol == "meeting")
    n = config.n
    orient = config.orientations
    strategy = adv.from_spec(config.adversary)
    keep_trace = config.trace_level == "full"
    agents = [new_vars(i, achiral=proto.achiral) for i in config.ids]
    positions = list(config.positions)
    tags = [Tag.STAYED] * 3
    alive = [True, True, True]
    term_round: list[int | None] = [None, None, None]
    visited = set(positions)
    checker = TraceChecker(n)
    trace: list[dict] = []
    first_meeting = None
    violation = None
    cap = config.round_cap
    rounds = 0
    empty = Observation()
    # summary runs may skip rounds whose outcome is already determined
    shortcuts = not keep_trace
    shortcut = None
    prev_state = None

    for t in range(cap):
        live = [i for i in range(3) if alive[i]]
        if not live:
            break
        rounds = t + 1
        if shortcuts and len(live) == 1 and len(visited) == n:
            i = live[0]
            end = lone_termination_round(agents[i], t)
            shortcut = {"kind": "lone_agent", "round": t}
            if end is not None and end < cap:
                alive[i] = False
                term_round[i] = end
                agents[i].state = State.TERMINATED
                rounds = end + 1
            else:
                rounds = cap
            break
        if shortcuts and t > 0 and strategy.stateless and all(_stall_safe(agents[i]) for i in live):
            state = (tuple(positions), tuple(tags), tuple(alive), tuple(_stall_key(agents[i]) for i in live))
            if state == prev_state:
                shortcut = {"kind": "stall", "round": t}
                rounds = cap
                break
            prev_state = state
        else:
            prev_state = None
        by_node: dict[int, list[int]] = {}
        for i in live:
            by_node.setdefault(positions[i], []).append(i)
        groups = [g for g in by_node.values() if len(g) > 1]
        meetings = []
        for g in groups:
            for a in range(len(g)):
                for b in range(a + 1, len(g)):
                    i, j = g[a], g[b]
                    if t == 0:
                        meetings.append({"pair": [i, j], "kind": "initial"})
                    elif is_new_meeting(tags[i], tags[j]):
                        if tags[i].arrived and tags[j].arrived:
                            meetings.append({"pair": [i, j], "kind": "head_on"})
                        else:
                            catcher = i if tags[i].arrived else j
                            meetings.append({"pair": [i, j], "kind": "catch", "catcher": catcher})
        if meetings and first_meeting is None:
            first_meeting = t
            if proto.meeting_only:
                rounds = t
                break

        if groups:
            obs = _observations(agents, groups, tags, orient, t == 0)
            for i, o in obs.items():
                agents[i] = deduce(agents[i], o)
            obs = _observations(agents, groups, tags, orient, t == 0)
            for i, o in obs.items():
                agents[i] = absorb(agents[i], o)
            obs = _observations(agents, groups, tags, orient, t == 0)
        else:
            obs = {}

        intents: list[GlobalDir | None] = [None, None, None]
        terminating = []
        try:
            for i in live:
                o = obs.get(i)
                if o is None:
                    o = empty
                    o.own_tag = tags[i]
                v, intent, term = proto.transition(agents[i], o, t)
                agents[i] = v
                if term:
                    terminating.append(i)
                elif intent is not None:
                    intents[i] = to_global(orient[i], intent)
        except ProtocolViolation as e:
            e.round_index = t
            violation = {"rule": e.rule, "round": t, "detail": e.detail}
            log.warning("protocol violation: %s", e)
            break

        for i in terminating:
            alive[i] = False
            term_round[i] = t

        world = adv.WorldView(n, positions, intents, alive, agents)
        missing = strategy.choose(world, t)
        new_pos, new_tags = resolve_moves(positions, intents, missing, n, alive)

        rec_agents = []
        for i in live:
            rec_agents.append(
                {
                    "index": i,
                    "id": config.ids[i],
                    "pos": positions[i],
                    "next_pos": new_pos[i],
                    "state": agents[i].state.value,
                    "intent": intents[i].value if intents[i] is not None else None,
                    "tag": new_tags[i].value,
                    "terminated": i in terminating,
                    "vars": agents[i].to_json(),
                }
            )
        rec = {
            "round": t,
            "missing": [] if missing is None else [missing],
            "agents": rec_agents,
            "meetings": meetings,
        }
        checker.feed(rec)
        if keep_trace:
            trace.append(rec)

        for i in live:
            if alive[i]:
                agents[i] = after_move(agents[i], new_tags[i], proto.phase_length)
        positions = new_pos
        tags = new_tags
        visited.update(positions[i] for i in range(3) if alive[i])

    all_done = not any(alive)
    bound = config.bound
    if proto.meeting_only:
        satisfied = first_meeting is not None and first_meeting <= bound
        elapsed = rounds
    else:
        elapsed = rounds
        satisfied = all_done and elapsed <= bound
    outcome = SimulationOutcome(
        mode=config.mode,
        protocol=config.protocol,
        n=n,
        k=config.k,
        explored=len(visited) == n,
        all_terminated=all_done,
        rounds_elapsed=elapsed,
        bound=bound,
        bound_satisfied=satisfied,
        first_meeting_round=first_meeting,
        termination_rounds=term_round,
        violation=violation,
        verdicts=checker.verdicts(),
        shortcut=shortcut,
    )
    return outcome, trace


def dump_trace(trace: list[dict], path: str | Path) -> None:
    with open(path, "w") as fh:
        for rec in trace:
            fh.write(json.dumps(rec, sort_keys=True, separators=(",", ":")))
            fh.write("\n")


def load_trace(path: str | Path) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def summary_json(outcome: SimulationOutcome) -> str:
    return json.dumps(outcome.to_json(), sort_keys=True, indent=2)


def run_json(doc: dict[str, Any]) -> dict:
    out, _ = run(SimulationConfig.from_json(doc))
    return out.to_json()
