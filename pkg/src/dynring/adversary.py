"""Strategies for choosing the (at most one) missing edge each round.

Every strategy sees the whole world, including the intents the agents have
just computed, before it picks. One instance belongs to exactly one run.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any

from dynring.ring import GlobalDir, edge_crossed

MASK64 = (1 << 64) - 1


class SplitMix64:
    """The splitmix64 generator; same seed, same stream, on any platform."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return (self.next() >> 11) / float(1 << 53)


@dataclass
class WorldView:
    n: int
    positions: list[int]
    intents: list[GlobalDir | None]
    alive: list[bool]
    agents: list[Any]


class Adversary:
    kind = "abstract"
    # the choice depends only on the world view, not on the round or hidden state
    stateless = False

    def choose(self, world: WorldView, round_index: int) -> int | None:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"kind": self.kind}


class NoAdversary(Adversary):
    kind = "none"
    stateless = True

    def choose(self, world, round_index):
        return None


class RandomAdversary(Adversary):
    """Removes nothing with probability ``p_none``, otherwise a uniform edge."""

    kind = "random"

    def __init__(self, seed: int, p_none: float = 0.5):
        if not 0.0 <= p_none <= 1.0:
            raise ValueError(f"p_none must be a probability, got {p_none}")
        self.seed = seed
        self.p_none = p_none
        self.rng = SplitMix64(seed)

    def choose(self, world, round_index):
        if self.rng.uniform() < self.p_none:
            return None
        return self.rng.next() % world.n

    def describe(self):
        return {"kind": self.kind, "seed": self.seed, "p_none": self.p_none}


class ScriptedAdversary(Adversary):
    """Plays ``script[round]``; past the end it removes nothing unless ``cycle``."""

    kind = "scripted"

    def __init__(self, script: list[int | None], cycle: bool = False):
        self.script = list(script)
        self.cycle = cycle

    def choose(self, world, round_index):
        if not self.script:
            return None
        if round_index >= len(self.script):
            if not self.cycle:
                return None
            round_index %= len(self.script)
        choice = self.script[round_index]
        if choice is not None and not 0 <= choice < world.n:
            return None
        return choice

    def describe(self):
        return {"kind": self.kind, "script": self.script, "cycle": self.cycle}


class CursorAdversary(ScriptedAdversary):
    """A choice sequence handed over by an enumerator; exhausted means no edge."""

    kind = "cursor"

    def __init__(self, choices: list[int | None]):
        super().__init__(choices, cycle=False)

    def describe(self):
        return {"kind": self.kind, "choices": self.script}


class FrontBlocker(Adversary):
    """Always removes the edge the target agent is about to cross."""

    kind = "front_blocker"
    stateless = True

    def __init__(self, target: int):
        self.target = target

    def choose(self, world, round_index):
        t = self.target
        if t >= len(world.positions) or not world.alive[t] or world.intents[t] is None:
            return None
        return edge_crossed(world.positions[t], world.intents[t], world.n)

    def describe(self):
        return {"kind": self.kind, "target": self.target}


class GapKeeper(Adversary):
    """Blocks whichever moving agent is closest to reaching another agent ahead of it."""

    kind = "gap_keeper"
    stateless = True

    def choose(self, world, round_index):
        n = world.n
        best = None
        for i, g in enumerate(world.intents):
            if g is None or not world.alive[i]:
                continue
            p = world.positions[i]
            gap = None
            for j, q in enumerate(world.positions):
                if j == i or not world.alive[j] or q == p:
                    continue
                d = (q - p) % n if g is GlobalDir.CW else (p - q) % n
                gap = d if gap is None else min(gap, d)
            if gap is not None and (best is None or gap < best[0]):
                best = (gap, i)
        if best is None:
            return None
        i = best[1]
        return edge_crossed(world.positions[i], world.intents[i], n)


def read_script(path: str | Path) -> list[int | None]:
    """One token per line: ``none`` or an edge index. Blank lines and ``#`` comments are skipped."""
    out: list[int | None] = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        tok = line.split("#", 1)[0].strip()
        if not tok:
            continue
        if tok.lower() == "none":
            out.append(None)
        else:
            try:
                out.append(int(tok))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: expected 'none' or an edge index, got {tok!r}") from None
    return out


def from_spec(spec: dict, base_dir: Path | None = None) -> Adversary:
    """Build a strategy from its JSON form, e.g. ``{"kind": "random", "seed": 1}``."""
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind == "none":
        return NoAdversary()
    if kind == "random":
        return RandomAdversary(int(spec.get("seed", 0)), float(spec.get("p_none", 0.5)))
    if kind == "scripted":
        if "path" in spec:
            path = Path(spec["path"])
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            script = read_script(path)
        else:
            script = [None if c is None or c == "none" else int(c) for c in spec.get("script", [])]
        return ScriptedAdversary(script, bool(spec.get("cycle", False)))
    if kind == "cursor":
        return CursorAdversary([None if c is None else int(c) for c in spec.get("choices", [])])
    if kind == "front_blocker":
        return FrontBlocker(int(spec["target"]))
    if kind == "gap_keeper":
        return GapKeeper()
    raise ValueError(f"unknown adversary kind: {kind!r}")
