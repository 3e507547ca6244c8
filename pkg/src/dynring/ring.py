"""Ring geometry, private orientation and move resolution.

Nodes carry global clockwise coordinates ``0..n-1``; edge ``i`` joins node
``i`` and node ``(i + 1) % n``. Agents never see these coordinates.
"""

from __future__ import annotations

from enum import Enum


class Dir(str, Enum):
    """Private direction as an agent perceives it."""

    LEFT = "left"
    RIGHT = "right"

    @property
    def opposite(self) -> "Dir":
        return Dir.RIGHT if self is Dir.LEFT else Dir.LEFT


class GlobalDir(str, Enum):
    CW = "cw"
    CCW = "ccw"


class Tag(str, Enum):
    """What happened to an agent in the Move phase of a round."""

    STAYED = "stayed"
    BLOCKED = "blocked"
    ARRIVED_CW = "arrived_cw"
    ARRIVED_CCW = "arrived_ccw"

    @property
    def arrived(self) -> bool:
        return self is Tag.ARRIVED_CW or self is Tag.ARRIVED_CCW


class RingError(ValueError):
    pass


def cw_distance(a: int, b: int, n: int) -> int:
    return (b - a) % n


def ccw_distance(a: int, b: int, n: int) -> int:
    return (a - b) % n


def to_global(right_is_clockwise: bool, d: Dir) -> GlobalDir:
    if (d is Dir.RIGHT) == right_is_clockwise:
        return GlobalDir.CW
    return GlobalDir.CCW


def to_private(right_is_clockwise: bool, g: GlobalDir) -> Dir:
    if (g is GlobalDir.CW) == right_is_clockwise:
        return Dir.RIGHT
    return Dir.LEFT


def edge_crossed(pos: int, g: GlobalDir, n: int) -> int:
    """Index of the edge traversed when leaving ``pos`` in direction ``g``."""
    return pos if g is GlobalDir.CW else (pos - 1) % n


def step(pos: int, g: GlobalDir, n: int) -> int:
    return (pos + 1) % n if g is GlobalDir.CW else (pos - 1) % n


def resolve_moves(
    positions: list[int],
    intents: list[GlobalDir | None],
    missing: int | None,
    n: int,
    alive: list[bool] | None = None,
) -> tuple[list[int], list[Tag]]:
    """Apply one Move phase.

    ``intents[i]`` is ``None`` for an agent that stays. Agents crossing the
    same present edge in opposite directions simply exchange places; nothing
    about the crossing is reported.
    """
    if n < 3:
        raise RingError(f"ring needs n >= 3, got {n}")
    if len(positions) != len(intents):
        raise RingError("positions and intents differ in length")
    if missing is not None and not (0 <= missing < n):
        raise RingError(f"missing edge {missing} out of range")
    new_pos = []
    tags = []
    for i, (p, g) in enumerate(zip(positions, intents)):
        if not (0 <= p < n):
            raise RingError(f"agent {i} at invalid node {p}")
        if g is None or (alive is not None and not alive[i]):
            new_pos.append(p)
            tags.append(Tag.STAYED)
        elif edge_crossed(p, g, n) == missing:
            new_pos.append(p)
            tags.append(Tag.BLOCKED)
        else:
            new_pos.append(step(p, g, n))
            tags.append(Tag.ARRIVED_CW if g is GlobalDir.CW else Tag.ARRIVED_CCW)
    return new_pos, tags


def is_new_meeting(tag_a: Tag, tag_b: Tag) -> bool:
    """Whether two agents found together at a Look met in the preceding Move.

    Both arriving from the same side means they moved together and were
    already co-located.
    """
    if tag_a.arrived and tag_b.arrived:
        return tag_a is not tag_b
    return tag_a.arrived or tag_b.arrived
