"""Bit-string identifiers and the derived strings used for direction agreement.

Bit positions are 1-indexed everywhere in this module: position 1 is the
leftmost (most significant) character of the string as written.
"""

from __future__ import annotations

from functools import lru_cache


class IdentifierError(ValueError):
    pass


def _check_bits(bits: str) -> None:
    if not bits or any(c not in "01" for c in bits):
        raise IdentifierError(f"not a binary string: {bits!r}")


class AgentId(str):
    """A k-bit identifier, k > 1, stored as its literal binary string."""

    def __new__(cls, bits: str) -> "AgentId":
        bits = str(bits)
        _check_bits(bits)
        if len(bits) < 2:
            raise IdentifierError(f"identifier must have length k > 1, got {bits!r}")
        return super().__new__(cls, bits)

    @property
    def k(self) -> int:
        return len(self)

    @property
    def val(self) -> int:
        return value_of(self)


def parse_ids(raw: list[str] | tuple[str, ...]) -> tuple[AgentId, ...]:
    """Parse a group of identifiers that must share one length and be distinct."""
    ids = tuple(AgentId(r) for r in raw)
    if len({len(i) for i in ids}) > 1:
        raise IdentifierError(f"identifiers have mixed lengths: {list(raw)}")
    if len(set(ids)) != len(ids):
        raise IdentifierError(f"identifiers are not distinct: {list(raw)}")
    return ids


def value_of(bits: str) -> int:
    """Numerical value of a binary string, leftmost bit most significant."""
    _check_bits(bits)
    return int(bits, 2)


def pair_count(k: int) -> int:
    return k * (k - 1) // 2


@lru_cache(maxsize=None)
def _pairs(k: int) -> tuple[tuple[int, int], ...]:
    return tuple((u, v) for u in range(1, k + 1) for v in range(u + 1, k + 1))


def pair_index(u: int, v: int, k: int) -> int:
    """Rank (1-based) of ``(u, v)`` among all pairs ``u < v <= k`` in lexicographic order."""
    if not (1 <= u < v <= k):
        raise IdentifierError(f"need 1 <= u < v <= k, got u={u}, v={v}, k={k}")
    # pairs starting with 1..u-1 come first: sum_{a<u} (k - a)
    before = (u - 1) * k - (u - 1) * u // 2
    return before + (v - u)


def pair_from_index(i: int, k: int) -> tuple[int, int]:
    if not (1 <= i <= pair_count(k)):
        raise IdentifierError(f"index {i} out of range 1..{pair_count(k)} for k={k}")
    return _pairs(k)[i - 1]


def modified_id(bits: str) -> str:
    """``"0" + bits + xor block``; the block has one bit per pair of positions."""
    _check_bits(bits)
    k = len(bits)
    block = "".join(
        "1" if bits[u - 1] != bits[v - 1] else "0" for u, v in _pairs(k)
    )
    return "0" + bits + block


def modified_id_length(k: int) -> int:
    return pair_count(k) + k + 1


def duplicate_bits(s: str, t: int) -> str:
    """Repeat every bit of ``s`` ``t`` times in place: ``duplicate_bits("101", 3) == "111000111"``."""
    if t < 1:
        raise IdentifierError(f"repeat count must be positive, got {t}")
    _check_bits(s)
    return "".join(c * t for c in s)
