"""Brute-force checkers for small instances, independent of the engine.

These use only the identifier primitives and their own few-line movement
models, so a bug in the engine or the protocol code cannot hide itself here.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from functools import lru_cache

from dynring.identifiers import duplicate_bits, modified_id

LEMMA_MAIN_N_RANGE = (3, 5)
AGREEMENT_K_RANGE = (2, 5)
CONTIGUOUS_J_RANGE = (0, 6)


class InfeasibleCheck(ValueError):
    """Parameters outside the range an exhaustive check can cover quickly."""


@dataclass
class Verdict:
    check: str
    params: dict
    passed: bool
    cases: int
    counterexample: dict | None = None
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "params": self.params,
            "passed": self.passed,
            "cases": self.cases,
            "counterexample": self.counterexample,
            "details": self.details,
            "seconds": round(self.seconds, 3),
        }


def _require(name: str, value: int, lo: int, hi: int) -> None:
    if not isinstance(value, int) or not lo <= value <= hi:
        raise InfeasibleCheck(f"{name}={value!r} outside the feasible range {lo}..{hi}")


# -- two chasers and a static agent ---------------------------------------------


def lemma_placements(n: int, inverted: bool = False) -> list[tuple[int, int, int]]:
    """Distinct placements (r1, r2, r3) with r3 strictly between r1 and r2 clockwise.

    With ``inverted`` the order is swapped: r2 lies between r1 and r3.
    """
    out = []
    for r1, r2, r3 in itertools.permutations(range(n), 3):
        d2, d3 = (r2 - r1) % n, (r3 - r1) % n
        if (d3 > d2) if inverted else (d3 < d2):
            out.append((r1, r2, r3))
    return out


def lemma_premise(n: int, placement: tuple[int, int, int]) -> bool:
    r1, r2, r3 = placement
    return 0 <= (r3 - r1) % n < (r2 - r1) % n


def _lemma_search(n: int, r1: int, horizon: int):
    """Exhaustive search over missing-edge sequences; edge i joins i and i+1.

    Returns (sequences covered, failing sequence or None) for a start state.
    Once one of the two meetings has happened every continuation succeeds, so
    that subtree counts ``(n + 1) ** remaining`` sequences at once.
    """
    choices = [None, *range(n)]

    @lru_cache(maxsize=None)
    def explore(t: int, p2: int, p3: int) -> tuple[int, tuple | None]:
        if p2 == r1 or p3 == p2:
            return (n + 1) ** (horizon - t), None
        if t == horizon:
            return 1, ()
        total = 0
        for e in choices:
            q2 = p2 if e == p2 else (p2 + 1) % n
            q3 = p3 if e == p3 else (p3 + 1) % n
            count, bad = explore(t + 1, q2, q3)
            total += count
            if bad is not None:
                return total, (e, *bad)
        return total, None

    return explore


def check_lemma_main(n: int, inverted: bool = False, horizon: int | None = None) -> Verdict:
    """One static agent r1; r2 and r3 try to move clockwise every round.

    Whenever r3 sits strictly between r1 and r2 (clockwise from r1), every
    adversary sequence of length 2n must make r2 reach r1 or r3 reach r2.
    ``horizon`` overrides the 2n window (used to show the checker can fail).
    """
    _require("n", n, *LEMMA_MAIN_N_RANGE)
    start = time.perf_counter()
    horizon = 2 * n if horizon is None else horizon
    candidates = lemma_placements(n, inverted)
    qualifying = [p for p in candidates if lemma_premise(n, p)]
    params = {"n": n, "premise": "inverted" if inverted else "holds"}
    if inverted:
        return Verdict(
            "lemma-main",
            params,
            passed=not qualifying,
            cases=0,
            details={"candidates": len(candidates), "admitted": len(qualifying), "premise_excluded_all": not qualifying},
            seconds=time.perf_counter() - start,
        )
    cases = 0
    searches: dict[int, object] = {}
    for r1, r2, r3 in qualifying:
        explore = searches.setdefault(r1, _lemma_search(n, r1, horizon))
        count, bad = explore(0, r2, r3)
        cases += count
        if bad is not None:
            return Verdict(
                "lemma-main",
                params,
                False,
                cases,
                counterexample={"r1": r1, "r2": r2, "r3": r3, "missing_edges": list(bad)},
                seconds=time.perf_counter() - start,
            )
    return Verdict(
        "lemma-main",
        params,
        True,
        cases,
        details={"placements": len(qualifying), "horizon": horizon, "sequences_per_placement": (n + 1) ** horizon},
        seconds=time.perf_counter() - start,
    )


# -- agreement indices -------------------------------------------------------------

PATTERNS = ("all_equal", "r1_r2", "r1_r3", "r2_r3")


def _pattern(a: str, b: str, c: str) -> str | None:
    if a == b == c:
        return "all_equal"
    if a == b:
        return "r1_r2"
    if a == c:
        return "r1_r3"
    if b == c:
        return "r2_r3"
    return None


def agreement_indices(m1: str, m2: str, m3: str) -> dict[str, int | None]:
    """First 1-based index realising each agreement pattern across three equal-length strings."""
    found: dict[str, int | None] = dict.fromkeys(PATTERNS)
    for i, bits in enumerate(zip(m1, m2, m3), 1):
        p = _pattern(*bits)
        if p is not None and found[p] is None:
            found[p] = i
    return found


def _id_triples(k: int):
    ids = [format(v, f"0{k}b") for v in range(2**k)]
    return itertools.combinations(ids, 3)


def check_agreement_indices(k: int) -> Verdict:
    _require("k", k, *AGREEMENT_K_RANGE)
    start = time.perf_counter()
    cases = 0
    first_all_equal = set()
    for triple in _id_triples(k):
        cases += 1
        found = agreement_indices(*(modified_id(b) for b in triple))
        first_all_equal.add(found["all_equal"])
        missing = [p for p in PATTERNS if found[p] is None]
        if missing:
            return Verdict(
                "agreement",
                {"k": k},
                False,
                cases,
                counterexample={"ids": list(triple), "missing_patterns": missing},
                seconds=time.perf_counter() - start,
            )
    return Verdict(
        "agreement",
        {"k": k},
        True,
        cases,
        details={"all_equal_first_indices": sorted(first_all_equal)},
        seconds=time.perf_counter() - start,
    )


# -- contiguous agreement blocks ------------------------------------------------------


def longest_agreement(mids: tuple[str, str, str], orientations: tuple[bool, bool, bool], j: int) -> int:
    """Longest run of rounds in phase ``j`` where all three agents head the same global way.

    An agent reads ``duplicate_bits(mid, 2**j)`` one bit per round; ``0`` means
    its left, ``1`` its right; an agent whose right is clockwise maps right to
    clockwise, the others map it to counterclockwise.
    """
    streams = []
    for mid, right_cw in zip(mids, orientations):
        bits = duplicate_bits(mid, 2**j)
        streams.append([(b == "1") == right_cw for b in bits])
    best = run = 0
    prev = None
    for a, b, c in zip(*streams):
        if a == b == c:
            run = run + 1 if prev == a else 1
            prev = a
        else:
            run, prev = 0, None
        best = max(best, run)
    return best


def check_contiguous_block(k: int, j: int) -> Verdict:
    _require("k", k, *AGREEMENT_K_RANGE)
    _require("j", j, *CONTIGUOUS_J_RANGE)
    start = time.perf_counter()
    need = 2**j
    cases = 0
    shortest = None
    for triple in _id_triples(k):
        mids = tuple(modified_id(b) for b in triple)
        for orient in itertools.product((True, False), repeat=3):
            cases += 1
            got = longest_agreement(mids, orient, j)
            shortest = got if shortest is None else min(shortest, got)
            if got < need:
                return Verdict(
                    "contiguous",
                    {"k": k, "j": j},
                    False,
                    cases,
                    counterexample={"ids": list(triple), "orientations": list(orient), "longest": got, "needed": need},
                    seconds=time.perf_counter() - start,
                )
    return Verdict(
        "contiguous",
        {"k": k, "j": j},
        True,
        cases,
        details={"needed": need, "shortest_longest_run": shortest},
        seconds=time.perf_counter() - start,
    )


CHECKS = {
    "lemma-main": check_lemma_main,
    "agreement": check_agreement_indices,
    "contiguous": check_contiguous_block,
}
