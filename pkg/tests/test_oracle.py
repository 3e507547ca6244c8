import itertools

import pytest

from dynring.identifiers import modified_id
from dynring.oracle import (
    InfeasibleCheck,
    agreement_indices,
    check_agreement_indices,
    check_contiguous_block,
    check_lemma_main,
    lemma_placements,
    lemma_premise,
    longest_agreement,
)


@pytest.mark.parametrize("n", [3, 4])
def test_lemma_main_exhaustive(n):
    v = check_lemma_main(n)
    assert v.passed and v.counterexample is None
    assert v.cases == v.details["placements"] * (n + 1) ** (2 * n)


def test_lemma_main_placements_n3():
    # r3 strictly between r1 and r2 clockwise: on 3 nodes that is r2 = r1 + 2, r3 = r1 + 1
    assert lemma_placements(3) == [(0, 2, 1), (1, 0, 2), (2, 1, 0)]


def test_lemma_main_inverted_premise_is_filtered_out():
    v = check_lemma_main(3, inverted=True)
    assert v.passed and v.cases == 0
    assert v.details == {"candidates": 3, "admitted": 0, "premise_excluded_all": True}
    assert not any(lemma_premise(3, p) for p in lemma_placements(3, inverted=True))


def test_lemma_main_finds_counterexample_when_window_too_short():
    v = check_lemma_main(5, horizon=4)
    assert not v.passed
    ce = v.counterexample
    assert len(ce["missing_edges"]) == 4 and lemma_premise(5, (ce["r1"], ce["r2"], ce["r3"]))


def test_lemma_main_replay_of_counterexample():
    # replaying the reported sequence by hand keeps both chasers apart
    ce = check_lemma_main(5, horizon=4).counterexample
    n, p2, p3 = 5, ce["r2"], ce["r3"]
    for e in ce["missing_edges"]:
        p2 = p2 if e == p2 else (p2 + 1) % n
        p3 = p3 if e == p3 else (p3 + 1) % n
        assert p2 != ce["r1"] and p3 != p2


@pytest.mark.parametrize("n", [2, 6, 12])
def test_lemma_main_rejects_infeasible(n):
    with pytest.raises(InfeasibleCheck):
        check_lemma_main(n)


@pytest.mark.parametrize("k, triples", [(2, 4), (3, 56), (4, 560), (5, 4960)])
def test_agreement_indices(k, triples):
    v = check_agreement_indices(k)
    assert v.passed and v.cases == triples
    assert v.details["all_equal_first_indices"] == [1]


def test_agreement_indices_by_hand():
    found = agreement_indices(modified_id("01"), modified_id("10"), modified_id("11"))
    # "0011", "0101", "0110"
    assert found == {"all_equal": 1, "r1_r2": 4, "r1_r3": 3, "r2_r3": 2}


def test_agreement_reports_missing_patterns():
    assert agreement_indices("00", "00", "00")["r1_r2"] is None


@pytest.mark.parametrize("k, j", [(2, 0), (3, 3), (3, 4), (4, 2)])
def test_contiguous_block(k, j):
    v = check_contiguous_block(k, j)
    assert v.passed and v.cases == len(list(itertools.combinations(range(2**k), 3))) * 8
    assert v.details["shortest_longest_run"] >= 2**j


def test_equal_orientations_agree_everywhere_on_first_block():
    mids = tuple(modified_id(b) for b in ("001", "010", "111"))
    for j in range(4):
        assert longest_agreement(mids, (True, True, True), j) >= 2**j
        assert longest_agreement(mids, (False, False, False), j) >= 2**j


def test_contiguous_rejects_out_of_range():
    with pytest.raises(InfeasibleCheck):
        check_contiguous_block(3, 7)
    with pytest.raises(InfeasibleCheck):
        check_agreement_indices(6)
