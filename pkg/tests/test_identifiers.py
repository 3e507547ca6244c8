import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynring.identifiers import (
    AgentId,
    IdentifierError,
    duplicate_bits,
    modified_id,
    modified_id_length,
    pair_count,
    pair_from_index,
    pair_index,
    parse_ids,
    value_of,
)

bits = st.text(alphabet="01", min_size=2, max_size=12)


@pytest.mark.parametrize("s, want", [("00110", 6), ("10011", 19), ("000", 0)])
def test_value_of(s, want):
    assert value_of(s) == want


@pytest.mark.parametrize("u, v, want", [(1, 2, 1), (3, 4, 6), (2, 4, 5), (2, 3, 4)])
def test_pair_index_k4(u, v, want):
    assert pair_index(u, v, 4) == want


@pytest.mark.parametrize("i, k, want", [(1, 4, (1, 2)), (4, 4, (2, 3)), (1, 2, (1, 2))])
def test_pair_from_index(i, k, want):
    assert pair_from_index(i, k) == want


@pytest.mark.parametrize("k", range(2, 9))
def test_pair_index_is_lexicographic_rank(k):
    ordered = sorted(itertools.combinations(range(1, k + 1), 2))
    assert [pair_index(u, v, k) for u, v in ordered] == list(range(1, pair_count(k) + 1))
    assert [pair_from_index(i, k) for i in range(1, pair_count(k) + 1)] == ordered


@pytest.mark.parametrize("s, want", [("01", "0011"), ("00", "0000"), ("10", "0101")])
def test_modified_id_small(s, want):
    assert modified_id(s) == want


def test_modified_id_k3_by_hand():
    # pairs (1,2), (1,3), (2,3) of "110": 1^1, 1^0, 1^0
    assert modified_id("110") == "0" + "110" + "011"


@pytest.mark.parametrize("s, t, want", [("101", 3, "111000111"), ("0011", 1, "0011"), ("0", 4, "0000")])
def test_duplicate_bits(s, t, want):
    assert duplicate_bits(s, t) == want


@pytest.mark.parametrize("bad", [("101", 0), ("", 2), ("1a", 2)])
def test_duplicate_bits_rejects(bad):
    with pytest.raises(IdentifierError):
        duplicate_bits(*bad)


def test_agent_id_validation():
    assert AgentId("0110").k == 4
    assert AgentId("0110").val == 6
    for bad in ("1", "", "012", "ab"):
        with pytest.raises(IdentifierError):
            AgentId(bad)


def test_parse_ids_rejects_mixed_and_duplicates():
    with pytest.raises(IdentifierError, match="mixed"):
        parse_ids(["01", "101", "11"])
    with pytest.raises(IdentifierError, match="distinct"):
        parse_ids(["01", "01", "11"])
    assert parse_ids(["01", "10", "11"]) == ("01", "10", "11")


def test_pair_index_rejects_bad_pairs():
    for u, v in ((2, 2), (3, 2), (0, 1), (1, 5)):
        with pytest.raises(IdentifierError):
            pair_index(u, v, 4)
    with pytest.raises(IdentifierError):
        pair_from_index(7, 4)


@given(bits)
def test_modified_id_structure(s):
    m = modified_id(s)
    k = len(s)
    assert len(m) == modified_id_length(k) == k * (k - 1) // 2 + k + 1
    assert m[0] == "0"
    assert m[1 : k + 1] == s
    for i in range(1, pair_count(k) + 1):
        u, v = pair_from_index(i, k)
        assert m[k + i] == str(int(s[u - 1]) ^ int(s[v - 1]))


@given(st.text(alphabet="01", min_size=1, max_size=10), st.integers(1, 6))
def test_duplicate_bits_structure(s, t):
    d = duplicate_bits(s, t)
    assert len(d) == len(s) * t
    assert all(d[i] == s[i // t] for i in range(len(d)))


@given(bits)
def test_value_matches_int(s):
    assert value_of(s) == int(s, 2) < 2 ** len(s)
