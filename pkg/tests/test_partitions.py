import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from efcpd.partitions import (
    SetPartition,
    bell_number,
    coag_transitions,
    enumerate_set_partitions,
    merge_blocks,
    restrict,
    shape,
    split_block,
    split_transitions,
)

P = SetPartition.parse


def brute_force_partitions(n):
    """Every map [n] -> [n], grouped by equal labels, deduplicated."""
    seen = set()
    for labels in itertools.product(range(n), repeat=n):
        blocks = {}
        for element, lab in enumerate(labels, start=1):
            blocks.setdefault(lab, []).append(element)
        seen.add(frozenset(frozenset(b) for b in blocks.values()))
    return seen


@pytest.mark.parametrize("n", range(1, 7))
def test_enumeration_matches_brute_force(n):
    parts = enumerate_set_partitions(n)
    as_sets = [frozenset(frozenset(b) for b in p.blocks) for p in parts]
    assert len(as_sets) == len(set(as_sets))
    assert set(as_sets) == brute_force_partitions(n)


def test_enumeration_examples():
    assert enumerate_set_partitions(1) == (P("1"),)
    assert len(enumerate_set_partitions(3)) == 5
    assert len(enumerate_set_partitions(4)) == 15


def test_bell_counts():
    expected = [1, 2, 5, 15, 52, 203, 877, 4140]
    assert [len(enumerate_set_partitions(n)) for n in range(1, 9)] == expected
    assert [bell_number(n) for n in range(1, 9)] == expected
    assert bell_number(10) == 115975


def test_enumeration_cap():
    with pytest.raises(ValueError):
        enumerate_set_partitions(11)
    with pytest.raises(ValueError):
        enumerate_set_partitions(5, cap=4)
    with pytest.raises(ValueError):
        enumerate_set_partitions(0)


def test_canonical_block_order():
    for p in enumerate_set_partitions(5):
        mins = [b[0] for b in p.blocks]
        assert mins == sorted(mins)
        assert all(list(b) == sorted(b) for b in p.blocks)


def test_invalid_partitions_rejected():
    with pytest.raises(ValueError):
        SetPartition(((2,), (1,)))
    with pytest.raises(ValueError):
        SetPartition(((1, 3),))
    with pytest.raises(ValueError):
        SetPartition(((1,), (1, 2)))


@pytest.mark.parametrize(
    "pi, m, expected",
    [("1 3|2", 2, "1|2"), ("1 2 3", 2, "1 2"), ("1 4|2|3", 3, "1|2|3")],
)
def test_restrict_examples(pi, m, expected):
    assert restrict(P(pi), m) == P(expected)


@pytest.mark.parametrize("n", range(1, 7))
def test_restrict_compatibility(n):
    for pi in enumerate_set_partitions(n):
        for m in range(1, n + 1):
            r = restrict(pi, m)
            assert r.n == m
            for m2 in range(1, m + 1):
                assert restrict(r, m2) == restrict(pi, m2)


def test_restrict_out_of_range():
    with pytest.raises(ValueError):
        restrict(P("1 2"), 3)
    with pytest.raises(ValueError):
        restrict(P("1 2"), 0)


@pytest.mark.parametrize(
    "pi, expected",
    [("1 2|3", (2, 1)), ("1|2|3", (1, 1, 1)), ("1 3 5|2 4", (3, 2))],
)
def test_shape_examples(pi, expected):
    assert shape(P(pi)) == expected


# block indices are 0-based
@pytest.mark.parametrize(
    "gamma, indices, expected",
    [("1|2|3", {0, 1}, "1 2|3"), ("1|2|3", {0, 1, 2}, "1 2 3"), ("1 4|2|3", {1, 2}, "1 4|2 3")],
)
def test_merge_examples(gamma, indices, expected):
    assert merge_blocks(P(gamma), indices) == P(expected)


def test_merge_rejects_single_index():
    with pytest.raises(ValueError):
        merge_blocks(P("1|2"), {0})


@pytest.mark.parametrize(
    "gamma, i, eta, expected",
    [("1 2 3", 0, "1 3|2", "1 3|2"), ("1 4|2 3", 0, "1|2", "1|2 3|4"), ("1 2|3", 0, "1|2", "1|2|3")],
)
def test_split_examples(gamma, i, eta, expected):
    assert split_block(P(gamma), i, P(eta)) == P(expected)


def test_split_rejects_trivial_or_singleton():
    with pytest.raises(ValueError):
        split_block(P("1 2|3"), 0, P("1 2"))
    with pytest.raises(ValueError):
        split_block(P("1 2|3"), 1, P("1"))


@pytest.mark.parametrize("gamma, count", [("1|2", 1), ("1|2|3", 4), ("1|2|3|4", 11), ("1 2 3", 0)])
def test_coag_transition_counts(gamma, count):
    assert len(coag_transitions(P(gamma))) == count


@pytest.mark.parametrize("gamma, count", [("1|2", 0), ("1 2", 1), ("1 2 3", 4), ("1 2 3|4 5", 4 + 1)])
def test_split_transition_counts(gamma, count):
    assert len(split_transitions(P(gamma))) == count


def test_split_transition_to_singletons():
    (target, i, eta), = split_transitions(P("1 2"))
    assert target == P("1|2") and i == 0 and eta == P("1|2")


@pytest.mark.parametrize("n", range(2, 7))
def test_split_merge_round_trip(n):
    for gamma in enumerate_set_partitions(n):
        for target, _, _ in split_transitions(gamma):
            recover = [s for t, s in coag_transitions(target) if t == gamma]
            assert len(recover) == 1


@given(st.integers(1, 7).flatmap(lambda n: st.lists(st.integers(0, n - 1), min_size=n, max_size=n)))
def test_text_and_rgs_round_trip(labels):
    pi = SetPartition.from_blocks(
        [[i + 1 for i, lab in enumerate(labels) if lab == c] for c in set(labels)]
    )
    assert SetPartition.parse(str(pi)) == pi
    assert SetPartition.from_rgs(pi.rgs()) == pi


def test_text_form():
    assert str(P("2|1 3")) == "1 3|2"
