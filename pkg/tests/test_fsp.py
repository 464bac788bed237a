from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fspclust.corpus import LabelSequence
from fspclust.errors import ConfigError, DataError, ResourceLimitError, TruncatedPatternSetError
from fspclust.fsp import (
    PatternSet,
    SequencePattern,
    as_min_support,
    extract_closed,
    min_support_count,
    mine_frequent,
    pattern_from_json,
    pattern_to_json,
    read_bundle,
    select_bundle,
    support,
    write_bundle,
)
from oracles import all_subsequences, brute_force_closed, brute_force_frequent, embeds

TOY = [tuple("ABC"), tuple("AC"), tuple("BC")]
# three training traces reproducing the worked example's pattern counts
WORKED = [tuple("ACDEF"), tuple("AECDF"), tuple("BACEDF")]


def labels(ps):
    return [p.labels for p in ps]


def test_support_toy():
    assert support(("A", "C"), TOY) == Fraction(2, 3)


def test_support_single():
    assert support(("A",), [("A",)]) == 1


def test_support_counts_trace_once():
    assert support(("A",), [tuple("AAAA"), tuple("B")]) == Fraction(1, 2)


def test_support_worked_example():
    assert support(tuple("ACDF"), WORKED) == 1


def test_support_empty_collection():
    with pytest.raises(DataError):
        support(("A",), [])


def test_as_min_support():
    assert as_min_support(0.6) == Fraction(3, 5)
    assert as_min_support("4/5") == Fraction(4, 5)
    for bad in (0, 1.5, -0.1, None):
        with pytest.raises(ConfigError):
            as_min_support(bad)


def test_min_count_boundary_is_exact():
    # 0.7 * 10 in binary floating point is 7.000000000000001
    assert min_support_count(0.7, 10) == 7
    assert min_support_count(0.6, 10) == 6
    assert min_support_count(Fraction(1, 3), 3) == 1


def test_mine_toy():
    ps = mine_frequent(TOY, 0.6)
    assert labels(ps) == [("A",), ("B",), ("C",), ("A", "C"), ("B", "C")]
    assert [p.support for p in ps] == [Fraction(2, 3)] * 2 + [1] + [Fraction(2, 3)] * 2
    assert not ps.truncated


def test_mine_shared_label_at_full_support():
    ps = mine_frequent([tuple("XAB"), tuple("BX"), tuple("X")], 1)
    assert ("X",) in labels(ps)


def test_mine_worked_example_singletons():
    ps = mine_frequent(WORKED, 0.8)
    assert [p.labels for p in ps if len(p) == 1] == [("A",), ("C",), ("D",), ("E",), ("F",)]
    assert ("A", "C", "D", "F") in labels(ps)
    assert ("A", "E") in labels(ps)


def test_mine_accepts_label_sequences():
    seqs = [LabelSequence(str(i), s) for i, s in enumerate(TOY)]
    assert labels(mine_frequent(seqs, 0.6)) == labels(mine_frequent(TOY, 0.6))


def test_mine_empty_collection():
    with pytest.raises(DataError):
        mine_frequent([], 0.5)


def test_repeated_labels_allowed():
    ps = mine_frequent([tuple("DOD"), tuple("DD")], 1)
    assert ("D", "D") in labels(ps)


def test_max_pattern_length_truncates():
    ps = mine_frequent([tuple("ABCD")] * 2, 1, max_pattern_length=2)
    assert ps.truncated
    assert max(len(p) for p in ps) == 2
    assert len(ps) == 4 + 6


def test_max_pattern_length_not_reached_is_not_truncation():
    ps = mine_frequent([tuple("AB")], 1, max_pattern_length=5)
    assert not ps.truncated


def test_frontier_overflow_raises():
    with pytest.raises(ResourceLimitError):
        mine_frequent([tuple("ABCDEFGHIJ")], 1, max_frontier=50)


def test_frontier_overflow_truncates_on_request():
    ps = mine_frequent([tuple("ABCDEFGHIJ")], 1, max_frontier=50, truncate=True)
    assert ps.truncated
    assert 0 < len(ps) <= 50
    truth = all_subsequences(tuple("ABCDEFGHIJ"))
    assert set(labels(ps)) <= truth


def test_extract_closed_toy():
    assert labels(extract_closed(mine_frequent(TOY, 0.6))) == [("C",), ("A", "C"), ("B", "C")]


def test_extract_closed_singleton():
    ps = mine_frequent([("A",)], 1)
    assert labels(extract_closed(ps)) == [("A",)]


def test_extract_closed_worked_example():
    closed = extract_closed(mine_frequent(WORKED, 0.8))
    assert len(closed) == 2
    assert ("A", "C", "D", "F") in labels(closed)


def test_extract_closed_refuses_truncated():
    ps = mine_frequent([tuple("ABCD")], 1, max_pattern_length=2)
    with pytest.raises(TruncatedPatternSetError):
        extract_closed(ps)


def test_select_bundle_worked_example():
    b = select_bundle(mine_frequent(WORKED, 0.8))
    assert b.counts() == (5, 8, 2)


def test_select_bundle_empty():
    b = select_bundle(PatternSet((), Fraction(1), 1))
    assert b.counts() == (0, 0, 0)


def test_select_bundle_toy():
    b = select_bundle(mine_frequent(TOY, 0.6))
    assert labels(b.sp1) == [("A",), ("B",), ("C",)]
    assert labels(b.sp2) == [("A", "C"), ("B", "C")]
    assert labels(b.sp_clo) == [("C",), ("A", "C"), ("B", "C")]


def test_pattern_json_round_trip():
    p = SequencePattern(("a‖x", 'b"q'), 2, 3)
    assert pattern_from_json(pattern_to_json(p)) == p
    assert '"support": "2/3"' in pattern_to_json(p)
    # reduced supports are accepted too
    assert pattern_from_json('{"labels": ["a"], "support": "1/2", "count": 5}').source_size == 10


def test_bundle_files_round_trip(tmp_path):
    b = select_bundle(mine_frequent(WORKED, 0.8))
    write_bundle(b, tmp_path)
    assert read_bundle(tmp_path) == b
    lines = (tmp_path / "sp2.jsonl").read_text().splitlines()
    assert len(lines) == 8


def test_empty_pattern_forbidden():
    with pytest.raises(ValueError):
        SequencePattern((), 1, 1)


# -- properties ------------------------------------------------------------

collections_st = st.lists(
    st.lists(st.sampled_from("ABCDEF"), min_size=0, max_size=8).map(tuple), min_size=1, max_size=8
)
phi_st = st.sampled_from([Fraction(1, 2), Fraction(3, 4), Fraction(1), Fraction(1, 3)])


@settings(max_examples=150, deadline=None)
@given(collections_st, phi_st)
def test_oracle_equivalence(coll, phi):
    ps = mine_frequent(coll, phi, max_frontier=None)
    assert {p.labels: p.support for p in ps} == brute_force_frequent(coll, phi)


@settings(max_examples=100, deadline=None)
@given(collections_st, phi_st)
def test_anti_monotone(coll, phi):
    ps = mine_frequent(coll, phi, max_frontier=None)
    supp = {p.labels: p.support for p in ps}
    for p in ps:
        for q in all_subsequences(p.labels):
            assert supp[q] >= p.support


@settings(max_examples=100, deadline=None)
@given(collections_st, phi_st, phi_st)
def test_monotone_in_phi(coll, a, b):
    lo, hi = sorted((a, b))
    assert set(labels(mine_frequent(coll, hi))) <= set(labels(mine_frequent(coll, lo)))


@settings(max_examples=100, deadline=None)
@given(collections_st, phi_st)
def test_closedness_sound(coll, phi):
    ps = mine_frequent(coll, phi, max_frontier=None)
    closed = extract_closed(ps)
    for p in closed:
        assert not any(q.labels != p.labels and q.support == p.support and embeds(p.labels, q.labels) for q in ps)
    freq = {p.labels: p.support for p in ps}
    assert set(labels(closed)) == brute_force_closed(freq)


@settings(max_examples=60, deadline=None)
@given(collections_st, phi_st, st.randoms())
def test_canonical_order_independent_of_input_order(coll, phi, rnd):
    shuffled = list(coll)
    rnd.shuffle(shuffled)
    a = mine_frequent(coll, phi)
    b = mine_frequent(shuffled, phi)
    assert a.patterns == b.patterns
    keys = [(len(p), p.labels) for p in a]
    assert keys == sorted(keys)
