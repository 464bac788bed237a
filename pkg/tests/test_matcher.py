import random
from datetime import datetime

import pytest
from hypothesis import given, settings, strategies as st

from fspclust.corpus import Event, LabelSequence, build_traces
from fspclust.fsp import mine_frequent, select_bundle
from fspclust.matcher import ScoreTriple, is_subsequence, read_scores, score_log, score_trace, write_scores
from oracles import embeds, naive_scores

WORKED = [tuple("ACDEF"), tuple("AECDF"), tuple("BACEDF")]
SIGMA4 = tuple("BACDF")
TOY = [LabelSequence(str(i), tuple(s)) for i, s in enumerate(["ABC", "AC", "BC"])]


def test_subsequence_basic():
    assert is_subsequence(("A", "C"), tuple("ABC"))
    assert not is_subsequence(("C", "A"), tuple("ABC"))
    assert is_subsequence(("A", "A"), tuple("ABA"))
    assert not is_subsequence(("A", "A"), tuple("AB"))


def test_subsequence_worked_example_sigma4():
    assert is_subsequence(tuple("ACDF"), SIGMA4)
    assert embeds(tuple("ACDF"), SIGMA4)


def test_empty_pattern_is_precondition_violation():
    with pytest.raises(ValueError):
        is_subsequence((), ("A",))


def test_score_worked_example():
    bundle = select_bundle(mine_frequent(WORKED, 0.8))
    assert score_trace(LabelSequence("s4", SIGMA4), bundle).as_tuple() == (4, 6, 1)


def test_score_empty_sequence():
    bundle = select_bundle(mine_frequent(WORKED, 0.8))
    assert score_trace(LabelSequence("e", ()), bundle).as_tuple() == (0, 0, 0)


def test_training_trace_full_support_bundle():
    seq = tuple("ABCAB")
    bundle = select_bundle(mine_frequent([seq], 1))
    assert score_trace(LabelSequence("t", seq), bundle).as_tuple() == bundle.counts()


def test_score_log_toy():
    bundle = select_bundle(mine_frequent(TOY, 0.6))
    scores = score_log(TOY, None, bundle)
    assert [scores[c].as_tuple() for c in "012"] == [(3, 2, 3), (2, 1, 2), (2, 1, 2)]


def test_score_log_empty_trace_log():
    bundle = select_bundle(mine_frequent([("A",)], 1))
    assert score_log([LabelSequence("x", ())], None, bundle) == {"x": ScoreTriple("x", 0, 0, 0)}


def test_score_log_event_log_and_shuffle():
    rnd = random.Random(2)
    events = []
    for c in range(40):
        for j in range(rnd.randint(0, 6)):
            events.append(Event(f"{c}-{j}", f"c{c:02d}", rnd.choice("ABCD"), datetime(2020, 1, 1, j)))
    log = build_traces(events)
    bundle = select_bundle(mine_frequent(log.simplified()[:8], 0.5))
    a = score_log(log, None, bundle)
    rnd.shuffle(events)
    b = score_log(build_traces(events), None, bundle)
    assert a == b
    assert list(a) == sorted(a)
    assert a == {s.case_id: score_trace(s, bundle) for s in log.simplified()}


def test_score_dump_round_trip(tmp_path):
    bundle = select_bundle(mine_frequent(TOY, 0.6))
    scores = score_log(TOY, None, bundle)
    path = tmp_path / "scores.csv"
    write_scores(scores, path)
    assert path.read_text().splitlines()[:2] == ["case_id,s1,s2,s_clo", "0,3,2,3"]
    assert read_scores(path) == scores


seq_st = st.lists(st.sampled_from("ABCDE"), max_size=10).map(tuple)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from("ABCDE"), min_size=1, max_size=5).map(tuple), seq_st)
def test_greedy_equals_dp(pattern, seq):
    assert is_subsequence(pattern, seq) == embeds(pattern, seq)


@settings(max_examples=100, deadline=None)
@given(st.lists(seq_st, min_size=1, max_size=6), st.sampled_from([0.34, 0.5, 1.0]), st.lists(seq_st, max_size=10))
def test_pruned_scoring_equals_naive(train, phi, targets):
    bundle = select_bundle(mine_frequent(train, phi, max_frontier=None))
    groups = [[p.labels for p in g] for g in (bundle.sp1, bundle.sp2, bundle.sp_clo)]
    for seq in targets:
        got = score_trace(LabelSequence("x", seq), bundle).as_tuple()
        assert got == naive_scores(seq, *groups)
        assert got[0] <= len(bundle.sp1) and got[1] <= len(bundle.sp2) and got[2] <= len(bundle.sp_clo)


@settings(max_examples=100, deadline=None)
@given(st.lists(seq_st, min_size=1, max_size=5), seq_st, seq_st)
def test_appending_never_lowers_scores(train, seq, tail):
    bundle = select_bundle(mine_frequent(train, 0.5))
    before = score_trace(LabelSequence("x", seq), bundle).as_tuple()
    after = score_trace(LabelSequence("x", seq + tail), bundle).as_tuple()
    assert all(a >= b for a, b in zip(after, before))
