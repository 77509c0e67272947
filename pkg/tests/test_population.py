import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpbt.errors import ConfigError, DomainError, NumericError, PreconditionError, SequencingError
from gpbt.population import (
    CheckpointRef,
    CheckpointStore,
    Population,
    quartile_membership,
    quartile_size,
    rank_snapshot,
)


def make_pop(n, d=2):
    return Population([np.zeros(d) for _ in range(n)])


def with_scores(scores):
    pop = make_pop(len(scores))
    for i, s in enumerate(scores):
        pop.record_result(i, 1, s)
    return pop


def test_record_result_appends():
    pop = make_pop(2)
    rec = pop.record_result(0, 1000, 0.5)
    assert len(pop[0].history) == 1 and rec.score == 0.5
    assert pop[0].steps_trained == 1000


def test_repeated_step_is_sequencing_error():
    pop = make_pop(2)
    pop.record_result(0, 1000, 0.5)
    with pytest.raises(SequencingError):
        pop.record_result(0, 1000, 0.6)


def test_wall_order_is_gapless_across_agents():
    pop = make_pop(3)
    recs = [pop.record_result(a, step, 0.0) for step in (1, 2) for a in (2, 0, 1)]
    assert [r.wall_order for r in recs] == list(range(6))


def test_nonfinite_score_rejected():
    pop = make_pop(1)
    with pytest.raises(NumericError):
        pop.record_result(0, 1, math.nan)


def test_unknown_agent():
    with pytest.raises(DomainError):
        make_pop(2).record_result(5, 1, 0.0)


def test_latest_score():
    pop = make_pop(1)
    assert pop.latest_score(0) is None
    pop.record_result(0, 1000, 0.5)
    pop.record_result(0, 2000, 0.7)
    assert pop.latest_score(0) == 0.7
    pop.record_result(0, 3000, 0.9)
    assert pop.latest_score(0) == 0.9


def test_inherited_score_overrides_until_next_report():
    pop = make_pop(1)
    pop.record_result(0, 1, 0.1)
    pop[0].inherited_score = 0.8
    assert pop.latest_score(0) == 0.8
    pop.record_result(0, 2, 0.3)
    assert pop.latest_score(0) == 0.3


def test_initial_velocity_zero():
    pop = Population([np.array([0.1, 0.2])])
    assert pop[0].vel.tolist() == [0.0, 0.0] and pop[0].generation == 0


@pytest.mark.parametrize(
    "scores, expected",
    [([3, 1, 2], [0, 2, 1]), ([5, 5], [0, 1]), ([1.0], [0])],
)
def test_rank_snapshot(scores, expected):
    assert rank_snapshot(with_scores(scores)) == expected


def test_rank_needs_history():
    pop = make_pop(2)
    pop.record_result(0, 1, 1.0)
    with pytest.raises(PreconditionError):
        rank_snapshot(pop)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=40))
def test_rank_is_permutation_sorted_desc(scores):
    ranked = rank_snapshot(with_scores(scores))
    assert sorted(ranked) == list(range(len(scores)))
    vals = [scores[i] for i in ranked]
    assert vals == sorted(vals, reverse=True)


@pytest.mark.parametrize("n, q, k", [(4, 0.25, 1), (8, 0.25, 2), (5, 0.25, 1), (16, 0.25, 4), (2, 0.25, 1), (10, 0.5, 5)])
def test_quartile_size(n, q, k):
    top, bottom = quartile_membership(list(range(n)), q)
    assert quartile_size(n, q) == k
    assert top == set(range(k)) and bottom == set(range(n - k, n))


def test_quartile_n4_best_and_worst():
    ranked = rank_snapshot(with_scores([5, 4, 3, 1]))
    assert quartile_membership(ranked, 0.25) == ({0}, {3})


@pytest.mark.parametrize("ranked, q", [([0], 0.25), ([0, 1], 0.0), ([0, 1], 0.6)])
def test_quartile_config_errors(ranked, q):
    with pytest.raises(ConfigError):
        quartile_membership(ranked, q)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(2, 64), q=st.floats(0.01, 0.5))
def test_quartile_disjoint(n, q):
    top, bottom = quartile_membership(list(range(n)), q)
    k = max(1, math.floor(q * n))
    assert not top & bottom and len(top) == len(bottom) == k


def test_checkpoint_store_write_once(tmp_path):
    store = CheckpointStore(tmp_path / "ckpt")
    ref = CheckpointRef(1, 10)
    store.put(ref, b"abc")
    assert store.get(ref) == b"abc"
    assert (tmp_path / "ckpt" / ref.filename).read_bytes() == b"abc"
    with pytest.raises(SequencingError):
        store.put(ref, b"xyz")
    assert store.get(ref) == b"abc"
    with pytest.raises(DomainError):
        store.get(CheckpointRef(0, 0))


def test_checkpoint_blob_copy_is_immutable():
    store = CheckpointStore()
    buf = bytearray(b"abc")
    store.put(CheckpointRef(0, 1), buf)
    buf[0] = ord("z")
    assert store.get(CheckpointRef(0, 1)) == b"abc"
