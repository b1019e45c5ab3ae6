import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from patternann import (Dataset, QueryResult, VectorStore, brute_force_topk,
                        contains_oracle, distance, vp_oracle)

V1, V2, V3 = (0.0, 0.0), (1.0, 0.0), (0.0, 1.0)


def small_store():
    return VectorStore(np.array([V1, V2, V3]))


def test_distance_identity():
    assert distance((0, 0), (0, 0)) == 0.0


def test_distance_unit_offset():
    assert distance((0, 0), (1, 0)) == 1.0


def test_distance_hand_arithmetic():
    assert distance((0.1, 0.1), (0, 1)) == pytest.approx(0.82, rel=1e-12)


def test_distance_dimension_mismatch():
    with pytest.raises(ValueError):
        distance((0, 0), (0, 0, 0))


def test_distance_cosine_orthogonal():
    assert distance((1, 0), (0, 1), metric="cosine") == pytest.approx(1.0)
    assert distance((1, 0), (2, 0), metric="cosine") == pytest.approx(0.0)


def test_brute_force_topk_basic():
    res = brute_force_topk((0.1, 0.1), {1, 2, 3}, 1, small_store())
    assert res.ids == [1]
    assert res.entries[0][1] == pytest.approx(0.02, rel=1e-12)


def test_brute_force_topk_empty_candidates():
    assert brute_force_topk((1.0, 1.0), set(), 5, small_store()).entries == []


def test_brute_force_topk_tie_breaks_by_id():
    res = brute_force_topk((0.1, 0.1), {2, 3}, 1, small_store())
    assert res.ids == [2]
    assert res.entries[0][1] == pytest.approx(0.82, rel=1e-12)


def test_brute_force_topk_tombstones():
    res = brute_force_topk((0.1, 0.1), {1, 2, 3}, 2, small_store(), tombstones={1})
    assert res.ids == [2, 3]


def test_brute_force_topk_bad_id():
    with pytest.raises(ValueError):
        brute_force_topk((0.1, 0.1), {9}, 1, small_store())


def test_brute_force_topk_k_validation():
    with pytest.raises(ValueError):
        brute_force_topk((0.1, 0.1), {1}, 0, small_store())


@given(st.integers(1, 5), st.integers(1, 10), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_brute_force_prefix_property(k1, extra, seed):
    rng = np.random.default_rng(seed)
    store = VectorStore(rng.random((12, 3)))
    q = rng.random(3)
    k2 = k1 + extra
    a = brute_force_topk(q, range(1, 13), k1, store)
    b = brute_force_topk(q, range(1, 13), k2, store)
    assert b.entries[:len(a.entries)] == a.entries


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_distance_symmetric_and_zero_on_self(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.random(6), rng.random(6)
    assert distance(a, b) == distance(b, a)
    assert distance(a, a) == 0.0
    assert distance(a, b) >= 0.0


def test_contains_oracle_paper_cases():
    assert contains_oracle(b"banana", b"nana")
    assert contains_oracle(b"banana", b"")
    assert not contains_oracle(b"acab", b"cba")


def make_gsa_dataset():
    vecs = np.zeros((3, 2), dtype=np.float32)
    return Dataset(vecs, [b"ac", b"acab", b"acba"])


def test_vp_oracle_examples():
    ds = make_gsa_dataset()
    assert vp_oracle(ds, b"cab") == {2}
    assert vp_oracle(ds, b"ac") == {1, 2, 3}


def test_vp_oracle_figure_one(figure_one):
    dataset, _ = figure_one
    assert vp_oracle(dataset, b"AAA") == {2, 3}


@given(st.lists(st.binary(min_size=0, max_size=8), min_size=1, max_size=6),
       st.binary(min_size=1, max_size=4), st.binary(min_size=0, max_size=3))
@settings(max_examples=60, deadline=None)
def test_vp_anti_monotone_in_pattern_extension(seqs, p1, p2):
    ds = Dataset(np.zeros((len(seqs), 2), dtype=np.float32), seqs)
    assert vp_oracle(ds, p1 + p2) <= vp_oracle(ds, p1)


def test_dataset_count_mismatch():
    with pytest.raises(ValueError):
        Dataset(np.zeros((2, 3), dtype=np.float32), [b"a"])


def test_dataset_m_total_length():
    ds = make_gsa_dataset()
    assert ds.m == 2 + 4 + 4
    assert ds.n == 3 and ds.d == 2


def test_query_result_merge_dedups_and_truncates():
    a = QueryResult([(1, 0.5), (2, 0.7)])
    b = QueryResult([(1, 0.5), (3, 0.6)])
    merged = QueryResult.merge(a, b, 2)
    assert merged.entries == [(1, 0.5), (3, 0.6)]


def test_vector_store_append_and_resolve():
    store = small_store()
    new_id = store.append((0.5, 0.5))
    assert new_id == 4
    assert store.n == 4
    assert store.dist((0.5, 0.5), 4) == 0.0
