import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from patternann import BuildConfig, Dataset, FormatError, VectorStore, build
from patternann.bench import (CSV_HEADER, EvalRow, automaton_method, evaluate,
                              gen_queries, gen_synthetic, ground_truth,
                              load_dataset, load_vectors, prefilter_method,
                              rows_from_csv, rows_to_csv, save_dataset,
                              save_sequences, save_vectors)

from conftest import make_random_dataset


def test_dataset_file_round_trip(tmp_path):
    ds = make_random_dataset(np.random.default_rng(0), 20, (0, 9), 4, d=5)
    vp, sp = tmp_path / "v.fbin", tmp_path / "s.txt"
    save_dataset(ds, vp, sp)
    back = load_dataset(vp, sp)
    assert np.array_equal(back.vectors, ds.vectors)
    assert back.sequences == ds.sequences


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 12), d=st.integers(1, 6))
@settings(max_examples=20, deadline=None)
def test_dataset_file_round_trip_property(tmp_path_factory, seed, n, d):
    tmp = tmp_path_factory.mktemp("ds")
    ds = make_random_dataset(np.random.default_rng(seed), n, (0, 7), 3, d=d)
    save_dataset(ds, tmp / "v", tmp / "s")
    back = load_dataset(tmp / "v", tmp / "s")
    assert np.array_equal(back.vectors, ds.vectors)
    assert back.sequences == ds.sequences


def test_load_dataset_count_mismatch(tmp_path):
    ds = make_random_dataset(np.random.default_rng(1), 3, (1, 4), 2, d=3)
    save_vectors(ds.vectors, tmp_path / "v")
    save_sequences(ds.sequences[:2], tmp_path / "s")
    with pytest.raises(FormatError, match="count mismatch"):
        load_dataset(tmp_path / "v", tmp_path / "s")


def test_load_vectors_truncated(tmp_path):
    save_vectors(np.ones((2, 3), dtype=np.float32), tmp_path / "v")
    data = (tmp_path / "v").read_bytes()
    (tmp_path / "v").write_bytes(data[:-2])
    with pytest.raises(FormatError, match="record 1"):
        load_vectors(tmp_path / "v")


def test_load_vectors_inconsistent_dimension(tmp_path):
    with open(tmp_path / "v", "wb") as f:
        f.write(np.uint32(2).tobytes())
        f.write(np.zeros(2, dtype="<f4").tobytes())
        f.write(np.uint32(3).tobytes())
        f.write(np.zeros(3, dtype="<f4").tobytes())
    with pytest.raises(FormatError, match="record 1"):
        load_vectors(tmp_path / "v")


def test_save_sequences_rejects_linefeed(tmp_path):
    with pytest.raises(FormatError):
        save_sequences([b"ok", b"bad\nbad"], tmp_path / "s")


def test_gen_synthetic_deterministic():
    a = gen_synthetic(100, 8, (5, 20), 4, seed=7)
    b = gen_synthetic(100, 8, (5, 20), 4, seed=7)
    assert np.array_equal(a.vectors, b.vectors)
    assert a.sequences == b.sequences
    assert all(5 <= len(s) <= 20 for s in a.sequences)
    assert a.m == sum(len(s) for s in a.sequences)


def test_gen_synthetic_single_symbol_alphabet():
    ds = gen_synthetic(10, 2, (3, 8), 1, seed=1)
    assert all(set(s) == {ord("a")} for s in ds.sequences)
    idx = build(ds, BuildConfig(skip_threshold=None))
    assert idx.esam.state_count() <= 2 * ds.m + 1


def test_gen_synthetic_validation():
    with pytest.raises(ValueError):
        gen_synthetic(0, 4, (1, 5), 2, seed=0)
    with pytest.raises(ValueError):
        gen_synthetic(5, 4, (6, 5), 2, seed=0)
    with pytest.raises(ValueError):
        gen_synthetic(5, 4, (1, 5), 200, seed=0)


def test_gen_queries_defaults():
    ds = gen_synthetic(50, 4, (6, 12), 3, seed=3)
    wl = gen_queries(ds, 20, seed=5)
    assert len(wl.queries) == 60
    assert wl.k == 10
    assert wl.pattern_lengths == {2: 20, 3: 20, 4: 20}
    for v_q, p in wl.queries:
        assert any(p in s for s in ds.sequences)
        assert v_q.shape == (4,)


def test_gen_queries_singleton_length():
    ds = Dataset(np.zeros((1, 2), dtype=np.float32), [b"ac"])
    wl = gen_queries(ds, 30, lengths=(1,), seed=2)
    assert {p for _, p in wl.queries} <= {b"a", b"c"}


def test_gen_queries_deterministic():
    ds = gen_synthetic(30, 4, (5, 10), 3, seed=4)
    a = gen_queries(ds, 5, seed=9)
    b = gen_queries(ds, 5, seed=9)
    assert [(tuple(v), p) for v, p in a.queries] == \
        [(tuple(v), p) for v, p in b.queries]


def test_gen_queries_missing_length_rejected():
    ds = Dataset(np.zeros((1, 2), dtype=np.float32), [b"ab"])
    with pytest.raises(ValueError):
        gen_queries(ds, 5, lengths=(4,), seed=0)


def rich_dataset_and_workload(seed):
    """Workload where every pattern matches at least k records, so the exact
    methods score a full 1.0 under the divide-by-k recall convention."""
    ds = gen_synthetic(150, 4, (14, 24), 2, seed=seed)
    wl = gen_queries(ds, 10, seed=seed + 1)
    from patternann import vp_oracle
    assert all(len(vp_oracle(ds, p)) >= wl.k for _, p in wl.queries)
    return ds, wl


def test_evaluate_prefilter_is_exact_single_row():
    ds, wl = rich_dataset_and_workload(6)
    store = VectorStore(ds.vectors)
    idx = build(ds, BuildConfig(skip_threshold=None))
    rows = evaluate(prefilter_method(idx.esam, store), wl, ds)
    assert len(rows) == 1
    assert rows[0].recall == 1.0
    assert rows[0].qps > 0


def test_evaluate_automaton_all_raw_is_exact_everywhere():
    ds, wl = rich_dataset_and_workload(8)
    idx = build(ds, BuildConfig(skip_threshold=None))
    rows = evaluate(automaton_method(idx), wl, ds, ef_search_sweep=(8, 64))
    assert [r.ef_search for r in rows] == [8, 64]
    assert all(r.recall == 1.0 for r in rows)


def test_evaluate_sparse_matches_score_partial_recall():
    """A pattern matching fewer than k records caps the per-query score at
    matches/k even for exact search."""
    vectors = np.eye(3, dtype=np.float32)
    ds = Dataset(vectors, [b"xy", b"zz", b"zz"])
    from patternann.bench import Workload
    wl = Workload([(np.zeros(3), b"xy")], k=10)
    idx = build(ds, BuildConfig(skip_threshold=None))
    rows = evaluate(automaton_method(idx), wl, ds, ef_search_sweep=(16,))
    assert rows[0].recall == pytest.approx(1 / 10)


def test_evaluate_recall_never_exceeds_one():
    ds = gen_synthetic(40, 4, (5, 10), 2, seed=10)
    wl = gen_queries(ds, 5, seed=11)
    idx = build(ds, BuildConfig(skip_threshold=8))
    rows = evaluate(automaton_method(idx), wl, ds, ef_search_sweep=(16,))
    assert all(0.0 <= r.recall <= 1.0 for r in rows)


def test_ground_truth_truncates_to_matching_count():
    vectors = np.eye(3, dtype=np.float32)
    ds = Dataset(vectors, [b"xy", b"zz", b"zz"])
    from patternann.bench import Workload
    wl = Workload([(np.zeros(3), b"xy")], k=10)
    truth = ground_truth(ds, wl)
    assert truth == [[1]]


def test_csv_round_trip():
    rows = [EvalRow("automaton", 64, 0.9875, 1234.5678901234567, 810.25),
            EvalRow("prefilter", 0, 1.0, 99.5, 10050.0)]
    text = rows_to_csv(rows)
    assert text.splitlines()[0] == CSV_HEADER
    assert rows_from_csv(text) == rows


def test_csv_header_required():
    with pytest.raises(FormatError):
        rows_from_csv("nope\n1,2,3,4,5\n")
