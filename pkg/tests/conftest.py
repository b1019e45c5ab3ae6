import numpy as np
import pytest

from patternann import Dataset, Esam


def make_random_dataset(rng, n_seqs, len_range, alphabet_size, d=4,
                        base=ord("a")):
    lo, hi = len_range
    lengths = rng.integers(lo, hi + 1, size=n_seqs)
    sequences = [
        bytes((rng.integers(0, alphabet_size, size=ln) + base).astype(np.uint8))
        for ln in lengths
    ]
    vectors = rng.random((n_seqs, d)).astype(np.float32)
    return Dataset(vectors, sequences)


def esam_over(sequences) -> Esam:
    esam = Esam()
    for i, s in enumerate(sequences, start=1):
        esam.add_sequence(i, s)
    return esam


def check_exact_cover(index) -> None:
    """base(u) and base(inherited(u)) must partition id_set(u) at every state."""
    for u, st in enumerate(index.esam.states):
        si = index.state_indexes[u]
        base = set(si.base)
        ids = set(st.id_set)
        if si.inherited is None:
            assert base == ids, f"state {u}: base != id_set with no inherited state"
        else:
            other = set(index.state_indexes[si.inherited].base)
            assert base & other == set(), f"state {u}: cover overlaps"
            assert base | other == ids, f"state {u}: cover misses ids"


def check_graph_membership(index) -> None:
    for u, si in enumerate(index.state_indexes):
        if si.kind == "graph":
            assert set(si.graph.node_ids) == set(si.base), f"state {u}"


@pytest.fixture
def figure_one():
    """Toy biological scenario: only records 2 and 3 contain the motif AAA,
    and the query vector sits closest to record 1, then 3, then 2."""
    vectors = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.0]], dtype=np.float32)
    sequences = [b"MKVL", b"GAAAT", b"CAAAG"]
    dataset = Dataset(vectors, sequences)
    v_q = np.array([0.1, 0.0])
    return dataset, v_q
