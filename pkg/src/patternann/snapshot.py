"""Single-file binary snapshot of a built index (magic "VMAT1", little endian).

The snapshot holds the automaton, per-state indexes and tombstones, but not
the vectors: graphs reference ids only, so loading requires the same vector
array the index was built against. Saving a loaded snapshot reproduces the
original bytes exactly.
"""

from __future__ import annotations

import io
import struct

import numpy as np

from .core import FormatError, VectorStore
from .esam import Esam, EsamState
from .hnsw import HnswGraph, HnswParams
from .index import GRAPH, RAW, AutomatonIndex, BuildConfig, StateIndex, _state_seed

MAGIC = b"VMAT1"
_NONE_U32 = 0xFFFFFFFF
_NONE_U64 = 0xFFFFFFFFFFFFFFFF
_METRIC_TAGS = {"sqeuclidean": 0, "cosine": 1}
_METRIC_NAMES = {v: k for k, v in _METRIC_TAGS.items()}


def _write_varint(out: io.BytesIO, value: int) -> None:
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.write(bytes([byte | 0x80]))
        else:
            out.write(bytes([byte]))
            return


def _write_id_list(out: io.BytesIO, ids: list[int]) -> None:
    _write_varint(out, len(ids))
    prev = 0
    for i in ids:
        _write_varint(out, i - prev)
        prev = i


class _Reader:
    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0

    def take(self, n: int) -> bytes:
        if self._pos + n > len(self._data):
            raise FormatError(f"truncated snapshot at byte {self._pos}")
        chunk = self._data[self._pos:self._pos + n]
        self._pos += n
        return chunk

    def unpack(self, fmt: str):
        return struct.unpack("<" + fmt, self.take(struct.calcsize("<" + fmt)))

    def varint(self) -> int:
        shift = 0
        value = 0
        while True:
            byte = self.take(1)[0]
            value |= (byte & 0x7F) << shift
            if not byte & 0x80:
                return value
            shift += 7

    def id_list(self) -> list[int]:
        count = self.varint()
        out = []
        prev = 0
        for _ in range(count):
            prev += self.varint()
            out.append(prev)
        return out

    def done(self) -> bool:
        return self._pos == len(self._data)


def dumps(index: AutomatonIndex) -> bytes:
    out = io.BytesIO()
    out.write(MAGIC)
    cfg = index.config
    threshold = _NONE_U64 if cfg.skip_threshold is None else cfg.skip_threshold
    flags = 1 if cfg.reuse else 0
    # the worker count is a transient build knob, not an index property;
    # leaving it out keeps snapshots identical across thread counts
    out.write(struct.pack(
        "<QIIdqBB", threshold, cfg.hnsw.m, cfg.hnsw.ef_construction,
        cfg.hnsw.level_norm, cfg.hnsw.seed,
        _METRIC_TAGS[cfg.metric], flags,
    ))
    out.write(struct.pack("<QI", index.store.n, index.store.dim))

    states = index.esam.states
    out.write(struct.pack("<I", len(states)))
    for st in states:
        link = _NONE_U32 if st.suffix_link is None else st.suffix_link
        out.write(struct.pack("<IIH", st.max_len, link, len(st.transitions)))
        for sym in sorted(st.transitions):
            out.write(struct.pack("<BI", sym, st.transitions[sym]))
        _write_id_list(out, st.id_set)

    for si in index.state_indexes:
        kind = 1 if si.kind == GRAPH else 0
        inherited = _NONE_U32 if si.inherited is None else si.inherited
        out.write(struct.pack("<BI", kind, inherited))
        _write_id_list(out, si.base)
        if kind:
            g = si.graph
            out.write(struct.pack("<IB", g.entry_point, g.max_level))
            for vid in si.base:
                layers = g.neighbors[vid]
                out.write(struct.pack("<B", g.node_levels[vid]))
                for lst in layers:
                    out.write(struct.pack("<H", len(lst)))
                    out.write(struct.pack(f"<{len(lst)}I", *lst))

    _write_id_list(out, sorted(index.tombstones))
    return out.getvalue()


def loads(data: bytes, vectors) -> AutomatonIndex:
    r = _Reader(data)
    if r.take(len(MAGIC)) != MAGIC:
        raise FormatError("bad magic, not a VMAT1 snapshot")
    (threshold, m, ef_con, level_norm, seed,
     metric_tag, flags) = r.unpack("QIIdqBB")
    if metric_tag not in _METRIC_NAMES:
        raise FormatError(f"unknown metric tag {metric_tag}")
    config = BuildConfig(
        skip_threshold=None if threshold == _NONE_U64 else threshold,
        hnsw=HnswParams(m=m, ef_construction=ef_con, level_norm=level_norm, seed=seed),
        metric=_METRIC_NAMES[metric_tag],
        reuse=bool(flags & 1),
    )
    n, dim = r.unpack("QI")
    store = VectorStore(vectors, config.metric)
    if store.n != n or store.dim != dim:
        raise FormatError(
            f"snapshot built over {n} vectors of dim {dim}, "
            f"got {store.n} of dim {store.dim}"
        )

    (n_states,) = r.unpack("I")
    esam = Esam()
    esam.states = []
    for _ in range(n_states):
        max_len, link, n_trans = r.unpack("IIH")
        st = EsamState(max_len, None if link == _NONE_U32 else link)
        for _ in range(n_trans):
            sym, target = r.unpack("BI")
            st.transitions[sym] = target
        st.id_set = r.id_list()
        esam.states.append(st)
    esam._max_seq_id = n

    indexes: list[StateIndex] = []
    for u in range(n_states):
        kind_tag, inherited = r.unpack("BI")
        base = r.id_list()
        si = StateIndex(
            GRAPH if kind_tag else RAW, base,
            None if inherited == _NONE_U32 else inherited,
        )
        if kind_tag:
            entry, max_level = r.unpack("IB")
            g = HnswGraph(HnswParams(
                m=m, ef_construction=ef_con, level_norm=level_norm,
                seed=_state_seed(seed, u),
            ))
            g.entry_point = entry
            g.max_level = max_level
            for vid in base:
                (level,) = r.unpack("B")
                g.node_levels[vid] = level
                layers = []
                for _ in range(level + 1):
                    (cnt,) = r.unpack("H")
                    layers.append(list(r.unpack(f"{cnt}I")))
                g.neighbors[vid] = layers
            si.graph = g
        indexes.append(si)

    tombstones = set(r.id_list())
    if not r.done():
        raise FormatError("trailing bytes after snapshot payload")
    return AutomatonIndex(esam, indexes, store, config, tombstones)


def save_snapshot(index: AutomatonIndex, path) -> None:
    with open(path, "wb") as f:
        f.write(dumps(index))


def load_snapshot(path, vectors) -> AutomatonIndex:
    with open(path, "rb") as f:
        data = f.read()
    return loads(data, vectors)
