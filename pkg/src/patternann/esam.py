"""Generalized suffix automaton over a sequence collection, with per-state
sequence-id sets maintained online (the filtering half of the index).

States are equivalence classes of substrings that occur at exactly the same
(sequence, end position) pairs. Construction is the online suffix-automaton
extension with cloning, generalized to multiple sequences: when the current
state already has a transition on the next symbol, the target is reused if
its class length matches, otherwise it is split by cloning. Each extension
creates at most two states, so the state count stays linear in the total
sequence length.

Sequence ids are propagated along the suffix-link chain after every
extension; a per-state mark of the last propagated id makes the walk stop
as soon as it reaches already-updated states.
"""

from __future__ import annotations

ROOT = 0


class EsamState:
    """One equivalence class: transitions, suffix link, class length, id set."""

    __slots__ = ("max_len", "suffix_link", "transitions", "id_set", "last_mark")

    def __init__(self, max_len: int, suffix_link: int | None):
        self.max_len = max_len
        self.suffix_link = suffix_link  # None only at the root
        self.transitions: dict[int, int] = {}  # symbol -> state id
        self.id_set: list[int] = []  # ascending sequence ids
        self.last_mark = 0  # last sequence id propagated here (0 = none)


class Esam:
    def __init__(self):
        self.states: list[EsamState] = [EsamState(0, None)]
        self._last = ROOT
        self._max_seq_id = 0
        self._affected: list[int] | None = None

    @property
    def last(self) -> int:
        """State of the full prefix of the sequence currently being added."""
        return self._last

    def state_count(self) -> int:
        return len(self.states)

    def transition_count(self) -> int:
        return sum(len(st.transitions) for st in self.states)

    def total_id_set_size(self) -> int:
        return sum(len(st.id_set) for st in self.states)

    def _new_state(self, max_len: int, suffix_link: int | None) -> int:
        self.states.append(EsamState(max_len, suffix_link))
        return len(self.states) - 1

    def _clone(self, p: int, symbol: int, q: int, seq_id: int) -> int:
        """Split state q: the clone takes the patterns of length <= max_len(p)+1,
        which gain the occurrence being added, while q keeps the longer ones."""
        st = self.states
        src = st[q]
        clone = self._new_state(st[p].max_len + 1, src.suffix_link)
        cl = st[clone]
        cl.transitions = dict(src.transitions)
        cl.id_set = list(src.id_set)
        cl.last_mark = src.last_mark
        src.suffix_link = clone
        if self._affected is not None and cl.last_mark == seq_id:
            # id already present via the copy; the propagation walk will not
            # reach this state, so record it as touched here
            self._affected.append(clone)
        while p is not None and st[p].transitions.get(symbol) == q:
            st[p].transitions[symbol] = clone
            p = st[p].suffix_link
        return clone

    def extend(self, seq_id: int, symbol: int) -> None:
        """Append one symbol of sequence seq_id, updating states, transitions
        and suffix links; advances the current-prefix state."""
        st = self.states
        last = self._last
        existing = st[last].transitions.get(symbol)
        if existing is not None:
            # only possible with multiple sequences: the extended prefix is
            # already represented
            if st[existing].max_len == st[last].max_len + 1:
                self._last = existing
            else:
                self._last = self._clone(last, symbol, existing, seq_id)
            return
        cur = self._new_state(st[last].max_len + 1, None)
        p = last
        while p is not None and symbol not in st[p].transitions:
            st[p].transitions[symbol] = cur
            p = st[p].suffix_link
        if p is None:
            st[cur].suffix_link = ROOT
        else:
            q = st[p].transitions[symbol]
            if st[q].max_len == st[p].max_len + 1:
                st[cur].suffix_link = q
            else:
                st[cur].suffix_link = self._clone(p, symbol, q, seq_id)
        self._last = cur

    def propagate_id(self, seq_id: int) -> None:
        """Add seq_id to the id set of every state on the suffix-link chain
        from the current state, stopping at the first already-marked state."""
        st = self.states
        u = self._last
        while u is not None and st[u].last_mark != seq_id:
            st[u].id_set.append(seq_id)
            st[u].last_mark = seq_id
            if self._affected is not None:
                self._affected.append(u)
            u = st[u].suffix_link

    def add_sequence(self, seq_id: int, s: bytes) -> list[int]:
        """Add one sequence; returns the ids of all states whose id set gained
        seq_id (new states included)."""
        if seq_id <= self._max_seq_id:
            raise ValueError(
                f"sequence ids must be strictly increasing; got {seq_id} "
                f"after {self._max_seq_id}"
            )
        self._max_seq_id = seq_id
        self._last = ROOT
        self._affected = []
        try:
            for symbol in s:
                self.extend(seq_id, symbol)
                self.propagate_id(seq_id)
            if not s:
                # an empty sequence contributes its id to the root only
                root = self.states[ROOT]
                root.id_set.append(seq_id)
                root.last_mark = seq_id
                self._affected.append(ROOT)
            return self._affected
        finally:
            self._affected = None

    def locate(self, p: bytes) -> int | None:
        """Walk transitions from the root consuming p; None if p does not occur."""
        cur = ROOT
        st = self.states
        for symbol in p:
            nxt = st[cur].transitions.get(symbol)
            if nxt is None:
                return None
            cur = nxt
        return cur

    def id_set_of(self, p: bytes) -> list[int]:
        """Ids of sequences containing p (empty list if p does not occur)."""
        u = self.locate(p)
        return [] if u is None else self.states[u].id_set

    def maximal_patterns(self) -> list[bytes]:
        """Witness maximal pattern per state, recovered by walking the unique
        chain of +1-length transitions from the root (debug / oracle helper)."""
        st = self.states
        pats: list[bytes | None] = [None] * len(st)
        pats[ROOT] = b""
        for v in sorted(range(len(st)), key=lambda i: st[i].max_len):
            pv = pats[v]
            if pv is None:
                continue
            for symbol, u in st[v].transitions.items():
                if st[u].max_len == st[v].max_len + 1 and pats[u] is None:
                    pats[u] = pv + bytes([symbol])
        assert all(p is not None for p in pats), "unreachable state"
        return pats  # type: ignore[return-value]
