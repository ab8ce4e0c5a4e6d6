"""Depth-k generalized trie over all k-mer windows of a set of sequences.

Construction slides a window of length ``k`` over each sequence one symbol at
a time and inserts every window into the trie, one node per symbol. Suffixes
of the windows are *not* inserted, so the trie has height exactly ``k`` and
every leaf spells one distinct k-mer.

Nodes live in flat arrays addressed by integer id (the root is id 0):

* alphabets of up to 16 symbols use a fixed-capacity child array per node,
  indexed by symbol rank (``_kids[node * fanout + rank]``, 0 meaning absent);
* larger alphabets use a per-node sorted association list of
  ``rank << 32 | child`` keys.

Leaves carry an occurrence count and, unless built with ``postings=False``,
a flat ``array('q')`` of ``seq_id, offset`` pairs.
"""
from __future__ import annotations

import warnings
from array import array
from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterator, NamedTuple

from .alphabet import DNA, Alphabet, SymbolSeq, as_bytes
from .cost import POSTING_BYTES, child_map_kind, node_cost_model
from .errors import (
    DuplicateSequenceError,
    FrozenIndexError,
    InvalidParameterError,
    KmerLengthError,
    PatternTooLongError,
)

_CHILD_MASK = (1 << 32) - 1


class ShortSequenceWarning(UserWarning):
    """A sequence shorter than k was indexed and contributed no windows."""


class PostingsDisabledError(InvalidParameterError):
    pass


class Posting(NamedTuple):
    seq_id: int
    offset: int


@dataclass(frozen=True)
class IndexStats:
    node_count: int
    leaf_count: int
    distinct_kmers: int
    total_windows: int
    estimated_bytes: int
    postings_bytes: int = 0
    height: int = 0


@dataclass(frozen=True)
class TrieNode:
    """Read-only view of one trie node."""

    index: "KmerIndex"
    id: int
    depth: int

    @property
    def children(self) -> dict[int, "TrieNode"]:
        syms = self.index.alphabet.symbols
        return {
            syms[rank]: TrieNode(self.index, child, self.depth + 1)
            for rank, child in self.index._child_items(self.id)
        }

    @property
    def is_leaf(self) -> bool:
        return self.depth == self.index.k

    @property
    def count(self) -> int:
        return self.index._counts[self.id]

    @property
    def postings(self) -> list[Posting]:
        flat = self.index._postings.get(self.id) if self.index._postings is not None else None
        if not flat:
            return []
        return [Posting(flat[j], flat[j + 1]) for j in range(0, len(flat), 2)]


class KmerIndex:
    """Generalized depth-``k`` trie of k-mer windows.

    Parameters
    ----------
    k : int
        Window (pattern) length, at least 1.
    alphabet : Alphabet
        Symbols accepted in sequences and patterns.
    postings : bool, default=True
        Store ``(seq_id, offset)`` postings at leaves. When False only
        occurrence counts are kept, so ``locate`` is unavailable.
    """

    def __init__(self, k: int, alphabet: Alphabet = DNA, postings: bool = True):
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            raise InvalidParameterError(f"k must be a positive integer, got {k!r}")
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(alphabet)
        self.k = k
        self.alphabet = alphabet
        self.fanout = len(alphabet)
        self.child_map = child_map_kind(self.fanout)
        self.sequence_lengths: dict[int, int] = {}
        self.total_windows = 0
        self.short_sequences = 0
        self._frozen = False
        #: nodes touched by the most recent pattern descent (root included)
        self.last_visits = 0
        self._counts = array("q", [0])
        if self.child_map == "array":
            self._zeros = array("l", [0]) * self.fanout
            self._kids = array("l", self._zeros)
            self._sparse = None
        else:
            self._kids = None
            self._sparse = [[]]
        self._postings: dict[int, array] | None = {} if postings else None

    def __repr__(self) -> str:
        return (f"KmerIndex(k={self.k}, alphabet={self.alphabet!r}, "
                f"sequences={len(self.sequence_lengths)}, windows={self.total_windows})")

    @property
    def has_postings(self) -> bool:
        return self._postings is not None

    @property
    def frozen(self) -> bool:
        return self._frozen

    @property
    def node_count(self) -> int:
        return len(self._counts)

    def freeze(self) -> "KmerIndex":
        """Make the index read-only; further inserts raise FrozenIndexError."""
        self._frozen = True
        return self

    # -- construction --------------------------------------------------

    def _check_writable(self):
        if self._frozen:
            raise FrozenIndexError("index is frozen")

    def _new_node(self) -> int:
        node = len(self._counts)
        self._counts.append(0)
        if self._sparse is None:
            self._kids.extend(self._zeros)
        else:
            self._sparse.append([])
        return node

    def _child(self, node: int, rank: int) -> int:
        """Child id of ``node`` along ``rank``, or 0 if absent."""
        if self._sparse is None:
            return self._kids[node * self.fanout + rank]
        lst = self._sparse[node]
        key = rank << 32
        j = bisect_left(lst, key)
        if j < len(lst) and lst[j] >> 32 == rank:
            return lst[j] & _CHILD_MASK
        return 0

    def _child_items(self, node: int) -> list[tuple[int, int]]:
        """(rank, child) pairs of ``node`` in rank order."""
        if self._sparse is None:
            base = node * self.fanout
            kids = self._kids
            return [(r, kids[base + r]) for r in range(self.fanout) if kids[base + r]]
        return [(e >> 32, e & _CHILD_MASK) for e in self._sparse[node]]

    def _insert_ranks(self, ranks) -> int:
        """Walk/extend the path for one window of ranks; returns the leaf id."""
        node = 0
        if self._sparse is None:
            kids, fanout = self._kids, self.fanout
            for r in ranks:
                slot = node * fanout + r
                child = kids[slot]
                if not child:
                    child = self._new_node()
                    kids[slot] = child
                node = child
        else:
            sparse = self._sparse
            for r in ranks:
                lst = sparse[node]
                key = r << 32
                j = bisect_left(lst, key)
                if j < len(lst) and lst[j] >> 32 == r:
                    node = lst[j] & _CHILD_MASK
                else:
                    child = self._new_node()
                    lst.insert(j, key | child)
                    node = child
        return node

    def _add_posting(self, leaf: int, seq_id: int, offset: int):
        self._counts[leaf] += 1
        if self._postings is not None:
            flat = self._postings.get(leaf)
            if flat is None:
                self._postings[leaf] = flat = array("q")
            flat.append(seq_id)
            flat.append(offset)

    def insert_kmer(self, kmer: SymbolSeq, posting: tuple[int, int]) -> None:
        """Insert one k-mer and append ``posting`` to its leaf."""
        self._check_writable()
        kmer = as_bytes(kmer)
        if len(kmer) != self.k:
            raise KmerLengthError(f"k-mer length {len(kmer)} != k={self.k}")
        seq_id, offset = posting
        if seq_id < 0 or offset < 0:
            raise InvalidParameterError("posting fields must be non-negative")
        leaf = self._insert_ranks(self.alphabet.to_ranks(kmer))
        self._add_posting(leaf, seq_id, offset)
        self.total_windows += 1

    def index_sequence(self, seq: SymbolSeq, seq_id: int | None = None) -> int:
        """Insert every length-k window of ``seq``; returns the window count.

        Window ``seq[i:i+k]`` is inserted with posting ``(seq_id, i)`` for
        each ``i`` in ``0 .. len(seq) - k``. Sequences shorter than ``k`` are
        recorded but contribute no windows.
        """
        self._check_writable()
        if seq_id is None:
            seq_id = len(self.sequence_lengths)
            while seq_id in self.sequence_lengths:
                seq_id += 1
        if seq_id < 0:
            raise InvalidParameterError("seq_id must be non-negative")
        if seq_id in self.sequence_lengths:
            raise DuplicateSequenceError(f"sequence id {seq_id} already indexed")
        data = as_bytes(seq)
        ranks = self.alphabet.to_ranks(data)
        n, k = len(ranks), self.k
        self.sequence_lengths[seq_id] = n
        if n < k:
            self.short_sequences += 1
            warnings.warn(f"sequence {seq_id} has length {n} < k={k}; no windows indexed",
                          ShortSequenceWarning, stacklevel=2)
            return 0
        windows = n - k + 1
        counts = self._counts
        postings = self._postings
        if self._sparse is None:
            self._index_array(ranks, seq_id, windows)
        else:
            insert = self._insert_ranks
            for i in range(windows):
                leaf = insert(ranks[i:i + k])
                counts[leaf] += 1
                if postings is not None:
                    flat = postings.get(leaf)
                    if flat is None:
                        postings[leaf] = flat = array("q")
                    flat.append(seq_id)
                    flat.append(i)
        self.total_windows += windows
        return windows

    def _index_array(self, ranks: bytes, seq_id: int, windows: int):
        # hot loop: inlined walk over the fixed-capacity child arrays
        k, fanout = self.k, self.fanout
        kids, counts, zeros = self._kids, self._counts, self._zeros
        postings = self._postings
        for i in range(windows):
            node = 0
            for r in ranks[i:i + k]:
                slot = node * fanout + r
                child = kids[slot]
                if not child:
                    child = len(counts)
                    counts.append(0)
                    kids.extend(zeros)
                    kids[slot] = child
                node = child
            counts[node] += 1
            if postings is not None:
                flat = postings.get(node)
                if flat is None:
                    postings[node] = flat = array("q")
                flat.append(seq_id)
                flat.append(i)

    # -- queries -------------------------------------------------------

    def _pattern_ranks(self, pattern: SymbolSeq) -> bytes:
        data = as_bytes(pattern)
        if len(data) > self.k:
            raise PatternTooLongError(len(data), self.k)
        return self.alphabet.to_ranks(data)

    def trace_path(self, pattern: SymbolSeq) -> list[int]:
        """Node ids visited while descending along ``pattern`` (root first).

        The descent stops at the first missing edge, so the result has at most
        ``len(pattern) + 1`` entries; it has exactly that many iff the pattern
        is present.
        """
        ranks = self._pattern_ranks(pattern)
        node = 0
        path = [0]
        for r in ranks:
            node = self._child(node, r)
            if not node:
                break
            path.append(node)
        return path

    def _descend(self, pattern: SymbolSeq) -> int:
        ranks = self._pattern_ranks(pattern)
        node = 0
        visits = 1
        for r in ranks:
            node = self._child(node, r)
            if not node:
                self.last_visits = visits
                return -1
            visits += 1
        self.last_visits = visits
        return node

    def _subtree(self, node: int) -> Iterator[int]:
        stack = [node]
        while stack:
            cur = stack.pop()
            yield cur
            stack.extend(child for _, child in reversed(self._child_items(cur)))

    def contains(self, pattern: SymbolSeq) -> bool:
        """True iff ``pattern`` is a prefix of at least one indexed window.

        For ``len(pattern) == k`` this is exact occurrence; for shorter
        patterns, occurrences starting after the last window start
        (``n - k``) are not represented.
        """
        return self._descend(pattern) >= 0

    __contains__ = contains

    def locate(self, pattern: SymbolSeq) -> list[Posting]:
        """Postings of all windows having ``pattern`` as a prefix, sorted."""
        if self._postings is None:
            raise PostingsDisabledError("index was built without postings")
        if not as_bytes(pattern):
            raise InvalidParameterError("locate needs a non-empty pattern")
        node = self._descend(pattern)
        if node < 0:
            return []
        out: list[Posting] = []
        postings = self._postings
        for cur in self._subtree(node):
            flat = postings.get(cur)
            if flat:
                out.extend(Posting(flat[j], flat[j + 1]) for j in range(0, len(flat), 2))
        out.sort()
        return out

    def count_occurrences(self, pattern: SymbolSeq) -> int:
        """Number of windows having ``pattern`` as a prefix."""
        if not as_bytes(pattern):
            raise InvalidParameterError("count_occurrences needs a non-empty pattern")
        node = self._descend(pattern)
        if node < 0:
            return 0
        counts = self._counts
        return sum(counts[cur] for cur in self._subtree(node))

    def enumerate_kmers(self) -> Iterator[tuple[bytes, int]]:
        """Yield ``(kmer, count)`` for every distinct k-mer in alphabet order."""
        k, syms, counts = self.k, self.alphabet.symbols, self._counts
        stack = [(0, b"")]
        while stack:
            node, prefix = stack.pop()
            if len(prefix) == k:
                yield prefix, counts[node]
                continue
            for rank, child in reversed(self._child_items(node)):
                stack.append((child, prefix + syms[rank:rank + 1]))

    def find_frequent(self, min_count: int) -> list[tuple[bytes, int]]:
        """All k-mers occurring at least ``min_count`` times, most frequent first."""
        if min_count < 1:
            raise InvalidParameterError("min_count must be >= 1")
        hits = [(kmer, c) for kmer, c in self.enumerate_kmers() if c >= min_count]
        # stable sort keeps alphabet order among equal counts
        hits.sort(key=lambda item: -item[1])
        return hits

    # -- inspection ----------------------------------------------------

    @property
    def root(self) -> TrieNode:
        return TrieNode(self, 0, 0)

    def iter_nodes(self) -> Iterator[TrieNode]:
        """Pre-order traversal of all nodes as read-only views."""
        stack = [(0, 0)]
        while stack:
            node, depth = stack.pop()
            yield TrieNode(self, node, depth)
            for _, child in reversed(self._child_items(node)):
                stack.append((child, depth + 1))

    def stats(self) -> IndexStats:
        nodes = leaves = windows = height = 0
        counts, k = self._counts, self.k
        stack = [(0, 0)]
        while stack:
            node, depth = stack.pop()
            nodes += 1
            height = max(height, depth)
            if depth == k:
                leaves += 1
                windows += counts[node]
            else:
                stack.extend((child, depth + 1) for _, child in self._child_items(node))
        postings_bytes = windows * POSTING_BYTES if self._postings is not None else 0
        per_node = node_cost_model("ksa", self.fanout, self.child_map)
        return IndexStats(
            node_count=nodes,
            leaf_count=leaves,
            distinct_kmers=leaves,
            total_windows=windows,
            estimated_bytes=nodes * per_node + postings_bytes,
            postings_bytes=postings_bytes,
            height=height,
        )

    # -- persistence ---------------------------------------------------

    def save(self, path) -> None:
        from .serialize import save
        save(self, path)

    @classmethod
    def load(cls, path) -> "KmerIndex":
        from .serialize import load
        return load(path)


def create_index(k: int, alphabet: Alphabet = DNA, postings: bool = True) -> KmerIndex:
    """An empty index (root only)."""
    return KmerIndex(k, alphabet, postings=postings)


def build_index(sequences, k: int, alphabet: Alphabet = DNA, postings: bool = True) -> KmerIndex:
    """Index each sequence in order with dense ids starting at 0, then freeze."""
    index = KmerIndex(k, alphabet, postings=postings)
    for seq_id, seq in enumerate(sequences):
        index.index_sequence(seq, seq_id)
    return index.freeze()


__all__ = [
    "IndexStats",
    "KmerIndex",
    "Posting",
    "PostingsDisabledError",
    "ShortSequenceWarning",
    "TrieNode",
    "build_index",
    "create_index",
]
