"""Full suffix tree of a single terminated string, plus a brute-force scanner.

The tree is built online with Ukkonen's algorithm over ``text + $`` where the
sentinel ``$`` is code 256, outside every byte alphabet. Nodes are stored in
parallel ``array('q')`` columns; children form singly linked sibling lists,
so a node never holds two edges starting with the same symbol.
"""
from __future__ import annotations

from array import array
from dataclasses import dataclass
from typing import Iterator

from .alphabet import Alphabet, SymbolSeq, as_bytes
from .cost import node_cost_model
from .errors import InvalidParameterError
from .trie import IndexStats

SENTINEL = 256
_LEAF_END = -1


def brute_force_locate(seq: SymbolSeq, pattern: SymbolSeq) -> list[int]:
    """All start offsets of ``pattern`` in ``seq`` by direct comparison."""
    seq, pattern = as_bytes(seq), as_bytes(pattern)
    if not pattern:
        raise InvalidParameterError("pattern must be non-empty")
    hits = []
    i = seq.find(pattern)
    while i >= 0:
        hits.append(i)
        i = seq.find(pattern, i + 1)
    return hits


@dataclass(frozen=True)
class SuffixTreeNode:
    """Read-only view of one node; ``suffix`` is -1 except on leaves."""

    tree: "SuffixTree"
    id: int

    @property
    def children(self) -> list["SuffixTreeNode"]:
        return [SuffixTreeNode(self.tree, c) for c in self.tree._children(self.id)]

    @property
    def edge(self) -> tuple[int, int]:
        return self.tree._edge(self.id)

    @property
    def first_symbol(self) -> int:
        return self.tree._text[self.tree._start[self.id]]

    @property
    def is_leaf(self) -> bool:
        return self.tree._first[self.id] < 0

    @property
    def suffix(self) -> int:
        return self.tree._suffix[self.id]


class SuffixTree:
    """Explicit suffix tree of ``seq + $``.

    Nodes are priced for ``alphabet`` when given, otherwise for the distinct
    symbols present in ``seq``.

    Edge labels are inclusive ``(start, end)`` offsets into the terminated
    text. Leaf ``suffix`` values give the start of the suffix spelled from the
    root; the bare ``$`` leaf has suffix ``len(seq)``.
    """

    algorithm = "ukkonen"

    def __init__(self, seq: SymbolSeq, alphabet: Alphabet | None = None):
        data = as_bytes(seq)
        if not data:
            raise InvalidParameterError("suffix tree needs a non-empty sequence")
        if alphabet is not None:
            alphabet.check(data)
        self.seq = data
        self.alphabet = alphabet
        self._text = list(data)
        self._text.append(SENTINEL)
        self._start = array("q")
        self._end = array("q")
        self._link = array("q")
        self._first = array("q")
        self._next = array("q")
        self._build()
        self._suffix = self._annotate()

    def __len__(self) -> int:
        return len(self._start)

    def _new(self, start: int, end: int) -> int:
        node = len(self._start)
        self._start.append(start)
        self._end.append(end)
        self._link.append(0)
        self._first.append(-1)
        self._next.append(-1)
        return node

    def _build(self):
        text = self._text
        start, end, link, first, nxt = self._start, self._end, self._link, self._first, self._next
        new = self._new
        new(-1, -1)  # root
        active_node = active_edge = active_len = 0
        remainder = 0
        for i, c in enumerate(text):
            remainder += 1
            last_new = -1
            while remainder:
                if active_len == 0:
                    active_edge = i
                sym = text[active_edge]
                prev, child = -1, first[active_node]
                while child >= 0 and text[start[child]] != sym:
                    prev, child = child, nxt[child]
                if child < 0:
                    leaf = new(i, _LEAF_END)
                    nxt[leaf] = first[active_node]
                    first[active_node] = leaf
                    if last_new >= 0:
                        link[last_new] = active_node
                        last_new = -1
                else:
                    child_end = end[child]
                    edge_len = (i if child_end == _LEAF_END else child_end) - start[child] + 1
                    if active_len >= edge_len:
                        active_edge += edge_len
                        active_len -= edge_len
                        active_node = child
                        continue
                    if text[start[child] + active_len] == c:
                        if last_new >= 0 and active_node != 0:
                            link[last_new] = active_node
                            last_new = -1
                        active_len += 1
                        break
                    split = new(start[child], start[child] + active_len - 1)
                    nxt[split] = nxt[child]
                    if prev < 0:
                        first[active_node] = split
                    else:
                        nxt[prev] = split
                    start[child] += active_len
                    leaf = new(i, _LEAF_END)
                    first[split] = leaf
                    nxt[leaf] = child
                    nxt[child] = -1
                    if last_new >= 0:
                        link[last_new] = split
                    last_new = split
                remainder -= 1
                if active_node == 0 and active_len > 0:
                    active_len -= 1
                    active_edge = i - remainder + 1
                elif active_node != 0:
                    active_node = link[active_node]
        final = len(text) - 1
        for node in range(1, len(start)):
            if end[node] == _LEAF_END:
                end[node] = final

    def _annotate(self) -> array:
        """Suffix start for every leaf (-1 on internal nodes)."""
        start, end, first, nxt = self._start, self._end, self._first, self._next
        total = len(self._text)
        suffix = array("q", [-1]) * len(start)
        stack = [(0, 0)]
        while stack:
            node, depth = stack.pop()
            if node and first[node] < 0:
                suffix[node] = total - depth
                continue
            child = first[node]
            while child >= 0:
                stack.append((child, depth + end[child] - start[child] + 1))
                child = nxt[child]
        return suffix

    def _children(self, node: int) -> list[int]:
        out = []
        child = self._first[node]
        while child >= 0:
            out.append(child)
            child = self._next[child]
        return out

    def _edge(self, node: int) -> tuple[int, int]:
        return self._start[node], self._end[node]

    @property
    def root(self) -> SuffixTreeNode:
        return SuffixTreeNode(self, 0)

    def iter_nodes(self) -> Iterator[SuffixTreeNode]:
        for node in range(len(self._start)):
            yield SuffixTreeNode(self, node)

    def label(self, node: int) -> bytes:
        """Edge label into ``node`` with the sentinel rendered as ``$``."""
        start, end = self._edge(node)
        return bytes(36 if c == SENTINEL else c for c in self._text[start:end + 1])

    def leaf_suffixes(self) -> list[bytes]:
        """Strings spelled by concatenating edge labels on every root-to-leaf path, sorted."""
        out = []
        stack = [(0, b"")]
        while stack:
            node, spelled = stack.pop()
            children = self._children(node)
            if node and not children:
                out.append(spelled)
            for child in children:
                stack.append((child, spelled + self.label(child)))
        return sorted(out)

    def _match(self, pattern: bytes) -> int:
        """Node whose subtree holds all occurrences of ``pattern``, or -1."""
        text, start, end, first, nxt = self._text, self._start, self._end, self._first, self._next
        node, i, m = 0, 0, len(pattern)
        while i < m:
            sym = pattern[i]
            child = first[node]
            while child >= 0 and text[start[child]] != sym:
                child = nxt[child]
            if child < 0:
                return -1
            j, stop = start[child], end[child]
            while j <= stop and i < m:
                if text[j] != pattern[i]:
                    return -1
                i += 1
                j += 1
            node = child
        return node

    def _leaves_under(self, node: int) -> Iterator[int]:
        first, nxt = self._first, self._next
        stack = [node]
        while stack:
            cur = stack.pop()
            child = first[cur]
            if child < 0:
                yield cur
            while child >= 0:
                stack.append(child)
                child = nxt[child]

    def _pattern(self, pattern: SymbolSeq) -> bytes:
        data = as_bytes(pattern)
        if not data:
            raise InvalidParameterError("pattern must be non-empty")
        return data

    def contains(self, pattern: SymbolSeq) -> bool:
        return self._match(self._pattern(pattern)) >= 0

    __contains__ = contains

    def locate(self, pattern: SymbolSeq) -> list[int]:
        node = self._match(self._pattern(pattern))
        if node < 0:
            return []
        suffix = self._suffix
        return sorted(suffix[leaf] for leaf in self._leaves_under(node))

    def count(self, pattern: SymbolSeq) -> int:
        node = self._match(self._pattern(pattern))
        if node < 0:
            return 0
        return sum(1 for _ in self._leaves_under(node))

    def stats(self) -> IndexStats:
        nodes = len(self._start)
        leaves = sum(1 for f in self._first[1:] if f < 0)
        height = 0
        stack = [(0, 0)]
        while stack:
            node, depth = stack.pop()
            height = max(height, depth)
            for child in self._children(node):
                stack.append((child, depth + 1))
        sigma = len(self.alphabet) if self.alphabet is not None else len(set(self.seq))
        per_node = node_cost_model("suffix_tree", sigma)
        return IndexStats(
            node_count=nodes,
            leaf_count=leaves,
            distinct_kmers=leaves,
            total_windows=leaves,
            estimated_bytes=nodes * per_node,
            height=height,
        )


def build_suffix_tree(seq: SymbolSeq, alphabet: Alphabet | None = None) -> SuffixTree:
    return SuffixTree(seq, alphabet)


def st_contains(tree: SuffixTree, pattern: SymbolSeq) -> bool:
    return tree.contains(pattern)


def st_locate(tree: SuffixTree, pattern: SymbolSeq) -> list[int]:
    return tree.locate(pattern)


def st_stats(tree: SuffixTree) -> IndexStats:
    return tree.stats()
