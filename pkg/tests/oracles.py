"""Independent reference computations used by the tests.

Nothing here touches the trie or suffix tree code.
"""


def windows(seq, k):
    return [seq[i:i + k] for i in range(len(seq) - k + 1)]


def window_prefix_hits(seqs, k, pattern):
    """(seq_id, offset) of every window having ``pattern`` as a prefix."""
    m = len(pattern)
    return sorted(
        (sid, i)
        for sid, seq in enumerate(seqs)
        for i in range(len(seq) - k + 1)
        if seq[i:i + m] == pattern
    )


def naive_positions(seq, pattern):
    m = len(pattern)
    return [i for i in range(len(seq) - m + 1) if seq[i:i + m] == pattern]


def trie_node_count(seqs, k):
    """Root plus one node per distinct non-empty window prefix."""
    prefixes = set()
    for seq in seqs:
        for w in windows(seq, k):
            for d in range(1, k + 1):
                prefixes.add(w[:d])
    return 1 + len(prefixes)


def kmer_counts(seqs, k):
    counts = {}
    for seq in seqs:
        for w in windows(seq, k):
            counts[w] = counts.get(w, 0) + 1
    return counts
