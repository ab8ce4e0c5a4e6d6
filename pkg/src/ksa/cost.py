"""Implementation-independent per-node byte model.

Every node pays a fixed header (occurrence count / flags, or the suffix start
on suffix-tree leaves) plus its child map:

* ``array``: one reference slot per symbol, indexed by rank.
* ``sparse``: a sorted association list header, plus one (symbol, reference)
  entry. Each non-root node is the target of exactly one entry, so that entry
  is charged to the child; the root's single over-charge is accepted.

Suffix-tree nodes additionally store an edge label as two text offsets and a
suffix link, and have one extra symbol (the terminal sentinel) in their child
map domain.
"""

REF_BYTES = 8
NODE_HEADER_BYTES = 16
SPARSE_LIST_HEADER_BYTES = 16
SPARSE_ENTRY_BYTES = 1 + REF_BYTES
EDGE_LABEL_BYTES = 2 * 8
SUFFIX_LINK_BYTES = 8
POSTING_BYTES = 4 + 8  # seq_id u32, offset u64; mirrors the KSA1 layout

ARRAY_MAX_SYMBOLS = 16

STRUCTURES = ("ksa", "suffix_tree")


def child_map_kind(n_symbols: int) -> str:
    return "array" if n_symbols <= ARRAY_MAX_SYMBOLS else "sparse"


def node_cost_model(structure: str, alphabet_size: int, child_map: str | None = None,
                    ref_bytes: int = REF_BYTES) -> int:
    """Modeled bytes per node for ``structure`` over an alphabet of the given size.

    ``child_map`` defaults to the kind the structure would pick for its
    fan-out. With array children and 8-byte references a DNA KSA node costs
    ``16 + 4 * 8 = 48`` bytes.
    """
    if structure not in STRUCTURES:
        raise ValueError(f"unknown structure {structure!r}")
    if alphabet_size < 1:
        raise ValueError("alphabet_size must be positive")
    fanout = alphabet_size + (1 if structure == "suffix_tree" else 0)
    kind = child_map or child_map_kind(fanout)
    if kind == "array":
        children = fanout * ref_bytes
    elif kind == "sparse":
        children = SPARSE_LIST_HEADER_BYTES + 1 + ref_bytes
    else:
        raise ValueError(f"unknown child map kind {kind!r}")
    cost = NODE_HEADER_BYTES + children
    if structure == "suffix_tree":
        cost += EDGE_LABEL_BYTES + SUFFIX_LINK_BYTES
    return cost
