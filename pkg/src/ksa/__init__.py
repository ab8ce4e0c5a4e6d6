"""Space-efficient k-mer truncated generalized suffix trie."""

__version__ = "0.1.0"

from .alphabet import BYTES, DNA, PROTEIN, Alphabet
from .errors import (
    AlphabetError,
    BadMagicError,
    ChecksumMismatchError,
    DuplicateSequenceError,
    EmptyInputError,
    FrozenIndexError,
    IndexFormatError,
    InvalidParameterError,
    KmerLengthError,
    KsaError,
    PatternTooLongError,
    SequenceFormatError,
    UnsupportedVersionError,
)
from .trie import IndexStats, KmerIndex, Posting, TrieNode, build_index, create_index
from .suffix_tree import SuffixTree, brute_force_locate, build_suffix_tree
from .sequence_io import SequenceRecord, read_fasta, read_plain, synthesize_sequence
from .serialize import dumps, load, loads, save
from .estimator import KmerIndexEstimator

__all__ = [
    "Alphabet", "BYTES", "DNA", "PROTEIN",
    "AlphabetError", "BadMagicError", "ChecksumMismatchError", "DuplicateSequenceError",
    "EmptyInputError", "FrozenIndexError", "IndexFormatError", "InvalidParameterError",
    "KmerLengthError", "KsaError", "PatternTooLongError", "SequenceFormatError",
    "UnsupportedVersionError",
    "IndexStats", "KmerIndex", "Posting", "TrieNode", "build_index", "create_index",
    "SuffixTree", "brute_force_locate", "build_suffix_tree",
    "SequenceRecord", "read_fasta", "read_plain", "synthesize_sequence",
    "dumps", "load", "loads", "save",
    "KmerIndexEstimator",
]
