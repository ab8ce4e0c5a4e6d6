"""FASTA / plain-text ingestion with masked-N stripping and case folding.

FASTA sequence lines lose all ASCII whitespace and plain text loses CR/LF,
whatever the alphabet. Symbol normalization only touches bytes the alphabet
does not accept itself:

* a lowercase ASCII letter outside the alphabet is uppercased;
* ``N`` is removed (and counted) when it is not an alphabet symbol, which
  strips masked bases from DNA but keeps asparagine in protein text.

Anything still outside the alphabet raises :class:`AlphabetError` with its
line and byte offset in the input stream. Offsets of the resulting records
refer to the post-strip sequence.
"""
from __future__ import annotations

import sys
import warnings
from contextlib import contextmanager
from dataclasses import dataclass
from typing import BinaryIO, Iterator

import numpy as np

from .alphabet import Alphabet
from .errors import AlphabetError, EmptyInputError, SequenceFormatError

FASTA_WHITESPACE = b" \t\r\n\v\f"
NEWLINES = b"\r\n"
CHUNK_SIZE = 1 << 20


class ZeroLengthWarning(UserWarning):
    pass


@dataclass
class SequenceRecord:
    seq_id: int
    name: str
    data: bytes
    stripped_n_count: int = 0
    original_length: int = 0

    def __len__(self) -> int:
        return len(self.data)


class _Normalizer:
    def __init__(self, alphabet: Alphabet, drop: bytes):
        table = bytearray(range(256))
        for lower in range(ord("a"), ord("z") + 1):
            if lower not in alphabet:
                table[lower] = lower - 32
        self.case_table = bytes(table)
        self.strip_n = ord("N") not in alphabet
        removable = drop + (b"N" if self.strip_n else b"")
        self.allowed = bytes(sorted(set(alphabet.symbols) | set(removable)))
        self.delete = removable
        self.full = len(self.allowed) == 256

    def __call__(self, chunk: bytes) -> tuple[bytes, int, int]:
        """(clean bytes, stripped N count, first bad offset or -1)."""
        up = chunk.translate(self.case_table)
        if not self.full:
            leftover = up.translate(None, self.allowed)
            if leftover:
                return b"", 0, up.index(leftover[0])
        n = up.count(b"N") if self.strip_n else 0
        return up.translate(None, self.delete), n, -1


def iter_fasta(source: BinaryIO, alphabet: Alphabet, start_id: int = 0) -> Iterator[SequenceRecord]:
    """Stream records from a FASTA byte stream, one at a time."""
    norm = _Normalizer(alphabet, FASTA_WHITESPACE)
    seq_id = start_id
    name = None
    parts: list[bytes] = []
    stripped = 0
    offset = 0
    for lineno, line in enumerate(source, 1):
        if line.startswith(b">"):
            if name is not None:
                yield _record(seq_id, name, parts, stripped)
                seq_id += 1
            name = line[1:].strip().decode("utf-8", "replace")
            parts, stripped = [], 0
        elif name is None:
            if line.strip():
                raise SequenceFormatError(f"line {lineno}: sequence data before first '>' header")
        else:
            clean, n, bad = norm(line)
            if bad >= 0:
                raise AlphabetError(line[bad], position=offset + bad, line=lineno, column=bad + 1)
            parts.append(clean)
            stripped += n
        offset += len(line)
    if name is None:
        raise EmptyInputError("no FASTA records found")
    yield _record(seq_id, name, parts, stripped)


def _record(seq_id, name, parts, stripped) -> SequenceRecord:
    data = b"".join(parts)
    return SequenceRecord(seq_id, name, data, stripped, len(data) + stripped)


def read_fasta(source: BinaryIO, alphabet: Alphabet, start_id: int = 0) -> list[SequenceRecord]:
    return list(iter_fasta(source, alphabet, start_id))


def read_plain(source: BinaryIO, alphabet: Alphabet, seq_id: int = 0) -> SequenceRecord:
    """Whole stream as one headerless record."""
    norm = _Normalizer(alphabet, NEWLINES)
    parts: list[bytes] = []
    stripped = offset = 0
    line = 1
    saw_bytes = False
    while True:
        chunk = source.read(CHUNK_SIZE)
        if not chunk:
            break
        saw_bytes = True
        clean, n, bad = norm(chunk)
        if bad >= 0:
            line += chunk.count(b"\n", 0, bad)
            line_start = chunk.rfind(b"\n", 0, bad) + 1
            # column unknown when the line began in an earlier chunk
            column = bad - line_start + 1 if line_start or not offset else None
            raise AlphabetError(chunk[bad], position=offset + bad, line=line, column=column)
        line += chunk.count(b"\n")
        parts.append(clean)
        stripped += n
        offset += len(chunk)
    if not saw_bytes:
        raise EmptyInputError("input is empty")
    return _record(seq_id, "", parts, stripped)


def synthesize_sequence(length: int, alphabet: Alphabet, rng_seed: int, seq_id: int = 0) -> SequenceRecord:
    """Uniform i.i.d. symbols from numpy's PCG64 generator seeded with ``rng_seed``."""
    if length < 0:
        raise ValueError("length must be non-negative")
    if length == 0:
        warnings.warn("synthesized a zero-length sequence", ZeroLengthWarning, stacklevel=2)
    rng = np.random.default_rng(rng_seed)
    ranks = rng.integers(0, len(alphabet), size=length, dtype=np.uint16)
    symbols = np.frombuffer(alphabet.symbols, dtype=np.uint8)
    data = symbols[ranks].tobytes()
    return SequenceRecord(seq_id, f"synthetic:{length}:{rng_seed}", data, 0, length)


@contextmanager
def open_source(path):
    """Binary stream for ``path``; ``-`` means standard input."""
    if str(path) == "-":
        yield sys.stdin.buffer
    else:
        with open(path, "rb") as fh:
            yield fh


def read_records(paths, alphabet: Alphabet, fmt: str = "fasta") -> Iterator[SequenceRecord]:
    """Records from several files with dense ids across all of them."""
    if fmt not in ("fasta", "plain"):
        raise ValueError(f"unknown format {fmt!r}")
    next_id = 0
    for path in paths:
        with open_source(path) as fh:
            if fmt == "fasta":
                for rec in iter_fasta(fh, alphabet, next_id):
                    yield rec
                    next_id = rec.seq_id + 1
            else:
                yield read_plain(fh, alphabet, next_id)
                next_id += 1
