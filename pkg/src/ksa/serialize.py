"""Binary ``KSA1`` index format.

Little-endian throughout::

    header   magic b"KSA1" | version u16 (=1) | k u32
             | alphabet size u16 | symbol bytes
             | sequence count u32 | (seq_id u32, length u64) * count
             | flags u8 (bit 0: postings present)
    body     pre-order node stream. A node is its child count (u8), then for
             each child in alphabet order: symbol u8, subtree length u64, and
             the child's own node record. Leaves (depth k) add a posting
             count u64 and, if postings are present, (seq_id u32, offset u64)
             pairs.
    trailer  CRC-64/XZ (u64) over header + body

A child count of 0 at an internal node means 256 children. The only internal
node that can legitimately have none is the root of an empty index, whose
body is then that single byte.
"""
from __future__ import annotations

import os
import struct
from array import array
from typing import BinaryIO, Union

from .alphabet import Alphabet
from .errors import (
    BadMagicError,
    ChecksumMismatchError,
    IndexFormatError,
    UnsupportedVersionError,
)
from .trie import KmerIndex

MAGIC = b"KSA1"
VERSION = 1
FLAG_POSTINGS = 0x01

_U8 = struct.Struct("<B")
_U16 = struct.Struct("<H")
_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")
_SEQ = struct.Struct("<IQ")
_EDGE = struct.Struct("<BQ")
_POSTING = struct.Struct("<IQ")

_CRC64_XZ_POLY = 0xC96C5795D7870F42  # reflected 0x42F0E1EBA9EA3693
_MASK64 = 0xFFFFFFFFFFFFFFFF


def _crc64_table():
    table = []
    for byte in range(256):
        crc = byte
        for _ in range(8):
            crc = (crc >> 1) ^ _CRC64_XZ_POLY if crc & 1 else crc >> 1
        table.append(crc)
    return table


_CRC_TABLE = _crc64_table()


def crc64_xz(data: bytes, crc: int = 0) -> int:
    """CRC-64/XZ; ``crc64_xz(b"123456789") == 0x995DC9BBDF1939FA``."""
    table = _CRC_TABLE
    crc ^= _MASK64
    for b in data:
        crc = table[(crc ^ b) & 0xFF] ^ (crc >> 8)
    return crc ^ _MASK64


PathOrFile = Union[str, os.PathLike, BinaryIO]


def dumps(index: KmerIndex) -> bytes:
    out = bytearray(MAGIC)
    out += _U16.pack(VERSION)
    out += _U32.pack(index.k)
    out += _U16.pack(len(index.alphabet))
    out += index.alphabet.symbols
    out += _U32.pack(len(index.sequence_lengths))
    for seq_id in sorted(index.sequence_lengths):
        out += _SEQ.pack(seq_id, index.sequence_lengths[seq_id])
    out += _U8.pack(FLAG_POSTINGS if index.has_postings else 0)
    _write_body(index, out)
    out += _U64.pack(crc64_xz(out))
    return bytes(out)


def _write_body(index: KmerIndex, out: bytearray):
    k, syms = index.k, index.alphabet.symbols
    counts, postings = index._counts, index._postings

    def open_node(node, depth):
        if depth == k:
            out.append(0)
            out.extend(_U64.pack(counts[node]))
            if postings is not None:
                flat = postings.get(node, ())
                pack = _POSTING.pack
                for j in range(0, len(flat), 2):
                    out.extend(pack(flat[j], flat[j + 1]))
            return None
        items = index._child_items(node)
        out.append(len(items) & 0xFF)
        return items

    # frame: [child items, next position, depth, offset of pending length field]
    stack = [[open_node(0, 0), 0, 0, -1]]
    while stack:
        frame = stack[-1]
        items, pos, depth, len_at = frame
        if len_at >= 0:
            _U64.pack_into(out, len_at, len(out) - len_at - 8)
            frame[3] = -1
        if pos == len(items):
            stack.pop()
            continue
        rank, child = items[pos]
        frame[1] = pos + 1
        out.append(syms[rank])
        frame[3] = len(out)
        out += b"\0" * 8
        child_items = open_node(child, depth + 1)
        if child_items is not None:
            stack.append([child_items, 0, depth + 1, -1])


class _Reader:
    def __init__(self, data: bytes, end: int):
        self.data = data
        self.pos = 0
        self.end = end

    def take(self, st: struct.Struct):
        if self.pos + st.size > self.end:
            raise IndexFormatError("truncated index data")
        values = st.unpack_from(self.data, self.pos)
        self.pos += st.size
        return values

    def raw(self, n: int) -> bytes:
        if self.pos + n > self.end:
            raise IndexFormatError("truncated index data")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk


def loads(data: bytes) -> KmerIndex:
    """Parse a ``KSA1`` blob; the returned index is frozen."""
    data = bytes(data)
    if data[:4] != MAGIC:
        raise BadMagicError(f"bad magic {data[:4]!r}, expected {MAGIC!r}")
    if len(data) < 4 + 2 + 8:
        raise IndexFormatError("truncated index data")
    body_end = len(data) - 8
    (stored,) = _U64.unpack_from(data, body_end)
    actual = crc64_xz(memoryview(data)[:body_end])
    if stored != actual:
        raise ChecksumMismatchError(
            f"checksum mismatch: stored {stored:016x}, computed {actual:016x}")
    rd = _Reader(data, body_end)
    rd.pos = 4
    (version,) = rd.take(_U16)
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported KSA format version {version}")
    (k,) = rd.take(_U32)
    (n_symbols,) = rd.take(_U16)
    try:
        alphabet = Alphabet(rd.raw(n_symbols))
        (n_seqs,) = rd.take(_U32)
        lengths = {}
        for _ in range(n_seqs):
            seq_id, length = rd.take(_SEQ)
            lengths[seq_id] = length
        (flags,) = rd.take(_U8)
        index = KmerIndex(k, alphabet, postings=bool(flags & FLAG_POSTINGS))
    except ValueError as exc:
        raise IndexFormatError(f"invalid header: {exc}") from None
    index.sequence_lengths = lengths
    index.short_sequences = sum(1 for n in lengths.values() if n < k)
    _read_body(index, rd)
    if rd.pos != body_end:
        raise IndexFormatError("trailing bytes after node stream")
    index.total_windows = sum(index._counts)
    return index.freeze()


def _read_body(index: KmerIndex, rd: _Reader):
    k, fanout = index.k, index.fanout
    counts, postings = index._counts, index._postings
    alphabet = index.alphabet

    def open_node(node, depth):
        (n_children,) = rd.take(_U8)
        if depth == k:
            if n_children:
                raise IndexFormatError("leaf with children")
            (n_post,) = rd.take(_U64)
            counts[node] = n_post
            if postings is not None and n_post:
                if rd.pos + n_post * _POSTING.size > rd.end:
                    raise IndexFormatError("truncated index data")
                flat = array("q")
                for _ in range(n_post):
                    flat.extend(rd.take(_POSTING))
                postings[node] = flat
            return 0
        if n_children == 0 and (depth > 0 or rd.pos < rd.end):
            n_children = 256
        if n_children > fanout:
            raise IndexFormatError("node has more children than alphabet symbols")
        return n_children

    # frame: [node, depth, children left, previous rank, end offset of current child]
    stack = [[0, 0, open_node(0, 0), -1, -1]]
    while stack:
        frame = stack[-1]
        node, depth, left, prev_rank, child_end = frame
        if child_end >= 0:
            if rd.pos != child_end:
                raise IndexFormatError("subtree length mismatch")
            frame[4] = -1
        if left == 0:
            stack.pop()
            continue
        frame[2] = left - 1
        sym, sub_len = rd.take(_EDGE)
        if sym not in alphabet:
            raise IndexFormatError(f"edge symbol {sym} not in alphabet")
        rank = alphabet.rank(sym)
        if rank <= prev_rank:
            raise IndexFormatError("children out of order")
        frame[3] = rank
        frame[4] = rd.pos + sub_len
        if frame[4] > rd.end:
            raise IndexFormatError("subtree overruns body")
        child = index._new_node()
        _link(index, node, rank, child)
        n_children = open_node(child, depth + 1)
        if depth + 1 < k:
            stack.append([child, depth + 1, n_children, -1, -1])


def _link(index: KmerIndex, parent: int, rank: int, child: int):
    if index._sparse is None:
        index._kids[parent * index.fanout + rank] = child
    else:
        index._sparse[parent].append((rank << 32) | child)


def save(index: KmerIndex, target: PathOrFile) -> None:
    blob = dumps(index)
    if hasattr(target, "write"):
        target.write(blob)
    else:
        with open(target, "wb") as fh:
            fh.write(blob)


def load(source: PathOrFile) -> KmerIndex:
    if hasattr(source, "read"):
        return loads(source.read())
    with open(source, "rb") as fh:
        return loads(fh.read())
