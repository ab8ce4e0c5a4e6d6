import io
import random
import struct
import warnings

import pytest

from ksa import BYTES, PROTEIN, build_index, create_index
from ksa.errors import (
    BadMagicError,
    ChecksumMismatchError,
    FrozenIndexError,
    IndexFormatError,
    UnsupportedVersionError,
)
from ksa.serialize import MAGIC, crc64_xz, dumps, load, loads, save
from ksa.trie import ShortSequenceWarning


def test_crc64_xz_check_value():
    # published check value of CRC-64/XZ
    assert crc64_xz(b"123456789") == 0x995DC9BBDF1939FA
    assert crc64_xz(b"") == 0


def test_header_layout():
    index = build_index([b"ACGTCCTGG"], 4)
    blob = dumps(index)
    assert blob[:4] == MAGIC == bytes([0x4B, 0x53, 0x41, 0x31])
    version, k, sigma = struct.unpack_from("<HIH", blob, 4)
    assert (version, k, sigma) == (1, 4, 4)
    assert blob[12:16] == b"ACGT"
    (n_seqs,) = struct.unpack_from("<I", blob, 16)
    assert n_seqs == 1
    assert struct.unpack_from("<IQ", blob, 20) == (0, 9)
    assert blob[32] == 1  # postings flag
    assert struct.unpack_from("<Q", blob, len(blob) - 8)[0] == crc64_xz(blob[:-8])


def test_body_of_single_kmer():
    index = create_index(2)
    index.insert_kmer(b"AC", (0, 5))
    blob = dumps(index)
    body = blob[4 + 2 + 4 + 2 + 4 + 4 + 1:-8]
    leaf = bytes([0]) + struct.pack("<Q", 1) + struct.pack("<IQ", 0, 5)
    mid = bytes([1]) + b"C" + struct.pack("<Q", len(leaf)) + leaf
    root = bytes([1]) + b"A" + struct.pack("<Q", len(mid)) + mid
    assert body == root


def test_roundtrip_file(tmp_path):
    index = build_index([b"ACGTCCTGG", b"GGACG"], 3)
    path = tmp_path / "x.ksa"
    save(index, path)
    back = load(path)
    assert back.frozen
    assert back.stats() == index.stats()
    assert back.sequence_lengths == index.sequence_lengths
    assert list(back.enumerate_kmers()) == list(index.enumerate_kmers())
    assert back.locate("CG") == index.locate("CG")
    with pytest.raises(FrozenIndexError):
        back.index_sequence(b"ACGT", 9)


def test_roundtrip_stream_and_method(tmp_path):
    index = build_index([b"AAAA"], 2, postings=False)
    buf = io.BytesIO()
    save(index, buf)
    back = loads(buf.getvalue())
    assert not back.has_postings
    assert back.count_occurrences("AA") == 3
    index.save(tmp_path / "m.ksa")
    assert type(index).load(tmp_path / "m.ksa").stats() == index.stats()


def test_empty_index_roundtrip():
    back = loads(dumps(create_index(5)))
    assert back.stats().node_count == 1
    assert back.k == 5


def test_short_records_survive():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ShortSequenceWarning)
        index = build_index([b"AC", b"ACGTT"], 4)
    back = loads(dumps(index))
    assert back.sequence_lengths == {0: 2, 1: 5}
    assert back.short_sequences == 1


def test_full_fanout_child_count_wraps():
    data = bytes(range(256)) * 2
    for k in (1, 2):
        index = build_index([data], k, BYTES)
        assert len(index.root.children) == 256
        back = loads(dumps(index))
        assert back.stats() == index.stats()
        assert back.locate(b"\x00") == index.locate(b"\x00")


def test_protein_roundtrip():
    index = build_index([b"MNNQACDEFGHIKLMNPQRSTVWY"], 3, PROTEIN)
    back = loads(dumps(index))
    assert list(back.enumerate_kmers()) == list(index.enumerate_kmers())


def test_bad_magic():
    blob = bytearray(dumps(create_index(3)))
    blob[0] ^= 0xFF
    with pytest.raises(BadMagicError):
        loads(bytes(blob))
    with pytest.raises(BadMagicError):
        loads(b"")


def test_unknown_version_with_valid_checksum():
    blob = bytearray(dumps(create_index(3)))
    struct.pack_into("<H", blob, 4, 2)
    body = bytes(blob[:-8])
    blob[-8:] = struct.pack("<Q", crc64_xz(body))
    with pytest.raises(UnsupportedVersionError):
        loads(bytes(blob))


def test_every_single_byte_flip_is_detected():
    blob = dumps(build_index([b"ACGTCCTGG"], 4))
    for pos in range(4, len(blob)):
        bad = bytearray(blob)
        bad[pos] ^= 0x01
        with pytest.raises(ChecksumMismatchError):
            loads(bytes(bad))


def test_error_kinds_are_distinct():
    kinds = {BadMagicError, UnsupportedVersionError, ChecksumMismatchError}
    assert len(kinds) == 3
    assert all(issubclass(kind, IndexFormatError) for kind in kinds)


def test_structural_damage_with_valid_checksum():
    blob = bytearray(dumps(build_index([b"ACGT"], 2)))
    body_start = 4 + 2 + 4 + 2 + 4 + 4 + 12 + 1
    blob[body_start + 2] = 200  # corrupt the first subtree length
    blob[-8:] = struct.pack("<Q", crc64_xz(bytes(blob[:-8])))
    with pytest.raises(IndexFormatError):
        loads(bytes(blob))


def test_truncated():
    blob = dumps(build_index([b"ACGT"], 2))
    with pytest.raises(IndexFormatError):
        loads(blob[:10])


def test_random_roundtrips():
    rng = random.Random(3)
    for _ in range(25):
        k = rng.randint(1, 6)
        seqs = [bytes(rng.choice(b"ACGT") for _ in range(rng.randint(0, 50))) for _ in range(3)]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ShortSequenceWarning)
            index = build_index(seqs, k, postings=rng.random() < 0.5)
        blob = dumps(index)
        back = loads(blob)
        assert dumps(back) == blob
        assert back.stats() == index.stats()
