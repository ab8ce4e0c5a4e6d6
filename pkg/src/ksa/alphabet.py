"""Ordered symbol alphabets over 8-bit codes."""
from __future__ import annotations

from typing import Union

from .errors import AlphabetError, InvalidParameterError

SymbolSeq = Union[bytes, bytearray, memoryview, str]

# rank tables mark non-members with this value; only safe for alphabets < 256
_MISSING = 0xFF


def as_bytes(seq: SymbolSeq) -> bytes:
    """Coerce a symbol sequence to ``bytes`` (str is taken as latin-1)."""
    if isinstance(seq, bytes):
        return seq
    if isinstance(seq, (bytearray, memoryview)):
        return bytes(seq)
    if isinstance(seq, str):
        try:
            return seq.encode("latin-1")
        except UnicodeEncodeError as exc:
            raise AlphabetError(ord(seq[exc.start]) & 0xFF, position=exc.start) from None
    raise TypeError(f"expected bytes or str, got {type(seq).__name__}")


class Alphabet:
    """A non-empty, totally ordered set of distinct byte symbols.

    The order of ``symbols`` defines symbol ranks, which in turn define the
    lexicographic order used when enumerating k-mers.
    """

    __slots__ = ("symbols", "_ranks", "_members", "name")

    def __init__(self, symbols: SymbolSeq, name: str | None = None):
        symbols = as_bytes(symbols)
        if not symbols:
            raise InvalidParameterError("alphabet must contain at least one symbol")
        if len(set(symbols)) != len(symbols):
            raise InvalidParameterError("alphabet symbols must be distinct")
        self.symbols = symbols
        self.name = name
        ranks = bytearray([_MISSING]) * 256
        for rank, sym in enumerate(symbols):
            ranks[sym] = rank
        self._ranks = bytes(ranks)
        self._members = frozenset(symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, symbol: int) -> bool:
        return symbol in self._members

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.symbols == other.symbols

    def __hash__(self) -> int:
        return hash(self.symbols)

    def __repr__(self) -> str:
        if self.name:
            return f"Alphabet.{self.name}"
        return f"Alphabet({self.symbols!r})"

    def rank(self, symbol: int) -> int:
        if symbol not in self._members:
            raise AlphabetError(symbol)
        return self._ranks[symbol]

    def first_invalid(self, data: bytes) -> int:
        """Offset of the first non-member byte in ``data``, or -1."""
        if len(self.symbols) == 256:
            return -1
        leftover = data.translate(None, self.symbols)
        if not leftover:
            return -1
        return data.index(leftover[0])

    def check(self, data: bytes) -> None:
        pos = self.first_invalid(data)
        if pos >= 0:
            raise AlphabetError(data[pos], position=pos)

    def to_ranks(self, data: bytes) -> bytes:
        """Map member symbols to their ranks; raises on any non-member."""
        self.check(data)
        return data.translate(self._ranks)

    def from_ranks(self, ranks) -> bytes:
        syms = self.symbols
        return bytes(syms[r] for r in ranks)

    @classmethod
    def from_name(cls, name: str) -> "Alphabet":
        try:
            return _BUILTIN[name]
        except KeyError:
            raise InvalidParameterError(
                f"unknown alphabet {name!r}; expected one of {sorted(_BUILTIN)}"
            ) from None


DNA = Alphabet(b"ACGT", name="DNA")
PROTEIN = Alphabet(b"ACDEFGHIKLMNPQRSTVWY", name="PROTEIN")
BYTES = Alphabet(bytes(range(256)), name="BYTES")

_BUILTIN = {"dna": DNA, "protein": PROTEIN, "bytes": BYTES}
