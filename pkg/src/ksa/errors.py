"""Exception types raised by the ksa package."""


class KsaError(Exception):
    """Base class for all domain errors."""


class InvalidParameterError(KsaError, ValueError):
    pass


class KmerLengthError(KsaError, ValueError):
    pass


class PatternTooLongError(KsaError, ValueError):
    def __init__(self, length, k):
        super().__init__(f"pattern length {length} exceeds index k={k}")
        self.length = length
        self.k = k


class AlphabetError(KsaError, ValueError):
    """A symbol outside the declared alphabet.

    ``position`` is the 0-based byte offset within the offending input;
    ``line`` is set (1-based) when the input was line oriented.
    """

    def __init__(self, symbol, position=None, line=None, column=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if position is not None:
            where.append(f"byte {position}")
        loc = f" at {', '.join(where)}" if where else ""
        super().__init__(f"symbol {bytes([symbol])!r} not in alphabet{loc}")
        self.symbol = symbol
        self.position = position
        self.line = line
        self.column = column


class DuplicateSequenceError(KsaError, ValueError):
    pass


class EmptyInputError(KsaError, ValueError):
    pass


class FrozenIndexError(KsaError, RuntimeError):
    pass


class IndexFormatError(KsaError):
    """Malformed serialized index."""


class BadMagicError(IndexFormatError):
    pass


class UnsupportedVersionError(IndexFormatError):
    pass


class ChecksumMismatchError(IndexFormatError):
    pass


class SequenceFormatError(KsaError, ValueError):
    pass
