"""scikit-learn compatible wrapper around :class:`~ksa.trie.KmerIndex`."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .alphabet import Alphabet, as_bytes
from .errors import InvalidParameterError
from .trie import KmerIndex


def _check_sequences(X, name="X") -> list[bytes]:
    if isinstance(X, (str, bytes, bytearray)):
        raise InvalidParameterError(
            f"{name} must be an iterable of sequences, not a single sequence")
    if isinstance(X, np.ndarray):
        if X.ndim == 2 and X.shape[1] == 1:
            X = X[:, 0]
        elif X.ndim != 1:
            raise InvalidParameterError(f"{name} must be 1-d, got shape {X.shape}")
    return [as_bytes(x) for x in X]


class KmerIndexEstimator(BaseEstimator):
    """Index sequences in ``fit``; report pattern occurrence counts in ``predict``.

    Parameters
    ----------
    k : int, default=10
        Window length.
    alphabet : {'dna', 'protein', 'bytes'} or Alphabet, default='dna'
    postings : bool, default=True
        Keep occurrence positions, enabling :meth:`locate`.

    Attributes
    ----------
    index_ : KmerIndex
        The frozen index built by :meth:`fit`.
    n_sequences_ : int

    Examples
    --------
    >>> est = KmerIndexEstimator(k=4).fit(["ACGTCCTGG"])
    >>> est.predict(["TCCT", "GG"]).tolist()
    [1, 0]
    """

    def __init__(self, k=10, alphabet="dna", postings=True):
        self.k = k
        self.alphabet = alphabet
        self.postings = postings

    def _alphabet(self) -> Alphabet:
        if isinstance(self.alphabet, Alphabet):
            return self.alphabet
        return Alphabet.from_name(self.alphabet)

    def fit(self, X, y=None):
        sequences = _check_sequences(X)
        index = KmerIndex(self.k, self._alphabet(), postings=self.postings)
        for seq_id, seq in enumerate(sequences):
            index.index_sequence(seq, seq_id)
        self.index_ = index.freeze()
        self.n_sequences_ = len(sequences)
        return self

    def predict(self, X) -> np.ndarray:
        """Occurrence count of each pattern (window-prefix semantics below k)."""
        check_is_fitted(self, "index_")
        patterns = _check_sequences(X)
        return np.array([self.index_.count_occurrences(p) for p in patterns], dtype=np.int64)

    def transform(self, X) -> np.ndarray:
        """Counts as a single-column feature matrix."""
        return self.predict(X).reshape(-1, 1)

    def locate(self, pattern):
        check_is_fitted(self, "index_")
        return self.index_.locate(pattern)

    def _more_tags(self):
        return {"X_types": ["string"], "requires_fit": True}
