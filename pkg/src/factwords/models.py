"""scikit-learn style wrappers around the estimators.

These follow the usual conventions (constructor stores hyper-parameters
verbatim, ``fit`` returns ``self``, fitted attributes end in ``_``) so
they work with ``clone``, ``get_params`` and ``Pipeline``.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .complexity import get_oracle
from .estimators import estimate_order, hilberg_fit, subword_profile
from .experiments import heaps_zipf_analysis, tokenize
from .sequences import ValidationError, check_sequence


def check_sequences(X, alphabet_size=None):
    """Validate a collection of sequences (a single sequence is wrapped)."""
    if hasattr(X, "alphabet_size") or (
            isinstance(X, np.ndarray) and X.ndim == 1 and X.dtype != object):
        X = [X]
    return [check_sequence(x, alphabet_size) for x in X]


class MarkovOrderEstimator(BaseEstimator):
    """Markov order and vocabulary proxy of a single sequence.

    Parameters
    ----------
    oracle : {"lz78", "two-part"} or CodeLengthOracle
        Code length standing in for Kolmogorov complexity.
    alphabet_size : int or None
        Needed only when ``X`` is a bare integer array.

    Attributes
    ----------
    order_ : int
    vocabulary_size_ : int
        Distinct windows of length ``max(order_, 1)``.
    code_length_ : float
        Oracle code length in bits.
    neg_log_lk_ : ndarray
        Order-k ML code lengths for ``k = 0 .. order_``.
    """

    def __init__(self, oracle="lz78", alphabet_size=None):
        self.oracle = oracle
        self.alphabet_size = alphabet_size

    def fit(self, X, y=None):
        x = check_sequence(X, self.alphabet_size)
        est = estimate_order(x, get_oracle(self.oracle))
        self.order_ = est.order
        self.vocabulary_size_ = est.vocabulary
        self.code_length_ = est.code_len
        self.neg_log_lk_ = np.asarray(est.neg_log_lk)
        self.n_symbols_ = len(x)
        self.alphabet_size_ = x.alphabet_size
        return self


class SequenceFeatures(TransformerMixin, BaseEstimator):
    """Map each sequence to ``[code_len, order, vocabulary]``."""

    def __init__(self, oracle="lz78", alphabet_size=None):
        self.oracle = oracle
        self.alphabet_size = alphabet_size

    def fit(self, X, y=None):
        get_oracle(self.oracle)
        self.n_features_out_ = 3
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_out_")
        oracle = get_oracle(self.oracle)
        rows = []
        for x in check_sequences(X, self.alphabet_size):
            est = estimate_order(x, oracle)
            rows.append((est.code_len, est.order, est.vocabulary))
        return np.array(rows, dtype=float).reshape(-1, 3)

    def get_feature_names_out(self, input_features=None):
        return np.array(["code_len", "order", "vocabulary"], dtype=object)


class SubwordComplexity(TransformerMixin, BaseEstimator):
    """Map each sequence to its subword complexity at the given window lengths."""

    def __init__(self, window_lengths=(1, 2, 3, 4), alphabet_size=None):
        self.window_lengths = window_lengths
        self.alphabet_size = alphabet_size

    def fit(self, X, y=None):
        ks = [int(k) for k in np.atleast_1d(self.window_lengths)]
        if not ks or min(ks) < 1:
            raise ValidationError("window_lengths must be positive integers")
        self.window_lengths_ = ks
        return self

    def transform(self, X):
        check_is_fitted(self, "window_lengths_")
        seqs = check_sequences(X, self.alphabet_size)
        return np.array([subword_profile(x, self.window_lengths_) for x in seqs],
                        dtype=np.int64).reshape(len(seqs), -1)


class HilbergRegressor(RegressorMixin, BaseEstimator):
    """Power-law fit ``s ~ c * n ** beta`` (log-log least squares).

    ``fit(n, s)`` takes block lengths ``n`` (1-d, or a single-column 2-d
    array) and nonnegative values ``s``; points with ``s <= 0`` are dropped.

    Attributes
    ----------
    beta_ : float
        Slope clipped at zero.
    slope_, intercept_ : float
        Unclipped line in ``log2`` coordinates, used by ``predict``.
    stderr_ : float
    fit_ : HilbergFit
    """

    def fit(self, X, y):
        n = np.asarray(X, dtype=float)
        if n.ndim == 2:
            if n.shape[1] != 1:
                raise ValidationError("X must have a single column of block lengths")
            n = n[:, 0]
        fit = hilberg_fit(n=n, s=y)
        self.fit_ = fit
        self.beta_ = fit.beta
        self.slope_ = fit.slope
        self.intercept_ = fit.intercept
        self.stderr_ = fit.stderr
        return self

    def predict(self, X):
        check_is_fitted(self, "fit_")
        n = np.asarray(X, dtype=float).reshape(len(X), -1)[:, 0]
        return 2.0 ** (self.intercept_ + self.slope_ * np.log2(n))


class TypeTokenAnalyzer(BaseEstimator):
    """Heaps and Zipf statistics of a token stream.

    ``X`` may be raw text (tokenized on whitespace, lowercased, edge
    punctuation stripped) or an iterable of tokens.
    """

    def __init__(self, min_freq=5):
        self.min_freq = min_freq

    def fit(self, X, y=None):
        tokens = tokenize(X) if isinstance(X, str) else list(X)
        res = heaps_zipf_analysis(tokens, min_freq=self.min_freq)
        self.type_token_curve_ = res.type_token_curve
        self.rank_freq_ = res.rank_freq_table
        self.heaps_fit_ = res.heaps_fit
        self.heaps_exponent_ = res.heaps_fit.beta
        self.zipf_slope_ = res.zipf_slope
        self.n_tokens_ = len(tokens)
        self.n_types_ = len(res.rank_freq_table)
        return self
