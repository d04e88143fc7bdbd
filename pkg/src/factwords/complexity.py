"""Computable code lengths standing in for Kolmogorov complexity.

All code lengths are in bits. Order-k maximum likelihood code lengths are
computed exactly from window counts. Windows of length ``k`` are identified
by dense integer ids that are refined one symbol at a time (the id of
``x[i:i+k+1]`` is derived from the id of ``x[i:i+k]`` and ``x[i+k]``), so
every count is exact and no hashing is involved.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .sequences import (ParameterError, SymbolSeq, ValidationError,
                        check_same_alphabet, check_sequence)


# ---------------------------------------------------------------------------
# window ids

def _dense_ids(values):
    """Map integer codes to ids ``0..u-1`` preserving order."""
    if values.size == 0:
        return values.astype(np.int64)
    hi = int(values.max()) + 1
    if hi <= max(4 * values.size, 1 << 16):
        present = np.zeros(hi, dtype=bool)
        present[values] = True
        remap = np.cumsum(present, dtype=np.int64) - 1
        return remap[values]
    return np.unique(values, return_inverse=True)[1].astype(np.int64).ravel()


def iter_window_ids(x: SymbolSeq, k_max=None):
    """Yield ``(k, ids)`` for ``k = 0, 1, ...``.

    ``ids[i]`` identifies the window ``x[i:i+k]`` for ``0 <= i <= n - k``;
    equal windows share ids and the ids are dense, so ``ids.max() + 1`` is
    the number of distinct windows.
    """
    sym = x.symbols
    n = sym.size
    D = x.alphabet_size
    k_max = n if k_max is None else min(int(k_max), n)
    ids = np.zeros(n + 1, dtype=np.int64)
    yield 0, ids
    for k in range(k_max):
        ids = _dense_ids(ids[: n - k] * D + sym[k:])
        yield k + 1, ids


def _nll_from_ids(ctx, joint):
    if joint.size == 0:
        return 0.0
    joint_counts = np.bincount(joint)
    ctx_counts = np.bincount(ctx)
    ctx_of_joint = np.empty(joint_counts.size, dtype=np.int64)
    ctx_of_joint[joint] = ctx
    # each term is count * log2(n_c / n_cs) >= 0; no cancellation
    return float(np.sum(joint_counts * np.log2(ctx_counts[ctx_of_joint] / joint_counts)))


def _check_order(x, k):
    k = int(k)
    if k < 0 or k > len(x):
        raise ParameterError(f"order k must satisfy 0 <= k <= len(x)={len(x)}, got {k}")
    return k


def neg_log_lk(x, k, alphabet_size=None):
    """Minus log2 of the order-``k`` maximum likelihood of ``x``.

    The maximizer is the empirical conditional frequency, so this equals
    ``sum_{i>k} -log2(N(context_i, x_i) / N(context_i))`` over the ``n - k``
    scored positions.
    """
    x = check_sequence(x, alphabet_size)
    k = _check_order(x, k)
    n = len(x)
    if n == 0 or k >= n - 1:
        return 0.0
    prev = None
    for j, ids in iter_window_ids(x, k + 1):
        if j == k + 1:
            return _nll_from_ids(prev[: n - k], ids)
        prev = ids


def neg_log_lk_path(x, k_max, alphabet_size=None):
    """``[neg_log_lk(x, k) for k in range(k_max + 1)]`` in one pass."""
    x = check_sequence(x, alphabet_size)
    k_max = _check_order(x, k_max)
    n = len(x)
    out = np.zeros(k_max + 1)
    prev = None
    for j, ids in iter_window_ids(x, min(k_max + 1, n)):
        if prev is not None:
            out[j - 1] = _nll_from_ids(prev[: n - j + 1], ids)
        prev = ids
    return out


@dataclass(frozen=True)
class NGramTable:
    """Context and successor counts of a fixed order over one sequence.

    Keys are tuples of symbols; ``successor_counts`` is keyed by
    ``(context, symbol)``.
    """

    order: int
    context_counts: dict
    successor_counts: dict
    n: int

    @classmethod
    def from_sequence(cls, x, k, alphabet_size=None):
        x = check_sequence(x, alphabet_size)
        k = _check_order(x, k)
        n = len(x)
        if n - k <= 0:
            return cls(k, {}, {}, n)
        windows = np.lib.stride_tricks.sliding_window_view(x.symbols, k + 1)
        rows, counts = np.unique(windows, axis=0, return_counts=True)
        successor = {}
        contexts = Counter()
        for row, c in zip(rows.tolist(), counts.tolist()):
            ctx = tuple(row[:-1])
            successor[(ctx, row[-1])] = c
            contexts[ctx] += c
        return cls(k, dict(contexts), successor, n)

    def conditional(self, context, symbol):
        """Empirical ``Q(symbol | context)``."""
        return self.successor_counts.get((tuple(context), symbol), 0) / self.context_counts[tuple(context)]

    def neg_log_likelihood(self):
        return float(sum(c * math.log2(self.context_counts[ctx] / c)
                         for (ctx, _), c in self.successor_counts.items()))


# ---------------------------------------------------------------------------
# LZ78

def lz78_phrase_ends(x, alphabet_size=None):
    """Incremental (LZ78) parse of ``x``.

    Returns the indices at which complete phrases end. A trailing partial
    phrase, if any, is not listed.
    """
    x = check_sequence(x, alphabet_size)
    D = x.alphabet_size
    trie = {}
    get = trie.get
    node = 0
    fresh = 1
    ends = []
    append = ends.append
    for i, s in enumerate(x.symbols.tolist()):
        key = node * D + s
        child = get(key)
        if child is None:
            trie[key] = fresh
            fresh += 1
            node = 0
            append(i)
        else:
            node = child
    return np.array(ends, dtype=np.int64)


def _lz78_bits(phrase_counts, D):
    """``sum_{t=1}^{T} (log2 t + log2 D)`` for each ``T`` in ``phrase_counts``."""
    T = np.asarray(phrase_counts, dtype=np.int64)
    top = int(T.max()) if T.size else 0
    log_fact = np.concatenate([[0.0], np.cumsum(np.log2(np.arange(1, top + 1)))])
    return log_fact[T] + T * math.log2(D)


def _phrases_in_prefix(ends, m):
    """Number of LZ78 phrases covering ``x[:m]``, partial last phrase included."""
    if m <= 0:
        return 0
    complete = int(np.searchsorted(ends, m - 1, side="right"))
    last_complete = complete > 0 and ends[complete - 1] == m - 1
    return complete if last_complete else complete + 1


def lz78_code_len(x, alphabet_size=None):
    """LZ78 code length ``sum_{t=1}^{T} (log2 t + log2 D)`` in bits.

    ``T`` counts the phrases of the incremental parse, a trailing partial
    phrase included.
    """
    x = check_sequence(x, alphabet_size)
    ends = lz78_phrase_ends(x)
    return float(_lz78_bits(_phrases_in_prefix(ends, len(x)), x.alphabet_size))


def lz78_prefix_code_lens(x, lengths, alphabet_size=None):
    """LZ78 code lengths of ``x[:m]`` for every ``m`` in ``lengths``.

    The parse of a prefix is the prefix of the parse, so one pass suffices.
    """
    x = check_sequence(x, alphabet_size)
    ends = lz78_phrase_ends(x)
    counts = [_phrases_in_prefix(ends, int(m)) for m in lengths]
    return _lz78_bits(counts, x.alphabet_size)


# ---------------------------------------------------------------------------
# two-part MDL code

def _two_part_penalty(k, n, D):
    return (D - 1) * D ** k / 2.0 * math.log2(n) + 2.0 * math.log2(k + 1) + 1.0


def two_part_code_len(x, k_max=None, alphabet_size=None, return_order=False):
    """Two-part Markov code: best order-``k`` ML length plus a model cost.

    ``min_k neg_log_lk(x, k) + (D-1) D**k / 2 * log2 n + 2 log2(k+1) + 1``
    over ``0 <= k <= k_max`` (default ``len(x)``). The search stops once
    the model cost alone exceeds the best total found.

    Returns the length, or ``(length, argmin_order)`` with ``return_order``.
    """
    x = check_sequence(x, alphabet_size)
    n, D = len(x), x.alphabet_size
    k_max = n if k_max is None else _check_order(x, k_max)
    if n == 0:
        return (1.0, 0) if return_order else 1.0
    best, best_k = math.inf, 0
    prev = None
    for j, ids in iter_window_ids(x, min(k_max + 1, n)):
        if prev is not None:
            k = j - 1
            pen = _two_part_penalty(k, n, D)
            if pen >= best:
                break
            total = _nll_from_ids(prev[: n - k], ids) + pen
            if total < best:
                best, best_k = total, k
        prev = ids
    else:
        # orders k >= n - 1 have zero ML cost
        k = min(k_max + 1, n)
        while k <= k_max:
            pen = _two_part_penalty(k, n, D)
            if pen >= best:
                break
            best, best_k = pen, k
            k += 1
    return (best, best_k) if return_order else best


# ---------------------------------------------------------------------------
# oracles

@dataclass(frozen=True)
class CodeLengthOracle:
    """A named, computable upper bound on Kolmogorov complexity (bits)."""

    name: str
    code_len: Callable[[SymbolSeq], float]
    prefix_code_lens: Callable | None = None

    def __call__(self, x):
        return self.code_len(check_sequence(x))

    def prefixes(self, x, lengths):
        """Code lengths of ``x[:m]`` for each ``m`` in ``lengths``."""
        x = check_sequence(x)
        if self.prefix_code_lens is not None:
            return np.asarray(self.prefix_code_lens(x, lengths), dtype=float)
        return np.array([self.code_len(x[: int(m)]) for m in lengths])


LZ78 = CodeLengthOracle("lz78", lz78_code_len, lz78_prefix_code_lens)
TWO_PART = CodeLengthOracle("two-part", two_part_code_len)

ORACLES = {o.name: o for o in (LZ78, TWO_PART)}


def get_oracle(oracle="lz78") -> CodeLengthOracle:
    """Resolve an oracle given by name, instance or bare callable."""
    if isinstance(oracle, CodeLengthOracle):
        return oracle
    if isinstance(oracle, str):
        try:
            return ORACLES[oracle]
        except KeyError:
            raise ValidationError(
                f"unknown oracle {oracle!r}; choose from {sorted(ORACLES)}") from None
    if callable(oracle):
        return CodeLengthOracle(getattr(oracle, "__name__", "custom"), oracle)
    raise ValidationError(f"not a code-length oracle: {oracle!r}")


def mi_estimate(u, v, oracle="lz78"):
    """Algorithmic mutual information proxy ``C(u) + C(v) - C(uv)``.

    Returned raw; proxy estimates can be negative.
    """
    u, v = check_sequence(u), check_sequence(v)
    check_same_alphabet(u, v)
    oracle = get_oracle(oracle)
    return oracle(u) + oracle(v) - oracle(u.concat(v))
