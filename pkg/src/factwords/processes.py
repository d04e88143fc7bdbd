"""Seeded generators: Santa Fe process, its ternary binarization, Markov chains.

Every generator is a pure function of its parameters and seeds. Randomness
comes from :func:`numpy.random.default_rng` seeded with the caller's
64-bit integer, so identical arguments give identical output.
"""
from __future__ import annotations

import bisect
import functools
import hashlib
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .sequences import ParameterError, SymbolSeq, ValidationError

#: Largest support point held in the inverse-CDF table.
ZIPF_TABLE_SIZE = 2 ** 20
#: Cap for tail draws so that values fit comfortably in int64.
ZIPF_MAX = 2 ** 62
#: Separator symbol of the binarized Santa Fe stream.
SEP = 2


def _check_alpha(alpha):
    alpha = float(alpha)
    if not alpha > 1.0 or not np.isfinite(alpha):
        raise ParameterError(f"Zipf exponent must satisfy alpha > 1, got {alpha}")
    return alpha


def zeta(alpha, terms=4096):
    """Riemann zeta function for real ``alpha > 1``.

    Direct summation of the first ``terms - 1`` terms plus an
    Euler-Maclaurin tail. The neglected remainder is of order
    ``terms ** -(alpha + 5)``, far below 1e-10 relative error.
    """
    alpha = _check_alpha(alpha)
    N = int(terms)
    k = np.arange(1, N, dtype=np.float64)
    head = np.sum(k[::-1] ** -alpha)  # small terms first
    tail = (N ** (1.0 - alpha) / (alpha - 1.0)
            + 0.5 * N ** -alpha
            + alpha * N ** (-alpha - 1.0) / 12.0
            - alpha * (alpha + 1.0) * (alpha + 2.0) * N ** (-alpha - 3.0) / 720.0)
    return float(head + tail)


def zipf_pmf(k, alpha):
    """``P(K = k) = k ** -alpha / zeta(alpha)`` for integer ``k >= 1``."""
    alpha = _check_alpha(alpha)
    k = np.asarray(k, dtype=np.float64)
    return k ** -alpha / zeta(alpha)


@functools.lru_cache(maxsize=8)
def _zipf_cdf_table(alpha):
    k = np.arange(1, ZIPF_TABLE_SIZE + 1, dtype=np.float64)
    cdf = np.cumsum(k ** -alpha) / zeta(alpha)
    cdf.flags.writeable = False
    return cdf


def _as_generator(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_zipf(alpha, rng=None, size=None):
    """Draw from the Zipf distribution on ``{1, 2, ...}`` with exponent ``alpha``.

    Inverse-CDF sampling with a partial-sum table for ``k <= 2**20``. The
    remaining tail mass is sampled by inverting the continuous
    approximation ``P(K > k | K > m) ~ ((k + 1/2) / (m + 1/2)) ** (1 - alpha)``
    and rounding.

    Parameters
    ----------
    alpha : float
        Exponent, must be > 1.
    rng : numpy.random.Generator or int or None
        Random state or seed.
    size : int or None
        ``None`` returns a Python int, otherwise an ``int64`` array.
    """
    alpha = _check_alpha(alpha)
    rng = _as_generator(rng)
    cdf = _zipf_cdf_table(alpha)
    u = rng.random(1 if size is None else size)
    out = np.searchsorted(cdf, u, side="right").astype(np.int64) + 1
    in_tail = out > ZIPF_TABLE_SIZE
    if np.any(in_tail):
        head_mass = cdf[-1]
        v = (u[in_tail] - head_mass) / (1.0 - head_mass)
        v = np.clip(v, 0.0, 1.0 - 1e-16)
        y = (ZIPF_TABLE_SIZE + 0.5) * (1.0 - v) ** (-1.0 / (alpha - 1.0))
        y = np.minimum(np.floor(y + 0.5), float(ZIPF_MAX))
        out[in_tail] = np.maximum(y.astype(np.int64), ZIPF_TABLE_SIZE + 1)
    if size is None:
        return int(out[0])
    return out


def _fact_key(fact_seed):
    return (int(fact_seed) % 2 ** 64).to_bytes(8, "big")


def fact_bit(k, fact_seed):
    """The ``k``-th fact: a keyed BLAKE2b pseudo-random bit, ``k >= 1``."""
    k = int(k)
    if k < 1:
        raise ParameterError(f"fact index must be >= 1, got {k}")
    h = hashlib.blake2b(k.to_bytes(8, "big"), digest_size=1,
                        key=_fact_key(fact_seed))
    return h.digest()[0] & 1


def fact_bits(ks, fact_seed):
    """Vectorized :func:`fact_bit`; hashes each distinct index once."""
    ks = np.asarray(ks, dtype=np.int64)
    if ks.size == 0:
        return np.zeros(0, dtype=np.int8)
    uniq, inverse = np.unique(ks, return_inverse=True)
    if uniq[0] < 1:
        raise ParameterError("fact indices must be >= 1")
    key = _fact_key(fact_seed)
    table = np.fromiter(
        (hashlib.blake2b(int(k).to_bytes(8, "big"), digest_size=1,
                         key=key).digest()[0] & 1 for k in uniq),
        dtype=np.int8, count=uniq.size)
    return table[inverse]


@dataclass(frozen=True)
class SantaFeParams:
    """Parameters that fully determine a Santa Fe realization."""

    alpha: float
    sample_seed: int = 0
    fact_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "alpha", _check_alpha(self.alpha))


class SantaFePair(NamedTuple):
    k: int
    bit: int


@dataclass(frozen=True, eq=False)
class SantaFeSample:
    """A realization ``X_i = (K_i, z_{K_i})`` stored as parallel arrays."""

    ks: np.ndarray
    bits: np.ndarray
    params: SantaFeParams | None = field(default=None, compare=False)

    def __post_init__(self):
        ks = np.asarray(self.ks, dtype=np.int64)
        bits = np.asarray(self.bits, dtype=np.int8)
        if ks.shape != bits.shape or ks.ndim != 1:
            raise ValidationError("ks and bits must be 1-d arrays of equal length")
        object.__setattr__(self, "ks", ks)
        object.__setattr__(self, "bits", bits)

    def __len__(self):
        return int(self.ks.size)

    def __iter__(self):
        for k, b in zip(self.ks.tolist(), self.bits.tolist()):
            yield SantaFePair(k, b)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return SantaFeSample(self.ks[item], self.bits[item], self.params)
        return SantaFePair(int(self.ks[item]), int(self.bits[item]))

    def __eq__(self, other):
        if not isinstance(other, SantaFeSample):
            return NotImplemented
        return (np.array_equal(self.ks, other.ks)
                and np.array_equal(self.bits, other.bits))

    def is_consistent(self):
        """True when every fact index carries a single bit value."""
        if len(self) == 0:
            return True
        order = np.lexsort((self.bits, self.ks))
        ks, bits = self.ks[order], self.bits[order]
        same_k = ks[1:] == ks[:-1]
        return bool(np.all(bits[1:][same_k] == bits[:-1][same_k]))


def gen_zipf_indices(params: SantaFeParams, n):
    """Just the ``K_i`` stream of :func:`gen_santa_fe` (same draws)."""
    if n < 0:
        raise ParameterError("n must be >= 0")
    return sample_zipf(params.alpha, np.random.default_rng(params.sample_seed), size=n)


def gen_santa_fe(params: SantaFeParams, n) -> SantaFeSample:
    """Generate ``n`` Santa Fe pairs ``(K_i, z_{K_i})``."""
    ks = gen_zipf_indices(params, n)
    return SantaFeSample(ks, fact_bits(ks, params.fact_seed), params)


def _as_pair_arrays(pairs):
    if isinstance(pairs, SantaFeSample):
        return pairs.ks, pairs.bits
    if isinstance(pairs, tuple) and len(pairs) == 2 and isinstance(pairs[0], np.ndarray):
        return np.asarray(pairs[0], dtype=np.int64), np.asarray(pairs[1], dtype=np.int8)
    pairs = list(pairs)
    ks = np.array([p[0] for p in pairs], dtype=np.int64)
    bits = np.array([p[1] for p in pairs], dtype=np.int8)
    return ks, bits


def _bit_length(ks):
    lengths = np.zeros(ks.shape, dtype=np.int64)
    v = ks.copy()
    while True:
        live = v > 0
        if not live.any():
            return lengths
        lengths += live
        v >>= 1


def binarize_santa_fe(pairs, return_offsets=False):
    """Encode pairs over the ternary alphabet ``{0, 1, SEP}``.

    Each pair becomes the binary digits of ``k`` (most significant first),
    then the fact bit, then ``SEP``.

    Parameters
    ----------
    pairs : SantaFeSample or iterable of (k, bit)
    return_offsets : bool
        Also return ``ends``, where ``ends[i]`` is the length of the
        encoding of the first ``i + 1`` pairs.
    """
    ks, bits = _as_pair_arrays(pairs)
    if ks.size and ks.min() < 1:
        raise ValidationError("fact indices must be >= 1")
    if bits.size and not np.isin(bits, (0, 1)).all():
        raise ValidationError("fact bits must be 0 or 1")
    digits = _bit_length(ks)
    widths = digits + 2
    ends = np.cumsum(widths)
    total = int(ends[-1]) if ends.size else 0
    starts = ends - widths
    owner = np.repeat(np.arange(ks.size), widths)
    offset = np.arange(total) - starts[owner]
    shift = digits[owner] - 1 - offset
    out = np.full(total, SEP, dtype=np.int64)
    is_digit = shift >= 0
    out[is_digit] = (ks[owner[is_digit]] >> shift[is_digit]) & 1
    bit_pos = ends - 2
    out[bit_pos] = bits
    seq = SymbolSeq(3, out)
    if return_offsets:
        return seq, ends
    return seq


def decode_santa_fe(seq: SymbolSeq) -> SantaFeSample:
    """Inverse of :func:`binarize_santa_fe`."""
    x = seq.symbols
    if seq.alphabet_size != 3:
        raise ValidationError("binarized Santa Fe streams have alphabet_size 3")
    if x.size == 0:
        return SantaFeSample(np.zeros(0, np.int64), np.zeros(0, np.int8))
    if x[-1] != SEP:
        raise ValidationError("stream must end with a separator")
    ends = np.flatnonzero(x == SEP)
    starts = np.concatenate([[0], ends[:-1] + 1])
    widths = ends - starts
    if widths.min() < 2:
        raise ValidationError("each pair needs at least one digit and a bit")
    if np.any(x[starts] != 1):
        raise ValidationError("binary digits of k must start with 1")
    bits = x[ends - 1]
    digits = widths - 1
    if digits.max() > 63:
        raise ValidationError("fact index too large")
    owner = np.repeat(np.arange(ends.size), digits)
    pos = np.arange(owner.size) - np.repeat(np.cumsum(digits) - digits, digits)
    weights = np.left_shift(np.int64(1), (digits[owner] - 1 - pos))
    ks = np.zeros(ends.size, dtype=np.int64)
    np.add.at(ks, owner, x[starts[owner] + pos] * weights)
    return SantaFeSample(ks, bits.astype(np.int8))


@dataclass(frozen=True, eq=False)
class MarkovSpec:
    """A finite-order Markov chain over ``{0, ..., D - 1}``.

    Contexts are indexed in base ``D`` with the oldest symbol most
    significant: context ``(c_1, ..., c_m)`` has index
    ``sum(c_j * D ** (m - j))``.

    Parameters
    ----------
    order : int
        Markov order ``m >= 0``.
    alphabet_size : int
    transitions : array of shape (D ** m, D)
        Row ``c`` is the next-symbol distribution after context ``c``.
    initial : array of shape (D ** m,), optional
        Distribution of the first context. Defaults to uniform.
    """

    order: int
    alphabet_size: int
    transitions: np.ndarray
    initial: np.ndarray | None = None

    def __post_init__(self):
        m, D = int(self.order), int(self.alphabet_size)
        if m < 0 or D < 2:
            raise ValidationError("need order >= 0 and alphabet_size >= 2")
        P = np.array(self.transitions, dtype=np.float64)
        if P.shape != (D ** m, D):
            raise ValidationError(f"transitions must have shape {(D ** m, D)}, got {P.shape}")
        _check_distribution_rows(P, "transition")
        init = (np.full(D ** m, 1.0 / D ** m) if self.initial is None
                else np.array(self.initial, dtype=np.float64))
        if init.shape != (D ** m,):
            raise ValidationError(f"initial must have shape {(D ** m,)}")
        _check_distribution_rows(init[None, :], "initial")
        P.flags.writeable = False
        init.flags.writeable = False
        object.__setattr__(self, "order", m)
        object.__setattr__(self, "alphabet_size", D)
        object.__setattr__(self, "transitions", P)
        object.__setattr__(self, "initial", init)

    @classmethod
    def iid(cls, probs):
        probs = np.asarray(probs, dtype=np.float64)
        return cls(0, probs.size, probs[None, :], np.ones(1))

    @classmethod
    def binary_symmetric(cls, stay=0.9, initial=None):
        """Order-1 binary chain that repeats the last symbol w.p. ``stay``."""
        P = [[stay, 1.0 - stay], [1.0 - stay, stay]]
        return cls(1, 2, P, initial)

    def context_matrix(self):
        """Transition matrix between consecutive length-``order`` contexts."""
        D, m = self.alphabet_size, self.order
        Dm = D ** m
        T = np.zeros((Dm, Dm))
        for c in range(Dm):
            for s in range(D):
                T[c, (c * D + s) % Dm] += self.transitions[c, s]
        return T

    def stationary(self):
        """A stationary distribution over contexts (leading left eigenvector)."""
        T = self.context_matrix()
        w, v = np.linalg.eig(T.T)
        pi = np.real(v[:, np.argmin(np.abs(w - 1.0))])
        pi = np.abs(pi)
        return pi / pi.sum()

    def with_stationary_start(self):
        return MarkovSpec(self.order, self.alphabet_size, self.transitions,
                          self.stationary())

    def entropy_rate(self):
        """Entropy rate in bits/symbol under the stationary distribution."""
        P = self.transitions
        with np.errstate(divide="ignore", invalid="ignore"):
            row_h = -np.sum(np.where(P > 0, P * np.log2(P), 0.0), axis=1)
        return float(self.stationary() @ row_h)


def _check_distribution_rows(P, what):
    if not np.all(np.isfinite(P)) or np.any(P < 0):
        raise ValidationError(f"{what} probabilities must be finite and >= 0")
    bad = np.abs(P.sum(axis=1) - 1.0) > 1e-12
    if np.any(bad):
        raise ValidationError(
            f"{what} rows must sum to 1 (row {int(np.flatnonzero(bad)[0])} does not)")


def _inverse_cdf(cdf_row, u):
    return min(bisect.bisect_right(cdf_row, u), len(cdf_row) - 1)


def gen_markov(spec: MarkovSpec, n, seed=0) -> SymbolSeq:
    """Sample ``n`` symbols from a Markov chain."""
    m, D = spec.order, spec.alphabet_size
    n = int(n)
    if n < m:
        raise ParameterError(f"n={n} is shorter than the chain order {m}")
    rng = np.random.default_rng(seed)
    if m == 0:
        cdf = np.cumsum(spec.transitions[0])
        x = np.searchsorted(cdf, rng.random(n), side="right")
        return SymbolSeq(D, np.minimum(x, D - 1))

    Dm = D ** m
    c = _inverse_cdf(np.cumsum(spec.initial).tolist(), rng.random())
    u = rng.random(n - m).tolist()
    cdfs = [np.cumsum(row).tolist() for row in spec.transitions]
    out = [0] * n
    for j in range(m):
        out[j] = (c // D ** (m - 1 - j)) % D
    i = m
    for ui in u:
        row = cdfs[c]
        s = bisect.bisect_right(row, ui)
        if s >= D:
            s = D - 1
        out[i] = s
        i += 1
        c = (c * D + s) % Dm
    return SymbolSeq(D, np.array(out, dtype=np.int64))
