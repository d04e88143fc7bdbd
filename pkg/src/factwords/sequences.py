"""Finite-alphabet symbol sequences, input validation and on-disk formats.

Two file formats are supported:

* sequence files: one ASCII header line ``D=<int>`` followed by the raw
  symbols, one byte per symbol (so ``D <= 256``);
* pair files: one Santa Fe pair per line, ``k<TAB>bit``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


class ParameterError(ValueError):
    """Raised for parameters outside their mathematical domain."""


class InsufficientDataError(ValueError):
    """Raised when there is not enough data to compute a quantity."""


@dataclass(frozen=True, eq=False)
class SymbolSeq:
    """A sequence over the alphabet ``{0, ..., alphabet_size - 1}``.

    Parameters
    ----------
    alphabet_size : int
        Declared alphabet size ``D >= 2``.
    symbols : array-like of int
        The symbols. Stored as a read-only ``int64`` array.
    """

    alphabet_size: int
    symbols: np.ndarray

    def __post_init__(self):
        D = int(self.alphabet_size)
        if D < 2:
            raise ValidationError(f"alphabet_size must be >= 2, got {D}")
        arr = np.asarray(self.symbols)
        if arr.ndim != 1:
            raise ValidationError("symbols must be one-dimensional")
        if arr.size and not np.issubdtype(arr.dtype, np.integer):
            if not np.all(np.equal(np.mod(arr, 1), 0)):
                raise ValidationError("symbols must be integers")
        arr = np.array(arr, dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= D):
            raise ValidationError(f"symbols must lie in [0, {D})")
        arr.flags.writeable = False
        object.__setattr__(self, "alphabet_size", D)
        object.__setattr__(self, "symbols", arr)

    def __len__(self):
        return int(self.symbols.size)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return SymbolSeq(self.alphabet_size, self.symbols[item])
        return int(self.symbols[item])

    def __eq__(self, other):
        if not isinstance(other, SymbolSeq):
            return NotImplemented
        return (self.alphabet_size == other.alphabet_size
                and np.array_equal(self.symbols, other.symbols))

    def __repr__(self):
        return f"SymbolSeq(alphabet_size={self.alphabet_size}, n={len(self)})"

    def concat(self, other: "SymbolSeq") -> "SymbolSeq":
        if other.alphabet_size != self.alphabet_size:
            raise ValidationError(
                f"alphabet mismatch: {self.alphabet_size} != {other.alphabet_size}")
        return SymbolSeq(self.alphabet_size,
                         np.concatenate([self.symbols, other.symbols]))

    @classmethod
    def from_string(cls, text, alphabet=None):
        """Map characters to symbol ids.

        Without an explicit ``alphabet`` the ids follow sorted character
        order and ``D`` is at least 2. Handy for small literal examples.
        """
        if alphabet is None:
            alphabet = sorted(set(text))
        index = {c: i for i, c in enumerate(alphabet)}
        D = max(len(alphabet), 2)
        return cls(D, np.array([index[c] for c in text], dtype=np.int64))


def check_sequence(x, alphabet_size=None) -> SymbolSeq:
    """Coerce ``x`` to a :class:`SymbolSeq`.

    A plain array needs ``alphabet_size``; if omitted it is inferred as
    ``max(2, max(x) + 1)``.
    """
    if isinstance(x, SymbolSeq):
        if alphabet_size is not None and int(alphabet_size) != x.alphabet_size:
            raise ValidationError(
                f"declared alphabet_size {alphabet_size} != {x.alphabet_size}")
        return x
    if isinstance(x, (str, bytes)):
        raise ValidationError("pass a SymbolSeq or an integer array, not text")
    arr = np.asarray(x)
    if alphabet_size is None:
        alphabet_size = max(2, int(arr.max()) + 1 if arr.size else 2)
    return SymbolSeq(alphabet_size, arr)


def check_same_alphabet(u: SymbolSeq, v: SymbolSeq):
    if u.alphabet_size != v.alphabet_size:
        raise ValidationError(
            f"alphabet mismatch: {u.alphabet_size} != {v.alphabet_size}")


def write_sequence(path, x: SymbolSeq):
    """Write ``x`` as a ``D=<int>`` header line plus one byte per symbol."""
    if x.alphabet_size > 256:
        raise ValidationError("sequence files hold at most 256 symbol values")
    with open(path, "wb") as fh:
        fh.write(f"D={x.alphabet_size}\n".encode("ascii"))
        fh.write(x.symbols.astype(np.uint8).tobytes())


def read_sequence(path) -> SymbolSeq:
    if not os.path.isfile(path):
        raise ValidationError(f"cannot read sequence file: {path}")
    with open(path, "rb") as fh:
        header = fh.readline()
        body = fh.read()
    try:
        key, value = header.decode("ascii").strip().split("=")
        if key != "D":
            raise ValueError
        D = int(value)
    except ValueError:
        raise ValidationError(f"bad sequence header in {path}: {header[:40]!r}")
    return SymbolSeq(D, np.frombuffer(body, dtype=np.uint8))


def write_pairs(path, ks, bits):
    """Write Santa Fe pairs as ``k<TAB>bit`` lines."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for k, b in zip(np.asarray(ks).tolist(), np.asarray(bits).tolist()):
            fh.write(f"{k}\t{b}\n")


def read_pairs(path):
    """Inverse of :func:`write_pairs`; returns ``(ks, bits)`` int arrays."""
    ks, bits = [], []
    with open(path, encoding="ascii") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                k, b = line.split("\t")
                k, b = int(k), int(b)
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: expected 'k<TAB>bit'")
            if k < 1 or b not in (0, 1):
                raise ValidationError(f"{path}:{lineno}: invalid pair ({k}, {b})")
            ks.append(k)
            bits.append(b)
    return np.array(ks, dtype=np.int64), np.array(bits, dtype=np.int8)
