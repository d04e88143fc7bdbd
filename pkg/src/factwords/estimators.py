"""Measured quantities: subword complexity, Markov order, vocabulary, facts,
power-law (Hilberg) exponents and diagnostics of the source conditions."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .complexity import _nll_from_ids, get_oracle, iter_window_ids
from .sequences import (InsufficientDataError, ParameterError, SymbolSeq,
                        ValidationError, check_sequence)


def subword_complexity(x, k, alphabet_size=None):
    """Number of distinct length-``k`` windows of ``x``, ``1 <= k <= len(x)``."""
    x = check_sequence(x, alphabet_size)
    k = int(k)
    if k < 1 or k > len(x):
        raise ParameterError(f"window length must satisfy 1 <= k <= {len(x)}, got {k}")
    for j, ids in iter_window_ids(x, k):
        if j == k:
            return int(ids.max()) + 1


def subword_profile(x, ks, alphabet_size=None):
    """``[subword_complexity(x, k) for k in ks]`` sharing one refinement pass."""
    x = check_sequence(x, alphabet_size)
    ks = [int(k) for k in ks]
    if ks and (min(ks) < 1 or max(ks) > len(x)):
        raise ParameterError(f"window lengths must lie in [1, {len(x)}]")
    wanted = set(ks)
    found = {}
    for j, ids in iter_window_ids(x, max(ks, default=0)):
        if j in wanted:
            found[j] = int(ids.max()) + 1
    return [found[k] for k in ks]


@dataclass(frozen=True)
class OrderEstimate:
    """Markov order estimate together with the quantities that produced it."""

    order: int
    vocabulary: int
    code_len: float
    neg_log_lk: tuple


def estimate_order(x, oracle="lz78", alphabet_size=None, code_len=None) -> OrderEstimate:
    """Run the Markov order estimator and read off the vocabulary proxy.

    The order is the least ``k`` with ``neg_log_lk(x, k) <= C(x)`` where
    ``C`` is the oracle's code length. The vocabulary is the number of
    distinct windows of length ``max(order, 1)``. Pass ``code_len`` when
    ``C(x)`` is already known.
    """
    x = check_sequence(x, alphabet_size)
    n = len(x)
    if n < 1:
        raise InsufficientDataError("need at least one symbol")
    if code_len is None:
        code_len = get_oracle(oracle)(x)
    code_len = float(code_len)
    path = []
    prev = None
    order = None
    for j, ids in iter_window_ids(x):
        if prev is not None:
            k = j - 1
            if order is None:
                nll = _nll_from_ids(prev[: n - k], ids)
                path.append(nll)
                if nll <= code_len:
                    order = k
            if order is not None and j >= max(order, 1):
                window = ids if j == max(order, 1) else prev
                return OrderEstimate(order, int(window.max()) + 1, code_len, tuple(path))
        prev = ids
    raise AssertionError("order search must stop by k = n - 1")


def markov_order(x, oracle="lz78", alphabet_size=None):
    """Markov order estimate ``min{k >= 0 : -log2 L_k(x) <= C(x)}``."""
    return estimate_order(x, oracle, alphabet_size).order


def vocab_proxy(x, oracle="lz78", alphabet_size=None):
    """Distinct windows of the estimated-order length, at least 1."""
    return estimate_order(x, oracle, alphabet_size).vocabulary


def count_facts(ks):
    """Smallest positive integer missing from ``ks``.

    A text mentioning fact indices ``ks`` describes ``count_facts(ks) - 1``
    initial facts.
    """
    ks = np.asarray(ks, dtype=np.int64).ravel()
    if ks.size and ks.min() < 1:
        raise ParameterError("fact indices must be >= 1")
    seen = np.zeros(ks.size + 2, dtype=bool)
    seen[ks[ks <= ks.size + 1]] = True
    seen[0] = True
    return int(np.argmin(seen))


def count_facts_prefixes(ks, lengths):
    """``[count_facts(ks[:m]) for m in lengths]`` in one pass over ``ks``."""
    ks = np.asarray(ks, dtype=np.int64).ravel()
    lengths = [int(m) for m in lengths]
    if ks.size and ks.min() < 1:
        raise ParameterError("fact indices must be >= 1")
    # first_seen[k] = first position where k occurs
    cap = ks.size + 2
    first_seen = np.full(cap, np.iinfo(np.int64).max)
    small = ks < cap
    pos = np.flatnonzero(small)
    np.minimum.at(first_seen, ks[small], pos)
    # U(m) = min{k >= 1: first_seen[k] >= m}; running max of first_seen gives it
    reach = np.maximum.accumulate(first_seen[1:])
    return [int(np.searchsorted(reach, m, side="left")) + 1 for m in lengths]


@dataclass(frozen=True)
class HilbergFit:
    """Least-squares log-log slope clipped at zero.

    ``slope`` is the unclipped slope, ``beta = max(slope, 0)``. ``dropped``
    counts points discarded because ``s <= 0``.
    """

    beta: float
    stderr: float
    n_min: int
    n_max: int
    points_used: int
    slope: float = float("nan")
    intercept: float = float("nan")
    dropped: int = 0

    def to_text(self, prefix=""):
        """``key=value`` lines, one per field."""
        return "".join(f"{prefix}{k}={_fmt(v)}\n" for k, v in asdict(self).items())

    @classmethod
    def from_text(cls, text, prefix=""):
        values = {}
        for line in text.splitlines():
            if line.startswith(prefix) and "=" in line:
                key, value = line[len(prefix):].split("=", 1)
                values[key] = value
        kwargs = {}
        for name, typ in (("beta", float), ("stderr", float), ("n_min", int),
                          ("n_max", int), ("points_used", int), ("slope", float),
                          ("intercept", float), ("dropped", int)):
            kwargs[name] = typ(values[name])
        return cls(**kwargs)


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def hilberg_fit(points=None, *, n=None, s=None) -> HilbergFit:
    """Fit ``s ~ c * n ** beta`` on a log-log scale.

    Parameters
    ----------
    points : iterable of (n, s), optional
        Alternatively pass ``n`` and ``s`` arrays by keyword.

    Returns
    -------
    HilbergFit
        ``beta`` is the least-squares slope of ``log2 s`` on ``log2 n``
        over points with ``s > 0``, clipped below at 0.

    Raises
    ------
    InsufficientDataError
        Fewer than three usable points.
    """
    if points is not None:
        pts = np.asarray(list(points), dtype=np.float64).reshape(-1, 2)
        n, s = pts[:, 0], pts[:, 1]
    n = np.asarray(n, dtype=np.float64).ravel()
    s = np.asarray(s, dtype=np.float64).ravel()
    if n.shape != s.shape:
        raise ValidationError("n and s must have equal length")
    if np.unique(n).size != n.size:
        raise ValidationError("grid points must have distinct n")
    if np.any(n <= 0):
        raise ValidationError("grid points must have n > 0")
    keep = np.isfinite(s) & (s > 0)
    dropped = int(n.size - keep.sum())
    if keep.sum() < 3:
        raise InsufficientDataError(
            f"need >= 3 points with s > 0, have {int(keep.sum())}")
    lx, ly = np.log2(n[keep]), np.log2(s[keep])
    dx = lx - lx.mean()
    sxx = float(dx @ dx)
    slope = float(dx @ (ly - ly.mean())) / sxx
    intercept = float(ly.mean() - slope * lx.mean())
    resid = ly - (intercept + slope * lx)
    dof = lx.size - 2
    stderr = float(np.sqrt((resid @ resid) / dof / sxx))
    return HilbergFit(
        beta=max(slope, 0.0), stderr=stderr,
        n_min=int(n[keep].min()), n_max=int(n[keep].max()),
        points_used=int(keep.sum()), slope=slope, intercept=intercept,
        dropped=dropped)


@dataclass(frozen=True)
class ConditionReport:
    """Plug-in checks of the four source conditions.

    ``h_hat`` estimates the complexity rate (bits/symbol), ``H_inv_hat`` the
    inverse complexity rate, ``monotonicity_violations`` counts grid points
    where the first half codes longer than the second half by more than
    the sampling noise allows.
    """

    h_hat: float
    monotonicity_violations: int
    H_inv_hat: float
    alphabet_size: int
    grid: tuple = ()

    def inverse_rate_flagged(self, limit=5.0):
        """True when ``H_inv_hat`` suggests a vanishing complexity rate.

        The default flags sources coding below 0.2 bits/symbol on average.
        """
        return not np.isfinite(self.H_inv_hat) or self.H_inv_hat > limit

    def to_text(self, prefix="conditions."):
        return (f"{prefix}h_hat={self.h_hat:.10g}\n"
                f"{prefix}monotonicity_violations={self.monotonicity_violations}\n"
                f"{prefix}H_inv_hat={self.H_inv_hat:.10g}\n"
                f"{prefix}alphabet_size={self.alphabet_size}\n")


def condition_diagnostics(samples, oracle="lz78", tol_sigma=3.0) -> ConditionReport:
    """Diagnose conditions (complexity rate, monotonicity, inverse rate, alphabet).

    Parameters
    ----------
    samples : sequence of SymbolSeq
        Replicate samples at several (dyadic) lengths from one source.
        Samples are grouped by length.
    oracle : str or CodeLengthOracle
    tol_sigma : float
        A grid point is a monotonicity violation when the mean code length
        of the first halves exceeds that of the second halves by more than
        ``tol_sigma`` standard errors of the paired difference. With a
        single replicate any excess counts.
    """
    oracle = get_oracle(oracle)
    samples = [check_sequence(x) for x in samples]
    samples = [x for x in samples if len(x) >= 2]
    if not samples:
        raise InsufficientDataError("empty grid")
    D = samples[0].alphabet_size
    if any(x.alphabet_size != D for x in samples):
        raise ValidationError("samples must share one alphabet")
    by_len = {}
    for x in samples:
        by_len.setdefault(len(x), []).append(x)
    grid = sorted(by_len)

    violations = 0
    inv_rates = []
    for length in grid:
        group = by_len[length]
        half = length // 2
        full = np.array([oracle(x) for x in group])
        first = np.array([oracle(x[:half]) for x in group])
        second = np.array([oracle(x[half: 2 * half]) for x in group])
        diff = first - second
        if diff.size > 1:
            se = diff.std(ddof=1) / np.sqrt(diff.size)
            if diff.mean() > tol_sigma * se and diff.mean() > 0:
                violations += 1
        elif diff.mean() > 0:
            violations += 1
        with np.errstate(divide="ignore"):
            inv_rates.append(np.mean(length / full))
    top = grid[-1]
    h_hat = float(np.mean([oracle(x) for x in by_len[top]]) / top)
    return ConditionReport(h_hat=h_hat, monotonicity_violations=violations,
                           H_inv_hat=float(np.mean(inv_rates)), alphabet_size=D,
                           grid=tuple(grid))
