"""Multi-seed experiments on dyadic grids.

``run_sandwich`` estimates the four exponents of the facts/words chain:
facts (Santa Fe only), redundancy, block mutual information, and
vocabulary. For Santa Fe sources the grid counts *pairs*: facts are read
from the first ``n`` pairs and every other quantity from the ternary
encoding of those same pairs. For Markov sources the grid counts symbols.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from . import __version__
from .complexity import get_oracle
from .estimators import (HilbergFit, count_facts_prefixes, estimate_order,
                         hilberg_fit)
from .processes import (MarkovSpec, SantaFeParams, binarize_santa_fe,
                        gen_markov, gen_santa_fe, gen_zipf_indices)
from .sequences import InsufficientDataError, SymbolSeq, ValidationError

#: Additive slack used for every exponent ordering check.
ORDERING_TOL = 0.1
EXPONENTS = ("facts", "redundancy", "mi", "words")
TABLE_COLUMNS = ("n", "seed", "facts", "length", "code_len", "mi", "vocab", "order")


class UnsupportedMeasurementError(ValueError):
    """The requested quantity is not defined for this source."""


# ---------------------------------------------------------------------------
# sources

@dataclass(frozen=True)
class Realization:
    symbols: SymbolSeq
    ends: np.ndarray | None = None
    ks: np.ndarray | None = None

    def cut(self, n):
        """Symbol offset after the first ``n`` process steps."""
        if self.ends is None:
            return int(n)
        return int(self.ends[n - 1]) if n > 0 else 0


@dataclass(frozen=True)
class SantaFeSource:
    """Binarized Santa Fe process. The facts are fixed by ``fact_seed``."""

    alpha: float
    fact_seed: int = 0
    name = "santa-fe"

    def sample(self, n, seed) -> Realization:
        pairs = gen_santa_fe(SantaFeParams(self.alpha, seed, self.fact_seed), n)
        seq, ends = binarize_santa_fe(pairs, return_offsets=True)
        return Realization(seq, ends, pairs.ks)

    def describe(self):
        return {"source": self.name, "alpha": f"{self.alpha:g}",
                "fact_seed": str(self.fact_seed), "unit": "pairs"}


@dataclass(frozen=True)
class MarkovSource:
    spec: MarkovSpec
    name = "markov"

    def sample(self, n, seed) -> Realization:
        return Realization(gen_markov(self.spec, n, seed))

    def describe(self):
        P = ";".join(",".join(f"{p:g}" for p in row) for row in self.spec.transitions)
        return {"source": self.name, "order": str(self.spec.order),
                "alphabet_size": str(self.spec.alphabet_size),
                "transitions": P, "unit": "symbols"}


def as_source(source):
    if isinstance(source, (SantaFeSource, MarkovSource)):
        return source
    if isinstance(source, MarkovSpec):
        return MarkovSource(source)
    if isinstance(source, SantaFeParams):
        return SantaFeSource(source.alpha, source.fact_seed)
    raise ValidationError(f"not a process spec: {source!r}")


def dyadic_grid(lo_log2, hi_log2):
    if lo_log2 > hi_log2 or lo_log2 < 0:
        raise ValidationError("need 0 <= grid-min-log2 <= grid-max-log2")
    return tuple(2 ** j for j in range(lo_log2, hi_log2 + 1))


def _check_grid(grid):
    grid = tuple(int(n) for n in grid)
    if not grid:
        return grid
    if any(n < 1 or n & (n - 1) for n in grid):
        raise ValidationError("grid points must be powers of two")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError("grid must be strictly increasing")
    return grid


def _parallel_map(func, items, n_jobs):
    if n_jobs in (None, 1):
        return [func(i) for i in items]
    return Parallel(n_jobs=n_jobs)(delayed(func)(i) for i in items)


# ---------------------------------------------------------------------------
# sandwich experiment

@dataclass(frozen=True)
class SandwichRow:
    n: int
    seed: int
    facts: int | None
    length: int
    code_len: float
    mi: float
    vocab: int
    order: int


@dataclass
class SandwichReport:
    """Seed-averaged measurements and their four fitted exponents.

    A fit is ``None`` when fewer than three grid points were usable (the
    name is then listed in ``insufficient``) or, for facts, when the source
    has no facts.
    """

    facts_exp: HilbergFit | None
    redundancy_exp: HilbergFit | None
    mi_exp: HilbergFit | None
    words_exp: HilbergFit | None
    grid: tuple
    seeds: int
    orderings: dict
    h_hat: float = float("nan")
    means: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    insufficient: tuple = ()

    def exponent(self, name):
        fit = getattr(self, f"{name}_exp")
        return None if fit is None else fit.beta


def _sandwich_cell(source, grid, seed, oracle, with_facts):
    top = grid[-1]
    real = source.sample(2 * top, seed)
    x = real.symbols
    cuts = [real.cut(n) for n in grid]
    cuts2 = [real.cut(2 * n) for n in grid]
    lens = oracle.prefixes(x, cuts + cuts2)
    first, joint = lens[: len(grid)], lens[len(grid):]
    facts = (count_facts_prefixes(real.ks, grid) if with_facts
             else [None] * len(grid))
    rows = []
    for i, n in enumerate(grid):
        a, b = cuts[i], cuts2[i]
        second = oracle(x[a:b])
        est = estimate_order(x[:a], oracle, code_len=first[i])
        rows.append(SandwichRow(
            n=n, seed=seed, facts=facts[i], length=a, code_len=float(first[i]),
            mi=float(first[i] + second - joint[i]),
            vocab=est.vocabulary, order=est.order))
    return rows, float(joint[-1]), cuts2[-1]


def _fit_or_none(grid, values):
    try:
        return hilberg_fit(n=grid, s=values)
    except InsufficientDataError:
        return None


def orderings_from(fits, tol=ORDERING_TOL):
    """``a<=b`` flags for every pair taken in chain order, with slack ``tol``."""
    out = {}
    for i, a in enumerate(EXPONENTS):
        for b in EXPONENTS[i + 1:]:
            fa, fb = fits.get(a), fits.get(b)
            if fa is None or fb is None:
                continue
            out[f"{a}<={b}"] = bool(fa.beta <= fb.beta + tol)
    return out


def run_sandwich(source, grid, seeds=20, oracle="lz78", seed_base=0,
                 facts=None, n_jobs=1) -> SandwichReport:
    """Estimate the four exponents of the facts/words chain.

    Parameters
    ----------
    source : SantaFeSource, MarkovSource, MarkovSpec or SantaFeParams
    grid : sequence of powers of two
        Block lengths ``n``; each seed draws ``2 * max(grid)`` steps and
        every ``n`` uses its prefix.
    seeds : int
        Replications, with sample seeds ``seed_base + i``.
    oracle : str or CodeLengthOracle
    facts : bool or None
        Measure the fact counter. ``None`` means "when the source has
        facts"; ``True`` on a Markov source raises.
    n_jobs : int
        joblib worker count for the per-seed cells.
    """
    source = as_source(source)
    grid = _check_grid(grid)
    oracle = get_oracle(oracle)
    seeds = int(seeds)
    if seeds < 1:
        raise ValidationError("seeds must be >= 1")
    has_facts = isinstance(source, SantaFeSource)
    if facts and not has_facts:
        raise UnsupportedMeasurementError(
            f"fact counting needs a Santa Fe source, got {source.name}")
    with_facts = has_facts if facts is None else bool(facts)

    config = dict(source.describe())
    config.update({"oracle": oracle.name, "seeds": str(seeds),
                   "seed_base": str(seed_base),
                   "grid": ",".join(str(n) for n in grid)})
    if not grid:
        return SandwichReport(None, None, None, None, grid, seeds, {},
                              config=config, insufficient=EXPONENTS)

    seed_list = [seed_base + i for i in range(seeds)]
    cells = _parallel_map(
        lambda s: _sandwich_cell(source, grid, s, oracle, with_facts),
        seed_list, n_jobs)
    rows = [r for cell_rows, _, _ in cells for r in cell_rows]
    h_hat = sum(c for _, c, _ in cells) / sum(m for _, _, m in cells)

    g = np.array(grid, dtype=float)
    table = {name: np.zeros((seeds, len(grid))) for name in
             ("facts", "redundancy", "mi", "words", "order")}
    for r in rows:
        i, j = r.seed - seed_base, grid.index(r.n)
        table["facts"][i, j] = np.nan if r.facts is None else r.facts
        table["redundancy"][i, j] = r.code_len - h_hat * r.length
        table["mi"][i, j] = r.mi
        table["words"][i, j] = r.vocab
        table["order"][i, j] = r.order
    means = {k: v.mean(axis=0) for k, v in table.items()}

    fits = {name: _fit_or_none(g, means[name]) for name in EXPONENTS
            if name != "facts" or with_facts}
    insufficient = tuple(name for name in EXPONENTS
                         if name in fits and fits[name] is None)
    return SandwichReport(
        facts_exp=fits.get("facts"), redundancy_exp=fits["redundancy"],
        mi_exp=fits["mi"], words_exp=fits["words"], grid=grid, seeds=seeds,
        orderings=orderings_from(fits), h_hat=float(h_hat),
        means={k: v.tolist() for k, v in means.items()}, rows=rows,
        config=config, insufficient=insufficient)


def facts_exponent(alpha, grid, seeds=20, seed_base=0) -> HilbergFit:
    """Exponent of the seed-averaged fact counter of a Santa Fe process.

    Only the Zipf index stream is drawn; fact values do not affect ``U``.
    """
    grid = _check_grid(grid)
    U = np.zeros(len(grid))
    for i in range(int(seeds)):
        ks = gen_zipf_indices(SantaFeParams(alpha, seed_base + i), grid[-1])
        U += count_facts_prefixes(ks, grid)
    return hilberg_fit(n=grid, s=U / seeds)


# ---------------------------------------------------------------------------
# Markov order consistency

@dataclass
class ConsistencyReport:
    """Estimated orders per grid point (rows) and seed (columns)."""

    grid: tuple
    seeds: tuple
    orders: np.ndarray
    true_order: int | None
    config: dict = field(default_factory=dict)

    @property
    def median(self):
        return np.median(self.orders, axis=1)

    @property
    def hit_rate(self):
        """Fraction of seeds recovering ``true_order`` at each ``n``."""
        if self.true_order is None:
            return None
        return np.mean(self.orders == self.true_order, axis=1)


def _consistency_cell(source, grid, seed, oracle):
    real = source.sample(grid[-1], seed)
    return [estimate_order(real.symbols[: real.cut(n)], oracle).order for n in grid]


def run_markov_consistency(source, grid, seeds=20, oracle="lz78", seed_base=0,
                           n_jobs=1) -> ConsistencyReport:
    """Markov order estimates on nested prefixes, per seed."""
    source = as_source(source)
    grid = _check_grid(grid)
    oracle = get_oracle(oracle)
    seed_list = tuple(seed_base + i for i in range(int(seeds)))
    cols = _parallel_map(lambda s: _consistency_cell(source, grid, s, oracle),
                         seed_list, n_jobs)
    orders = np.array(cols, dtype=np.int64).T.reshape(len(grid), len(seed_list))
    true_order = source.spec.order if isinstance(source, MarkovSource) else None
    config = dict(source.describe())
    config.update({"oracle": oracle.name, "seeds": str(len(seed_list)),
                   "seed_base": str(seed_base)})
    return ConsistencyReport(grid, seed_list, orders, true_order, config)


# ---------------------------------------------------------------------------
# type/token statistics

_PUNCT = re.compile(r"^\W+|\W+$")


def tokenize(text):
    """Whitespace tokens, lowercased, with edge punctuation stripped."""
    out = []
    for raw in text.split():
        tok = _PUNCT.sub("", raw.lower())
        if tok:
            out.append(tok)
    return out


@dataclass
class HeapsZipfResult:
    type_token_curve: list
    rank_freq_table: list
    heaps_fit: HilbergFit
    zipf_slope: float


def type_token_curve(tokens):
    """Distinct types in each dyadic prefix (and the full list)."""
    tokens = list(tokens)
    N = len(tokens)
    if N == 0:
        raise InsufficientDataError("no tokens")
    marks = []
    m = 1
    while m <= N:
        marks.append(m)
        m *= 2
    if marks[-1] != N:
        marks.append(N)
    seen = set()
    curve = []
    j = 0
    for i, tok in enumerate(tokens, 1):
        seen.add(tok)
        if i == marks[j]:
            curve.append((i, len(seen)))
            j += 1
    return curve


def zipf_slope(freqs, min_freq=5):
    """Log-log slope of frequency against rank over ranks with freq >= ``min_freq``."""
    f = np.sort(np.asarray(freqs, dtype=float))[::-1]
    f = f[f >= min_freq]
    if f.size < 2:
        return float("nan")
    r = np.arange(1, f.size + 1, dtype=float)
    return float(np.polyfit(np.log2(r), np.log2(f), 1)[0])


def heaps_zipf_analysis(tokens, min_freq=5) -> HeapsZipfResult:
    """Heaps (type growth) exponent and Zipf rank-frequency slope."""
    tokens = list(tokens)
    curve = type_token_curve(tokens)
    counts = Counter(tokens)
    table = sorted(counts.items(), key=lambda kv: (-kv[1], str(kv[0])))
    rank_freq = [(r, tok, c) for r, (tok, c) in enumerate(table, 1)]
    if len(curve) < 3:
        raise InsufficientDataError("need at least 3 tokens for a Heaps fit")
    fit = hilberg_fit(curve)
    return HeapsZipfResult(curve, rank_freq, fit,
                           zipf_slope([c for _, _, c in rank_freq], min_freq))


def block_mi_curve(x, grid, oracle="lz78"):
    """``J(x[:n]; x[n:2n])`` for each ``n`` in ``grid`` on one sequence."""
    oracle = get_oracle(oracle)
    grid = [int(n) for n in grid if 2 * int(n) <= len(x)]
    lens = oracle.prefixes(x, grid + [2 * n for n in grid])
    first, joint = lens[: len(grid)], lens[len(grid):]
    return grid, [float(first[i] + oracle(x[n: 2 * n]) - joint[i])
                  for i, n in enumerate(grid)]


@dataclass
class TextReport:
    mi_grid: list
    mi_values: list
    mi_fit: HilbergFit | None
    heaps: HeapsZipfResult | None
    config: dict = field(default_factory=dict)


def text_exponents(symbols, tokens, oracle="lz78", min_log2=10) -> TextReport:
    """Block-MI and Heaps exponents of one text (reported, not asserted)."""
    top = len(symbols) // 2
    grid = [2 ** j for j in range(min_log2, max(top.bit_length(), min_log2))
            if 2 ** j <= top]
    mi_grid, mi = block_mi_curve(symbols, grid, oracle)
    mi_fit = _fit_or_none(mi_grid, mi) if len(mi_grid) >= 3 else None
    heaps = heaps_zipf_analysis(tokens) if len(tokens) >= 3 else None
    return TextReport(mi_grid, mi, mi_fit, heaps,
                      {"oracle": get_oracle(oracle).name,
                       "symbols": str(len(symbols)), "tokens": str(len(tokens))})


def version_line():
    return f"tool=factwords {__version__}"
