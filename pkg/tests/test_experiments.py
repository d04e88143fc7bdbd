import numpy as np
import pytest

from factwords.estimators import count_facts
from factwords.experiments import (EXPONENTS, MarkovSource, SantaFeSource,
                                   UnsupportedMeasurementError, as_source,
                                   dyadic_grid, facts_exponent,
                                   heaps_zipf_analysis, orderings_from,
                                   run_markov_consistency, run_sandwich,
                                   text_exponents, tokenize, type_token_curve,
                                   zipf_slope)
from factwords.estimators import hilberg_fit
from factwords.processes import MarkovSpec, SantaFeParams, gen_santa_fe
from factwords.sequences import InsufficientDataError, SymbolSeq, ValidationError

CHAIN = MarkovSpec.binary_symmetric(0.9).with_stationary_start()


def test_dyadic_grid():
    assert dyadic_grid(3, 6) == (8, 16, 32, 64)
    with pytest.raises(ValidationError):
        dyadic_grid(5, 4)


@pytest.mark.parametrize("grid", [[8, 12], [16, 8], [0, 4]])
def test_sandwich_rejects_bad_grid(grid):
    with pytest.raises(ValidationError):
        run_sandwich(SantaFeSource(2.0), grid, seeds=1)


def test_as_source():
    assert isinstance(as_source(CHAIN), MarkovSource)
    assert as_source(SantaFeParams(2.0, 0, 7)) == SantaFeSource(2.0, 7)
    with pytest.raises(ValidationError):
        as_source("markov")


def test_santa_fe_realization_cuts_at_pair_boundaries():
    real = SantaFeSource(2.0, 3).sample(64, 5)
    pairs = gen_santa_fe(SantaFeParams(2.0, 5, 3), 64)
    assert np.array_equal(real.ks, pairs.ks)
    assert real.cut(0) == 0
    assert real.cut(64) == len(real.symbols)
    assert real.symbols.symbols[real.cut(10) - 1] == 2


def test_sandwich_santa_fe_small_grid():
    grid = dyadic_grid(6, 10)
    rep = run_sandwich(SantaFeSource(2.0), grid, seeds=4, oracle="lz78")
    assert rep.grid == grid and rep.seeds == 4
    assert len(rep.rows) == 4 * len(grid)
    for name in EXPONENTS:
        beta = rep.exponent(name)
        if beta is not None:
            assert 0.0 <= beta <= 1.5
    assert set(rep.orderings) == {"facts<=redundancy", "facts<=mi", "facts<=words",
                                  "redundancy<=mi", "redundancy<=words", "mi<=words"}
    assert rep.h_hat > 0
    # per-row facts agree with the direct counter
    for r in rep.rows[:5]:
        ks = gen_santa_fe(SantaFeParams(2.0, r.seed, 0), r.n).ks
        assert r.facts == count_facts(ks)


def test_sandwich_deterministic_and_parallel_equal():
    grid = dyadic_grid(6, 9)
    a = run_sandwich(SantaFeSource(1.5, 2), grid, seeds=3, seed_base=10)
    b = run_sandwich(SantaFeSource(1.5, 2), grid, seeds=3, seed_base=10, n_jobs=2)
    assert a.rows == b.rows
    assert a.means == b.means


def test_sandwich_markov_has_no_facts():
    rep = run_sandwich(CHAIN, dyadic_grid(8, 11), seeds=2)
    assert rep.facts_exp is None
    assert all(not k.startswith("facts") for k in rep.orderings)
    with pytest.raises(UnsupportedMeasurementError):
        run_sandwich(CHAIN, dyadic_grid(8, 11), seeds=2, facts=True)


def test_sandwich_empty_grid():
    rep = run_sandwich(SantaFeSource(2.0), [], seeds=2)
    assert rep.insufficient == EXPONENTS
    assert rep.orderings == {}


def test_orderings_tolerance():
    n = 2.0 ** np.arange(4, 10)
    fits = {"facts": hilberg_fit(n=n, s=n ** 0.55), "words": hilberg_fit(n=n, s=n ** 0.5),
            "mi": hilberg_fit(n=n, s=n ** 0.3)}
    flags = orderings_from(fits)
    assert flags == {"facts<=mi": False, "facts<=words": True, "mi<=words": True}


def test_facts_exponent_near_inverse_alpha():
    fit = facts_exponent(2.0, dyadic_grid(10, 20), seeds=20)
    assert abs(fit.beta - 0.5) <= 0.1


def test_consistency_iid_and_chain():
    grid = dyadic_grid(12, 14)
    iid = run_markov_consistency(MarkovSpec.iid([0.5, 0.5]), grid, seeds=4)
    assert iid.true_order == 0
    assert iid.orders.shape == (3, 4)
    assert iid.hit_rate[-1] == 1.0
    chain = run_markov_consistency(CHAIN, grid, seeds=4, oracle="two-part")
    assert chain.hit_rate[-1] == 1.0
    assert chain.median[-1] == 1


def test_consistency_santa_fe_has_no_true_order():
    rep = run_markov_consistency(SantaFeSource(2.0), dyadic_grid(6, 8), seeds=2)
    assert rep.true_order is None and rep.hit_rate is None


# -- text statistics -----------------------------------------------------------

def test_tokenize():
    assert tokenize("The the, cat.") == ["the", "the", "cat"]
    assert tokenize("  -- ... ") == []


def test_heaps_examples():
    res = heaps_zipf_analysis("a b a b".split())
    assert res.type_token_curve == [(1, 1), (2, 2), (4, 2)]
    assert [c for _, _, c in res.rank_freq_table] == [2, 2]
    assert heaps_zipf_analysis(["w"] * 100).heaps_fit.beta == 0.0


def test_heaps_empty():
    with pytest.raises(InsufficientDataError):
        heaps_zipf_analysis([])


def test_type_token_curve_includes_total():
    assert type_token_curve(list("abcde"))[-1] == (5, 5)


def test_heaps_zipf_on_zipf_tokens():
    rng = np.random.default_rng(1)
    tokens = rng.zipf(2.0, size=2 ** 17).tolist()
    res = heaps_zipf_analysis(tokens)
    assert abs(res.heaps_fit.beta - 0.5) <= 0.05
    assert abs(res.zipf_slope + 2.0) <= 0.25


def test_zipf_slope_degenerate():
    assert np.isnan(zipf_slope([3, 2, 1]))


def test_text_exponents_runs():
    rng = np.random.default_rng(0)
    x = SymbolSeq(4, rng.integers(0, 4, size=2 ** 13))
    rep = text_exponents(x, ["a", "b", "a", "c"], min_log2=8)
    assert rep.mi_grid == [256, 512, 1024, 2048, 4096]
    assert rep.mi_fit is None or rep.mi_fit.beta >= 0
    assert rep.heaps is not None
