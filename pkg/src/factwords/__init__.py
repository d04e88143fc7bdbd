"""Facts-and-words toolkit: Santa Fe and Markov sources, computable
complexity proxies, Markov order / vocabulary estimators and power-law
exponent experiments."""

__version__ = "0.1.0"

from .complexity import (CodeLengthOracle, NGramTable, get_oracle,  # noqa: E402
                         lz78_code_len, mi_estimate, neg_log_lk,
                         two_part_code_len)
from .estimators import (ConditionReport, HilbergFit, condition_diagnostics,  # noqa: E402
                         count_facts, estimate_order, hilberg_fit, markov_order,
                         subword_complexity, vocab_proxy)
from .processes import (MarkovSpec, SantaFePair, SantaFeParams,  # noqa: E402
                        binarize_santa_fe, decode_santa_fe, fact_bit,
                        gen_markov, gen_santa_fe, sample_zipf)
from .sequences import SymbolSeq  # noqa: E402

__all__ = [
    "CodeLengthOracle", "ConditionReport", "HilbergFit", "MarkovSpec",
    "NGramTable", "SantaFePair", "SantaFeParams", "SymbolSeq",
    "binarize_santa_fe", "condition_diagnostics", "count_facts",
    "decode_santa_fe", "estimate_order", "fact_bit", "gen_markov",
    "gen_santa_fe", "get_oracle", "hilberg_fit", "lz78_code_len",
    "markov_order", "mi_estimate", "neg_log_lk", "sample_zipf",
    "subword_complexity", "two_part_code_len", "vocab_proxy",
]
