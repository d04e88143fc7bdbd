"""Command-line interface.

Subcommands::

    simulate     generate a source sample (sequence file or pair list)
    analyze      estimators on one sequence or text file
    sandwich     four-exponent experiment on a dyadic grid
    consistency  Markov order estimates across n and seeds
    corpus       Heaps/Zipf and block-MI exponents of a text file

Errors exit with status 1 (usage errors with 2) and a one-line
``error:`` message on stderr.
"""
from __future__ import annotations

import argparse
import io
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .complexity import ORACLES, get_oracle
from .estimators import estimate_order
from .experiments import (EXPONENTS, TABLE_COLUMNS, ConsistencyReport,
                          MarkovSource, SandwichReport, SantaFeSource,
                          TextReport, dyadic_grid, run_markov_consistency,
                          run_sandwich, text_exponents, tokenize)
from .processes import (MarkovSpec, SantaFeParams, binarize_santa_fe,
                        gen_markov, gen_santa_fe)
from .sequences import (SymbolSeq, ValidationError, read_pairs, read_sequence,
                        write_pairs, write_sequence)

MODES = ("bytes", "chars", "word-tokens")


# ---------------------------------------------------------------------------
# corpus ingestion

@dataclass(frozen=True)
class CorpusConfig:
    input_path: str
    mode: str = "bytes"
    max_symbols: int | None = None
    declared_alphabet: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.max_symbols is not None and self.max_symbols < 1:
            raise ValidationError("max_symbols must be >= 1")
        if self.declared_alphabet is not None and self.declared_alphabet < 2:
            raise ValidationError("declared alphabet size must be >= 2")


@dataclass(frozen=True)
class Corpus:
    """Ingested text: a symbol sequence (bytes/chars) or a token list.

    In chars mode ``alphabet[i]`` is the character with id ``i``.
    """

    mode: str
    symbols: SymbolSeq | None = None
    tokens: list | None = None
    alphabet: tuple = ()

    def decode(self):
        """Reconstruct the (possibly capped) character stream in chars mode."""
        if self.mode != "chars":
            raise ValidationError("decode is only defined for chars mode")
        return "".join(self.alphabet[i] for i in self.symbols.symbols.tolist())


def ingest_corpus(config: CorpusConfig) -> Corpus:
    path = config.input_path
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    if not raw:
        raise ValidationError(f"{path} is empty")
    cap = config.max_symbols

    if config.mode == "bytes":
        data = np.frombuffer(raw[:cap] if cap else raw, dtype=np.uint8)
        D = 256 if config.declared_alphabet is None else config.declared_alphabet
        if D > 256 or D <= int(data.max()):
            raise ValidationError(f"declared alphabet {D} does not fit byte values")
        return Corpus("bytes", symbols=SymbolSeq(D, data))

    text = raw.decode("utf-8", errors="surrogateescape")
    if config.mode == "chars":
        text = text[:cap] if cap else text
        ids = {}
        sym = [ids.setdefault(c, len(ids)) for c in text]
        D = max(len(ids), 2)
        if config.declared_alphabet is not None:
            if config.declared_alphabet < len(ids):
                raise ValidationError(
                    f"declared alphabet {config.declared_alphabet} < {len(ids)} distinct characters")
            D = config.declared_alphabet
        return Corpus("chars", symbols=SymbolSeq(D, np.array(sym, dtype=np.int64)),
                      alphabet=tuple(ids))

    tokens = tokenize(text)
    if cap:
        tokens = tokens[:cap]
    if not tokens:
        raise ValidationError(f"{path} contains no word tokens")
    return Corpus("word-tokens", tokens=tokens)


# ---------------------------------------------------------------------------
# report emission

def _num(v):
    if v is None:
        return "NA"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.10g}"
    return str(v)


def _fit_line(name, fit):
    if fit is None:
        return f"exponent.{name} NA\n"
    return (f"exponent.{name} beta={_num(fit.beta)} stderr={_num(fit.stderr)} "
            f"slope={_num(fit.slope)} points={fit.points_used} "
            f"n_min={fit.n_min} n_max={fit.n_max} dropped={fit.dropped}\n")


def _header(kind, config):
    lines = [f"tool=factwords {__version__}\n", f"report={kind}\n"]
    lines += [f"config.{k}={config[k]}\n" for k in sorted(config)]
    return "".join(lines)


def format_table(report):
    out = io.StringIO()
    if isinstance(report, SandwichReport):
        out.write("\t".join(TABLE_COLUMNS) + "\n")
        for r in report.rows:
            out.write("\t".join(_num(getattr(r, c)) for c in TABLE_COLUMNS) + "\n")
    elif isinstance(report, ConsistencyReport):
        out.write("n\tseed\torder\n")
        for i, n in enumerate(report.grid):
            for j, s in enumerate(report.seeds):
                out.write(f"{n}\t{s}\t{report.orders[i, j]}\n")
    elif isinstance(report, TextReport):
        out.write("quantity\tn\tvalue\n")
        for n, v in zip(report.mi_grid, report.mi_values):
            out.write(f"mi\t{n}\t{_num(v)}\n")
        if report.heaps is not None:
            for n, v in report.heaps.type_token_curve:
                out.write(f"types\t{n}\t{v}\n")
    else:
        raise ValidationError(f"cannot format {type(report).__name__}")
    return out.getvalue()


def format_summary(report):
    if isinstance(report, SandwichReport):
        text = _header("sandwich", report.config)
        text += f"h_hat={_num(report.h_hat)}\n"
        for name in EXPONENTS:
            text += _fit_line(name, getattr(report, f"{name}_exp"))
        for key in sorted(report.orderings):
            text += f"ordering.{key}={str(report.orderings[key]).lower()}\n"
        text += f"insufficient={','.join(report.insufficient) or 'none'}\n"
        return text
    if isinstance(report, ConsistencyReport):
        text = _header("consistency", report.config)
        text += f"true_order={_num(report.true_order)}\n"
        hit = report.hit_rate
        for i, n in enumerate(report.grid):
            rate = "NA" if hit is None else _num(float(hit[i]))
            text += f"n={n} median_order={_num(float(report.median[i]))} hit_rate={rate}\n"
        return text
    if isinstance(report, TextReport):
        text = _header("corpus", report.config)
        text += _fit_line("mi", report.mi_fit)
        h = report.heaps
        text += _fit_line("heaps", None if h is None else h.heaps_fit)
        text += f"zipf_slope={_num(None if h is None else h.zipf_slope)}\n"
        text += f"types={'NA' if h is None else len(h.rank_freq_table)}\n"
        return text
    raise ValidationError(f"cannot format {type(report).__name__}")


def emit_report(report, format="summary", out=None):
    """Write ``report`` as ``table`` or ``summary`` text to ``out`` (path or stream).

    Returns the emitted text.
    """
    if format == "table":
        text = format_table(report)
    elif format == "summary":
        text = format_summary(report)
    else:
        raise ValidationError(f"unknown report format {format!r}")
    _write_text(text, out)
    return text


def _write_text(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    if hasattr(out, "write"):
        out.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ValidationError(f"cannot write {out}: {exc.strerror}") from None


# ---------------------------------------------------------------------------
# argument handling

def _source_from_args(args):
    if args.source == "santa-fe":
        return SantaFeSource(args.alpha, args.fact_seed)
    return MarkovSource(_markov_spec_from_args(args))


def _markov_spec_from_args(args):
    if args.source == "iid":
        return MarkovSpec.iid([0.5, 0.5])
    if args.source == "markov1":
        return MarkovSpec.binary_symmetric(args.stay).with_stationary_start()
    try:
        with open(args.spec) as fh:
            cfg = json.load(fh)
        return MarkovSpec(cfg["order"], cfg["alphabet_size"], cfg["transitions"],
                          cfg.get("initial"))
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise ValidationError(f"bad Markov spec file {args.spec}: {exc}") from None


def _add_source_args(p):
    p.add_argument("--source", choices=("santa-fe", "iid", "markov1", "spec"),
                   default="santa-fe")
    p.add_argument("--alpha", type=float, default=2.0, help="Zipf exponent (santa-fe)")
    p.add_argument("--fact-seed", type=int, default=0)
    p.add_argument("--stay", type=float, default=0.9,
                   help="repeat probability of the markov1 chain")
    p.add_argument("--spec", help="JSON Markov spec (with --source spec)")


def _add_grid_args(p, lo, hi):
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--grid-min-log2", type=int, default=lo)
    p.add_argument("--grid-max-log2", type=int, default=hi)
    p.add_argument("--jobs", type=int, default=1)


def _add_output_args(p):
    p.add_argument("--format", choices=("table", "summary"), default="summary")
    p.add_argument("--out", default="-")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(2, f"error: {message}\n")


def build_parser():
    parser = _Parser(prog="factwords", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"factwords {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    oracle_kw = dict(choices=sorted(ORACLES), default="lz78")

    p = sub.add_parser("simulate", help="sample a source")
    _add_source_args(p)
    p.add_argument("--n", type=int, required=True,
                   help="pairs (santa-fe) or symbols (Markov sources)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pairs", action="store_true",
                   help="write santa-fe pairs as 'k<TAB>bit' lines")
    p.add_argument("--out", required=True)

    p = sub.add_parser("analyze", help="estimators on one input file")
    p.add_argument("input")
    p.add_argument("--mode", choices=("sequence", "pairs", "bytes", "chars"),
                   default="sequence")
    p.add_argument("--oracle", **oracle_kw)
    p.add_argument("--max-symbols", type=int)
    p.add_argument("--out", default="-")

    p = sub.add_parser("sandwich", help="four-exponent experiment")
    _add_source_args(p)
    _add_grid_args(p, 10, 16)
    p.add_argument("--oracle", **oracle_kw)
    _add_output_args(p)

    p = sub.add_parser("consistency", help="Markov order estimates over n")
    _add_source_args(p)
    _add_grid_args(p, 10, 16)
    p.add_argument("--oracle", **oracle_kw)
    _add_output_args(p)

    p = sub.add_parser("corpus", help="Heaps/Zipf and block-MI exponents of a text")
    p.add_argument("input")
    p.add_argument("--mode", choices=("bytes", "chars"), default="bytes",
                   help="symbolization for the block-MI curve")
    p.add_argument("--max-symbols", type=int)
    p.add_argument("--oracle", **oracle_kw)
    _add_output_args(p)
    return parser


def _cmd_simulate(args):
    if args.n < 0:
        raise ValidationError("--n must be >= 0")
    if args.source == "santa-fe":
        pairs = gen_santa_fe(SantaFeParams(args.alpha, args.seed, args.fact_seed), args.n)
        if args.pairs:
            write_pairs(args.out, pairs.ks, pairs.bits)
        else:
            write_sequence(args.out, binarize_santa_fe(pairs))
    else:
        if args.pairs:
            raise ValidationError("--pairs needs --source santa-fe")
        write_sequence(args.out, gen_markov(_markov_spec_from_args(args), args.n, args.seed))


def _cmd_analyze(args):
    if args.mode == "sequence":
        x = read_sequence(args.input)
    elif args.mode == "pairs":
        x = binarize_santa_fe(read_pairs(args.input))
    else:
        x = ingest_corpus(CorpusConfig(args.input, args.mode, args.max_symbols)).symbols
    if args.max_symbols:
        x = x[: args.max_symbols]
    if len(x) == 0:
        raise ValidationError("input holds no symbols")
    oracle = get_oracle(args.oracle)
    est = estimate_order(x, oracle)
    lines = [f"tool=factwords {__version__}", f"input={os.path.basename(args.input)}",
             f"mode={args.mode}", f"oracle={oracle.name}", f"n={len(x)}",
             f"alphabet_size={x.alphabet_size}",
             f"code_len={_num(est.code_len)}",
             f"rate={_num(est.code_len / len(x))}",
             f"order={est.order}", f"vocabulary={est.vocabulary}"]
    lines += [f"neg_log_lk.{k}={_num(v)}" for k, v in enumerate(est.neg_log_lk)]
    _write_text("\n".join(lines) + "\n", args.out)


def _cmd_sandwich(args):
    grid = dyadic_grid(args.grid_min_log2, args.grid_max_log2)
    report = run_sandwich(_source_from_args(args), grid, args.seeds, args.oracle,
                          seed_base=args.seed_base, n_jobs=args.jobs)
    emit_report(report, args.format, args.out)


def _cmd_consistency(args):
    grid = dyadic_grid(args.grid_min_log2, args.grid_max_log2)
    report = run_markov_consistency(_source_from_args(args), grid, args.seeds,
                                    args.oracle, seed_base=args.seed_base,
                                    n_jobs=args.jobs)
    emit_report(report, args.format, args.out)


def _cmd_corpus(args):
    corpus = ingest_corpus(CorpusConfig(args.input, args.mode, args.max_symbols))
    words = ingest_corpus(CorpusConfig(args.input, "word-tokens"))
    report = text_exponents(corpus.symbols, words.tokens, args.oracle)
    report.config.update({"input": os.path.basename(args.input), "mode": args.mode})
    emit_report(report, args.format, args.out)


COMMANDS = {"simulate": _cmd_simulate, "analyze": _cmd_analyze,
            "sandwich": _cmd_sandwich, "consistency": _cmd_consistency,
            "corpus": _cmd_corpus}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
