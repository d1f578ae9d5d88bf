"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 malformed input, 3 decode failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

from . import __version__
from .decoder import build_decode_context, decode_corpus
from .errors import AttrasrError, DecodeFailure
from .inventory import KnowledgeSource, parse_category, parse_knowledge_source
from .lexicon import (
    Lexicon,
    build_homonym_index,
    load_lexicon,
    load_seed_lexicon,
    syllable_to_attributes,
)
from .lm import NGramModel, parse_arpa, perplexity, serialize_arpa, train_ngram
from .metrics import (
    ScoreReport,
    pair_by_id,
    prer,
    read_corpus,
    ser,
    sher,
    write_corpus,
)
from .posteriors import read_posteriors, write_posteriors
from .synth import SynthConfig, run_experiment, sample_corpus, synthesize


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _add_lexicon_flags(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--lexicon", metavar="PATH", help="lexicon TSV file")
    group.add_argument(
        "--seed-lexicon",
        metavar="NAME",
        help="bundled lexicon: mandarin or japanese",
    )


def _get_lexicon(args) -> Lexicon:
    if args.lexicon:
        return load_lexicon(_read(args.lexicon))
    return load_seed_lexicon(args.seed_lexicon)


def _parse_noise(text: str):
    if "=" not in text:
        return float(text)
    out = {}
    for part in text.split(","):
        name, _, value = part.partition("=")
        out[parse_category(name.strip())] = float(value)
    return out


def _synth_config(args) -> SynthConfig:
    return SynthConfig(
        frames_per_segment=args.frames_per_segment,
        blank_frames_between=args.blank_frames,
        noise=_parse_noise(args.noise),
        seed=args.seed,
    )


def _load_lm(path: Optional[str]) -> Optional[NGramModel]:
    return parse_arpa(_read(path)) if path else None


def cmd_lexicon_validate(args) -> int:
    lex = _get_lexicon(args)
    print(f"ok: {len(lex)} syllables")
    return 0


def cmd_lexicon_homonyms(args) -> int:
    lex = _get_lexicon(args)
    index = build_homonym_index(lex, parse_knowledge_source(args.ks))
    lines = []
    for cls in index.classes:
        if len(cls) >= args.min_size:
            lines.append(f"{cls[0]}\t{' '.join(cls)}")
    _emit("".join(line + "\n" for line in lines), args.output)
    return 0


def cmd_lexicon_map(args) -> int:
    lex = _get_lexicon(args)
    ks = parse_knowledge_source(args.ks)
    lines = []
    for syl in args.syllables:
        toks = syllable_to_attributes(lex, syl, ks)
        if len(ks) == 1:
            shown = " ".join(toks)
        else:
            shown = " ".join(
                ",".join(v if v is not None else "-" for v in seg) for seg in toks
            )
        lines.append(f"{syl}\t{shown}")
    _emit("".join(line + "\n" for line in lines), args.output)
    return 0


def cmd_decode(args) -> int:
    lex = _get_lexicon(args)
    sets = read_posteriors(_read(args.posteriors))
    ctx = build_decode_context(lex, parse_knowledge_source(args.ks), _load_lm(args.lm))
    nbests = decode_corpus(
        sets,
        ctx,
        beam_width=args.beam,
        lm_weight=args.lm_weight,
        insertion_bonus=args.insertion_bonus,
        nbest=args.nbest if args.format == "nbest" else 1,
        jobs=args.jobs,
        kernel=args.kernel,
    )
    lines = []
    for nb in nbests:
        if args.format == "best":
            lines.append(f"{nb.utterance_id}\t{' '.join(nb.best.syllables)}")
        else:
            for rank, hyp in enumerate(nb.hypotheses, 1):
                lines.append(
                    f"{nb.utterance_id}\t{rank}\t{hyp.score:.6f}\t"
                    f"{' '.join(hyp.syllables)}"
                )
    _emit("".join(line + "\n" for line in lines), args.output)
    return 0


def cmd_score(args) -> int:
    refs = read_corpus(_read(args.refs))
    hyps = read_corpus(_read(args.hyps))
    ids, ref_toks, hyp_toks = pair_by_id(refs, hyps)
    wanted = [m.strip() for m in args.metrics.split(",") if m.strip()]
    needs_lexicon = any(m in ("sher", "prer") for m in wanted)
    lex = None
    if needs_lexicon:
        if not (args.lexicon or args.seed_lexicon):
            raise AttrasrError("sher and prer need --lexicon or --seed-lexicon")
        lex = _get_lexicon(args)
    ks = parse_knowledge_source(args.ks) if args.ks else None
    results = []
    for metric in wanted:
        if metric == "ser":
            results.append(ser(ref_toks, hyp_toks, ids))
        elif metric in ("sher", "prer"):
            if ks is None:
                raise AttrasrError(f"{metric} needs --ks")
            if metric == "sher":
                results.append(sher(ref_toks, hyp_toks, build_homonym_index(lex, ks), ids))
            else:
                results.append(prer(ref_toks, hyp_toks, lex, ks, ids))
        else:
            raise AttrasrError(f"unknown metric {metric!r}")
    report = ScoreReport(tuple(results))
    sys.stdout.write(report.to_text())
    if args.output:
        _emit(report.to_tsv(), args.output)
    return 0


def cmd_lm_train(args) -> int:
    corpus = [toks for _, toks in read_corpus(_read(args.corpus))]
    model = train_ngram(corpus, order=args.order, smoothing=args.smoothing)
    _emit(serialize_arpa(model), args.output)
    return 0


def cmd_lm_perplexity(args) -> int:
    model = parse_arpa(_read(args.model))
    corpus = [toks for _, toks in read_corpus(_read(args.corpus))]
    print(f"perplexity\t{perplexity(model, corpus):.6f}")
    return 0


def cmd_lm_score(args) -> int:
    model = parse_arpa(_read(args.model))
    lines = [
        f"{utt}\t{model.score(toks):.6f}"
        for utt, toks in read_corpus(_read(args.corpus))
    ]
    _emit("".join(line + "\n" for line in lines), args.output)
    return 0


def cmd_synth(args) -> int:
    lex = _get_lexicon(args)
    refs = read_corpus(_read(args.refs))
    sets = synthesize(refs, lex, parse_knowledge_source(args.ks), _synth_config(args))
    _emit(write_posteriors(sets), args.output)
    return 0


def cmd_sample(args) -> int:
    lex = _get_lexicon(args)
    refs = sample_corpus(
        lex,
        args.utterances,
        min_len=args.min_len,
        max_len=args.max_len,
        seed=args.corpus_seed,
        unique_parse_ks=args.unique_parse_ks,
    )
    _emit(write_corpus(refs), args.output)
    return 0


def cmd_experiment(args) -> int:
    lex = _get_lexicon(args)
    ks_list = [parse_knowledge_source(k) for k in args.ks_list.split(",") if k.strip()]
    if args.refs:
        refs = read_corpus(_read(args.refs))
    else:
        union = KnowledgeSource(tuple({cat: None for k in ks_list for cat in k}))
        refs = sample_corpus(
            lex,
            args.utterances,
            min_len=args.min_len,
            max_len=args.max_len,
            seed=args.corpus_seed,
            unique_parse_ks=union if args.unique_parse else None,
        )
    report = run_experiment(
        refs,
        lex,
        ks_list,
        _synth_config(args),
        lm=_load_lm(args.lm),
        beam_width=args.beam,
        lm_weight=args.lm_weight,
        insertion_bonus=args.insertion_bonus,
        jobs=args.jobs,
    )
    sys.stdout.write(report.to_text())
    if args.output:
        _emit(report.to_tsv(), args.output)
    return 0


def _add_synth_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--frames-per-segment", type=int, default=3)
    p.add_argument("--blank-frames", type=int, default=1)
    p.add_argument(
        "--noise",
        default="0",
        help="corruption rate: a float, or per-category like M=0.1,P=0.05",
    )
    p.add_argument("--seed", type=int, default=0, help="posterior sampling seed")


def _add_decode_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lm", metavar="PATH", help="ARPA model for shallow fusion")
    p.add_argument("--beam", type=int, default=16)
    p.add_argument("--lm-weight", type=float, default=0.5)
    p.add_argument("--insertion-bonus", type=float, default=0.0)
    p.add_argument("--jobs", type=int, default=1)


def _add_sample_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--utterances", type=int, default=50)
    p.add_argument("--min-len", type=int, default=3)
    p.add_argument("--max-len", type=int, default=8)
    p.add_argument("--corpus-seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="attrasr", description=__doc__)
    parser.add_argument("--version", action="version", version=f"attrasr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    lx = sub.add_parser("lexicon", help="inspect syllable-to-attribute lexicons")
    lx_sub = lx.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = lx_sub.add_parser("validate", help="parse a lexicon and report its size")
    _add_lexicon_flags(p)
    p.set_defaults(func=cmd_lexicon_validate)

    p = lx_sub.add_parser("homonyms", help="list homonym classes under a knowledge source")
    _add_lexicon_flags(p)
    p.add_argument("--ks", required=True, help="knowledge source, e.g. M+P+H")
    p.add_argument("--min-size", type=int, default=1, help="only classes this large")
    p.add_argument("--output", metavar="PATH")
    p.set_defaults(func=cmd_lexicon_homonyms)

    p = lx_sub.add_parser("map", help="show syllables as attribute sequences")
    _add_lexicon_flags(p)
    p.add_argument("--ks", required=True)
    p.add_argument("--output", metavar="PATH")
    p.add_argument("syllables", nargs="+")
    p.set_defaults(func=cmd_lexicon_map)

    p = sub.add_parser("decode", help="beam-decode attribute posteriors to syllables")
    _add_lexicon_flags(p)
    p.add_argument("--posteriors", required=True, metavar="PATH")
    p.add_argument("--ks", required=True)
    _add_decode_flags(p)
    p.add_argument("--nbest", type=int, default=10)
    p.add_argument("--format", choices=("best", "nbest"), default="best")
    p.add_argument("--kernel", choices=("python", "compiled"))
    p.add_argument("--output", metavar="PATH")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("score", help="error rates between reference and hypothesis files")
    p.add_argument("--refs", required=True, metavar="PATH")
    p.add_argument("--hyps", required=True, metavar="PATH")
    p.add_argument("--metrics", default="ser", help="comma list of ser, sher, prer")
    p.add_argument("--ks", help="knowledge source for sher/prer")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--lexicon", metavar="PATH")
    group.add_argument("--seed-lexicon", metavar="NAME")
    p.add_argument("--output", metavar="PATH", help="write metric TSV here")
    p.set_defaults(func=cmd_score)

    lm = sub.add_parser("lm", help="train and query syllable n-gram models")
    lm_sub = lm.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = lm_sub.add_parser("train", help="train an ARPA model from a corpus file")
    p.add_argument("--corpus", required=True, metavar="PATH")
    p.add_argument("--order", type=int, default=2)
    p.add_argument(
        "--smoothing", choices=("auto", "kneser-ney", "add-k"), default="auto"
    )
    p.add_argument("--output", metavar="PATH")
    p.set_defaults(func=cmd_lm_train)

    p = lm_sub.add_parser("perplexity", help="per-token perplexity of a corpus")
    p.add_argument("--model", required=True, metavar="PATH")
    p.add_argument("--corpus", required=True, metavar="PATH")
    p.set_defaults(func=cmd_lm_perplexity)

    p = lm_sub.add_parser("score", help="log-probability of each corpus line")
    p.add_argument("--model", required=True, metavar="PATH")
    p.add_argument("--corpus", required=True, metavar="PATH")
    p.add_argument("--output", metavar="PATH")
    p.set_defaults(func=cmd_lm_score)

    p = sub.add_parser("synth", help="make synthetic posteriors for a reference corpus")
    _add_lexicon_flags(p)
    p.add_argument("--refs", required=True, metavar="PATH")
    p.add_argument("--ks", required=True)
    _add_synth_flags(p)
    p.add_argument("--output", metavar="PATH")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("sample", help="draw a random reference corpus from a lexicon")
    _add_lexicon_flags(p)
    _add_sample_flags(p)
    p.add_argument(
        "--unique-parse-ks",
        metavar="KS",
        help="only keep utterances with one segmentation under this source",
    )
    p.add_argument("--output", metavar="PATH")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser(
        "experiment", help="synthesize, decode, and score across knowledge sources"
    )
    _add_lexicon_flags(p)
    p.add_argument("--ks-list", required=True, help="comma list, e.g. M+P,M+P+H")
    p.add_argument("--refs", metavar="PATH", help="fixed reference corpus")
    _add_sample_flags(p)
    p.add_argument(
        "--unique-parse",
        action="store_true",
        help="sample only uniquely parsable utterances (under the union source)",
    )
    _add_synth_flags(p)
    _add_decode_flags(p)
    p.add_argument("--output", metavar="PATH", help="write metric TSV here")
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DecodeFailure as exc:
        print(f"attrasr: decode failed for {exc.utterance_id}: {exc}", file=sys.stderr)
        return 3
    except AttrasrError as exc:
        print(f"attrasr: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"attrasr: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
