#!/usr/bin/env python3
"""Time the compiled decode kernels against the pure-Python fallback.

Runs the two hot paths (edit-distance alignment and trie-constrained beam
decoding) with both backends on identical inputs, checks that the outputs
agree exactly, and prints a timing table.

Usage:
    python3 benchmarks/bench_kernels.py [--utterances 80] [--beam 16]
"""

import argparse
import time

import numpy as np

from attrasr import kernels
from attrasr.decoder import build_decode_context, decode_corpus
from attrasr.lexicon import load_seed_lexicon
from attrasr.synth import SynthConfig, sample_corpus, synthesize


def bench_levenshtein(repeat: int, seed: int) -> dict[str, float]:
    rng = np.random.default_rng(seed)
    pairs = [
        (
            [int(k) for k in rng.integers(0, 30, int(rng.integers(20, 60)))],
            [int(k) for k in rng.integers(0, 30, int(rng.integers(20, 60)))],
        )
        for _ in range(300)
    ]
    times = {}
    results = {}
    for name in ("python", "compiled"):
        krn = kernels.get_backend(name)
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            out = [krn.levenshtein(ref, hyp) for ref, hyp in pairs]
            best = min(best, time.perf_counter() - t0)
        times[name] = best
        results[name] = [(list(ops), m, s, d, i) for ops, m, s, d, i in out]
    assert results["python"] == results["compiled"], "alignment outputs differ"
    return times


def bench_beam_decode(utterances: int, beam: int, repeat: int, seed: int):
    lex = load_seed_lexicon("mandarin")
    ks = "M+P+A+H+B"
    refs = sample_corpus(lex, utterances, min_len=3, max_len=6, seed=seed,
                         unique_parse_ks=ks)
    cfg = SynthConfig(frames_per_segment=3, blank_frames_between=1,
                      noise=0.1, seed=seed)
    sets = synthesize(refs, lex, ks, cfg)
    ctx = build_decode_context(lex, ks)
    times = {}
    results = {}
    for name in ("python", "compiled"):
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            out = decode_corpus(sets, ctx, beam_width=beam, nbest=1, kernel=name)
            best = min(best, time.perf_counter() - t0)
        times[name] = best
        results[name] = [(nb.best.syllables, nb.best.score) for nb in out]
    assert results["python"] == results["compiled"], "decode outputs differ"
    return times, sum(ps.frame_count for ps in sets)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--utterances", type=int, default=80)
    # Noisy posteriors need beam headroom or utterances strand mid-trie
    # (narrower widths raise DecodeFailure on this workload).
    parser.add_argument("--beam", type=int, default=64)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print(f"default backend: {kernels.BACKEND}")
    lev = bench_levenshtein(args.repeat, args.seed)
    dec, frames = bench_beam_decode(args.utterances, args.beam, args.repeat,
                                    args.seed)
    print(f"beam workload: {args.utterances} utterances, {frames} frames, "
          f"beam {args.beam}")
    print()
    print(f"{'task':<22}{'python':>10}{'compiled':>10}{'speedup':>9}")
    for task, times in (("levenshtein x300", lev), ("beam decode", dec)):
        ratio = times["python"] / times["compiled"]
        print(f"{task:<22}{times['python']:>9.3f}s{times['compiled']:>9.3f}s"
              f"{ratio:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
