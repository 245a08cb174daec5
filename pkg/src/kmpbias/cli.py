"""Command line entry point: ``kmpbias {compile,match,gen,decode,sweep}``.

Phrase and prefix files hold one phrase per line. With ``--vocab`` (one
token per line, id = line number) lines are split on whitespace and mapped
through it; without a vocab every non-whitespace character becomes its code
point.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import Optional

from .harness import (
    DOMAINS,
    ChannelNoise,
    UtteranceSpec,
    decode_utterance,
    generate_testset,
    rows_to_csv,
    sweep_delta,
)
from .kmp import compile_pattern
from .prefix import PrefixedMatchState, PrefixSet, compute_bonus_prefixed
from .scorer import PhraseSet, compute_bonus


def load_vocab(path: Optional[str]) -> Optional[dict[str, int]]:
    if path is None:
        return None
    words = Path(path).read_text().split("\n")
    return {w: i for i, w in enumerate(words) if w}


def tokenize(line: str, vocab: Optional[dict[str, int]]) -> list[int]:
    if vocab is None:
        return [ord(c) for c in line if not c.isspace()]
    try:
        return [vocab[w] for w in line.split()]
    except KeyError as e:
        raise SystemExit(f"token {e.args[0]!r} is not in the vocabulary") from None


def read_phrases(path: str, vocab) -> list[list[int]]:
    lines = Path(path).read_text().splitlines()
    return [tokenize(line, vocab) for line in lines if line.strip()]


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def cmd_compile(args, out) -> None:
    vocab = load_vocab(args.vocab)
    for i, toks in enumerate(read_phrases(args.phrases, vocab)):
        p = compile_pattern(toks)
        out.write(_dump({"index": i, "tokens": list(p.tokens),
                         "failure": list(p.failure), "gamma": p.gamma}) + "\n")


def cmd_match(args, out, inp) -> None:
    vocab = load_vocab(args.vocab)
    phrases = PhraseSet.from_tokens(read_phrases(args.phrases, vocab), args.delta)
    prefixes = None
    if args.prefixes:
        prefixes = PrefixSet.from_tokens(read_phrases(args.prefixes, vocab), args.boost)
    state = PrefixedMatchState.zero(phrases, prefixes) if prefixes else phrases.zero_state()
    for line in inp:
        for x in tokenize(line, vocab):
            if prefixes:
                r = compute_bonus_prefixed(phrases, prefixes, state, x)
                shown = {"phrase_lengths": list(r.new_state.phrase_lengths),
                         "prefix_lengths": list(r.new_state.prefix_lengths),
                         "mask": list(r.new_state.prefix_mask)}
            else:
                r = compute_bonus(phrases, state, x)
                shown = list(r.new_state)
            state = r.new_state
            out.write(_dump({"token": x, "bonus": r.bonus, "state": shown,
                             "matched": sorted(r.matched_phrase_indices)}) + "\n")


def _noise_from_args(args) -> ChannelNoise:
    return ChannelNoise(p=args.p, k=args.k, q=args.q, hard_rate=args.hard_rate,
                        entity_hard_rate=args.entity_hard_rate)


def cmd_gen(args, out) -> None:
    specs = generate_testset(args.domain, args.count, args.B, args.seed,
                             noise=_noise_from_args(args))
    for spec in specs:
        out.write(_dump(spec.to_record()) + "\n")


def read_utterances(path: str) -> list[UtteranceSpec]:
    lines = Path(path).read_text().splitlines()
    return [UtteranceSpec.from_record(json.loads(line)) for line in lines if line.strip()]


def _override_phrases(spec: UtteranceSpec, phrases) -> UtteranceSpec:
    phrases = tuple(tuple(p) for p in phrases)
    entity = spec.entity
    idx = phrases.index(entity) if entity is not None and entity in phrases else None
    return dataclasses.replace(spec, phrases=phrases, entity_index=idx)


def _prefix_lists(args, vocab):
    if args.prefixes:
        return read_phrases(args.prefixes, vocab)
    return None


def cmd_decode(args, out) -> None:
    vocab = load_vocab(args.vocab)
    override = read_phrases(args.phrases, vocab) if args.phrases else None
    prefixes = _prefix_lists(args, vocab)
    for i, spec in enumerate(read_utterances(args.utterances)):
        if override is not None:
            spec = _override_phrases(spec, override)
        scored, res = decode_utterance(
            spec, args.mode, args.delta, F=args.F, beam_size=args.K, boost=args.boost,
            use_prefixes=args.carrier_prefixes, prefixes=prefixes, engine=args.engine,
            blank_id=args.blank_id, full=True,
        )
        out.write(_dump({
            "index": i,
            "tokens": list(scored.hypothesis),
            "score": res.best.score,
            "matched": sorted(scored.matched),
            "entity_hit": scored.entity_hit,
            "edits": scored.edits,
            "ref_len": scored.ref_len,
            "truncated": res.truncated,
        }) + "\n")


def cmd_sweep(args, out) -> None:
    vocab = load_vocab(args.vocab)
    testsets = {}
    for item in args.utterances:
        name, _, path = item.partition("=")
        if not path:
            name, path = Path(item).stem, item
        testsets[name] = read_utterances(path)
    configs = [(mode, args.F) for mode in args.modes]
    rows = sweep_delta(testsets, args.deltas, configs, beam_size=args.K, boost=args.boost,
                       use_prefixes=args.carrier_prefixes,
                       prefixes=_prefix_lists(args, vocab), engine=args.engine,
                       blank_id=args.blank_id)
    out.write(rows_to_csv(rows))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kmpbias", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--vocab", help="vocabulary file, one token per line")

    def search_flags(p):
        p.add_argument("--mode", default="fusion", choices=["fusion", "otf_rescoring", "none"])
        p.add_argument("-K", type=int, default=8, help="beam size")
        p.add_argument("-F", type=int, default=50, help="biasing expansions (fusion)")
        p.add_argument("--boost", type=float, default=1.0, help="prefix boost factor")
        p.add_argument("--prefixes", help="prefix file")
        p.add_argument("--carrier-prefixes", action="store_true",
                       help="use the toy carrier tokens as prefixes")
        p.add_argument("--engine", default="batch", choices=["scalar", "batch"])
        p.add_argument("--blank-id", type=int, help="token id treated as blank")

    p = sub.add_parser("compile", help="print failure tables and loop bounds")
    p.add_argument("--phrases", required=True)
    common(p)

    p = sub.add_parser("match", help="stream tokens from stdin through the scorer")
    p.add_argument("--phrases", required=True)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--prefixes")
    p.add_argument("--boost", type=float, default=1.0)
    common(p)

    p = sub.add_parser("gen", help="generate a synthetic test set")
    p.add_argument("--domain", required=True, choices=DOMAINS)
    p.add_argument("--count", type=int, default=30)
    p.add_argument("-B", type=int, default=50, help="phrases per utterance")
    p.add_argument("--seed", type=int, required=True)
    defaults = ChannelNoise()
    p.add_argument("--p", type=float, default=defaults.p)
    p.add_argument("--k", type=int, default=defaults.k)
    p.add_argument("--q", type=float, default=defaults.q)
    p.add_argument("--hard-rate", type=float, default=defaults.hard_rate)
    p.add_argument("--entity-hard-rate", type=float, default=defaults.entity_hard_rate)

    p = sub.add_parser("decode", help="decode utterances, one JSON record each")
    p.add_argument("--utterances", required=True)
    p.add_argument("--phrases", help="phrase file replacing each utterance's list")
    p.add_argument("--delta", type=float, default=2.0)
    search_flags(p)
    common(p)

    p = sub.add_parser("sweep", help="WER / recall over a delta grid, as CSV")
    p.add_argument("--utterances", nargs="+", required=True,
                   help="utterance files, optionally as NAME=PATH")
    p.add_argument("--deltas", type=float, nargs="+", required=True)
    p.add_argument("--modes", nargs="+", default=["otf_rescoring", "fusion"])
    search_flags(p)
    common(p)

    for sp in sub.choices.values():
        sp.add_argument("-o", "--out", help="output file (default: stdout)")
    return ap


def main(argv=None, stdin=None) -> int:
    args = build_parser().parse_args(argv)
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        if args.command == "compile":
            cmd_compile(args, out)
        elif args.command == "match":
            cmd_match(args, out, stdin or sys.stdin)
        elif args.command == "gen":
            cmd_gen(args, out)
        elif args.command == "decode":
            cmd_decode(args, out)
        elif args.command == "sweep":
            cmd_sweep(args, out)
    finally:
        if args.out:
            out.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
