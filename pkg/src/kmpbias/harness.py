"""Toy-scale biasing experiments: synthetic utterances, a noisy channel scorer,
decoding drivers and metrics (WER, entity recall, delta sweeps).

Token layout of the toy vocabulary::

    0                      end of sequence
    1 .. n_carriers        carrier tokens ("call", "open", "play")
    next n_filler ids      ordinary words
    next n_entity ids      entity words, used to build biasing phrases

Biasing phrases within one utterance's list never share tokens, and no
phrase token ever appears in a filler position, so a phrase occurs in a
hypothesis only if it was decoded on purpose.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .beam import BeamConfig, Scorer, decode
from .engine import make_engine
from .oracle import naive_search
from .prefix import PrefixSet
from .scorer import PhraseSet

DOMAINS = ("anti", "with_prefix", "without_prefix")
CSV_COLUMNS = ("set", "B", "mode", "F", "delta", "wer", "entity_recall")


class GenerationError(ValueError):
    pass


@dataclass(frozen=True)
class ToyVocab:
    n_carriers: int = 3
    n_filler: int = 120
    n_entity: int = 480
    eos: int = 0

    @property
    def size(self) -> int:
        return 1 + self.n_carriers + self.n_filler + self.n_entity

    @property
    def carriers(self) -> range:
        return range(1, 1 + self.n_carriers)

    @property
    def fillers(self) -> range:
        start = 1 + self.n_carriers
        return range(start, start + self.n_filler)

    @property
    def entities(self) -> range:
        start = 1 + self.n_carriers + self.n_filler
        return range(start, start + self.n_entity)


@dataclass(frozen=True)
class ChannelNoise:
    """Parameters of the toy acoustic channel.

    At each position the correct token normally holds mass ``p``; ``k``
    confusable tokens share ``(1 - p) * q`` along a geometric ladder with
    ratio ``ratio``; everything else splits the remainder uniformly. With
    probability ``hard_rate`` (``entity_hard_rate`` for tokens of biasing
    phrases) a position is "hard": the correct token swaps places with a
    confusable at a uniformly drawn rank in ``1..k``. The end-of-sequence
    position is never hard.
    """

    p: float = 0.6
    k: int = 24
    q: float = 0.9
    ratio: float = 0.85
    hard_rate: float = 0.05
    entity_hard_rate: float = 0.5
    seed: int = 0

    def ladder(self) -> np.ndarray:
        j = np.arange(self.k)
        w = self.ratio ** j
        return (1.0 - self.p) * self.q * w / w.sum()


@dataclass(frozen=True)
class UtteranceSpec:
    reference: tuple[int, ...]
    phrases: tuple[tuple[int, ...], ...]
    entity_index: Optional[int]
    domain: str
    noise: ChannelNoise = field(default_factory=ChannelNoise)

    @property
    def entity(self) -> Optional[tuple[int, ...]]:
        return None if self.entity_index is None else self.phrases[self.entity_index]

    def to_record(self) -> dict:
        return {
            "domain": self.domain,
            "reference": list(self.reference),
            "phrases": [list(p) for p in self.phrases],
            "entity_index": self.entity_index,
            "noise": asdict(self.noise),
        }

    @classmethod
    def from_record(cls, rec: dict) -> "UtteranceSpec":
        return cls(
            tuple(rec["reference"]),
            tuple(tuple(p) for p in rec["phrases"]),
            rec.get("entity_index"),
            rec["domain"],
            ChannelNoise(**rec.get("noise", {})),
        )


def _draw_phrases(rng: np.random.Generator, vocab: ToyVocab, B: int,
                  max_len: int) -> list[tuple[int, ...]]:
    lens = rng.integers(1, max_len + 1, size=B)
    if lens.sum() > vocab.n_entity:
        raise GenerationError(
            f"{B} phrases need {lens.sum()} entity tokens; the pool only has {vocab.n_entity}"
        )
    pool = rng.permutation(np.asarray(vocab.entities))
    out, pos = [], 0
    for n in lens:
        out.append(tuple(int(t) for t in pool[pos:pos + n]))
        pos += n
    return out


def generate_testset(domain: str, count: int, B: int, seed: int,
                     vocab: ToyVocab = ToyVocab(), noise: ChannelNoise = ChannelNoise(),
                     max_phrase_len: int = 3) -> list[UtteranceSpec]:
    if domain not in DOMAINS:
        raise GenerationError(f"unknown domain {domain!r}")
    if B < 1:
        raise GenerationError("B must be >= 1")
    rng = np.random.default_rng([seed, DOMAINS.index(domain)])
    fillers = np.asarray(vocab.fillers)
    specs = []
    for _ in range(count):
        phrases = _draw_phrases(rng, vocab, B, max_phrase_len)
        fill = lambda n: [int(t) for t in rng.choice(fillers, size=n)]
        if domain == "anti":
            ref = fill(int(rng.integers(3, 7)))
            entity = None
        else:
            entity = int(rng.integers(B))
            body = list(phrases[entity])
            if domain == "with_prefix":
                carrier = int(rng.choice(np.asarray(vocab.carriers)))
                ref = fill(int(rng.integers(0, 2))) + [carrier] + body + fill(int(rng.integers(0, 2)))
            else:
                ref = fill(int(rng.integers(0, 3))) + body + fill(int(rng.integers(0, 3)))
        utt_noise = replace(noise, seed=int(rng.integers(2**31)))
        specs.append(UtteranceSpec(tuple(ref), tuple(phrases), entity, domain, utt_noise))
    return specs


class ChannelScorer(Scorer):
    """Position-indexed log-distributions built from a reference and noise settings.

    Row ``i`` scores the token following ``i`` emitted tokens; the row after the
    last reference token has end-of-sequence as its correct token, and later
    positions reuse that row.
    """

    def __init__(self, spec: UtteranceSpec, vocab: ToyVocab = ToyVocab()):
        self.vocab_size = vocab.size
        self.eos_id = vocab.eos
        self.table = build_channel(spec, vocab)

    def log_probs(self, tokens):
        return self.table[min(len(tokens), len(self.table) - 1)]


def build_channel(spec: UtteranceSpec, vocab: ToyVocab = ToyVocab()) -> np.ndarray:
    noise = spec.noise
    rng = np.random.default_rng(noise.seed)
    V = vocab.size
    phrase_tokens = np.array(sorted({t for p in spec.phrases for t in p}), dtype=np.int64)
    phrase_set = set(phrase_tokens.tolist())
    others = np.arange(1, V)
    ladder = noise.ladder()
    targets = list(spec.reference) + [vocab.eos]
    rows = np.empty((len(targets), V))
    with np.errstate(divide="ignore"):
        for i, true in enumerate(targets):
            # half the confusables come from this utterance's phrase list
            n_phr = min(noise.k // 2, len(phrase_tokens))
            cand_phr = phrase_tokens[phrase_tokens != true]
            picked = rng.choice(cand_phr, size=min(n_phr, len(cand_phr)), replace=False)
            rest = np.setdiff1d(others, np.append(picked, true))
            picked = np.concatenate(
                [picked, rng.choice(rest, size=noise.k - len(picked), replace=False)]
            )
            picked = rng.permutation(picked)
            order = np.concatenate([[true], picked])
            mass = np.concatenate([[noise.p], ladder])
            rate = noise.entity_hard_rate if true in phrase_set else noise.hard_rate
            if noise.k and i < len(spec.reference) and rng.random() < rate:
                r = int(rng.integers(1, noise.k + 1))
                order[0], order[r] = order[r], order[0]
            probs = np.zeros(V)
            n_rest = V - len(order)
            if n_rest:
                probs[:] = (1.0 - noise.p) * (1.0 - noise.q) / n_rest
            else:
                mass = mass / mass.sum()
            probs[order] = mass
            rows[i] = np.log(probs)
    return rows


def channel_threshold(noise: ChannelNoise) -> float:
    """Largest per-token bonus for which no deviation can beat the true path.

    Equals the log-score gap between the correct token and the strongest
    confusable on a position without swaps.
    """
    return math.log(noise.p) - math.log(noise.ladder()[0])


def word_error_rate(hyp: Sequence[int], ref: Sequence[int]) -> float:
    """Levenshtein distance over tokens divided by the reference length.

    An empty reference gives 0.0 for an empty hypothesis and otherwise
    ``len(hyp)``, i.e. every insertion counted against a length of one.
    """
    return edit_distance(hyp, ref) / max(len(ref), 1)


def edit_distance(a: Sequence[int], b: Sequence[int]) -> int:
    a, b = list(a), list(b)
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i] + [0] * len(b)
        for j, y in enumerate(b, 1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y))
        prev = cur
    return prev[-1]


@dataclass
class UtteranceResult:
    hypothesis: tuple[int, ...]
    edits: int
    ref_len: int
    entity_hit: Optional[bool]
    matched: set


def strip_special(tokens: Iterable[int], vocab: ToyVocab = ToyVocab(),
                  blank_id: Optional[int] = None) -> tuple[int, ...]:
    return tuple(t for t in tokens if t != vocab.eos and t != blank_id)


def decode_utterance(spec: UtteranceSpec, mode: str, delta: float, F: int = 50,
                     beam_size: int = 8, boost: float = 1.0, use_prefixes: bool = False,
                     prefixes: Optional[Sequence[Sequence[int]]] = None,
                     engine: str = "batch", vocab: ToyVocab = ToyVocab(),
                     blank_id: Optional[int] = None, full: bool = False):
    """Decode one synthetic utterance and score the best hypothesis.

    ``use_prefixes`` supplies the toy carrier tokens as single-token prefixes;
    ``prefixes`` overrides them with explicit token lists. With ``full=True``
    the raw :class:`DecodeResult` is returned alongside the score.
    """
    scorer = ChannelScorer(spec, vocab)
    phrases = PhraseSet.from_tokens(spec.phrases, delta)
    if prefixes is None and use_prefixes:
        prefixes = [[c] for c in vocab.carriers]
    prefix_set = PrefixSet.from_tokens(prefixes, boost) if prefixes else None
    cfg = BeamConfig(beam_size=beam_size, bias_expansions=F, mode=mode,
                     max_steps=len(spec.reference) + 8, engine=engine, blank_id=blank_id)
    result = decode(scorer, phrases, prefix_set, cfg)
    hyp = strip_special(result.best.tokens, vocab, blank_id)

    # entity recall from a replay of the winning sequence, cross-checked by substring search
    replay = make_engine("scalar", phrases)
    _, _, matches = replay.replay(hyp)
    matched = set().union(*matches) if matches else set()
    entity_hit = None
    if spec.entity is not None:
        by_match = spec.entity_index in matched
        by_search = bool(naive_search(spec.entity, hyp))
        if by_match != by_search:
            raise AssertionError(f"recall cross-check failed for {hyp} / {spec.entity}")
        entity_hit = by_match
    scored = UtteranceResult(hyp, edit_distance(hyp, spec.reference), len(spec.reference),
                             entity_hit, matched)
    return (scored, result) if full else scored


@dataclass
class SetScore:
    wer: float
    entity_recall: Optional[float]


def score_set(specs: Sequence[UtteranceSpec], mode: str, delta: float, **kw) -> SetScore:
    edits = ref_len = hits = n_entity = 0
    for spec in specs:
        r = decode_utterance(spec, mode, delta, **kw)
        edits += r.edits
        ref_len += r.ref_len
        if r.entity_hit is not None:
            n_entity += 1
            hits += r.entity_hit
    recall = hits / n_entity if n_entity else None
    return SetScore(edits / max(ref_len, 1), recall)


def sweep_delta(testsets: dict[str, Sequence[UtteranceSpec]], deltas: Sequence[float],
                configs: Sequence[tuple[str, int]] = (("otf_rescoring", 50), ("fusion", 50)),
                average: Sequence[str] = ("anti", "with_prefix"), **kw) -> list[dict]:
    """One row per (set, mode, F, delta), plus averaged rows over ``average`` sets.

    Rows are sorted so the output does not depend on evaluation order.
    """
    if not deltas:
        raise ValueError("delta grid must be non-empty")
    rows = []
    for name, specs in testsets.items():
        B = len(specs[0].phrases) if specs else 0
        for mode, F in configs:
            for d in deltas:
                s = score_set(specs, mode, d, F=F, **kw)
                rows.append({"set": name, "B": B, "mode": mode, "F": F, "delta": float(d),
                             "wer": s.wer, "entity_recall": s.entity_recall})
    avg_sets = [n for n in average if n in testsets]
    if len(avg_sets) > 1:
        label = "+".join(avg_sets)
        for mode, F in configs:
            for d in deltas:
                sel = [r for r in rows if r["set"] in avg_sets and r["mode"] == mode
                       and r["F"] == F and r["delta"] == float(d)]
                rows.append({"set": label, "B": sel[0]["B"], "mode": mode, "F": F,
                             "delta": float(d), "wer": float(np.mean([r["wer"] for r in sel])),
                             "entity_recall": None})
    rows.sort(key=lambda r: (r["set"], r["mode"], r["F"], r["delta"]))
    return rows


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        recall = "" if r["entity_recall"] is None else f"{r['entity_recall']:.6f}"
        w.writerow([r["set"], r["B"], r["mode"], r["F"], f"{r['delta']:g}",
                    f"{r['wer']:.6f}", recall])
    return buf.getvalue()
