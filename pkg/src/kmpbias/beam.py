"""Label-synchronous beam search with KMP biasing.

Biasing can enter the search in two places:

* ``fusion``: every one of the top-F model expansions of each hypothesis is
  scored with its biasing bonus *before* pruning to the beam.
* ``otf_rescoring``: pruning uses model scores only; afterwards each survivor's
  new token is scored and the bonus is folded into its carried score, which
  affects later steps but not the pruning decision just made.

``none`` runs plain beam search without any biasing state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .engine import BiasEngine, make_engine
from .prefix import PrefixSet
from .scorer import PhraseSet

MODES = ("fusion", "otf_rescoring", "none")


class DecodeError(RuntimeError):
    pass


class Scorer:
    """Next-token scorer contract.

    ``log_probs(tokens)`` returns a length-``vocab_size`` vector of log-scores
    for the token following ``tokens``. A hypothesis ending in ``eos_id``
    is finished and is not expanded further.
    """

    vocab_size: int
    eos_id: Optional[int] = None

    def log_probs(self, tokens: Sequence[int]) -> np.ndarray:
        raise NotImplementedError


class TableScorer(Scorer):
    """Scores looked up by the number of tokens emitted so far (blank excluded)."""

    def __init__(self, table, eos_id=None, blank_id=None):
        self.table = np.asarray(table, dtype=np.float64)
        self.vocab_size = self.table.shape[1]
        self.eos_id = eos_id
        self.blank_id = blank_id

    def log_probs(self, tokens):
        pos = sum(1 for t in tokens if t != self.blank_id)
        return self.table[min(pos, len(self.table) - 1)]


@dataclass
class Hypothesis:
    tokens: tuple[int, ...]
    score: float
    bias_state: object = None
    model_score: float = 0.0
    bonus: float = 0.0
    # phrase indices of each full match, in order of occurrence
    matches: tuple[frozenset, ...] = ()
    finished: bool = False

    @property
    def matched_phrase_indices(self) -> set[int]:
        return set().union(*self.matches) if self.matches else set()


@dataclass
class BeamConfig:
    beam_size: int = 8
    bias_expansions: int = 50
    mode: str = "fusion"
    blank_id: Optional[int] = None
    max_steps: int = 64
    engine: str = "scalar"

    def validate(self, vocab_size: int) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.beam_size < 1:
            raise ValueError("beam_size must be >= 1")
        if self.mode == "fusion" and not 1 <= self.bias_expansions <= vocab_size:
            raise ValueError(f"bias_expansions must lie in [1, {vocab_size}]")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass
class DecodeResult:
    hypotheses: list[Hypothesis]
    truncated: bool = False
    # bonus evaluations per step, and the number of live hypotheses at that step
    bonus_calls: list[int] = field(default_factory=list)
    live_counts: list[int] = field(default_factory=list)

    @property
    def best(self) -> Hypothesis:
        return self.hypotheses[0]


def _rank_key(h: Hypothesis):
    return (-h.score, h.tokens)


def prune(hypotheses: Sequence[Hypothesis], k: int) -> list[Hypothesis]:
    """Top ``k`` by score; equal scores go to the lexicographically smaller sequence."""
    return sorted(hypotheses, key=_rank_key)[:k]


def _top_tokens(lp: np.ndarray, n: int, exclude: Optional[int] = None) -> list[int]:
    ids = np.flatnonzero(np.isfinite(lp))
    if exclude is not None:
        ids = ids[ids != exclude]
    # stable sort on -score keeps ascending token id among ties
    order = ids[np.argsort(-lp[ids], kind="stable")]
    return [int(t) for t in order[:n]]


def decode(
    model: Scorer,
    phrases: Optional[PhraseSet],
    prefixes: Optional[PrefixSet] = None,
    cfg: Optional[BeamConfig] = None,
    engine: Optional[BiasEngine] = None,
) -> DecodeResult:
    cfg = cfg or BeamConfig()
    cfg.validate(model.vocab_size)
    biased = cfg.mode != "none"
    if biased and phrases is None:
        raise ValueError(f"mode {cfg.mode!r} needs a phrase set")
    if biased and engine is None:
        engine = make_engine(cfg.engine, phrases, prefixes, model.vocab_size)
    blank = cfg.blank_id
    K = cfg.beam_size

    start_state = engine.initial_state() if biased else None
    beam = [Hypothesis((), 0.0, start_state)]
    result = DecodeResult([])

    for _ in range(cfg.max_steps):
        live = [h for h in beam if not h.finished]
        if not live:
            break
        calls_before = engine.calls if biased else 0
        carried = [h for h in beam if h.finished]
        candidates = []

        rows = []
        for h in live:
            lp = np.asarray(model.log_probs(h.tokens), dtype=np.float64)
            if not np.isfinite(lp).any():
                raise DecodeError(f"scorer gave no feasible token after {h.tokens}")
            if cfg.mode == "fusion":
                toks = _top_tokens(lp, cfg.bias_expansions, exclude=blank)
                if blank is not None and np.isfinite(lp[blank]):
                    toks.append(blank)
            else:
                toks = _top_tokens(lp, K)
            rows.append((h, lp, toks))

        if cfg.mode == "fusion":
            scored = [[x for x in toks if x != blank] for _, _, toks in rows]
            exts = engine.extend([h.bias_state for h, _, _ in rows], scored)
            for (h, lp, toks), ext_row in zip(rows, exts):
                ext_iter = iter(ext_row)
                for x in toks:
                    if x == blank:
                        candidates.append(_extend(h, x, lp[x], None, model.eos_id))
                    else:
                        candidates.append(_extend(h, x, lp[x], next(ext_iter), model.eos_id))
        else:
            for h, lp, toks in rows:
                for x in toks:
                    candidates.append(_extend(h, x, lp[x], None, model.eos_id))

        fresh_ids = {id(c) for c in candidates}
        beam = prune(carried + candidates, K)

        if cfg.mode == "otf_rescoring":
            fresh = [i for i, h in enumerate(beam)
                     if id(h) in fresh_ids and h.tokens[-1] != blank]
            exts = engine.extend([beam[i].bias_state for i in fresh],
                                 [[beam[i].tokens[-1]] for i in fresh])
            for i, (ext,) in zip(fresh, exts):
                h = beam[i]
                beam[i] = Hypothesis(
                    h.tokens, h.score + ext.bonus, ext.state, h.model_score,
                    h.bonus + ext.bonus, h.matches + ((ext.matched,) if ext.matched else ()),
                    h.finished,
                )

        result.bonus_calls.append((engine.calls - calls_before) if biased else 0)
        result.live_counts.append(len(live))
    else:
        result.truncated = any(not h.finished for h in beam)

    result.hypotheses = sorted(beam, key=_rank_key)
    return result


def _extend(h: Hypothesis, x: int, lp: float, ext, eos_id) -> Hypothesis:
    lp = float(lp)
    if ext is None:
        return Hypothesis(h.tokens + (x,), h.score + lp, h.bias_state, h.model_score + lp,
                          h.bonus, h.matches, x == eos_id)
    return Hypothesis(
        h.tokens + (x,), h.score + lp + ext.bonus, ext.state, h.model_score + lp,
        h.bonus + ext.bonus, h.matches + ((ext.matched,) if ext.matched else ()),
        x == eos_id,
    )
