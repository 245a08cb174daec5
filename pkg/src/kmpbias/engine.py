"""Bonus engines behind one interface used by beam search.

``ScalarEngine`` loops over the per-phrase scalar routines; ``BatchEngine``
evaluates the whole (hypothesis, expansion, phrase) grid with dense arrays.
Both return identical states and bit-identical bonuses.
"""

from __future__ import annotations

from typing import NamedTuple, Optional, Sequence

import numpy as np

from .batch import (
    PhraseBank,
    batch_compute_bonus,
    batch_forward_prefixed,
    bank_for,
    prefix_bank_for,
)
from .prefix import PrefixedMatchState, PrefixSet, compute_bonus_prefixed
from .scorer import PhraseSet, compute_bonus


class Extension(NamedTuple):
    state: object
    bonus: float
    matched: frozenset


class BiasEngine:
    """Common bookkeeping: ``calls`` counts single (state, token) bonus evaluations."""

    def __init__(self, phrases: PhraseSet, prefixes: Optional[PrefixSet] = None):
        self.phrases = phrases
        self.prefixes = prefixes if prefixes is not None and len(prefixes) else None
        self.calls = 0

    def initial_state(self):
        if self.prefixes is None:
            return self.phrases.zero_state()
        return PrefixedMatchState.zero(self.phrases, self.prefixes)

    def extend(self, states: Sequence, tokens: Sequence[Sequence[int]]) -> list[list[Extension]]:
        raise NotImplementedError

    def replay(self, tokens: Sequence[int], skip: Sequence[int] = ()):
        """Run ``tokens`` from the initial state; returns (state, total bonus, matches)."""
        state = self.initial_state()
        total = 0.0
        matches = []
        for x in tokens:
            if x in skip:
                continue
            ext = self._one(state, x)
            state = ext.state
            total += ext.bonus
            if ext.matched:
                matches.append(ext.matched)
        return state, total, matches

    def _one(self, state, x) -> Extension:
        if self.prefixes is None:
            return Extension(*compute_bonus(self.phrases, state, x))
        return Extension(*compute_bonus_prefixed(self.phrases, self.prefixes, state, x))


class ScalarEngine(BiasEngine):
    def extend(self, states, tokens):
        out = []
        for state, row in zip(states, tokens):
            out.append([self._one(state, x) for x in row])
            self.calls += len(row)
        return out


class BatchEngine(BiasEngine):
    def __init__(self, phrases: PhraseSet, prefixes: Optional[PrefixSet] = None,
                 vocab_size: int = 4096):
        super().__init__(phrases, prefixes)
        self.vocab_size = vocab_size
        self.bank: PhraseBank = bank_for(phrases, vocab_size)
        self.prefix_bank = prefix_bank_for(self.prefixes, vocab_size)

    def extend(self, states, tokens):
        K = len(states)
        if K == 0:
            return []
        widths = [len(row) for row in tokens]
        F = max(widths, default=0)
        if F == 0:
            return [[] for _ in range(K)]
        # ragged rows are padded with token 0; padded lanes are discarded below
        grid = np.zeros((K, F), dtype=np.int64)
        for k, row in enumerate(tokens):
            grid[k, :len(row)] = row
        self.calls += sum(widths)

        if self.prefixes is None:
            lengths = np.array(states, dtype=np.int64).reshape(K, -1)
            res = batch_compute_bonus(self.bank, self.phrases.per_token_bonus, lengths, grid)
        else:
            lengths = np.array([s.phrase_lengths for s in states], dtype=np.int64)
            plen = np.array([s.prefix_lengths for s in states], dtype=np.int64).reshape(K, -1)
            mask = np.array([s.prefix_mask for s in states], dtype=bool)
            res = batch_forward_prefixed(
                self.bank, self.prefix_bank, self.phrases.per_token_bonus,
                self.prefixes.boost, lengths, plen, mask, grid,
            )

        lengths_l = res.lengths.tolist()
        bonus_l = res.bonus.tolist()
        matched_l = res.matched.tolist()
        if self.prefixes is not None:
            plen_l = res.prefix_lengths.tolist()
            mask_l = res.mask.tolist()
        out = []
        for k in range(K):
            row = []
            for f in range(widths[k]):
                new = tuple(lengths_l[k][f])
                if self.prefixes is not None:
                    new = PrefixedMatchState(new, tuple(plen_l[k][f]), tuple(mask_l[k][f]))
                hits = matched_l[k][f]
                matched = frozenset(b for b, hit in enumerate(hits) if hit) if any(hits) else frozenset()
                row.append(Extension(new, bonus_l[k][f], matched))
            out.append(row)
        return out


def make_engine(kind: str, phrases: PhraseSet, prefixes: Optional[PrefixSet] = None,
                vocab_size: int = 4096) -> BiasEngine:
    if kind == "scalar":
        return ScalarEngine(phrases, prefixes)
    if kind == "batch":
        return BatchEngine(phrases, prefixes, vocab_size)
    raise ValueError(f"unknown engine {kind!r}; expected 'scalar' or 'batch'")
