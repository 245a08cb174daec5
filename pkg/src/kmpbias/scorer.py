"""Biasing bonus for a token extension, tracked over a set of phrases.

The bonus of a token is the change in a potential: the best partial-match
score over all phrases. Partial credit that is later broken is therefore
cancelled automatically, and only completed phrases keep their credit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .kmp import Pattern, StateCorruptionError, compile_pattern, forward

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PhraseSet:
    patterns: tuple[Pattern, ...]
    per_token_bonus: float

    def __post_init__(self):
        if not self.patterns:
            raise ValueError("a phrase set needs at least one phrase")
        if self.per_token_bonus < 0:
            raise ValueError("per_token_bonus must be non-negative")

    @classmethod
    def from_tokens(cls, phrases: Sequence[Sequence[int]], per_token_bonus: float) -> "PhraseSet":
        """Compile ``phrases``, dropping exact duplicates (first occurrence kept)."""
        seen = set()
        patterns = []
        for ph in phrases:
            key = tuple(int(t) for t in ph)
            if key in seen:
                logger.warning("dropping duplicate biasing phrase %s", key)
                continue
            seen.add(key)
            patterns.append(compile_pattern(key))
        return cls(tuple(patterns), float(per_token_bonus))

    def __len__(self) -> int:
        return len(self.patterns)

    @property
    def gamma_bar(self) -> int:
        return max(p.gamma for p in self.patterns)

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.patterns)

    def with_bonus(self, per_token_bonus: float) -> "PhraseSet":
        return PhraseSet(self.patterns, float(per_token_bonus))

    def zero_state(self) -> tuple[int, ...]:
        return (0,) * len(self.patterns)

    def check_state(self, lengths: Sequence[int]) -> None:
        if len(lengths) != len(self.patterns):
            raise StateCorruptionError(
                f"state has {len(lengths)} entries for {len(self.patterns)} phrases"
            )
        for b, (length, p) in enumerate(zip(lengths, self.patterns)):
            if not 0 <= length < len(p):
                raise StateCorruptionError(f"phrase {b}: length {length} outside [0, {len(p)})")


# A MatchState is just the tuple of per-phrase partial-match lengths.
MatchState = tuple


class BonusResult(NamedTuple):
    new_state: tuple[int, ...]
    bonus: float
    matched_phrase_indices: frozenset


def score(ps: PhraseSet, length: int) -> float:
    return length * ps.per_token_bonus


def potential(
    ps: PhraseSet,
    state: Sequence[int],
    override_lengths: Optional[Sequence[Optional[int]]] = None,
) -> float:
    """Best partial-match score over phrases.

    ``override_lengths[b]``, when not None, replaces ``state[b]``; bonus
    computation uses it to score a full match at the phrase's length.
    """
    best = 0.0
    for b, length in enumerate(state):
        if override_lengths is not None and override_lengths[b] is not None:
            length = override_lengths[b]
        best = max(best, score(ps, length))
    return best


def compute_bonus(ps: PhraseSet, state: Sequence[int], x: int) -> BonusResult:
    ps.check_state(state)
    new = []
    scored = []
    matched = []
    for b, (p, length) in enumerate(zip(ps.patterns, state)):
        u, hit = forward(p, length, x)
        new.append(u)
        if hit:
            matched.append(b)
            scored.append(len(p))
        else:
            scored.append(u)
    bonus = potential(ps, scored) - potential(ps, state)
    if matched:
        return BonusResult(ps.zero_state(), bonus, frozenset(matched))
    return BonusResult(tuple(new), bonus, frozenset())
