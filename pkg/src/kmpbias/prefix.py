"""Prefix-conditioned boosting.

Prefixes (carrier phrases such as "call" or "open") are matched alongside
the biasing phrases but never earn a bonus themselves. Completing a prefix
restarts every phrase that the same token did not extend and marks it as
prefix-matching; a prefix-matching phrase scores ``boost`` times higher for
as long as each following token keeps extending it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .kmp import Pattern, StateCorruptionError, compile_pattern, forward
from .scorer import PhraseSet, score


@dataclass(frozen=True)
class PrefixSet:
    prefixes: tuple[Pattern, ...]
    boost: float = 1.0

    def __post_init__(self):
        if self.boost < 1.0:
            raise ValueError("boost must be >= 1")

    @classmethod
    def from_tokens(cls, prefixes: Sequence[Sequence[int]], boost: float) -> "PrefixSet":
        return cls(tuple(compile_pattern(p) for p in prefixes), float(boost))

    def __len__(self) -> int:
        return len(self.prefixes)

    @property
    def gamma_bar(self) -> int:
        return max((p.gamma for p in self.prefixes), default=0)


class PrefixedMatchState(NamedTuple):
    phrase_lengths: tuple[int, ...]
    prefix_lengths: tuple[int, ...]
    prefix_mask: tuple[bool, ...]

    @classmethod
    def zero(cls, ps: PhraseSet, pfx: PrefixSet) -> "PrefixedMatchState":
        return cls((0,) * len(ps), (0,) * len(pfx), (False,) * len(ps))


def check_prefixed_state(ps: PhraseSet, pfx: PrefixSet, state: PrefixedMatchState) -> None:
    ps.check_state(state.phrase_lengths)
    if len(state.prefix_mask) != len(ps):
        raise StateCorruptionError("prefix mask length does not match phrase count")
    if len(state.prefix_lengths) != len(pfx):
        raise StateCorruptionError("prefix state length does not match prefix count")
    for c, (j, r) in enumerate(zip(state.prefix_lengths, pfx.prefixes)):
        if not 0 <= j < len(r):
            raise StateCorruptionError(f"prefix {c}: length {j} outside [0, {len(r)})")


def potential_boosted(
    ps: PhraseSet,
    pfx: PrefixSet,
    lengths: Sequence[int],
    mask: Sequence[bool],
    override_lengths: Optional[Sequence[Optional[int]]] = None,
) -> float:
    best = 0.0
    for b, (length, m) in enumerate(zip(lengths, mask)):
        if override_lengths is not None and override_lengths[b] is not None:
            length = override_lengths[b]
        best = max(best, (pfx.boost if m else 1.0) * score(ps, length))
    return best


class PrefixedBonusResult(NamedTuple):
    new_state: PrefixedMatchState
    bonus: float
    matched_phrase_indices: frozenset


def compute_bonus_prefixed(
    ps: PhraseSet, pfx: PrefixSet, state: PrefixedMatchState, x: int
) -> PrefixedBonusResult:
    check_prefixed_state(ps, pfx, state)
    lengths, plengths, mask = state
    prev = potential_boosted(ps, pfx, lengths, mask)

    new, scored, ext, matched = [], [], [], []
    for b, (p, length) in enumerate(zip(ps.patterns, lengths)):
        u, hit = forward(p, length, x)
        new.append(u)
        if hit:
            matched.append(b)
            scored.append(len(p))
            ext.append(True)
        else:
            scored.append(u)
            ext.append(u > length)
    # the "before" potential keeps the old mask; the "after" one uses the updated mask
    new_mask = [m and e for m, e in zip(mask, ext)]
    bonus = potential_boosted(ps, pfx, scored, new_mask) - prev

    new_plengths = []
    prefix_hit = False
    for r, j in zip(pfx.prefixes, plengths):
        n, hit = forward(r, j, x)
        new_plengths.append(n)
        prefix_hit = prefix_hit or hit
    if prefix_hit:
        for b in range(len(new)):
            if not ext[b]:
                new[b] = 0
                new_mask[b] = True

    if matched:
        zero = PrefixedMatchState.zero(ps, pfx)
        return PrefixedBonusResult(zero, bonus, frozenset(matched))
    return PrefixedBonusResult(
        PrefixedMatchState(tuple(new), tuple(new_plengths), tuple(new_mask)),
        bonus,
        frozenset(),
    )
