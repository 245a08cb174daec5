"""Single-pattern KMP machinery: failure tables, the forward transition and
its dense DFA-table expansion.

Tokens are opaque non-negative integer ids. A pattern's matching state is
the current partial-match length ``i`` in ``[0, m)``; a full match resets
the state to 0 (overlapping matches are not reported).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np


class InvalidPatternError(ValueError):
    """Raised when a pattern cannot be compiled (e.g. it is empty)."""


class StateCorruptionError(ValueError):
    """Raised when a matching state lies outside ``[0, m)``."""


class InvalidVocabError(ValueError):
    """Raised when a pattern token does not fit the requested vocabulary."""


@dataclass(frozen=True)
class Pattern:
    """A compiled pattern.

    ``failure`` is the shortcut failure table: on a mismatch at position
    ``i`` the next candidate position is ``failure[i]`` (``-1`` means no
    candidate). ``gamma`` bounds the number of determinization-loop
    iterations a single :func:`forward` call can perform.
    """

    tokens: tuple[int, ...]
    failure: tuple[int, ...]
    gamma: int
    build_steps: int = field(default=0, compare=False)

    def __len__(self) -> int:
        return len(self.tokens)


class ForwardResult(NamedTuple):
    new_length: int
    full_match: bool


def _chain_length(failure: Sequence[int], start: int) -> int:
    """Number of failure-table applications needed to go from ``start`` to -1."""
    n = 0
    k = start
    while k >= 0:
        k = failure[k]
        n += 1
    return n


def compute_gamma(failure: Sequence[int]) -> int:
    """Worst-case determinization-loop iteration count, floored at 1.

    The loop in :func:`forward` starts from ``failure[i]`` and applies the
    table until it hits -1, so the count for state ``i`` is the chain length
    from ``failure[i]``. The floor keeps every pattern's loop bound positive.
    """
    return max(1, max(_chain_length(failure, f) for f in failure))


def compile_pattern(tokens: Sequence[int]) -> Pattern:
    tokens = tuple(int(t) for t in tokens)
    m = len(tokens)
    if m == 0:
        raise InvalidPatternError("pattern must contain at least one token")
    if any(t < 0 for t in tokens):
        raise InvalidPatternError(f"token ids must be non-negative: {tokens}")

    failure = [0] * m
    failure[0] = -1
    steps = 0
    # invariant: k == pi(i) (unshortcut border length) at the top of each iteration
    k = 0
    for i in range(1, m):
        if tokens[i] == tokens[k]:
            failure[i] = failure[k]
        else:
            failure[i] = k
            while k >= 0 and tokens[i] != tokens[k]:
                k = failure[k]
                steps += 1
        k += 1

    return Pattern(tokens, tuple(failure), compute_gamma(failure), steps)


def forward(p: Pattern, length: int, x: int) -> ForwardResult:
    new_length, full_match, _ = forward_counted(p, length, x)
    return ForwardResult(new_length, full_match)


def forward_counted(p: Pattern, length: int, x: int) -> tuple[int, bool, int]:
    """Like :func:`forward`, also returning the number of loop iterations."""
    m = len(p.tokens)
    if not 0 <= length < m:
        raise StateCorruptionError(f"length {length} outside [0, {m})")
    tokens = p.tokens
    if tokens[length] == x:
        q = length + 1
        if q == m:
            return 0, True, 0
        return q, False, 0

    failure = p.failure
    k = failure[length]
    iters = 0
    while k >= 0 and tokens[k] != x:
        k = failure[k]
        iters += 1
    return k + 1, False, iters


def expand_transition_table(p: Pattern, vocab_size: int) -> tuple[np.ndarray, np.ndarray]:
    """Dense ``m x vocab_size`` next-state table and matching full-match flags.

    Trades O(m) memory for O(m |V|) in exchange for loop-free transitions.
    """
    m = len(p.tokens)
    if max(p.tokens) >= vocab_size:
        raise InvalidVocabError(
            f"pattern token {max(p.tokens)} out of range for vocab size {vocab_size}"
        )
    table = np.zeros((m, vocab_size), dtype=np.int64)
    full = np.zeros((m, vocab_size), dtype=bool)
    for i in range(m):
        for x in range(vocab_size):
            q, hit = forward(p, i, x)
            table[i, x] = q
            full[i, x] = hit
    return table, full


def scan(p: Pattern, text: Sequence[int]) -> list[int]:
    """Start positions of non-overlapping matches found by repeated forward()."""
    out = []
    state = 0
    for j, x in enumerate(text):
        state, hit = forward(p, state, x)
        if hit:
            out.append(j - len(p.tokens) + 1)
    return out
