"""Slow brute-force references used by the test suite.

Nothing here imports the engines; only plain sequences go in and out.
"""

from __future__ import annotations

from typing import Sequence


def naive_search(pattern: Sequence[int], text: Sequence[int]) -> list[int]:
    """Non-overlapping, leftmost-greedy match positions by direct comparison."""
    pattern = list(pattern)
    text = list(text)
    m = len(pattern)
    if m == 0:
        raise ValueError("pattern must be non-empty")
    out = []
    j = 0
    while j + m <= len(text):
        if text[j:j + m] == pattern:
            out.append(j)
            j += m
        else:
            j += 1
    return out


def longest_border(seq: Sequence[int]) -> int:
    """Length of the longest proper prefix of ``seq`` that is also a suffix."""
    seq = list(seq)
    for k in range(len(seq) - 1, 0, -1):
        if seq[:k] == seq[len(seq) - k:]:
            return k
    return 0


def naive_failure(tokens: Sequence[int]) -> list[int]:
    tokens = list(tokens)
    m = len(tokens)
    plain = [-1] + [longest_border(tokens[:i]) for i in range(1, m)]

    def collapsed(i: int) -> int:
        if i <= 0:
            return -1
        k = plain[i]
        if tokens[k] == tokens[i]:
            return collapsed(k)
        return k

    return [collapsed(i) for i in range(m)]


def _suffix_match(history: list[int], phrase: list[int]) -> int:
    """Partial-match length of ``phrase`` given tokens consumed since the last reset.

    The longest proper prefix of the phrase that is a suffix of ``history``.
    """
    for k in range(min(len(phrase) - 1, len(history)), 0, -1):
        if history[len(history) - k:] == phrase[:k]:
            return k
    return 0


def replay_bonus(
    phrases: Sequence[Sequence[int]],
    stream: Sequence[int],
    delta: float,
    prefixes: Sequence[Sequence[int]] = (),
    boost: float = 1.0,
) -> tuple[float, dict]:
    """Total bonus and final state of ``stream``, simulated from the definitions.

    Partial-match lengths are recomputed from scratch at every step as the
    longest phrase prefix ending at the current position (within the window
    since the last reset), rather than by failure-table transitions.

    Returns ``(total, state)`` with ``state`` holding ``phrase_lengths``,
    ``prefix_lengths``, ``mask`` and the list of ``matches`` as
    ``(step, phrase_indices)`` pairs.
    """
    phrases = [list(p) for p in phrases]
    prefixes = [list(p) for p in prefixes]
    B = len(phrases)
    # windows of tokens each phrase / prefix has seen since its last restart
    win = [[] for _ in range(B)]
    pwin = [[] for _ in range(len(prefixes))]
    mask = [False] * B
    lengths = [0] * B
    total = 0.0
    matches = []

    def mu(ls, ms):
        return max(((boost if m else 1.0) * (l * delta) for l, m in zip(ls, ms)), default=0.0)

    for step, x in enumerate(stream):
        prev = mu(lengths, mask)
        new_lengths, v, ext, full = [], [], [], []
        for b, ph in enumerate(phrases):
            win[b].append(x)
            done = win[b][-len(ph):] == ph
            u = 0 if done else _suffix_match(win[b], ph)
            full.append(done)
            new_lengths.append(u)
            v.append(len(ph) if done else u)
            ext.append(done or u > lengths[b])
        mask = [m and e for m, e in zip(mask, ext)]
        total += mu(v, mask) - prev

        prefix_hit = False
        for c, pr in enumerate(prefixes):
            pwin[c].append(x)
            if pwin[c][-len(pr):] == pr:
                prefix_hit = True
                pwin[c] = []
        if prefix_hit:
            for b in range(B):
                if not ext[b]:
                    new_lengths[b] = 0
                    mask[b] = True
                    win[b] = []
        if any(full):
            matches.append((step, [b for b in range(B) if full[b]]))
            new_lengths = [0] * B
            mask = [False] * B
            win = [[] for _ in range(B)]
            pwin = [[] for _ in range(len(prefixes))]
        lengths = new_lengths

    prefix_lengths = [
        _suffix_match(w, pr) if not (w[-len(pr):] == pr) else 0
        for w, pr in zip(pwin, prefixes)
    ]
    return total, {
        "phrase_lengths": lengths,
        "prefix_lengths": prefix_lengths,
        "mask": mask,
        "matches": matches,
    }


def concatenated_boost(
    phrases: Sequence[Sequence[int]],
    prefixes: Sequence[Sequence[int]],
    stream: Sequence[int],
    delta: float,
    boost: float,
) -> float:
    """Credit of completed prefix+phrase occurrences under the naive expansion.

    Builds the B + C*B phrase list (each phrase alone, plus every prefix
    concatenated with every phrase) and credits ``delta * len(phrase)`` for a
    bare phrase and ``boost * delta * len(phrase)`` when the phrase directly
    follows a prefix. Matching is non-overlapping and leftmost-greedy.
    """
    entries = [(list(p), len(p), 1.0) for p in phrases]
    entries += [(list(r) + list(p), len(p), boost) for r in prefixes for p in phrases]
    stream = list(stream)
    total = 0.0
    j = 0
    while j < len(stream):
        best = None
        # the earliest-ending occurrence starting at j wins; prefer the boosted one
        for seq, plen, mult in entries:
            if stream[j:j + len(seq)] == seq:
                key = (len(seq) == plen, j + len(seq))
                if best is None or key < best[0]:
                    best = (key, seq, plen, mult)
        if best is None:
            j += 1
            continue
        _, seq, plen, mult = best
        total += mult * delta * plen
        j += len(seq)
    return total
