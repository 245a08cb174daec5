"""Dense fixed-shape bonus computation over a (hypothesis, expansion, phrase) grid.

All phrases are packed into padded ``B x Lmax`` token and failure matrices.
The determinization loop runs exactly ``gamma_bar`` times over the whole grid;
lanes that have already converged are held in place by a mask, so the amount
of work does not depend on the data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .kmp import InvalidVocabError, Pattern
from .prefix import PrefixSet
from .scorer import PhraseSet

MAX_PHRASE_LEN = 16


class ShapeError(ValueError):
    """Raised when grid arrays have inconsistent shapes."""


@dataclass(frozen=True, eq=False)
class PhraseBank:
    tokens: np.ndarray  # (B, Lmax); padding equals vocab_size
    failure: np.ndarray  # (B, Lmax); padding is -1
    lengths: np.ndarray  # (B,)
    gamma_bar: int
    vocab_size: int

    @classmethod
    def from_patterns(
        cls, patterns: Sequence[Pattern], vocab_size: int, max_len: int = MAX_PHRASE_LEN
    ) -> "PhraseBank":
        B = len(patterns)
        lmax = max((len(p) for p in patterns), default=1)
        if lmax > max_len:
            raise ValueError(f"phrase of {lmax} tokens exceeds the limit of {max_len}")
        tokens = np.full((B, lmax), vocab_size, dtype=np.int64)
        failure = np.full((B, lmax), -1, dtype=np.int64)
        for b, p in enumerate(patterns):
            if max(p.tokens) >= vocab_size:
                raise InvalidVocabError(f"phrase {b} has a token outside vocab size {vocab_size}")
            tokens[b, :len(p)] = p.tokens
            failure[b, :len(p)] = p.failure
        lengths = np.array([len(p) for p in patterns], dtype=np.int64)
        gamma_bar = max((p.gamma for p in patterns), default=0)
        return cls(tokens, failure, lengths, gamma_bar, vocab_size)

    @property
    def num_phrases(self) -> int:
        return self.tokens.shape[0]

    @property
    def max_len(self) -> int:
        return self.tokens.shape[1]


@dataclass
class _Workspace:
    """Preallocated buffers for the masked loop."""

    safe: np.ndarray
    gathered: np.ndarray
    active: np.ndarray
    scratch: np.ndarray

    @classmethod
    def for_shape(cls, shape) -> "_Workspace":
        return cls(
            np.empty(shape, dtype=np.int64),
            np.empty(shape, dtype=np.int64),
            np.empty(shape, dtype=bool),
            np.empty(shape, dtype=bool),
        )


def _determinize(bank: PhraseBank, k: np.ndarray, x: np.ndarray, offsets: np.ndarray,
                 n_iter: int, ws: _Workspace) -> int:
    """Run the masked failure-chain loop in place on ``k``; returns iterations run.

    ``k``, ``x`` and ``offsets`` all have shape (N, B); operands are
    pre-broadcast so that no ufunc needs an iteration buffer. Every operation
    writes into ``ws`` or ``k``, so the loop itself allocates nothing.
    """
    flat_tok = bank.tokens.reshape(-1)
    flat_fail = bank.failure.reshape(-1)
    for _ in range(n_iter):
        np.maximum(k, 0, out=ws.safe)
        np.add(ws.safe, offsets, out=ws.safe)
        np.take(flat_tok, ws.safe, out=ws.gathered, mode="clip")
        np.not_equal(ws.gathered, x, out=ws.active)
        np.greater_equal(k, 0, out=ws.scratch)
        np.logical_and(ws.active, ws.scratch, out=ws.active)
        np.take(flat_fail, ws.safe, out=ws.gathered, mode="clip")
        np.copyto(k, ws.gathered, where=ws.active)
    return n_iter


@dataclass
class GridForward:
    new_lengths: np.ndarray  # (N, B), already reset to 0 on full match
    full_match: np.ndarray  # (N, B)
    extended: np.ndarray  # (N, B): advanced or fully matched
    scored_lengths: np.ndarray  # (N, B): pattern length on full match else new length
    iterations: int


def forward_grid(bank: PhraseBank, lengths: np.ndarray, x: np.ndarray) -> GridForward:
    """Forward every (row, phrase) lane of ``lengths`` (N, B) by token ``x[row]``."""
    N, B = lengths.shape
    if B != bank.num_phrases:
        raise ShapeError(f"state has {B} phrases, bank has {bank.num_phrases}")
    if x.shape != (N,):
        raise ShapeError(f"expected {N} tokens, got shape {x.shape}")
    if N and (lengths.min() < 0 or np.any(lengths >= bank.lengths)):
        raise ShapeError("state lengths out of range for the phrase bank")
    if N and (x.min() < 0 or x.max() >= bank.vocab_size):
        raise InvalidVocabError("token outside the bank's vocabulary")
    offsets = np.ascontiguousarray(
        np.broadcast_to(np.arange(B, dtype=np.int64) * bank.max_len, (N, B))
    )
    xb = np.ascontiguousarray(np.broadcast_to(x.astype(np.int64).reshape(N, 1), (N, B)))
    idx = lengths + offsets
    hit = bank.tokens.reshape(-1)[idx] == xb
    k = bank.failure.reshape(-1)[idx]
    iters = _determinize(bank, k, xb, offsets, bank.gamma_bar, _Workspace.for_shape((N, B)))
    q = np.where(hit, lengths + 1, k + 1)
    full = hit & (q == bank.lengths)
    extended = full | (q > lengths)
    scored = np.where(full, bank.lengths, q)
    q = np.where(full, 0, q)
    return GridForward(q, full, extended, scored, iters)


@dataclass
class BatchResult:
    lengths: np.ndarray  # (K, F, B)
    bonus: np.ndarray  # (K, F)
    matched: np.ndarray  # (K, F, B) full-match flags
    iterations: int
    prefix_lengths: Optional[np.ndarray] = None  # (K, F, C)
    mask: Optional[np.ndarray] = None  # (K, F, B)


def _grid_tokens(lengths: np.ndarray, tokens: np.ndarray) -> tuple[int, int]:
    if lengths.ndim != 2 or tokens.ndim != 2 or tokens.shape[0] != lengths.shape[0]:
        raise ShapeError(
            f"need lengths (K, B) and tokens (K, F); got {lengths.shape} and {tokens.shape}"
        )
    return tokens.shape


def batch_compute_bonus(bank: PhraseBank, delta: float, lengths: np.ndarray,
                        tokens: np.ndarray) -> BatchResult:
    lengths = np.asarray(lengths, dtype=np.int64)
    tokens = np.asarray(tokens, dtype=np.int64)
    K, F = _grid_tokens(lengths, tokens)
    B = bank.num_phrases
    rep = np.repeat(lengths, F, axis=0)  # (K*F, B)
    fw = forward_grid(bank, rep, tokens.reshape(-1))
    before = (rep * delta).max(axis=1, initial=0.0)
    after = (fw.scored_lengths * delta).max(axis=1, initial=0.0)
    any_full = fw.full_match.any(axis=1, keepdims=True)
    new = np.where(any_full, 0, fw.new_lengths)
    return BatchResult(
        new.reshape(K, F, B),
        (after - before).reshape(K, F),
        fw.full_match.reshape(K, F, B),
        fw.iterations,
    )


def batch_forward_prefixed(bank: PhraseBank, prefix_bank: Optional[PhraseBank], delta: float,
                           boost: float, lengths: np.ndarray, prefix_lengths: np.ndarray,
                           mask: np.ndarray, tokens: np.ndarray) -> BatchResult:
    lengths = np.asarray(lengths, dtype=np.int64)
    tokens = np.asarray(tokens, dtype=np.int64)
    mask = np.asarray(mask, dtype=bool)
    K, F = _grid_tokens(lengths, tokens)
    B = bank.num_phrases
    C = 0 if prefix_bank is None else prefix_bank.num_phrases
    prefix_lengths = np.asarray(prefix_lengths, dtype=np.int64).reshape(K, C)
    if mask.shape != lengths.shape:
        raise ShapeError(f"mask shape {mask.shape} does not match lengths {lengths.shape}")

    flat_x = tokens.reshape(-1)
    rep = np.repeat(lengths, F, axis=0)
    rep_mask = np.repeat(mask, F, axis=0)
    fw = forward_grid(bank, rep, flat_x)
    iters = fw.iterations

    before = (np.where(rep_mask, boost, 1.0) * (rep * delta)).max(axis=1, initial=0.0)
    new_mask = rep_mask & fw.extended
    after = (np.where(new_mask, boost, 1.0) * (fw.scored_lengths * delta)).max(axis=1, initial=0.0)

    new = fw.new_lengths
    if C:
        pfw = forward_grid(prefix_bank, np.repeat(prefix_lengths, F, axis=0), flat_x)
        iters += pfw.iterations
        new_plen = pfw.new_lengths
        restart = pfw.full_match.any(axis=1, keepdims=True) & ~fw.extended
        new = np.where(restart, 0, new)
        new_mask = new_mask | restart
    else:
        new_plen = np.zeros((K * F, 0), dtype=np.int64)

    any_full = fw.full_match.any(axis=1, keepdims=True)
    new = np.where(any_full, 0, new)
    new_mask = new_mask & ~any_full
    new_plen = np.where(any_full, 0, new_plen)
    return BatchResult(
        new.reshape(K, F, B),
        (after - before).reshape(K, F),
        fw.full_match.reshape(K, F, B),
        iters,
        new_plen.reshape(K, F, C),
        new_mask.reshape(K, F, B),
    )


def bank_for(ps: PhraseSet, vocab_size: int) -> PhraseBank:
    return PhraseBank.from_patterns(ps.patterns, vocab_size)


def prefix_bank_for(pfx: Optional[PrefixSet], vocab_size: int) -> Optional[PhraseBank]:
    if pfx is None or len(pfx) == 0:
        return None
    return PhraseBank.from_patterns(pfx.prefixes, vocab_size)
