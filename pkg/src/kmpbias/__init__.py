"""KMP-based contextual biasing for beam search."""

from .batch import PhraseBank, batch_compute_bonus, batch_forward_prefixed
from .beam import BeamConfig, DecodeError, DecodeResult, Hypothesis, Scorer, decode, prune
from .engine import BatchEngine, ScalarEngine, make_engine
from .kmp import (
    ForwardResult,
    InvalidPatternError,
    InvalidVocabError,
    Pattern,
    StateCorruptionError,
    compile_pattern,
    expand_transition_table,
    forward,
)
from .prefix import PrefixedMatchState, PrefixSet, compute_bonus_prefixed, potential_boosted
from .scorer import BonusResult, PhraseSet, compute_bonus, potential, score

__all__ = [
    "BatchEngine", "BeamConfig", "BonusResult", "DecodeError", "DecodeResult",
    "ForwardResult", "Hypothesis", "InvalidPatternError", "InvalidVocabError", "Pattern",
    "PhraseBank", "PhraseSet", "PrefixSet", "PrefixedMatchState", "ScalarEngine", "Scorer",
    "StateCorruptionError", "batch_compute_bonus", "batch_forward_prefixed",
    "compile_pattern", "compute_bonus", "compute_bonus_prefixed", "decode",
    "expand_transition_table", "forward", "make_engine", "potential", "potential_boosted",
    "prune", "score",
]
