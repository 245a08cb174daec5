"""
Shallow fusion versus on-the-fly rescoring
==========================================

A two-step toy model where the phrase's first token is only the third
choice. Rescoring only sees what survives pruning; fusion scores the
biasing expansions before pruning and keeps the phrase alive.
"""

import numpy as np

from kmpbias import BeamConfig, PhraseSet, decode
from kmpbias.beam import TableScorer

words = ["<eos>", "john", "smith", "jon", "joan", "x", "y", "z"]
probs = np.full((3, len(words)), 0.01)
probs[0, [3, 4, 1]] = [0.5, 0.3, 0.1]  # "jon", "joan", then "john"
probs[1, [2, 3]] = [0.6, 0.3]
probs[2, 0] = 0.97
probs /= probs.sum(axis=1, keepdims=True)
model = TableScorer(np.log(probs), eos_id=0)

phrases = PhraseSet.from_tokens([[1, 2]], per_token_bonus=3.0)  # "john smith"

for mode in ("none", "otf_rescoring", "fusion"):
    res = decode(model, phrases, cfg=BeamConfig(beam_size=2, bias_expansions=4, mode=mode))
    best = res.best
    print(f"{mode:14s} {' '.join(words[t] for t in best.tokens):20s} "
          f"model={best.model_score:6.2f} bonus={best.bonus:4.1f} "
          f"bonus calls per step={res.bonus_calls}")
