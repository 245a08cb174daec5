"""
Boosting phrases that follow a carrier word
===========================================

A phrase matched right after a carrier ("call", "play", ...) earns its
bonus multiplied by the boost factor.
"""

from kmpbias import PhraseSet, PrefixedMatchState, PrefixSet, compute_bonus_prefixed
from kmpbias.harness import generate_testset, score_set

CALL, JOHN, HELLO = 7, 5, 9
phrases = PhraseSet.from_tokens([[JOHN]], per_token_bonus=1.0)
carriers = PrefixSet.from_tokens([[CALL]], boost=2.0)

for stream in ([CALL, JOHN], [HELLO, JOHN], [CALL, HELLO, JOHN]):
    state = PrefixedMatchState.zero(phrases, carriers)
    bonuses = []
    for x in stream:
        r = compute_bonus_prefixed(phrases, carriers, state, x)
        bonuses.append(r.bonus)
        state = r.new_state
    print(stream, "->", bonuses)

# on the toy with_prefix set, boosting raises entity recall
specs = generate_testset("with_prefix", 30, 50, seed=200)
for boost in (1.0, 1.5, 2.0):
    s = score_set(specs, "fusion", 1.5, boost=boost, use_prefixes=True)
    print(f"boost {boost}: WER {s.wer:.3f}  entity recall {s.entity_recall:.2f}")
