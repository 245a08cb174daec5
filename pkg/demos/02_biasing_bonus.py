"""
Per-token biasing bonus
=======================

Partial matches earn credit token by token, and lose it again when the
match breaks. Only completed phrases keep their bonus.
"""

from kmpbias import PhraseSet, compute_bonus, potential

words = ["<eos>", "play", "the", "beatles", "bee", "gees", "now"]
ids = {w: i for i, w in enumerate(words)}


def tok(s):
    return [ids[w] for w in s.split()]


phrases = PhraseSet.from_tokens([tok("the beatles"), tok("bee gees")], per_token_bonus=2.0)


def show(sentence):
    state, total = phrases.zero_state(), 0.0
    print(f"\n{sentence!r}")
    for x in tok(sentence):
        r = compute_bonus(phrases, state, x)
        total += r.bonus
        state = r.new_state
        done = f"  matched {sorted(r.matched_phrase_indices)}" if r.matched_phrase_indices else ""
        print(f"  {words[x]:8s} bonus={r.bonus:+.1f} running={total:+.1f} state={state}{done}")
    print(f"  potential left in the state: {potential(phrases, state):.1f}")


show("play the beatles now")  # full phrase: 2 tokens x 2.0
show("play the now")          # "the" is credited, then taken back
show("play the bee gees")     # the credit moves over to the other phrase
show("play the the beatles")  # a repeated token restarts the partial match
