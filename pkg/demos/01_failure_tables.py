"""
Failure tables and the determinization loop
===========================================

Compile a pattern, look at its fallback table, and stream text through it.
"""

import numpy as np

from kmpbias import compile_pattern, expand_transition_table
from kmpbias.kmp import forward_counted, scan

# symbols a, b, c become token ids 0, 1, 2
names = "abc"
pattern = compile_pattern([names.index(ch) for ch in "abacababa"])
print("pattern  ", " ".join(names[t] for t in pattern.tokens))
print("failure  ", pattern.failure)
print("loop bound", pattern.gamma)

# walk a text one token at a time; iterations never exceed the loop bound
text = [names.index(ch) for ch in "abacabacababacababa"]
q = 0
for pos, x in enumerate(text):
    q, full, iters = forward_counted(pattern, q, x)
    flag = "  <- match" if full else ""
    print(f"{pos:2d} {names[x]}  length={q}  fallbacks={iters}{flag}")

print("match starts:", scan(pattern, text))

# the same automaton as a dense table: one lookup per token, no loop at all
table, full = expand_transition_table(pattern, len(names))
print(table)
print("full-match cells:", np.argwhere(full).tolist())
