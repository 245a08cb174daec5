"""
Choosing the per-token bonus
============================

Sweep the bonus on an in-domain set and on an anti-biasing set (no
entities). Small bonuses help the in-domain set; large ones make the
decoder hallucinate phrases everywhere.
"""

from kmpbias.harness import ChannelNoise, channel_threshold, generate_testset, rows_to_csv, sweep_delta

sets = {name: generate_testset(name, 20, 50, seed=10) for name in ("with_prefix", "anti")}
grid = [0.0, 1.0, 2.0, 3.0, 4.0, 6.0]
rows = sweep_delta(sets, grid, configs=(("fusion", 50),))
print(rows_to_csv(rows))

# above this bonus a confusable phrase token can outscore the correct token
print(f"closed-form channel threshold: {channel_threshold(ChannelNoise()):.2f}")
