"""
Deep Sea Treasure and its optimal policies
==========================================

A submarine starts in the top-left corner and chooses which treasure to
dive for.  Deeper treasures are worth more but cost more time, so the best
treasure depends on how the two objectives are weighted.
"""

import numpy as np

from dynmorl.envs import builtin_map
from dynmorl.oracle import dst_optimal_value, partition_simplex, region_shares

gamma = 0.95
m = builtin_map()
print(f"map {m.shape[0]}x{m.shape[1]}, {len(m.treasures)} treasures")

# The oracle runs a shortest-path search and picks the treasure with the
# best scalarized discounted return.
for w in ([1.0, 0.0], [0.7, 0.3], [0.5, 0.5], [0.2, 0.8], [0.0, 1.0]):
    v, choice = dst_optimal_value(m, gamma, w)
    print(f"w={w}  value={np.round(v, 3)}  scalarized={v @ w:7.3f}  policy={choice.policy_id}")

# Sweep the weight line and see how much of it each treasure owns.
grid, labels = partition_simplex(lambda w: dst_optimal_value(m, gamma, w)[1].policy_id, 2, 1001)
for label, share in region_shares(labels).items():
    print(f"{label:>12s} {share:6.1%}")
