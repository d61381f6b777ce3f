"""
Minecart: seven regions of weight space
=======================================

The cart can mine two ores and burns fuel.  Scripted drivers visit every
mine (or stay home); for each weight on the 3-simplex the best of them is
the optimal policy.  Writes ``minecart_partition.svg``.
"""

from collections import Counter

from dynmorl.envs import MinecartConfig
from dynmorl.oracle import minecart_candidates, minecart_optimal_value, partition_simplex, region_components
from dynmorl.runner import simplex_xy, svg_scatter

cfg = MinecartConfig()
gamma = 0.98

for cand in minecart_candidates(cfg):
    print(f"{cand.policy_id:>10s}  ore1={cand.value[0]:.3f} ore2={cand.value[1]:.3f} fuel={cand.value[2]:.3f}")

resolution = 20
grid, labels = partition_simplex(lambda w: minecart_optimal_value(cfg, gamma, w)[1].policy_id, 3, resolution)
pieces = region_components(grid, labels, resolution)
print(f"\n{len(grid)} weights, {len(pieces)} regions")
print(Counter(labels).most_common())

xy = simplex_xy(grid)
groups = {lab: xy[[i for i, l in enumerate(labels) if l == lab]] for lab in dict.fromkeys(labels)}
with open("minecart_partition.svg", "w") as fh:
    fh.write(svg_scatter(groups, "Optimal Minecart policy per weight"))
