"""
Diverse experience replay keeps old trade-offs around
====================================================

Early on the agent sees returns in every direction; later it only sees
returns near the current weight.  A plain FIFO forgets the early ones.
The diverse buffer keeps whole trajectories whose return vectors are
spread out, ranked by crowding distance.  Writes ``der_signatures.svg``.
"""

import numpy as np

from dynmorl.replay import ReplayBuffer
from dynmorl.runner import svg_scatter

rng = np.random.default_rng(0)
buf = ReplayBuffer(300, 1, 2, diverse_capacity=300, gamma=1.0)

x = 0.0
for i in range(3000):
    # returns spread everywhere at first, then clustered
    ret = rng.uniform(-10, 10, 2) if i < 150 else rng.normal(3.0, 0.5, 2)
    length = int(rng.integers(1, 5))
    for t in range(length):
        buf.push([x + t], 0, ret if t == 0 else np.zeros(2), [x + t + 1], t == length - 1)
    x += 10

fifo = np.array([t.signature for t in buf.fifo if t.complete])
diverse = np.array([t.signature for t in buf.diverse])


def span(s):
    return np.round(s.max(0) - s.min(0), 2)


print("FIFO    trajectories:", len(fifo), " span per objective:", span(fifo))
print("diverse trajectories:", len(diverse), " span per objective:", span(diverse))

with open("der_signatures.svg", "w") as fh:
    fh.write(svg_scatter({"fifo": fifo, "diverse": diverse}, "Trajectory signatures", "objective 1", "objective 2"))
