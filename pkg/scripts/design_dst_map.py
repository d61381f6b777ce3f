"""Compute treasure values for a staircase DST map.

Treasures sit at the bottom of each column of a staircase, so the shortest
path to the treasure in column c has length ``depth[c] + c``.  Values are
chosen so that the boundaries between consecutive optimal treasures fall at
treasure weights k / n (n = number of treasures), i.e. each treasure is
optimal for an equal share of the weight simplex.  Values are rounded and the
shares re-measured with the exact oracle.

    python scripts/design_dst_map.py --depths 1 2 3 4 4 4 5 7 7 9 10 --name default
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from dynmorl.envs.dst import DstMap, dump_dst_map
from dynmorl.oracle.dst import dst_optimal_value, time_penalty


def equal_share_values(dists, gamma, first=1.0):
    n = len(dists)
    values = [first]
    for k in range(1, n):
        lam = k / n
        d0, d1 = dists[k - 1], dists[k]
        # lam * disc1 * T1 + (1 - lam) * c1 = lam * disc0 * T0 + (1 - lam) * c0
        c0, c1 = time_penalty(d0, gamma), time_penalty(d1, gamma)
        rhs = gamma ** (d0 - 1) * values[-1] + (1 - lam) / lam * (c0 - c1)
        values.append(rhs / gamma ** (d1 - 1))
    return values


def staircase_grid(depths, values):
    rows, cols = max(depths) + 1, len(depths)
    grid = [["." for _ in range(cols)] for _ in range(rows)]
    grid[0][0] = "S"
    for c, (depth, v) in enumerate(zip(depths, values)):
        grid[depth][c] = f"T{v:g}"
        for r in range(depth + 1, rows):
            grid[r][c] = "#"
    return grid


def shares(m, gamma, resolution=10001):
    labels = [dst_optimal_value(m, gamma, [lam, 1 - lam])[1].policy_id for lam in np.linspace(0, 1, resolution)]
    ids, counts = np.unique(labels, return_counts=True)
    return dict(zip(ids, counts / resolution))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depths", type=int, nargs="+", required=True)
    ap.add_argument("--gamma", type=float, default=0.95)
    ap.add_argument("--decimals", type=int, default=1)
    ap.add_argument("--name", default="default")
    ap.add_argument("--max-steps", type=int, default=200)
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()

    dists = [d + c for c, d in enumerate(args.depths)]
    if any(b <= a for a, b in zip(dists, dists[1:])):
        raise SystemExit("path lengths must strictly increase")
    values = [round(v, args.decimals) for v in equal_share_values(dists, args.gamma)]
    m = DstMap.from_grid(staircase_grid(args.depths, values), max_steps=args.max_steps, name=args.name)
    share = shares(m, args.gamma)
    for pid, frac in sorted(share.items(), key=lambda kv: -kv[1]):
        print(f"{pid:>10s} {frac:6.3f}")
    print(f"{len(share)} optimal treasures of {len(values)}")
    text = dump_dst_map(m)
    if args.out:
        args.out.write_text(text)
    else:
        print(text)


if __name__ == "__main__":
    main()
