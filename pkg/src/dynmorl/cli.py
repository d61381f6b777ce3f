"""Command line interface.

    dynmorl run CONFIG [--seeds 0,1,2] [--out DIR] [--workers N] [--steps N]
    dynmorl aggregate DIR [--window 200] [--last-k K]
    dynmorl partition ENV_CONFIG --resolution R [--out FILE.csv] [--svg FILE.svg]
    dynmorl oracle ENV_CONFIG --w W0 W1 ...

CONFIG may be a path or the name of a packaged config (dst_sparse,
dst_regular, dst_fixed_6x6, minecart_sparse, minecart_regular).  Exit status
is 0 on success and 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .momath import as_weight
from .oracle import partition_simplex, region_components, region_shares, write_partition_csv
from .runner import (
    ConfigError,
    Oracle,
    aggregate_dir,
    dump_config,
    load_config,
    mean_regret,
    run_many,
    simplex_xy,
    svg_scatter,
    with_overrides,
    write_logs,
)


def _seeds(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"seeds must be comma-separated integers, got {text!r}")


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    run = {}
    if args.seeds:
        run["seeds"] = args.seeds
    if args.workers is not None:
        run["workers"] = args.workers
    if args.steps is not None:
        if args.steps < 0:
            raise ConfigError("'steps' must be >= 0")
        run["steps"] = args.steps
    cfg = with_overrides(cfg, run=run)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.ini").write_text(dump_config(cfg))
    logs = run_many(cfg)
    write_logs(out / "runs.csv", logs)
    for log in logs:
        print(f"run {log.run}: {len(log.rows)} episodes, mean regret {mean_regret(log):.4f}")
    print(f"wrote {out / 'runs.csv'}")
    return 0


def cmd_aggregate(args) -> int:
    table = aggregate_dir(args.dir, args.window, args.last_k)
    print(f"mean episodic regret {table.mean_delta:.4f} +- {table.mean_delta_std:.4f}")
    if table.last_mean_delta is not None:
        print(f"last {table.last_k} steps: {table.last_mean_delta:.4f}")
    print(f"wrote curves.csv, summary.csv, regret.svg, cumulative.svg in {args.dir}")
    return 0


def cmd_partition(args) -> int:
    cfg = load_config(args.env_config)
    oracle = Oracle(cfg.env, cfg.agent.gamma)
    grid, labels = partition_simplex(lambda w: oracle(w)[1], oracle.n_objectives, args.resolution)
    pieces = region_components(grid, labels, args.resolution)
    print(f"{len(grid)} weights, {len(pieces)} regions" + ("" if oracle.exact else " (lower bound)"))
    for label, share in region_shares(labels).items():
        print(f"  {label:>10s} {share:7.3f}  pieces={pieces[label]}")
    if args.out:
        write_partition_csv(args.out, grid, labels)
    if args.svg:
        xy = simplex_xy(grid)
        groups = {lab: xy[[i for i, l in enumerate(labels) if l == lab]] for lab in dict.fromkeys(labels)}
        Path(args.svg).write_text(svg_scatter(groups, "Optimal policy per weight", "", ""))
    return 0


def cmd_oracle(args) -> int:
    cfg = load_config(args.env_config)
    oracle = Oracle(cfg.env, cfg.agent.gamma)
    try:
        w = as_weight(args.w)
    except ValueError as e:
        raise ConfigError(f"bad value for '--w': {e}") from e
    if len(w) != oracle.n_objectives:
        raise ConfigError(f"bad value for '--w': expected {oracle.n_objectives} components")
    value, policy = oracle(w)
    kind = "exact" if oracle.exact else "lower bound"
    print(f"policy {policy} ({kind})")
    print("value " + " ".join(f"{x:.6f}" for x in value))
    print(f"scalarized {float(np.dot(value, w)):.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dynmorl", description="Multi-objective deep RL under dynamic weights.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="train agents and write per-episode regret logs")
    p.add_argument("config")
    p.add_argument("--seeds", type=_seeds, default=None)
    p.add_argument("--out", default="results")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("aggregate", help="smooth and aggregate the runs in a results directory")
    p.add_argument("dir")
    p.add_argument("--window", type=int, default=200)
    p.add_argument("--last-k", type=int, default=None)
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("partition", help="label a simplex grid with the optimal policy")
    p.add_argument("env_config")
    p.add_argument("--resolution", type=int, required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("oracle", help="optimal value for one weight vector")
    p.add_argument("env_config")
    p.add_argument("--w", type=float, nargs="+", required=True)
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        if args.command == "partition" and "resolution" in str(e):
            print(f"config error: {e}", file=sys.stderr)
            return 2
        raise


if __name__ == "__main__":
    sys.exit(main())
