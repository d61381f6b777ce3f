"""
Learning while the weights keep changing
========================================

A conditioned network with diverse replay against the plain
multi-objective DQN on Deep Sea Treasure, with a new random weight every
1000 steps.  Regret is the optimal scalarized return minus the one the
agent got.  Short runs, so expect noisy numbers.  Writes ``demo_results/``.
"""

from pathlib import Path

from dynmorl.runner import aggregate_dir, mean_regret, parse_config, run_experiment, write_logs

steps = 15000
base = """
[agent]
kind = {kind}
[schedule]
mode = sparse
period = 1000
[replay]
der = {der}
[run]
steps = {steps}
"""

out = Path("demo_results")
for kind, der in (("cn", "true"), ("mo", "false")):
    cfg = parse_config(base.format(kind=kind, der=der, steps=steps))
    logs = [run_experiment(cfg, seed) for seed in (0, 1)]
    folder = out / f"{kind}_der" if der == "true" else out / kind
    folder.mkdir(parents=True, exist_ok=True)
    write_logs(folder / "runs.csv", logs)
    table = aggregate_dir(folder, window=50)
    print(f"{kind:>3s} der={der:5s}  mean episodic regret {table.mean_delta:.3f}  "
          f"(last 3000 steps: {sum(mean_regret(l, 3000) for l in logs) / len(logs):.3f})")
