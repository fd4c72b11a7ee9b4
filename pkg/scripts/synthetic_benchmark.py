"""Generate seeded synthetic order-handling logs, discover a net for each
through the CLI, and collect the per-iteration pruning ratio |V|/|N|.

Writes <out>/seed<k>.csv, <out>/seed<k>.jsonl and <out>/summary.json; with
--plot (needs matplotlib) also <out>/pruning_ratio.png.
"""

import argparse
import json
import subprocess
import sys
import time
from pathlib import Path

from synthminer.datasets import synthetic_log
from synthminer.event_log import write_csv


def run(seed, args, out: Path) -> dict:
    csv, jsonl = out / f"seed{seed}.csv", out / f"seed{seed}.jsonl"
    with open(csv, "w", newline="") as fh:
        write_csv(synthetic_log(args.traces, seed, args.noise), fh)
    t0 = time.perf_counter()
    subprocess.run([sys.executable, "-m", "synthminer", "discover", str(csv), "--iterations-jsonl", str(jsonl),
                    "--theta", args.theta, "--out-pnml", str(out / f"seed{seed}.pnml")],
                   check=True, capture_output=True, text=True)
    elapsed = time.perf_counter() - t0
    rows = [json.loads(line) for line in jsonl.read_text().splitlines()]
    return {"seed": seed, "seconds": round(elapsed, 2),
            "pruning_ratio": [r["pruning_ratio"]["value"] for r in rows],
            "fitness": [r["scores"]["fitness"]["value"] for r in rows]}


def plot(runs, path: Path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 3.5))
    for r in runs:
        xs = range(1, len(r["pruning_ratio"]) + 1)
        ax.plot(xs, r["pruning_ratio"], marker="o", alpha=0.6, label=f"seed {r['seed']}")
    ax.set_xlabel("iteration")
    ax.set_ylabel("|V| / |N|")
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=150)


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3, 4, 5])
    parser.add_argument("--traces", type=int, default=1000)
    parser.add_argument("--noise", type=float, default=0.02)
    parser.add_argument("--theta", default="0.95")
    parser.add_argument("--out", default="benchmark_out")
    parser.add_argument("--plot", action="store_true")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    runs = []
    for seed in args.seeds:
        r = run(seed, args, out)
        runs.append(r)
        print(f"seed {seed}: {r['seconds']:.1f}s, ratios " + " ".join(f"{x:.2f}" for x in r["pruning_ratio"]))
    (out / "summary.json").write_text(json.dumps(runs, indent=2) + "\n")
    if args.plot:
        plot(runs, out / "pruning_ratio.png")


if __name__ == "__main__":
    main()
