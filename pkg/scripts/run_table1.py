"""Run the three-dataset comparison and print one combined MSE table.

    python scripts/run_table1.py --out table1 [--runs 30] [--budget 10000] [--jobs 4]

Writes per-dataset outputs under ``<out>/<dataset>/`` and ``<out>/table1.md``.
"""

import argparse
from pathlib import Path

from codeqnn import bench

DATASETS = {"house": "1", "oil-proxy": "2 (synthetic)", "iris": "3"}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="table1")
    ap.add_argument("--runs", type=int, default=30)
    ap.add_argument("--budget", type=int, default=10_000)
    ap.add_argument("--hidden", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    summaries = {}
    for name in DATASETS:
        cfg = bench.ExperimentConfig(
            dataset=name, runs=args.runs, budget=args.budget, hidden=args.hidden,
            master_seed=args.seed, jobs=args.jobs,
        )
        problem = bench.prepare_problem(bench.load_dataset(cfg), None, cfg.hidden, cfg.master_seed)
        results = bench.run_experiment(cfg, problem)
        summaries[name] = bench.summarize(results, cfg.alpha, dataset=name, synthetic=problem.synthetic)
        bench.write_outputs(results, summaries[name], Path(args.out) / name)
        print(f"done: {name}", flush=True)

    algs = next(iter(summaries.values())).algorithms
    lines = ["| Data Type | Data Set | " + " | ".join(a.upper() for a in algs) + " |",
             "|---|---|" + "---|" * len(algs)]
    for metric in bench.METRICS:
        for name, label in DATASETS.items():
            s = summaries[name]
            cells = []
            for a in algs:
                c = s.cells[a, metric]
                text = bench.format_cell(c.mean, c.std)
                cells.append(f"**{text}**" if c.best else text)
            lines.append(f"| {bench.METRIC_LABELS[metric]} | {label} | " + " | ".join(cells) + " |")
    lines += ["", bench.FLAG_RULE + f" alpha={next(iter(summaries.values())).alpha}."]
    table = "\n".join(lines) + "\n"
    Path(args.out, "table1.md").write_text(table)
    print(table)


if __name__ == "__main__":
    main()
