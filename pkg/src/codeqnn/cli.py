"""Command line: ``bench run`` and ``bench wilcoxon``.

A ``--config`` file holds flat ``key = value`` lines using the long flag names
(``runs = 30``, ``algorithms = codeq,pso``); flags given on the command line
override it.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from codeqnn import bench
from codeqnn.stats import wilcoxon_rank_sum

RUN_DEFAULTS = {
    "dataset": "iris",
    "algorithms": "codeq,pso,sde",
    "runs": 30,
    "budget": 10_000,
    "pop": 20,
    "hidden": 5,
    "lb": -10.0,
    "ub": 10.0,
    "alpha": 0.05,
    "seed": 0,
    "out": "bench-out",
    "format": "md",
    "jobs": 1,
    "n_train": None,
    "features": None,
    "targets": "-1",
    "task": "regression",
    "no_header": False,
}

_CASTS = {
    "runs": int, "budget": int, "pop": int, "hidden": int, "seed": int, "jobs": int, "n_train": int,
    "lb": float, "ub": float, "alpha": float,
    "no_header": lambda v: str(v).strip().lower() in ("1", "true", "yes", "on"),
}


def read_config(path) -> dict:
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in RUN_DEFAULTS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _CASTS.get(key, str)(value)
    return values


def _columns(text):
    if text is None:
        return None
    return tuple(int(c) if c.strip().lstrip("-").isdigit() else c.strip() for c in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bench", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="train networks with each optimizer over repeated seeded runs")
    run.add_argument("--config", help="key = value file; command-line flags win")
    run.add_argument("--dataset", help="iris | house | oil-proxy | path to a CSV file")
    run.add_argument("--algorithms", help="comma list from codeq,pso,sde")
    run.add_argument("--runs", type=int)
    run.add_argument("--budget", type=int, help="objective evaluations per run")
    run.add_argument("--pop", type=int, help="population size")
    run.add_argument("--hidden", type=int, help="hidden-layer neurons")
    run.add_argument("--lb", type=float)
    run.add_argument("--ub", type=float)
    run.add_argument("--alpha", type=float)
    run.add_argument("--seed", type=int, help="master seed")
    run.add_argument("--out", help="output directory")
    run.add_argument("--format", choices=["md", "csv"])
    run.add_argument("--jobs", type=int, help="worker processes")
    run.add_argument("--n-train", dest="n_train", type=int, help="training rows (default: per dataset)")
    run.add_argument("--features", help="CSV feature columns (names or indices); default all non-target")
    run.add_argument("--targets", help="CSV target columns (names or indices); default last")
    run.add_argument("--task", choices=["regression", "classification"])
    run.add_argument("--no-header", dest="no_header", action="store_const", const=True)

    wil = sub.add_parser("wilcoxon", help="two-sided rank-sum test on two columns of numbers")
    wil.add_argument("--a", required=True, help="CSV file; first column is read")
    wil.add_argument("--b", required=True, help="CSV file; first column is read")
    wil.add_argument("--alpha", type=float, default=0.05)
    return parser


def read_sample(path) -> list[float]:
    values = []
    with open(path, newline="") as fh:
        for k, row in enumerate(csv.reader(fh)):
            if not row or not row[0].strip():
                continue
            try:
                values.append(float(row[0]))
            except ValueError:
                if k == 0:
                    continue  # header
                raise ValueError(f"{path}: line {k + 1}: not a number: {row[0]!r}") from None
    return values


def _cmd_run(args) -> int:
    opts = dict(RUN_DEFAULTS)
    if args.config:
        opts.update(read_config(args.config))
    opts.update({k: v for k, v in vars(args).items() if k in RUN_DEFAULTS and v is not None})

    cfg = bench.ExperimentConfig(
        dataset=opts["dataset"],
        algorithms=tuple(a.strip() for a in opts["algorithms"].split(",") if a.strip()),
        runs=opts["runs"],
        budget=opts["budget"],
        pop_size=opts["pop"],
        hidden=opts["hidden"],
        lb=opts["lb"],
        ub=opts["ub"],
        alpha=opts["alpha"],
        master_seed=opts["seed"],
        n_train=opts["n_train"],
        jobs=opts["jobs"],
        feature_cols=_columns(opts["features"]),
        target_cols=_columns(opts["targets"]),
        task=opts["task"],
        header=not opts["no_header"],
    )
    dataset = bench.load_dataset(cfg)
    problem = bench.prepare_problem(dataset, cfg.n_train, cfg.hidden, cfg.master_seed)
    results = bench.run_experiment(cfg, problem)
    summary = bench.summarize(results, cfg.alpha, dataset=problem.name, synthetic=problem.synthetic)
    paths = bench.write_outputs(results, summary, opts["out"], opts["format"])
    print(bench.render_report(summary, opts["format"]), end="")
    for p in paths.values():
        print(f"wrote {p}", file=sys.stderr)
    return 0


def _cmd_wilcoxon(args) -> int:
    res = wilcoxon_rank_sum(read_sample(args.a), read_sample(args.b), args.alpha)
    print(f"statistic={res.statistic!r} p_value={res.p_value!r} significant={str(res.significant).lower()} method={res.method}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_wilcoxon(args)
    except (ValueError, OSError) as exc:
        print(f"bench: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
