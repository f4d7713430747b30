"""Experiment harness: repeated seeded runs, mean(std) summaries, significance flags.

Seeding
-------
``run_seed(master_seed, r)`` derives the seed of run ``r``. From it two
independent streams are spawned: one builds the initial population shared by
every algorithm in that run, the other (keyed by the algorithm name) drives
that algorithm, so adding or removing an algorithm never changes the others'
trajectories. The train/test split is drawn once per experiment from
``master_seed``.
"""

from __future__ import annotations

import csv
import io
import logging
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from codeqnn.baselines import pso_optimize, sde_optimize
from codeqnn.codeq import codeq_optimize
from codeqnn.core import Bounds, evaluate, uniform_init
from codeqnn.data import (
    DEFAULT_TRAIN_ROWS,
    Dataset,
    holdout_split,
    load_csv,
    load_named,
    minmax_normalize,
)
from codeqnn.neural import NetworkObjective, Topology, accuracy, mse_fitness
from codeqnn.stats import wilcoxon_rank_sum

log = logging.getLogger(__name__)

OPTIMIZERS = {"codeq": codeq_optimize, "pso": pso_optimize, "sde": sde_optimize}
METRICS = ("train", "test")
METRIC_LABELS = {"train": "Training", "test": "Testing"}

FLAG_RULE = (
    "Bold marks the lowest-mean algorithm only when its runs differ from every "
    "other algorithm's runs by a two-sided Wilcoxon rank-sum test with p < alpha."
)


@dataclass
class ExperimentConfig:
    dataset: str = "iris"
    algorithms: tuple = ("codeq", "pso", "sde")
    runs: int = 30
    budget: int = 10_000
    pop_size: int = 20
    hidden: int = 5
    lb: float = -10.0
    ub: float = 10.0
    alpha: float = 0.05
    master_seed: int = 0
    n_train: Optional[int] = None
    jobs: int = 1
    # schema for a user CSV; ignored for the bundled names
    feature_cols: Optional[tuple] = None
    target_cols: tuple = (-1,)
    task: str = "regression"
    header: bool = True

    def __post_init__(self):
        self.algorithms = tuple(self.algorithms)
        unknown = [a for a in self.algorithms if a not in OPTIMIZERS]
        if unknown or not self.algorithms:
            raise ValueError(f"unknown algorithms {unknown}; choose from {sorted(OPTIMIZERS)}")
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ValueError("algorithms listed twice")
        if self.runs < 2:
            raise ValueError("runs must be >= 2 for summary statistics")
        if self.pop_size < 4:
            raise ValueError("pop_size must be >= 4")
        if self.budget < self.pop_size:
            raise ValueError("budget must be >= pop_size")
        if self.hidden < 1:
            raise ValueError("hidden must be >= 1")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        Bounds(self.lb, self.ub)

    @property
    def bounds(self) -> Bounds:
        return Bounds(self.lb, self.ub)


@dataclass
class RunResult:
    algorithm: str
    run: int
    seed: int
    train_mse: float
    test_mse: float
    initial_best_fitness: float
    evaluations: int
    best_vector: np.ndarray
    wall_time: float = 0.0
    test_accuracy: Optional[float] = None


@dataclass
class Problem:
    """A dataset prepared for training: split, scaled, with its network shape."""

    name: str
    topology: Topology
    X_train: np.ndarray
    Y_train: np.ndarray
    X_test: np.ndarray
    Y_test: np.ndarray
    labels_test: Optional[np.ndarray] = None
    synthetic: bool = False

    def objective(self, bounds: Bounds) -> NetworkObjective:
        return NetworkObjective(self.topology, self.X_train, self.Y_train, bounds)


def _seed_from(*entropy: int) -> int:
    return int(np.random.SeedSequence(list(entropy)).generate_state(1, np.uint64)[0])


def run_seed(master_seed: int, run: int) -> int:
    """Seed of run ``run``: first 64-bit word of ``SeedSequence([master_seed, run])``."""
    return _seed_from(master_seed, run)


def _init_stream(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, 0]))


def _algorithm_stream(seed: int, algorithm: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, 1, zlib.crc32(algorithm.encode())]))


def load_dataset(cfg: ExperimentConfig) -> Dataset:
    try:
        return load_named(cfg.dataset)
    except KeyError:
        pass
    path = Path(cfg.dataset)
    if not path.exists():
        raise FileNotFoundError(f"dataset {cfg.dataset!r} is neither a bundled name nor a file")
    return load_csv(path, cfg.feature_cols, cfg.target_cols, header=cfg.header, task=cfg.task)


def prepare_problem(d: Dataset, n_train: Optional[int], hidden: int, split_seed: int) -> Problem:
    if n_train is None:
        n_train = DEFAULT_TRAIN_ROWS.get(d.name, int(round(0.85 * d.n_rows)))
    split = holdout_split(d, n_train, split_seed)
    d, _ = minmax_normalize(d, split.train)
    classification = d.task == "classification"
    topology = Topology(
        d.n_features, hidden, d.n_outputs,
        output_activation="logistic" if classification else "linear",
    )
    train, test = d.subset(split.train), d.subset(split.test)
    return Problem(
        d.name, topology,
        train.features, train.targets, test.features, test.targets,
        labels_test=test.class_labels if classification and d.n_outputs >= 2 else None,
        synthetic=d.synthetic,
    )


def run_cell(problem: Problem, cfg: ExperimentConfig, algorithm: str, run: int) -> RunResult:
    """One (algorithm, run) cell; the result depends only on its arguments."""
    seed = run_seed(cfg.master_seed, run)
    f = problem.objective(cfg.bounds)
    initial = evaluate(uniform_init(f.bounds, cfg.pop_size, f.dim, _init_stream(seed)), f)
    t0 = time.perf_counter()
    res = OPTIMIZERS[algorithm](f, cfg.pop_size, cfg.budget, initial=initial, rng=_algorithm_stream(seed, algorithm))
    elapsed = time.perf_counter() - t0
    test_mse = mse_fitness(res.best, problem.topology, problem.X_test, problem.Y_test)
    acc = None
    if problem.labels_test is not None:
        acc = accuracy(res.best, problem.topology, problem.X_test, problem.labels_test)
    return RunResult(
        algorithm, run, seed, res.best_fitness, test_mse,
        res.initial_best_fitness, res.evaluations, res.best, elapsed, acc,
    )


def _run_cell_star(args):
    return run_cell(*args)


def run_experiment(cfg: ExperimentConfig, problem: Optional[Problem] = None) -> list[RunResult]:
    """Every algorithm on every run, ordered by (algorithm as configured, run)."""
    if problem is None:
        problem = prepare_problem(load_dataset(cfg), cfg.n_train, cfg.hidden, cfg.master_seed)
    cells = [(problem, cfg, a, r) for a in cfg.algorithms for r in range(cfg.runs)]
    log.info("%s: %d cells, D=%d", problem.name, len(cells), problem.objective(cfg.bounds).dim)
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            return list(pool.map(_run_cell_star, cells, chunksize=4))
    return [run_cell(*c) for c in cells]


# --------------------------------------------------------------------------
# Summary and report
# --------------------------------------------------------------------------


@dataclass
class Cell:
    mean: float
    std: float
    values: np.ndarray
    best: bool = False


@dataclass
class Summary:
    algorithms: tuple
    alpha: float
    cells: dict  # (algorithm, metric) -> Cell
    p_values: dict = field(default_factory=dict)  # (metric, alg_a, alg_b) -> p
    dataset: str = ""
    synthetic: bool = False


def summarize(
    results: Sequence[RunResult], alpha: float = 0.05, dataset: str = "", synthetic: bool = False
) -> Summary:
    """Mean and sample std per (algorithm, metric), plus the significance flag.

    The flag goes to the algorithm with the lowest mean on a metric only if
    the rank-sum test separates it from every other algorithm at ``alpha``.
    """
    algorithms = tuple(dict.fromkeys(r.algorithm for r in results))
    if not algorithms:
        raise ValueError("insufficient runs: no results to summarize")
    cells, p_values = {}, {}
    for metric in METRICS:
        for alg in algorithms:
            vals = np.array([getattr(r, f"{metric}_mse") for r in results if r.algorithm == alg])
            if vals.size < 2:
                raise ValueError(f"insufficient runs: {alg} has {vals.size} (need >= 2)")
            cells[alg, metric] = Cell(float(vals.mean()), float(vals.std(ddof=1)), vals)
        for i, a in enumerate(algorithms):
            for b in algorithms[i + 1 :]:
                p = wilcoxon_rank_sum(cells[a, metric].values, cells[b, metric].values, alpha).p_value
                p_values[metric, a, b] = p_values[metric, b, a] = p
        if len(algorithms) > 1:
            leader = min(algorithms, key=lambda a: cells[a, metric].mean)
            if all(p_values[metric, leader, o] < alpha for o in algorithms if o != leader):
                cells[leader, metric].best = True
    return Summary(algorithms, alpha, cells, p_values, dataset, synthetic)


def format_cell(mean: float, std: float) -> str:
    return f"{mean:.2f}({std:.2f})"


def render_report(summary: Summary, fmt: str = "md") -> str:
    if not summary.cells:
        raise ValueError("empty summary")
    if fmt in ("md", "markdown"):
        return _render_markdown(summary)
    if fmt == "csv":
        return _render_csv(summary)
    raise ValueError(f"unknown format {fmt!r}")


def _render_markdown(s: Summary) -> str:
    names = [a.upper() for a in s.algorithms]
    lines = [
        f"# MSE summary: {s.dataset}" if s.dataset else "# MSE summary",
        "",
        "| Data Type | " + " | ".join(names) + " |",
        "|---|" + "---|" * len(names),
    ]
    for metric in METRICS:
        row = []
        for alg in s.algorithms:
            c = s.cells[alg, metric]
            text = format_cell(c.mean, c.std)
            row.append(f"**{text}**" if c.best else text)
        lines.append(f"| {METRIC_LABELS[metric]} | " + " | ".join(row) + " |")
    lines += ["", f"Cells are mean(sample std) over {len(next(iter(s.cells.values())).values)} runs.", f"{FLAG_RULE} alpha={s.alpha}."]
    if len(s.algorithms) > 1:
        lines += ["", "| Pair | Training p | Testing p |", "|---|---|---|"]
        for i, a in enumerate(s.algorithms):
            for b in s.algorithms[i + 1 :]:
                lines.append(
                    f"| {a.upper()} vs {b.upper()} | {s.p_values['train', a, b]:.3g} | {s.p_values['test', a, b]:.3g} |"
                )
    if s.synthetic:
        lines += ["", "synthetic=true (generated proxy data; not comparable with published values)"]
    return "\n".join(lines) + "\n"


def _render_csv(s: Summary) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["dataset", "algorithm", "metric", "mean", "std", "n", "best", "synthetic"])
    for metric in METRICS:
        for alg in s.algorithms:
            c = s.cells[alg, metric]
            w.writerow([s.dataset, alg, metric, repr(c.mean), repr(c.std), c.values.size, str(c.best).lower(), str(s.synthetic).lower()])
    return buf.getvalue()


def results_csv(results: Sequence[RunResult]) -> str:
    """Per-run table at full precision; contains nothing time-dependent."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["algorithm", "run", "seed", "train_mse", "test_mse", "initial_best_fitness", "evaluations", "test_accuracy", "best_vector"])
    for r in results:
        w.writerow([
            r.algorithm, r.run, r.seed, repr(r.train_mse), repr(r.test_mse),
            repr(r.initial_best_fitness), r.evaluations,
            "" if r.test_accuracy is None else repr(r.test_accuracy),
            " ".join(repr(float(x)) for x in r.best_vector),
        ])
    return buf.getvalue()


def write_outputs(results: Sequence[RunResult], summary: Summary, out_dir, fmt: str = "md") -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"results": out / "results.csv", "summary_csv": out / "summary.csv", "timings": out / "timings.csv"}
    paths["results"].write_text(results_csv(results))
    paths["summary_csv"].write_text(render_report(summary, "csv"))
    with paths["timings"].open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["algorithm", "run", "wall_time_s"])
        w.writerows([r.algorithm, r.run, f"{r.wall_time:.4f}"] for r in results)
    if fmt in ("md", "markdown"):
        paths["summary_md"] = out / "summary.md"
        paths["summary_md"].write_text(render_report(summary, "md"))
    return paths
