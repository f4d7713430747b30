"""Exit criteria, run at full protocol size (30 runs x 10,000 evaluations).

Each test prints one PASS/FAIL line in the "acceptance criteria" section of
the pytest summary.
"""

import csv
import shutil
import subprocess
import sys
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from codeqnn import bench, cli
from codeqnn.baselines import pso_optimize, sde_optimize
from codeqnn.codeq import ChaoticState, chaotic_step, codeq_optimize
from codeqnn.core import Bounds, Objective, evaluate, make_rng, rosenbrock, sphere, uniform_init
from codeqnn.neural import Topology, decode, flatten, forward, param_count
from codeqnn.stats import wilcoxon_rank_sum

from conftest import CountingObjective, random_search_best

ALPHA = 0.05
OPTIMIZERS = {"codeq": codeq_optimize, "pso": pso_optimize, "sde": sde_optimize}


def _experiment(dataset, hidden=5):
    cfg = bench.ExperimentConfig(dataset=dataset, hidden=hidden, master_seed=0)
    results = bench.run_experiment(cfg)
    return bench.summarize(results, cfg.alpha, dataset=dataset), results


@pytest.fixture(scope="module")
def iris():
    return _experiment("iris")


@pytest.fixture(scope="module")
def house():
    return _experiment("house")


def _means(summary):
    return {a: summary.cells[a, "train"].mean for a in summary.algorithms}


def test_c1_iris_ranking_and_significance(iris, record_acceptance):
    summary, _ = iris
    m = _means(summary)
    p_pso = summary.p_values["train", "codeq", "pso"]
    p_sde = summary.p_values["train", "codeq", "sde"]
    ok = m["codeq"] < m["pso"] and m["codeq"] < m["sde"] and p_pso < ALPHA and p_sde < ALPHA
    record_acceptance(
        1, ok,
        f"IRIS train MSE codeq={m['codeq']:.4f} pso={m['pso']:.4f} sde={m['sde']:.4f}; "
        f"p(codeq,pso)={p_pso:.3g} p(codeq,sde)={p_sde:.3g}",
    )
    assert ok


def test_c2_iris_magnitude(iris, record_acceptance):
    summary, _ = iris
    hidden, mean = 5, _means(summary)["codeq"]
    if mean > 0.5:
        hidden, mean = 8, _means(_experiment("iris", hidden=8)[0])["codeq"]
    ok = mean <= 0.5
    record_acceptance(2, ok, f"IRIS codeq mean train MSE {mean:.4f} <= 0.5 at hidden={hidden}")
    assert ok


def test_c3_house_ranking(house, record_acceptance):
    summary, _ = house
    m = _means(summary)
    ranking = m["codeq"] < m["pso"] and m["codeq"] < m["sde"]
    magnitude = m["codeq"] < 150
    record_acceptance(
        3, ranking and magnitude,
        f"House train MSE codeq={m['codeq']:.2f} pso={m['pso']:.2f} sde={m['sde']:.2f}; "
        f"codeq lowest={ranking}; codeq < 150={magnitude}",
    )
    assert magnitude
    assert ranking


def test_c4_oil_proxy_report(tmp_path, record_acceptance):
    out = tmp_path / "oil"
    code = cli.main(["run", "--dataset", "oil-proxy", "--out", str(out)])
    md = (out / "summary.md").read_text()
    rows = list(csv.DictReader((out / "summary.csv").open()))
    results = list(csv.DictReader((out / "results.csv").open()))
    ok = (
        code == 0
        and "synthetic=true" in md
        and len(rows) == 6
        and all(r["synthetic"] == "true" for r in rows)
        and len(results) == 90
        and all(np.isfinite(float(r["train_mse"])) for r in results)
    )
    record_acceptance(4, ok, f"oil-proxy run exit={code}, {len(results)} runs, synthetic marker present")
    assert ok


def _brute_force_p(a, b):
    pooled = list(a) + list(b)
    order = sorted(range(len(pooled)), key=lambda i: pooled[i])
    rank = {i: r + 1 for r, i in enumerate(order)}  # tie-free
    n, N = len(a), len(pooled)
    centre2 = n * (N + 1)
    observed = abs(2 * sum(rank[i] for i in range(n)) - centre2)
    hits = total = 0
    for subset in combinations(range(1, N + 1), n):
        total += 1
        hits += abs(2 * sum(subset) - centre2) >= observed
    return float(Fraction(hits, total))


def test_c5_wilcoxon_oracle(record_acceptance):
    rng = np.random.default_rng(2024)
    exact_ok = True
    checked = 0
    for n in range(2, 9):
        for m in range(2, 11 - n):
            for _ in range(20):
                pooled = rng.permutation(100)[: n + m].astype(float) + rng.uniform(0, 0.5)
                a, b = pooled[:n], pooled[n:]
                exact_ok &= wilcoxon_rank_sum(a, b).p_value == _brute_force_p(a, b)
                checked += 1
    worst = 0.0
    for _ in range(200):
        x = rng.normal(size=14)
        a, b = x[:7], x[7:]
        exact = wilcoxon_rank_sum(a, b).p_value
        assert exact == _brute_force_p(a, b)
        approx = wilcoxon_rank_sum(a, b, exact_max=0).p_value
        worst = max(worst, abs(exact - approx))
    ok = exact_ok and worst <= 0.05
    record_acceptance(5, ok, f"{checked} exact cases bit-exact={exact_ok}; max |normal - exact| at 7+7 = {worst:.4f}")
    assert exact_ok
    assert worst <= 0.05


def test_c6_optimizer_properties(record_acceptance):
    details = []
    # (a) monotone history, (c) budget, 50 seeds x sphere/Rosenbrock in 5D
    monotone = budget_ok = True
    for func in (sphere, rosenbrock):
        for name, opt in OPTIMIZERS.items():
            for seed in range(50):
                counter = CountingObjective(func)
                f = Objective(counter, 5, Bounds(-5, 5))
                res = opt(f, 20, 10_000, seed=seed)
                monotone &= bool(np.all(np.diff(res.history) <= 0)) and res.history[0] <= res.initial_best_fitness
                budget_ok &= counter.calls <= 10_000 and res.evaluations <= 10_000
    details.append(f"(a) monotone={monotone}")

    # (b) chaotic containment
    rng = np.random.default_rng(7)
    contained = True
    for k in range(100):
        state = ChaoticState(float(rng.uniform(1e-9, 1 - 1e-9)), float(rng.uniform(1e-9, 1 - 1e-9)), rng=make_rng(k))
        for _ in range(100_000):
            c = chaotic_step(state)
            if not 0.0 < c < 1.0:
                contained = False
                break
    details.append(f"(b) chaos in (0,1)={contained}")
    details.append(f"(c) budget respected={budget_ok}")

    # (d) shared initial population
    shared = True
    for seed in range(10):
        f = Objective(rosenbrock, 5, Bounds(-5, 5))
        init = evaluate(uniform_init(f.bounds, 20, 5, make_rng(seed)), f)
        starts = {opt(f, 20, 500, seed=seed + 100, initial=init).initial_best_fitness for opt in OPTIMIZERS.values()}
        shared &= len(starts) == 1 and starts == {float(init.fitness.min())}
    details.append(f"(d) shared gen-0 best={shared}")

    # (e) CODEQ on 5D sphere, frozen threshold 1e-3 in >= 28/30 seeds, must beat random search
    f = Objective(sphere, 5, Bounds(-5, 5))
    codeq = [codeq_optimize(f, 20, 10_000, seed=s).best_fitness for s in range(30)]
    rand = [random_search_best(sphere, 5, -5, 5, 10_000, seed=1000 + s) for s in range(30)]
    hits = sum(v < 1e-3 for v in codeq)
    beats = np.median(codeq) < np.median(rand)
    details.append(f"(e) {hits}/30 below 1e-3, beats random search={beats}")

    ok = monotone and contained and budget_ok and shared and hits >= 28 and beats
    record_acceptance(6, ok, "; ".join(details))
    assert ok


def test_c7_encoding_and_forward(record_acceptance):
    rng = np.random.default_rng(11)
    roundtrip = True
    for _ in range(20):
        t = Topology(*(int(x) for x in rng.integers(1, 10, size=3)))
        for _ in range(50):
            v = rng.uniform(-10, 10, size=param_count(t))
            roundtrip &= np.array_equal(flatten(decode(v, t)), v)
    # 2-2-1 net checked against values evaluated at 30 digits with mpmath
    v = np.array([0.5, -1.0, 1.5, 0.25, 2.0, -0.75, 0.1, -0.2, 0.3])
    out = forward(decode(v, Topology(2, 2, 1)), np.array([0.4, -1.2]))[0]
    err = abs(out - 1.54141456177808232964003947036)
    ok = roundtrip and err <= 1e-12
    record_acceptance(7, ok, f"1000 roundtrips exact={roundtrip}; 2-2-1 forward error {err:.2e}")
    assert ok


def test_c8_cli_determinism(tmp_path, record_acceptance):
    exe = shutil.which("bench")
    base = [exe] if exe else [sys.executable, "-m", "codeqnn.cli"]
    flags = ["run", "--dataset", "house", "--runs", "3", "--budget", "500", "--seed", "17"]
    outputs = []
    for k in range(2):
        out = tmp_path / f"o{k}"
        subprocess.run(base + flags + ["--out", str(out)], check=True, capture_output=True)
        outputs.append((out / "results.csv").read_bytes())
    ok = outputs[0] == outputs[1] and len(outputs[0]) > 0
    record_acceptance(8, ok, "two bench run invocations produce byte-identical results.csv")
    assert ok
