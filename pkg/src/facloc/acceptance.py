"""Acceptance suite: every verifiable end-to-end claim, one criterion each.

Each criterion function runs at the pinned sample sizes and tolerances and
returns a :class:`CriterionResult`; ``run_acceptance`` prints one pass/fail
line per criterion.  The same functions back ``tests/test_acceptance.py``
and the ``facloc accept`` subcommand.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass

import numpy as np

from .baselines import brute_force_opt, mettu_plaxton
from .generators import figure2_instance, random_instance
from .graphs import edge_count, gnp_adjacency, induced_edge_count
from .metric import (
    Configuration,
    characteristic_radii,
    charge,
    cost_lower_bound,
    smoothed_radii,
    total_cost,
)
from .ruling_set import (
    ACCEPT_EDGE_FACTOR,
    measure_thresholds,
    run_two_ruling_set,
    sample_test_set_edges,
    threshold_count,
    verify_ruling_set,
)
from .solver import (
    approximation_bound,
    connection_bound,
    contribution_bound,
    cost_bound_coefficient,
    solve,
)
from .sparse_mis import run_sparse_mis

REL_SLACK = 1.0 + 1e-12


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    elapsed: float
    detail: str


def _result(number: int, name: str, passed: bool, start: float, detail: str,
            limit: float | None = None) -> CriterionResult:
    elapsed = time.time() - start
    if limit is not None and elapsed >= limit:
        passed = False
        detail += f"; exceeded the {limit:g}s runtime limit"
    return CriterionResult(number, name, bool(passed), elapsed, detail)


_shared_cache: dict = {}


def _small_instances():
    """300 random instances with n <= 10, shared by criteria 3 and 4."""
    if "small" not in _shared_cache:
        rng = np.random.default_rng(20_240)
        batch = []
        for t in range(300):
            n = int(rng.integers(1, 11))
            kind = "euclidean" if t % 3 else "graph-metric"
            if n == 1:
                kind = "euclidean"
            batch.append(random_instance(n, seed=30_000 + t, kind=kind))
        _shared_cache["small"] = batch
    return _shared_cache["small"]


def criterion_1_figure2() -> CriterionResult:
    start = time.time()
    inst = figure2_instance()
    r = characteristic_radii(inst)
    rbar = smoothed_radii(inst, r)
    failures = []
    if not (abs(r[0] - 1.0) <= 1e-9 and abs(r[1] - 50.0) <= 1e-9):
        failures.append(f"radii {r.tolist()}")
    if not (abs(rbar[0] - 1.0) <= 1e-9 and abs(rbar[1] - 2.0) <= 1e-9):
        failures.append(f"smoothed radii {rbar.tolist()}")
    opt = brute_force_opt(inst)
    if opt.config.open != (0,) or abs(opt.cost - 2.0) > 1e-9:
        failures.append(f"optimum {opt.config.open} cost {opt.cost}")
    mp = mettu_plaxton(inst)
    if mp.open != (0,):
        failures.append(f"greedy baseline opened {mp.open}")
    for seed in range(5):
        res = solve(inst, seed=seed)
        if res.config.open != (0,) or abs(res.cost - 2.0) > 1e-9:
            failures.append(f"solve(seed={seed}) opened {res.config.open} cost {res.cost}")
    detail = "; ".join(failures) if failures else "r=(1,50) rbar=(1,2) opt=mp=solve=({x0}, cost 2)"
    return _result(1, "two-point regression", not failures, start, detail, limit=1.0)


def criterion_2_charge_identity() -> CriterionResult:
    start = time.time()
    rng = np.random.default_rng(20_241)
    worst = 0.0
    for t in range(1000):
        n = int(rng.integers(2, 21))
        inst = random_instance(n, seed=40_000 + t,
                               kind="euclidean" if t % 2 else "graph-metric")
        r = characteristic_radii(inst)
        k = int(rng.integers(1, n + 1))
        config = Configuration.from_open(inst, rng.choice(n, size=k, replace=False))
        charges = sum(charge(inst, r, i, config) for i in range(n))
        cost = total_cost(inst, config)
        worst = max(worst, abs(charges - cost) / max(1.0, abs(cost)))
    passed = worst <= 1e-9
    return _result(2, "charge identity", passed, start,
                   f"1000 pairs, worst relative gap {worst:.3e}", limit=5.0)


def criterion_3_lower_bound() -> CriterionResult:
    start = time.time()
    violations = 0
    for inst in _small_instances():
        bound = cost_lower_bound(inst)
        opt = brute_force_opt(inst)
        # The optimum is the minimum over every enumerated configuration, so
        # bound <= opt.cost certifies the bound against all of them.
        if bound > opt.cost * REL_SLACK:
            violations += 1
    return _result(3, "lower bound vs exhaustive optimum", violations == 0, start,
                   f"300 instances, {violations} violations", limit=60.0)


def criterion_4_greedy_baseline() -> CriterionResult:
    start = time.time()
    violations = []
    for idx, inst in enumerate(_small_instances()):
        r = characteristic_radii(inst)
        mp = mettu_plaxton(inst, r)
        ratio = total_cost(inst, mp) / brute_force_opt(inst).cost
        if ratio > 3.0 * REL_SLACK:
            violations.append(f"instance {idx}: ratio {ratio:.3f}")
        for a_pos, i in enumerate(mp.open):
            for j in mp.open[a_pos + 1:]:
                if inst.dist[i, j] <= r[i] + r[j]:
                    violations.append(f"instance {idx}: separation fails at ({i},{j})")
    detail = "; ".join(violations[:3]) if violations else "300 instances, ratio <= 3 and separation hold"
    return _result(4, "greedy 3-approximation", not violations, start, detail)


def _solve_batch():
    """>= 600 solve runs across n in {10, 50, 200}, shared by criteria 5 and 11."""
    if "solves" not in _shared_cache:
        runs = []
        plan = [(10, 300), (50, 200), (200, 100)]
        for n, count in plan:
            for t in range(count):
                inst = random_instance(n, seed=50_000 + 1000 * n + t,
                                       kind="euclidean" if t % 2 else "graph-metric")
                runs.append((inst, solve(inst, seed=t)))
        _shared_cache["solves"] = runs
    return _shared_cache["solves"]


def criterion_5_per_node_bounds() -> CriterionResult:
    start = time.time()
    conn_cap, contrib_cap = connection_bound(), contribution_bound()
    agg_cap = cost_bound_coefficient()
    violations = 0
    worst_conn = worst_contrib = worst_agg = 0.0
    runs = _solve_batch()
    for inst, res in runs:
        worst_conn = max(worst_conn, float(res.audit.connection_slack.max()))
        worst_contrib = max(worst_contrib, float(res.audit.contribution_slack.max()))
        agg = res.cost / float(res.radii.rbar.sum())
        worst_agg = max(worst_agg, agg)
        if (
            (res.audit.connection_slack > conn_cap * REL_SLACK).any()
            or (res.audit.contribution_slack > contrib_cap * REL_SLACK).any()
            or agg > agg_cap * REL_SLACK
        ):
            violations += 1
    detail = (
        f"{len(runs)} runs; worst connection slack {worst_conn:.2f}/{conn_cap:.2f}, "
        f"contribution {worst_contrib:.3f}/{contrib_cap:.3f}, aggregate {worst_agg:.2f}/{agg_cap:.2f}"
    )
    return _result(5, "per-node upper bounds", violations == 0, start, detail)


def criterion_6_end_to_end() -> CriterionResult:
    start = time.time()
    cap = approximation_bound()
    rng = np.random.default_rng(20_246)
    ratios = []
    for t in range(200):
        n = int(rng.integers(2, 13))
        inst = random_instance(n, seed=60_000 + t,
                               kind="euclidean" if t % 2 else "graph-metric")
        res = solve(inst, seed=t)
        ratios.append(res.cost / brute_force_opt(inst).cost)
    ratios = np.array(ratios)
    passed = bool((ratios <= cap * REL_SLACK).all())
    detail = (
        f"200 instances; ratio mean {ratios.mean():.3f}, median {np.median(ratios):.3f}, "
        f"max {ratios.max():.3f} (bound {cap:.1f})"
    )
    return _result(6, "end-to-end approximation", passed, start, detail)


def criterion_7_sparse_mis_rounds() -> CriterionResult:
    start = time.time()
    rng = np.random.default_rng(20_247)
    checked = 0
    violations = []
    for n, trials in ((64, 60), (256, 40)):
        for t in range(trials):
            adj = gnp_adjacency(n, float(rng.uniform(0.3, 1.0)) * 16.0 / n,
                                seed=70_000 + 100 * n + t)
            size = int(rng.integers(2, n + 1))
            members = rng.choice(n, size=size, replace=False)
            mask = np.zeros(n, dtype=bool)
            mask[members] = True
            e = induced_edge_count(adj, mask)
            if e > ACCEPT_EDGE_FACTOR * n:
                continue
            checked += 1
            res = run_sparse_mis(n, members, adj, seed=t)
            cap = math.ceil(e / n) + 6
            if res.rounds > cap:
                violations.append(f"n={n} e={e}: rounds {res.rounds} > {cap}")
            if int(res.receipts.max()) > math.ceil(e / n) + 1:
                violations.append(f"n={n} e={e}: receipt {int(res.receipts.max())}")
    detail = "; ".join(violations[:3]) if violations else f"{checked} runs within both caps"
    return _result(7, "sparse-MIS round and load caps", not violations and checked >= 80,
                   start, detail)


def criterion_8_ruling_validity() -> CriterionResult:
    start = time.time()
    rejections = 0
    runs = 0
    for n, count, p in ((64, 250, 0.2), (256, 150, 0.08), (1024, 100, 0.02)):
        for t in range(count):
            adj = gnp_adjacency(n, p * (0.5 + (t % 4) / 2.0), seed=80_000 + n + t)
            run_result, _ = run_two_ruling_set(adj, seed=t)
            runs += 1
            if not verify_ruling_set(adj, run_result.result, 2).accepted:
                rejections += 1
    return _result(8, "2-ruling-set validity", rejections == 0 and runs >= 500, start,
                   f"{runs} runs, {rejections} rejections")


def criterion_9_sampling_statistics() -> CriterionResult:
    start = time.time()
    n = 256
    adj = gnp_adjacency(n, 0.1, seed=90_001)
    counts = sample_test_set_edges(adj, trials=600, seed=9)
    mean = float(counts.mean())
    se = float(counts.std(ddof=1)) / math.sqrt(counts.size)
    reject_frac = float((counts > ACCEPT_EDGE_FACTOR * n).mean())
    mean_ok = abs(mean - n) <= 3.0 * se
    frac_ok = reject_frac <= 0.30
    detail = (
        f"{counts.size} iterations at fixed m={edge_count(adj)}: mean {mean:.1f} "
        f"(target {n}, 3se={3 * se:.1f}); rejection fraction {reject_frac:.3f}"
    )
    return _result(9, "test-set sampling statistics", mean_ok and frac_ok, start, detail)


def criterion_10_round_scaling() -> CriterionResult:
    start = time.time()
    failures = []
    summaries = []
    for n in (256, 1024, 4096):
        adj = gnp_adjacency(n, 2.0 * n ** -0.4, seed=100_000 + n)
        iteration_counts = []
        per_threshold = np.zeros(threshold_count(n))
        for seed in range(100):
            run_result, _ = run_two_ruling_set(adj, seed=seed)
            iteration_counts.append(run_result.iterations)
            per_threshold += np.array(measure_thresholds(run_result, n))
        mean_iters = float(np.mean(iteration_counts))
        iter_cap = 2 * math.ceil(math.log2(math.log2(n))) + 4
        mean_tk = per_threshold / 100.0
        summaries.append(f"n={n}: mean iters {mean_iters:.2f}/{iter_cap}, "
                         f"max mean T(k) {mean_tk.max():.2f}/4")
        if mean_iters > iter_cap:
            failures.append(f"n={n}: mean iterations {mean_iters:.2f} > {iter_cap}")
        if (mean_tk > 4.0).any():
            failures.append(f"n={n}: mean T(k) {mean_tk.tolist()}")
    detail = "; ".join(failures) if failures else "; ".join(summaries)
    return _result(10, "round scaling at desk scale", not failures, start, detail,
                   limit=600.0)


def criterion_11_determinism() -> CriterionResult:
    start = time.time()
    mismatches = []
    for t in range(6):
        inst = random_instance(8 + 4 * t, seed=110_000 + t)
        a = solve(inst, seed=t)
        b = solve(inst, seed=t)
        if (json.dumps(a.to_dict()) != json.dumps(b.to_dict())
                or json.dumps(a.ruling.to_dict()) != json.dumps(b.ruling.to_dict())):
            mismatches.append(f"solve n={inst.n} seed={t}")
    for t in range(4):
        adj = gnp_adjacency(128, 0.1, seed=111_000 + t)
        r1, _ = run_two_ruling_set(adj, seed=t)
        r2, _ = run_two_ruling_set(adj, seed=t)
        if json.dumps(r1.to_dict()) != json.dumps(r2.to_dict()):
            mismatches.append(f"ruling seed={t}")
    detail = "; ".join(mismatches) if mismatches else "10 repeated runs, bit-identical JSON"
    return _result(11, "seeded determinism", not mismatches, start, detail)


CRITERIA = {
    1: criterion_1_figure2,
    2: criterion_2_charge_identity,
    3: criterion_3_lower_bound,
    4: criterion_4_greedy_baseline,
    5: criterion_5_per_node_bounds,
    6: criterion_6_end_to_end,
    7: criterion_7_sparse_mis_rounds,
    8: criterion_8_ruling_validity,
    9: criterion_9_sampling_statistics,
    10: criterion_10_round_scaling,
    11: criterion_11_determinism,
}


def run_acceptance(numbers=None, report=print) -> list[CriterionResult]:
    results = []
    for number in sorted(numbers or CRITERIA):
        result = CRITERIA[number]()
        results.append(result)
        status = "PASS" if result.passed else "FAIL"
        report(f"[{result.number:2d}] {status}  {result.name}  "
               f"({result.elapsed:.1f}s)  {result.detail}")
    ok = all(r.passed for r in results)
    report(f"acceptance: {sum(r.passed for r in results)}/{len(results)} criteria passed"
           + ("" if ok else "  <-- FAILURES"))
    return results
