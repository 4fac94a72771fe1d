"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Statistical criteria run fixed seeds, so every number here is reproducible;
the slack terms (0.01 additive, three binomial sigmas) come from the stated
tolerances, not from tuning.
"""

import math
import random
import time
import pytest

from okfrac.bounds import (
    d_min,
    excess_constants,
    mu_bar,
    optimize_params,
    p_lower,
    q_lower,
)
from okfrac.core import Instance, normalize, solve_fractional
from okfrac.incremental import IncrementalSolver
from okfrac.online import PhaseParams, run
from okfrac.sim import Family, GeneratorSpec, generate, run_trials

from helpers import brute_force_optimum, random_rational_instance

# Published reference values for the optimized phase split.
C_REF = 0.4752190514489393
D_REF = 0.6013835675554252
RATIO_REF = 4.383238341343964
# The slack-constant targets are quoted for the five-decimal split of the
# final guarantee statement; at the exact optimizer the second constant is
# the (vanishing) constraint gap.
C_ROUNDED = 0.47521
D_ROUNDED = 0.60138

SEED = 20260811
N_SIM = 2000
TRIALS_PER_FAMILY = 20000
TRIALS_RANKS = 50000


def _verdict(num: int, label: str, ok: bool) -> bool:
    print(f"[ACCEPTANCE] {num:02d} {label}: {'PASS' if ok else 'FAIL'}")
    return ok


def _sigma(p_hat: float, trials: int) -> float:
    return math.sqrt(max(p_hat * (1.0 - p_hat), 1e-12) / trials)


@pytest.fixture(scope="module")
def optimum_timed():
    start = time.perf_counter()
    result = optimize_params()
    return result, time.perf_counter() - start


def _family_spec(family: Family) -> GeneratorSpec:
    return GeneratorSpec(family=family, n=N_SIM, k=10)


@pytest.fixture(scope="module")
def family_stats():
    params = PhaseParams(c=C_REF, d=D_REF, n=N_SIM)
    stats = {}
    capacities = {}
    start = time.perf_counter()
    for family in Family:
        inst = generate(_family_spec(family), seed=SEED)
        capacities[family] = float(inst.capacity)
        stats[family] = run_trials(inst, params, TRIALS_PER_FAMILY, seed=SEED, delta=0.3)
    return stats, capacities, time.perf_counter() - start


@pytest.fixture(scope="module")
def rank_stats():
    inst = generate(GeneratorSpec(family=Family.UNIFORM_RANDOM, n=N_SIM), seed=SEED + 1)
    params = PhaseParams(c=C_REF, d=D_REF, n=N_SIM)
    return run_trials(inst, params, TRIALS_RANKS, seed=SEED + 1, delta=0.3, max_rank=5)


def test_criterion_01_parameter_reproduction(optimum_timed):
    result, elapsed = optimum_timed
    ok = (
        abs(result.d_star - D_REF) <= 1e-9
        and abs(result.c_star - C_REF) <= 1e-9
        and abs(result.ratio - RATIO_REF) <= 1e-9
        and elapsed < 5.0
    )
    assert _verdict(1, "parameter reproduction", ok), (
        f"d*={result.d_star!r} c*={result.c_star!r} ratio={result.ratio!r} "
        f"elapsed={elapsed:.2f}s"
    )


def test_criterion_02_constant_reproduction(optimum_timed):
    result, _ = optimum_timed
    start = time.perf_counter()
    dm = d_min()
    mb = mu_bar(result.d_star)
    p1 = p_lower(1, result.c_star, result.d_star)
    cd = result.c_star / result.d_star
    first, second = excess_constants(C_ROUNDED, D_ROUNDED)
    elapsed = time.perf_counter() - start
    checks = {
        "d_min": abs(dm - 0.20319) <= 1e-5,
        "mu_bar": abs(mb - 0.72428) <= 1e-4,
        "p1": abs(p1 - 0.1119) <= 5e-4,
        "c_over_d": abs(cd - 0.790) <= 5e-3,
        "excess_first": abs(first - 0.02949) <= 1e-4,
        "excess_second": abs(second - 4e-6) <= 2e-6,
        "runtime": elapsed < 1.0,
    }
    ok = all(checks.values())
    assert _verdict(2, "constant reproduction", ok), (
        f"checks={checks} d_min={dm!r} mu_bar={mb!r} p1={p1!r} c/d={cd!r} "
        f"excess=({first!r}, {second!r}) elapsed={elapsed:.3f}s"
    )


def test_criterion_03_forced_equal_split_regression():
    start = time.perf_counter()
    result = optimize_params(equal_cd=True)
    elapsed = time.perf_counter() - start
    ok = abs(result.ratio - 6.63) <= 0.01 and elapsed < 5.0
    assert _verdict(3, "forced c=d regression", ok), (
        f"ratio={result.ratio!r} elapsed={elapsed:.2f}s"
    )


def test_criterion_04_oracle_equivalence():
    rng = random.Random(SEED)
    start = time.perf_counter()
    for _ in range(1000):
        inst = normalize(random_rational_instance(rng, max_items=10, min_items=2))
        sol = solve_fractional(inst)
        assert sol.objective == brute_force_optimum(inst), f"mismatch on {inst}"
    elapsed = time.perf_counter() - start
    ok = elapsed < 30.0
    assert _verdict(4, "offline oracle equivalence (1000 instances)", ok), (
        f"elapsed={elapsed:.1f}s"
    )


def test_criterion_05_incremental_solver_equivalence():
    rng = random.Random(SEED + 2)
    start = time.perf_counter()
    for _ in range(200):
        inst = normalize(random_rational_instance(rng, max_items=200, min_items=1))
        order = list(inst.items)
        rng.shuffle(order)
        solver = IncrementalSolver(inst.capacity)
        revealed = []
        for step, item in enumerate(order, start=1):
            solver.insert(item)
            revealed.append(item)
            prefix = solve_fractional(
                Instance(items=tuple(revealed), capacity=inst.capacity)
            ).packing.fractions
            assert solver.fraction(item.id) == prefix[item.id]
            for probe in rng.sample(revealed, min(2, len(revealed))):
                assert solver.fraction(probe.id) == prefix[probe.id]
            if step % 16 == 0 or step == len(order):
                assert solver.fractions() == prefix
    elapsed = time.perf_counter() - start
    ok = elapsed < 60.0
    assert _verdict(5, "incremental solver equivalence (200 instances)", ok), (
        f"elapsed={elapsed:.1f}s"
    )


def test_criterion_06_empirical_competitive_ratio(family_stats):
    stats, _, elapsed = family_stats
    floor = 1.0 / 4.39 - 0.01
    means = {family.value: s.mean_ratio for family, s in stats.items()}
    ok = all(m >= floor for m in means.values()) and elapsed < 600.0
    assert _verdict(6, "empirical competitive ratio on six families", ok), (
        f"floor={floor:.5f} means={means} elapsed={elapsed:.0f}s"
    )


def test_criterion_07_empty_knapsack_frequency(family_stats):
    stats, _, _ = family_stats
    bound = C_REF / D_REF
    freqs = {}
    ok = True
    for family, s in stats.items():
        freq = s.empty_after_secretary_freq
        freqs[family.value] = freq
        ok = ok and freq >= bound - 3.0 * _sigma(freq, s.trials)
    assert _verdict(7, "empty-knapsack frequency >= c/d - 3 sigma", ok), (
        f"bound={bound:.5f} freqs={freqs}"
    )


def test_criterion_08_secretary_rank_probabilities(rank_stats):
    stats = rank_stats
    details = {}
    ok = True
    for i in range(1, 6):
        freq = stats.first_accept_freq[i]
        floor = p_lower(i, C_REF, D_REF) - 3.0 * _sigma(freq, stats.trials)
        details[i] = (freq, floor)
        ok = ok and freq >= floor
    assert _verdict(8, "secretary first-acceptance rank frequencies", ok), (
        f"(freq, floor) by rank: {details}"
    )


def test_criterion_09_feasibility_and_irrevocability(family_stats, rank_stats):
    stats, capacities, _ = family_stats
    # Float mode, over every simulated trial: consumption never beyond the
    # relative slack (the kernel reports the worst overshoot it ever saw).
    float_ok = all(
        s.max_feasibility_overshoot <= 1e-9 * capacities[family]
        for family, s in stats.items()
    )
    float_ok = float_ok and rank_stats.max_feasibility_overshoot <= 1e-9
    # Rational mode: exact feasibility at every round, and the trace is the
    # packing (fractions are assigned once and never revised).
    rng = random.Random(SEED + 3)
    exact_ok = True
    for _ in range(200):
        inst = normalize(random_rational_instance(rng, max_items=14, min_items=2))
        n = len(inst.items)
        order = list(inst.ids())
        rng.shuffle(order)
        c = rng.uniform(0.05, 1.0)
        d = rng.uniform(c, 1.0)
        trace = run(inst, order, PhaseParams(c=c, d=d, n=n))
        exact_ok = exact_ok and all(rec.remaining_capacity >= 0 for rec in trace.records)
        exact_ok = exact_ok and {r.item_id: r.fraction for r in trace.records} == (
            trace.final_packing.fractions
        )
        total = sum(inst.item_by_id(i).size * trace.final_packing.fractions[i] for i in order)
        exact_ok = exact_ok and total <= inst.capacity
    ok = float_ok and exact_ok
    assert _verdict(9, "per-round feasibility and irrevocability", ok), (
        f"float_ok={float_ok} exact_ok={exact_ok}"
    )


def test_criterion_10_q_monotonicity_and_limit():
    ok = True
    for d in (0.3, 0.45, D_REF, 0.8):
        grid = [k * 1e-3 for k in range(1, 1001)]
        values = [q_lower(mu, d) for mu in grid]
        ok = ok and all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
        ok = ok and abs(q_lower(1e-8, d) - (2 - 2 * d + math.log(d))) <= 1e-6
    assert _verdict(10, "q monotonicity and zero-utilization limit", ok)
