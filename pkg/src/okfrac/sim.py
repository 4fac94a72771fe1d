"""Instance generators, seeded permutations, and the Monte Carlo harness.

Permutations come from a counter-based generator keyed by (seed, trial), so
trial t of a campaign is reproducible in isolation and trials never share
stream state. Trials are aggregated with exact summation (`math.fsum`), which
makes every reported statistic independent of execution order; worker threads
only ever change wall-clock time, never output.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import IO, Optional

import numpy as np

from . import _kernel
from .core import Instance, Item, density_sort_key, normalize, solve_fractional
from .errors import DegenerateInstance, InvalidSpec
from .online import PhaseParams

# Calibration point for the split-utilization family: the optimized phase
# split, at which the two bundle utilizations are the extremes of the
# many-item worst case.
CALIBRATED_SPLIT_D = 0.6013835675554252

_CHUNK = 4096
# Generator streams use key components >= 2**32 so they can never collide
# with per-trial permutation streams of the same seed.
_FAMILY_KEY_BASE = 2**32


class Family(str, Enum):
    SINGLE_DOMINANT = "single_dominant"
    EQUAL_K = "equal_k"
    DENSITY_STAIRCASE = "density_staircase"
    MU_BAR_SPLIT = "mu_bar_split"
    UNIFORM_RANDOM = "uniform_random"
    TINY_ITEMS = "tiny_items"


FAMILIES = tuple(Family)


@dataclass(frozen=True)
class GeneratorSpec:
    """What to generate: a family plus its shape parameters.

    `k` applies to equal_k (number of optimal items); `split_d` applies to
    mu_bar_split (phase split whose maximum utilization defines the split).
    """

    family: Family
    n: int
    k: int = 10
    split_d: float = CALIBRATED_SPLIT_D


def _rng(seed: int, stream: int) -> np.random.Generator:
    if seed < 0 or stream < 0:
        raise ValueError("seed and stream index must be nonnegative")
    key = np.array([seed, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def random_permutation(n: int, seed: int, trial_index: int) -> np.ndarray:
    """Uniform permutation of 0..n-1, fully determined by (seed, trial_index)."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    return _rng(seed, trial_index).permutation(n)


def generate(spec: GeneratorSpec, seed: int) -> Instance:
    """Deterministically build a normalized instance of the requested family."""
    family = Family(spec.family)
    n = spec.n
    if n < 1:
        raise InvalidSpec(f"need n >= 1, got {n}")
    rng = _rng(seed, _FAMILY_KEY_BASE + list(Family).index(family))

    if family is Family.SINGLE_DOMINANT:
        # One item worth far more than everything else, filling the knapsack
        # alone; the offline optimum is exactly that item.
        values = np.concatenate(([100.0], rng.uniform(0.1, 1.0, n - 1)))
        sizes = np.concatenate(([1.0], rng.uniform(0.5, 1.0, n - 1)))
        capacity = 1.0
    elif family is Family.EQUAL_K:
        k = spec.k
        if not 1 <= k <= n:
            raise InvalidSpec(f"equal_k needs 1 <= k <= n, got k={k}, n={n}")
        # k near-equal items of size 1 fill capacity k exactly; fillers are
        # strictly less dense, so each optimal utilization is exactly 1/k.
        values = np.concatenate(
            (10.0 + 1e-6 * np.arange(k, 0, -1), rng.uniform(0.1, 1.0, n - k))
        )
        sizes = np.ones(n)
        capacity = float(k)
    elif family is Family.DENSITY_STAIRCASE:
        if n < 2:
            raise InvalidSpec("density_staircase needs n >= 2")
        # Strictly decreasing densities with total size above capacity, so the
        # optimum always cuts one boundary item fractionally.
        sizes = np.minimum(rng.uniform(1.2 / n, 2.4 / n, n), 1.0)
        densities = 2.0 * 0.5 ** (np.arange(n) / max(n - 1, 1))
        values = densities * sizes
        capacity = 1.0
    elif family is Family.MU_BAR_SPLIT:
        if n < 2:
            raise InvalidSpec("mu_bar_split needs n >= 2")
        from .bounds import mu_bar

        try:
            mb = mu_bar(spec.split_d)
        except Exception as exc:
            raise InvalidSpec(f"bad split_d={spec.split_d}: {exc}") from exc
        if not 0.0 < mb < 1.0:
            raise InvalidSpec(f"split_d={spec.split_d} gives no usable utilization split")
        # Two optimal items with utilizations (mb, 1-mb); fillers below the
        # density threshold.
        fill_density = rng.uniform(0.1, 0.9, n - 2)
        fill_sizes = rng.uniform(0.2, 1.0, n - 2)
        values = np.concatenate(([2.0 * mb, 1.5 * (1.0 - mb)], fill_density * fill_sizes))
        sizes = np.concatenate(([mb, 1.0 - mb], fill_sizes))
        capacity = 1.0
    elif family is Family.UNIFORM_RANDOM:
        values = rng.uniform(0.1, 10.0, n)
        sizes = rng.uniform(0.01, 1.0, n)
        capacity = 1.0
    elif family is Family.TINY_ITEMS:
        values = rng.uniform(0.1, 10.0, n)
        sizes = rng.uniform(0.0005, 0.001, n)
        capacity = 1.0
    else:  # pragma: no cover
        raise InvalidSpec(f"unknown family {spec.family!r}")

    items = tuple(Item(i, float(values[i]), float(sizes[i])) for i in range(n))
    return normalize(Instance(items=items, capacity=capacity))


@dataclass(frozen=True)
class TrialStats:
    """Aggregated Monte Carlo outcomes for one instance and parameter set.

    `per_item_pack_freq` is measured conditional on the secretary phase having
    packed nothing, matching the empty-knapsack assumption under which the
    packing bounds hold. `first_accept_freq` maps the value rank (1 = most
    profitable) to the frequency of being the first secretary acceptance,
    over all trials.
    """

    trials: int
    mean_ratio: float
    ratio_stderr: Optional[float]
    empty_after_secretary_freq: float
    per_item_pack_freq: dict[int, float]
    first_accept_freq: dict[int, float]
    delta: float
    max_feasibility_overshoot: float
    trial_ratios: np.ndarray = field(repr=False, compare=False)
    trial_secretary_empty: np.ndarray = field(repr=False, compare=False)
    trial_first_rank: np.ndarray = field(repr=False, compare=False)


def _exact_instance(inst: Instance) -> Instance:
    if inst.is_exact():
        return inst
    items = tuple(Item(it.id, Fraction(it.value), Fraction(it.size)) for it in inst.items)
    return Instance(items=items, capacity=Fraction(inst.capacity))


def _thread_count() -> int:
    raw = os.environ.get("OKFRAC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_trials(
    inst: Instance,
    params: PhaseParams,
    trials: int,
    seed: int,
    delta: float = 0.3,
    max_rank: int = 10,
) -> TrialStats:
    """Run independent online trials and aggregate the outcome statistics.

    The ratio denominator is the exact rational offline optimum, converted to
    float once. Chunks of trials may run on several threads (capped by
    OKFRAC_THREADS); chunk results are combined in index order and every sum
    is exact, so scheduling never changes the output.
    """
    if trials < 1:
        raise ValueError(f"need trials >= 1, got {trials}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"need delta in (0,1), got {delta}")
    inst = normalize(inst)
    n = len(inst.items)
    if params.n != n:
        raise ValueError(f"params.n={params.n} does not match instance size {n}")

    exact_opt = solve_fractional(_exact_instance(inst))
    if exact_opt.objective == 0:
        raise DegenerateInstance("offline optimum is zero; ratios are undefined")
    opt_value = float(exact_opt.objective)

    # Canonical value order is the stored order after normalize, so the item
    # index doubles as the value rank.
    values = np.array([float(it.value) for it in inst.items])
    sizes = np.array([float(it.size) for it in inst.items])
    capacity = float(inst.capacity)
    float_items = [Item(it.id, float(it.value), float(it.size)) for it in inst.items]
    density_order = sorted(range(n), key=lambda idx: density_sort_key(float_items[idx]))
    density_rank = np.empty(n, dtype=np.int64)
    for pos, idx in enumerate(density_order):
        density_rank[idx] = pos + 1

    xstar = np.array([float(exact_opt.packing.fractions[it.id]) for it in inst.items])
    thresholds = np.minimum(delta * capacity / sizes, xstar)

    ratios = np.empty(trials)
    sec_empty = np.empty(trials, dtype=np.uint8)
    first_rank = np.empty(trials, dtype=np.int64)

    chunks = [(lo, min(lo + _CHUNK, trials)) for lo in range(0, trials, _CHUNK)]

    def run_chunk(bounds_pair):
        lo, hi = bounds_pair
        perms = np.empty((hi - lo, n), dtype=np.int64)
        for t in range(lo, hi):
            perms[t - lo] = random_permutation(n, seed, t)
        hits = np.zeros(n, dtype=np.int64)
        n_empty, overshoot = _kernel.simulate_block(
            perms,
            values,
            sizes,
            density_rank,
            capacity,
            params.sampling_end,
            params.secretary_end,
            opt_value,
            thresholds,
            ratios[lo:hi],
            sec_empty[lo:hi],
            first_rank[lo:hi],
            hits,
        )
        return n_empty, overshoot, hits

    threads = _thread_count()
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_chunk, chunks))
    else:
        results = [run_chunk(chunk) for chunk in chunks]

    total_empty = sum(r[0] for r in results)
    overshoot = max(r[1] for r in results)
    pack_hits = np.sum([r[2] for r in results], axis=0)

    mean = math.fsum(ratios) / trials
    if trials > 1:
        variance = math.fsum((r - mean) ** 2 for r in ratios) / (trials - 1)
        stderr = math.sqrt(variance / trials)
    else:
        stderr = None
    empty_freq = total_empty / trials
    if total_empty > 0:
        pack_freq = {it.id: pack_hits[i] / total_empty for i, it in enumerate(inst.items)}
    else:
        pack_freq = {it.id: 0.0 for it in inst.items}
    rank_counts = np.bincount(first_rank, minlength=max_rank + 1)
    first_freq = {r: rank_counts[r] / trials if r < len(rank_counts) else 0.0
                  for r in range(1, max_rank + 1)}

    return TrialStats(
        trials=trials,
        mean_ratio=mean,
        ratio_stderr=stderr,
        empty_after_secretary_freq=empty_freq,
        per_item_pack_freq=pack_freq,
        first_accept_freq=first_freq,
        delta=delta,
        max_feasibility_overshoot=overshoot,
        trial_ratios=ratios,
        trial_secretary_empty=sec_empty,
        trial_first_rank=first_rank,
    )


def estimate_p_ranks(
    inst: Instance,
    params: PhaseParams,
    trials: int,
    seed: int,
    max_rank: int,
) -> dict[int, float]:
    """Frequency that the rank-i most profitable item is the first secretary
    acceptance, for i = 1..max_rank."""
    inst = normalize(inst)
    if len(inst.items) < max_rank:
        raise ValueError(f"instance has {len(inst.items)} items, need >= {max_rank}")
    top = inst.items[: max_rank]
    distinct = {it.value for it in top}
    if len(distinct) < max_rank:
        raise ValueError("top items do not have distinct values")
    stats = run_trials(inst, params, trials, seed, max_rank=max_rank)
    return stats.first_accept_freq


def trial_stats_to_dict(stats: TrialStats) -> dict:
    """JSON-ready view of the aggregate statistics (stable key set, v1)."""
    return {
        "schema_version": 1,
        "trials": stats.trials,
        "mean_ratio": stats.mean_ratio,
        "ratio_stderr": stats.ratio_stderr,
        "empty_after_secretary_freq": stats.empty_after_secretary_freq,
        "delta": stats.delta,
        "per_item_pack_freq": {str(k): v for k, v in sorted(stats.per_item_pack_freq.items())},
        "first_accept_freq": {str(k): v for k, v in sorted(stats.first_accept_freq.items())},
        "max_feasibility_overshoot": stats.max_feasibility_overshoot,
    }


def write_per_trial_csv(stats: TrialStats, fp: IO[str]) -> None:
    """Per-trial rows (trial, ratio, secretary_empty, first_accept_rank);
    rank 0 means no secretary acceptance."""
    writer = csv.writer(fp)
    writer.writerow(["trial", "ratio", "secretary_empty", "first_accept_rank"])
    for t in range(stats.trials):
        writer.writerow(
            [
                t,
                repr(float(stats.trial_ratios[t])),
                int(stats.trial_secretary_empty[t]),
                int(stats.trial_first_rank[t]),
            ]
        )
