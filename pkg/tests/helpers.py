"""Independent oracles and instance builders shared by the test modules.

Everything here deliberately avoids the code paths under test: the offline
oracle enumerates subsets, the online oracle re-solves every revealed prefix
from scratch, and bound oracles (in the bound tests) use 50-digit arithmetic.
"""

from __future__ import annotations

import random
from fractions import Fraction

from okfrac.core import Instance, Item, beats, solve_fractional
from okfrac.online import PhaseParams


def brute_force_optimum(inst: Instance) -> Fraction:
    """Best objective over every (integral subset, one fractional item) pair.

    Exact rational arithmetic; exponential in the item count, so keep
    instances at ten items or fewer.
    """
    items = inst.items
    n = len(items)
    cap = Fraction(inst.capacity)
    sizes = [Fraction(it.size) for it in items]
    values = [Fraction(it.value) for it in items]
    size_of = [Fraction(0)] * (1 << n)
    value_of = [Fraction(0)] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        i = low.bit_length() - 1
        size_of[mask] = size_of[mask ^ low] + sizes[i]
        value_of[mask] = value_of[mask ^ low] + values[i]
    best = Fraction(0)
    for mask in range(1 << n):
        if size_of[mask] > cap:
            continue
        total = value_of[mask]
        if total > best:
            best = total
        room = cap - size_of[mask]
        if room > 0:
            for i in range(n):
                if not mask >> i & 1:
                    frac = min(Fraction(1), room / sizes[i])
                    cand = total + values[i] * frac
                    if cand > best:
                        best = cand
    return best


def reference_online_objective(inst: Instance, order, params: PhaseParams):
    """From-scratch re-simulation of the three phases.

    Recomputes the full offline optimum of the revealed prefix in every
    knapsack-phase round instead of using the incremental solver.
    """
    by_id = {it.id: it for it in inst.items}
    cap = inst.capacity
    exact = inst.is_exact()
    consumed = 0
    best = None
    revealed = []
    total = 0
    for round_index, item_id in enumerate(order, start=1):
        item = by_id[item_id]
        revealed.append(item)
        if round_index <= params.sampling_end:
            if best is None or beats(item, best):
                best = item
            continue
        room = cap - consumed
        if not exact and room < 0:
            room = 0
        if round_index <= params.secretary_end:
            if best is None or beats(item, best):
                take = min(item.size, room)
                consumed += take
                total += item.value * (take / item.size)
            continue
        prefix = Instance(items=tuple(revealed), capacity=cap)
        sol = solve_fractional(prefix)
        want = item.size * sol.packing.fractions[item_id]
        take = min(want, room)
        consumed += take
        total += item.value * (take / item.size)
    return total


def random_rational_instance(rng: random.Random, max_items: int = 10,
                             min_items: int = 2) -> Instance:
    """Small instance with small rational data, already size-feasible."""
    n = rng.randint(min_items, max_items)
    cap = Fraction(rng.randint(4, 40), rng.randint(1, 4))
    items = []
    for i in range(n):
        value = Fraction(rng.randint(0, 30), rng.randint(1, 6))
        size = min(Fraction(rng.randint(1, 24), rng.randint(1, 6)), cap)
        items.append(Item(i, value, size))
    return Instance(items=tuple(items), capacity=cap)


def random_float_instance(rng: random.Random, n: int) -> Instance:
    cap = rng.uniform(1.0, 20.0)
    items = tuple(
        Item(i, rng.uniform(0.0, 10.0), rng.uniform(1e-3, 1.0) * cap) for i in range(n)
    )
    return Instance(items=items, capacity=cap)
