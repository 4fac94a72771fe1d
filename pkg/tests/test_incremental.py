import random
from fractions import Fraction

import pytest

from okfrac.core import Instance, Item, normalize, solve_fractional
from okfrac.errors import DuplicateItem, KeyMismatch
from okfrac.incremental import IncrementalSolver

from helpers import random_float_instance, random_rational_instance


def test_single_item_fits_fully():
    solver = IncrementalSolver(Fraction(10))
    solver.insert(Item(1, Fraction(3), Fraction(4)))
    assert solver.fraction(1) == 1


def test_second_denser_item_displaces_first():
    # Closed form for two items: the denser one takes precedence and the
    # other gets exactly the leftover share.
    solver = IncrementalSolver(Fraction(10))
    solver.insert(Item(1, Fraction(5), Fraction(8)))  # density 5/8
    assert solver.fraction(1) == 1
    solver.insert(Item(2, Fraction(7), Fraction(7)))  # density 1, overfills alone? no: 7 <= 10
    assert solver.fraction(2) == 1
    assert solver.fraction(1) == Fraction(10 - 7, 8)


def test_densest_item_always_full_when_it_fits():
    solver = IncrementalSolver(Fraction(5))
    solver.insert(Item(1, Fraction(1), Fraction(5)))
    solver.insert(Item(2, Fraction(9), Fraction(2)))
    assert solver.fraction(2) == 1
    assert solver.fraction(1) == Fraction(3, 5)


def test_below_threshold_item_gets_zero():
    solver = IncrementalSolver(Fraction(4))
    solver.insert(Item(1, Fraction(8), Fraction(4)))  # density 2, fills everything
    solver.insert(Item(2, Fraction(1), Fraction(2)))  # density 1/2
    assert solver.fraction(2) == 0


def test_duplicate_insert_rejected():
    solver = IncrementalSolver(Fraction(4))
    solver.insert(Item(1, Fraction(1), Fraction(1)))
    with pytest.raises(DuplicateItem):
        solver.insert(Item(1, Fraction(2), Fraction(1)))


def test_unknown_query_rejected():
    solver = IncrementalSolver(Fraction(4))
    solver.insert(Item(1, Fraction(1), Fraction(1)))
    with pytest.raises(KeyMismatch):
        solver.fraction(2)


def _check_against_prefix_oracle(inst, order, query_rng):
    solver = IncrementalSolver(inst.capacity)
    revealed = []
    by_id = {it.id: it for it in inst.items}
    for step, item_id in enumerate(order, start=1):
        solver.insert(by_id[item_id])
        revealed.append(by_id[item_id])
        prefix = Instance(items=tuple(revealed), capacity=inst.capacity)
        oracle = solve_fractional(prefix).packing.fractions
        assert solver.fraction(item_id) == oracle[item_id]
        probe = query_rng.choice(revealed).id
        assert solver.fraction(probe) == oracle[probe]
        if step % 7 == 0 or step == len(order):
            assert solver.fractions() == oracle


def test_matches_prefix_oracle_rational():
    rng = random.Random(404)
    for _ in range(15):
        inst = normalize(random_rational_instance(rng, max_items=30, min_items=3))
        order = [it.id for it in inst.items]
        rng.shuffle(order)
        _check_against_prefix_oracle(inst, order, rng)


def test_matches_prefix_oracle_float():
    rng = random.Random(77)
    inst = normalize(random_float_instance(rng, 40))
    order = [it.id for it in inst.items]
    rng.shuffle(order)
    solver = IncrementalSolver(inst.capacity)
    revealed = []
    by_id = {it.id: it for it in inst.items}
    for item_id in order:
        solver.insert(by_id[item_id])
        revealed.append(by_id[item_id])
        oracle = solve_fractional(Instance(items=tuple(revealed), capacity=inst.capacity))
        for it in revealed:
            got = solver.fraction(it.id)
            want = oracle.packing.fractions[it.id]
            assert got == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_insertion_order_does_not_matter():
    rng = random.Random(123)
    inst = normalize(random_rational_instance(rng, max_items=20, min_items=5))
    orders = [list(inst.ids()) for _ in range(3)]
    for order in orders[1:]:
        rng.shuffle(order)
    results = []
    for order in orders:
        solver = IncrementalSolver(inst.capacity)
        for item_id in order:
            solver.insert(inst.item_by_id(item_id))
        results.append(solver.fractions())
    assert results[0] == results[1] == results[2]
    assert results[0] == solve_fractional(inst).packing.fractions


def test_packed_value_matches_oracle_objective():
    rng = random.Random(3)
    inst = normalize(random_rational_instance(rng, max_items=15, min_items=2))
    solver = IncrementalSolver(inst.capacity)
    for it in inst.items:
        solver.insert(it)
    assert solver.packed_value() == solve_fractional(inst).objective
