"""The deterministic three-phase online algorithm.

Rounds 1..floor(c*n) observe only (sampling); rounds up to floor(d*n) pack
any item beating the best sampled value to the largest feasible fraction
(secretary); the remaining rounds pack each arriving item up to its fraction
in the optimal fractional solution of everything revealed so far, capped by
the remaining capacity (knapsack).

This is the traced reference implementation; the Monte Carlo harness in
`okfrac.sim` runs a numerically identical compiled fast path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .core import FractionalPacking, Instance, Item, Numeric, beats
from .errors import InvalidPermutation
from .incremental import IncrementalSolver

PHASE_SAMPLING = "sampling"
PHASE_SECRETARY = "secretary"
PHASE_KNAPSACK = "knapsack"


@dataclass(frozen=True)
class PhaseParams:
    """Phase split parameters 0 < c <= d <= 1 for an n-item run."""

    c: float
    d: float
    n: int

    def __post_init__(self):
        if not (0 < self.c <= self.d <= 1):
            raise ValueError(f"need 0 < c <= d <= 1, got c={self.c}, d={self.d}")
        if self.n < 1:
            raise ValueError(f"need n >= 1, got n={self.n}")

    @property
    def sampling_end(self) -> int:
        """Last sampling round, floor(c*n)."""
        return min(math.floor(self.c * self.n), self.n)

    @property
    def secretary_end(self) -> int:
        """Last secretary round, floor(d*n)."""
        return min(math.floor(self.d * self.n), self.n)

    def phase_of(self, round_index: int) -> str:
        if round_index <= self.sampling_end:
            return PHASE_SAMPLING
        if round_index <= self.secretary_end:
            return PHASE_SECRETARY
        return PHASE_KNAPSACK


@dataclass
class OnlineState:
    """Mutable state of one run: single-owner, advanced round by round.

    `best_sample` is only updated during the sampling phase and frozen
    afterwards; `consumed` never exceeds the capacity; items revealed while
    sampling keep fraction 0 in `packing_so_far`.
    """

    round: int
    best_sample: Optional[Item]
    consumed: Numeric
    packing_so_far: dict[int, Numeric]
    revealed: IncrementalSolver = field(repr=False)

    def beats_best_sample(self, item: Item) -> bool:
        return self.best_sample is None or beats(item, self.best_sample)


@dataclass(frozen=True)
class RoundRecord:
    round: int
    item_id: int
    phase: str
    fraction: Numeric
    remaining_capacity: Numeric


@dataclass(frozen=True)
class RunTrace:
    """Complete record of one online run; fractions are never revised."""

    records: tuple[RoundRecord, ...]
    final_packing: FractionalPacking
    final_objective: Numeric
    secretary_packed_nothing: bool

    def first_secretary_acceptance(self) -> Optional[int]:
        """Item id of the first secretary-phase acceptance, or None."""
        for rec in self.records:
            if rec.phase == PHASE_SECRETARY and rec.fraction > 0:
                return rec.item_id
        return None

    def phase_acceptances(self) -> dict[str, int]:
        counts = {PHASE_SAMPLING: 0, PHASE_SECRETARY: 0, PHASE_KNAPSACK: 0}
        for rec in self.records:
            if rec.fraction > 0:
                counts[rec.phase] += 1
        return counts


def run(inst: Instance, permutation: Sequence[int], params: PhaseParams) -> RunTrace:
    """Execute the three phases for one arrival order.

    `permutation` lists item ids in arrival order: position ell-1 arrives in
    round ell. It must be a bijection on the instance's ids. The revealed-set
    solver sees every revealed item, including ones the secretary phase
    already packed.
    """
    by_id = {item.id: item for item in inst.items}
    order = list(permutation)
    if len(order) != len(by_id) or set(order) != set(by_id):
        raise InvalidPermutation("permutation is not a bijection on the instance ids")
    if params.n != len(order):
        raise InvalidPermutation(f"params.n={params.n} but instance has {len(order)} items")

    exact = inst.is_exact()
    cap = inst.capacity
    state = OnlineState(
        round=0, best_sample=None, consumed=0, packing_so_far={},
        revealed=IncrementalSolver(cap),
    )
    records: list[RoundRecord] = []
    secretary_accepted = False

    for round_index, item_id in enumerate(order, start=1):
        item = by_id[item_id]
        state.round = round_index
        state.revealed.insert(item)
        phase = params.phase_of(round_index)
        if phase == PHASE_SAMPLING:
            frac: Numeric = 0
            if state.beats_best_sample(item):
                state.best_sample = item
        elif phase == PHASE_SECRETARY:
            if state.beats_best_sample(item):
                room = cap - state.consumed
                if not exact and room < 0:
                    room = 0  # absorb float rounding
                take = item.size if item.size <= room else room
                frac = take / item.size
                if frac > 0:
                    secretary_accepted = True
                state.consumed = state.consumed + take
            else:
                frac = 0
        else:
            # size * fraction-in-revealed-optimum, computed directly as
            # min(size, capacity - denser size) to avoid a double rounding
            # in float mode (identical in exact arithmetic).
            free_opt = cap - state.revealed.denser_size(item_id)
            if free_opt < 0:
                free_opt = 0
            want = item.size if item.size <= free_opt else free_opt
            room = cap - state.consumed
            if not exact and room < 0:
                room = 0
            take = want if want <= room else room
            frac = take / item.size
            state.consumed = state.consumed + take
        state.packing_so_far[item_id] = frac
        records.append(
            RoundRecord(
                round=round_index,
                item_id=item_id,
                phase=phase,
                fraction=frac,
                remaining_capacity=cap - state.consumed,
            )
        )

    packing = FractionalPacking(fractions=state.packing_so_far, instance_capacity=cap)
    objective = sum(by_id[i].value * state.packing_so_far[i] for i in order)
    return RunTrace(
        records=tuple(records),
        final_packing=packing,
        final_objective=objective,
        secretary_packed_nothing=not secretary_accepted,
    )


def permutation_from_positions(inst: Instance, positions: Iterable[int]) -> list[int]:
    """Map a permutation of 0..n-1 over the stored item list to item ids."""
    items = inst.items
    return [items[p].id for p in positions]
