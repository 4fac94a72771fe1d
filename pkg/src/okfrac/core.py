"""Domain types, input normalization, and the exact offline fractional knapsack oracle.

Arithmetic is dual-mode by construction: items built from `fractions.Fraction`
stay exact end to end, items built from floats run in ordinary 64-bit
arithmetic. Nothing in this module converts between the two behind the
caller's back.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterable, Union

from .errors import InvalidInstance, KeyMismatch

Numeric = Union[int, float, Fraction]

# Relative slack on the capacity constraint when fractions were accumulated in
# float arithmetic (taken over ~1e5 rounds the rounding error stays well below
# this).
FLOAT_FEASIBILITY_SLACK = 1e-9


@dataclass(frozen=True)
class Item:
    """One knapsack item: profit `value` >= 0 and `size` > 0."""

    id: int
    value: Numeric
    size: Numeric

    def density(self) -> Numeric:
        return self.value / self.size


@dataclass(frozen=True)
class Instance:
    """An item list plus knapsack capacity. Immutable; safe to share."""

    items: tuple[Item, ...]
    capacity: Numeric

    def ids(self) -> tuple[int, ...]:
        return tuple(item.id for item in self.items)

    def item_by_id(self, item_id: int) -> Item:
        for item in self.items:
            if item.id == item_id:
                return item
        raise KeyMismatch(f"no item with id {item_id}")

    def is_exact(self) -> bool:
        """True when every numeric field is an int or Fraction (exact mode)."""
        if isinstance(self.capacity, float):
            return False
        return not any(
            isinstance(it.value, float) or isinstance(it.size, float) for it in self.items
        )


def value_sort_key(item: Item):
    """Canonical strict value order: value descending, id ascending."""
    return (-item.value, item.id)


def density_sort_key(item: Item):
    """Canonical density order: density descending, value ties broken by the
    canonical value order (most valuable first)."""
    return (-item.density(), -item.value, item.id)


def beats(a: Item, b: Item) -> bool:
    """True when `a` precedes `b` in the canonical value order."""
    return value_sort_key(a) < value_sort_key(b)


def normalize(raw: Instance) -> Instance:
    """Clamp oversized items to the capacity and establish the canonical order.

    The returned instance has every size <= capacity and its item list sorted
    by value descending (id ascending on ties), which realizes the
    distinct-values assumption as a fixed total order. Idempotent.
    """
    if not raw.items:
        raise InvalidInstance("instance has no items")
    if not raw.capacity > 0:
        raise InvalidInstance(f"capacity must be positive, got {raw.capacity!r}")
    # In exact mode promote ints to Fraction so division never falls back to
    # floats; float mode is left untouched.
    exact = raw.is_exact()
    wrap = Fraction if exact else (lambda x: x)
    capacity = wrap(raw.capacity)
    seen: set[int] = set()
    clamped = []
    for item in raw.items:
        if item.id in seen:
            raise InvalidInstance(f"duplicate item id {item.id}")
        seen.add(item.id)
        if not item.size > 0:
            raise InvalidInstance(f"item {item.id} has non-positive size {item.size!r}")
        if item.value < 0:
            raise InvalidInstance(f"item {item.id} has negative value {item.value!r}")
        size = wrap(item.size) if item.size <= capacity else capacity
        clamped.append(Item(item.id, wrap(item.value), size))
    clamped.sort(key=value_sort_key)
    return Instance(items=tuple(clamped), capacity=capacity)


@dataclass(frozen=True)
class FractionalPacking:
    """Per-item fractions in [0, 1] with total packed size at most the capacity."""

    fractions: dict[int, Numeric]
    instance_capacity: Numeric

    def total_size(self, inst: Instance) -> Numeric:
        return sum(it.size * self.fractions.get(it.id, 0) for it in inst.items)

    def validate(self, inst: Instance) -> None:
        """Raise unless the packing is feasible for `inst`.

        Exact instances are checked exactly; float instances get the relative
        slack `FLOAT_FEASIBILITY_SLACK` on the capacity.
        """
        known = set(inst.ids())
        for item_id, frac in self.fractions.items():
            if item_id not in known:
                raise KeyMismatch(f"packing refers to unknown id {item_id}")
            if not (0 <= frac <= 1):
                raise InvalidInstance(f"fraction for id {item_id} outside [0,1]: {frac!r}")
        cap = inst.capacity
        limit = cap if inst.is_exact() else cap * (1 + FLOAT_FEASIBILITY_SLACK)
        if self.total_size(inst) > limit:
            raise InvalidInstance("packed size exceeds capacity")


@dataclass(frozen=True)
class OptimalSolution:
    """Structure of the unique optimal fractional packing under the canonical order."""

    packing: FractionalPacking
    objective: Numeric
    threshold_density: Numeric
    support_size: int
    utilizations: dict[int, Numeric]


def solve_fractional(inst: Instance) -> OptimalSolution:
    """Exact greedy oracle: pack items in canonical density order until full.

    All items strictly denser than the returned threshold are packed whole,
    all items strictly less dense get fraction 0, and at most one item is
    packed fractionally. Ties are decided by the canonical order, never by
    the stored list order.
    """
    cap = inst.capacity
    order = sorted(inst.items, key=density_sort_key)
    fractions: dict[int, Numeric] = {}
    utilizations: dict[int, Numeric] = {}
    remaining = cap
    threshold = None
    support = 0
    for item in order:
        if remaining > 0:
            take = item.size if item.size <= remaining else remaining
            frac = take / item.size
            remaining = remaining - take
            if frac > 0:
                support += 1
                threshold = item.density()
        else:
            frac = 0 * item.size  # keeps exact zero in rational mode
        fractions[item.id] = frac
        utilizations[item.id] = item.size * frac / cap
    objective = sum(it.value * fractions[it.id] for it in inst.items)
    packing = FractionalPacking(fractions=fractions, instance_capacity=cap)
    return OptimalSolution(
        packing=packing,
        objective=objective,
        threshold_density=threshold,
        support_size=support,
        utilizations=utilizations,
    )


def objective_of(packing: FractionalPacking, inst: Instance) -> Numeric:
    """Total profit of a packing: sum of value_i * fraction_i."""
    values = {it.id: it.value for it in inst.items}
    total = 0
    for item_id, frac in packing.fractions.items():
        if item_id not in values:
            raise KeyMismatch(f"packing refers to unknown id {item_id}")
        total += values[item_id] * frac
    return total


# ---------------------------------------------------------------------------
# Instance file format: {"capacity": num-or-"p/q", "items": [{"id", "value",
# "size"}, ...]}. String rationals "p/q" parse exactly in both modes; plain
# JSON numbers parse as decimal-exact Fractions in rational mode and as floats
# in float mode.
# ---------------------------------------------------------------------------


def _coerce(value, exact: bool) -> Numeric:
    if isinstance(value, str):
        try:
            frac = Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInstance(f"bad rational literal {value!r}") from exc
        return frac if exact else float(frac)
    if isinstance(value, bool) or value is None:
        raise InvalidInstance(f"expected a number, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value if exact else float(value)
    if isinstance(value, float):
        return value
    raise InvalidInstance(f"expected a number, got {value!r}")


def instance_from_dict(doc: dict, mode: str = "rational") -> Instance:
    """Build a (normalized) Instance from the JSON document structure."""
    if mode not in ("rational", "float"):
        raise ValueError(f"mode must be 'rational' or 'float', got {mode!r}")
    exact = mode == "rational"
    try:
        raw_items = doc["items"]
        capacity = _coerce(doc["capacity"], exact)
    except (KeyError, TypeError) as exc:
        raise InvalidInstance(f"malformed instance document: {exc}") from exc
    items = []
    for entry in raw_items:
        try:
            items.append(
                Item(
                    id=int(entry["id"]),
                    value=_coerce(entry["value"], exact),
                    size=_coerce(entry["size"], exact),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInstance(f"malformed item entry {entry!r}: {exc}") from exc
    return normalize(Instance(items=tuple(items), capacity=capacity))


def load_instance(fp: IO[str] | str, mode: str = "rational") -> Instance:
    """Read an instance JSON file (path or open file) and normalize it."""
    if isinstance(fp, str):
        with open(fp, "r", encoding="utf-8") as handle:
            return load_instance(handle, mode=mode)
    parse_float = Fraction if mode == "rational" else float
    try:
        doc = json.load(fp, parse_float=parse_float)
    except json.JSONDecodeError as exc:
        raise InvalidInstance(f"instance file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InvalidInstance("instance file must contain a JSON object")
    return instance_from_dict(doc, mode=mode)


def _emit(value: Numeric):
    if isinstance(value, Fraction):
        return str(value)
    return value


def instance_to_dict(inst: Instance) -> dict:
    return {
        "capacity": _emit(inst.capacity),
        "items": [
            {"id": it.id, "value": _emit(it.value), "size": _emit(it.size)} for it in inst.items
        ],
    }


def save_instance(inst: Instance, fp: IO[str] | str) -> None:
    if isinstance(fp, str):
        with open(fp, "w", encoding="utf-8") as handle:
            save_instance(inst, handle)
            return
    json.dump(instance_to_dict(inst), fp, indent=2, sort_keys=True)
    fp.write("\n")


def items_from_tuples(rows: Iterable[tuple], capacity: Numeric) -> Instance:
    """Convenience constructor from (id, value, size) tuples; not normalized."""
    return Instance(items=tuple(Item(*row) for row in rows), capacity=capacity)
