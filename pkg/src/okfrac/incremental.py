"""Incremental maintainer of the optimal fractional solution over a growing item set.

Items live in a treap ordered by the canonical density order, with subtree
size aggregates. An item's fraction in the optimal solution of the current
set depends only on the total size of strictly denser items, so a single
root-to-key descent answers a query in O(log n); insertion is O(log n)
amortized. Priorities are a deterministic hash of the item id, so a given
insertion sequence always builds the same tree.
"""

from __future__ import annotations

from typing import Optional

from .core import Item, Numeric, density_sort_key
from .errors import DuplicateItem, KeyMismatch


def _priority(item_id: int) -> int:
    # splitmix64 finalizer; decorrelates priorities from sequential ids
    z = (item_id + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


class _Node:
    __slots__ = ("key", "item", "prio", "left", "right", "size_sum", "value_sum", "count")

    def __init__(self, key, item: Item):
        self.key = key
        self.item = item
        self.prio = _priority(item.id)
        self.left: Optional[_Node] = None
        self.right: Optional[_Node] = None
        self.size_sum = item.size
        self.value_sum = item.value
        self.count = 1

    def pull(self) -> None:
        size_sum = self.item.size
        value_sum = self.item.value
        count = 1
        if self.left is not None:
            size_sum = size_sum + self.left.size_sum
            value_sum = value_sum + self.left.value_sum
            count += self.left.count
        if self.right is not None:
            size_sum = size_sum + self.right.size_sum
            value_sum = value_sum + self.right.value_sum
            count += self.right.count
        self.size_sum = size_sum
        self.value_sum = value_sum
        self.count = count


def _insert(node: Optional[_Node], new: _Node) -> _Node:
    if node is None:
        return new
    if new.key < node.key:
        node.left = _insert(node.left, new)
        if node.left.prio > node.prio:  # rotate right
            child = node.left
            node.left = child.right
            child.right = node
            node.pull()
            child.pull()
            return child
    else:
        node.right = _insert(node.right, new)
        if node.right.prio > node.prio:  # rotate left
            child = node.right
            node.right = child.left
            child.left = node
            node.pull()
            child.pull()
            return child
    node.pull()
    return node


class IncrementalSolver:
    """Order-statistic view of the optimal fractional packing of the inserted set."""

    def __init__(self, capacity: Numeric):
        if not capacity > 0:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._root: Optional[_Node] = None
        self._by_id: dict[int, _Node] = {}

    def __len__(self) -> int:
        return len(self._by_id)

    def __contains__(self, item_id: int) -> bool:
        return item_id in self._by_id

    def insert(self, item: Item) -> None:
        if item.id in self._by_id:
            raise DuplicateItem(f"item id {item.id} already inserted")
        node = _Node(density_sort_key(item), item)
        self._root = _insert(self._root, node)
        self._by_id[item.id] = node

    def denser_size(self, item_id: int) -> Numeric:
        """Total size of inserted items strictly denser (canonical order) than `item_id`."""
        target = self._by_id.get(item_id)
        if target is None:
            raise KeyMismatch(f"item id {item_id} not inserted")
        acc = 0
        node = self._root
        key = target.key
        while node is not None:
            if key <= node.key:
                node = node.left
            else:
                if node.left is not None:
                    acc = acc + node.left.size_sum
                acc = acc + node.item.size
                node = node.right
        return acc

    def fraction(self, item_id: int) -> Numeric:
        """The item's fraction in the optimal solution of the inserted set."""
        target = self._by_id.get(item_id)
        if target is None:
            raise KeyMismatch(f"item id {item_id} not inserted")
        room = self.capacity - self.denser_size(item_id)
        if room <= 0:
            return 0 * target.item.size
        if room >= target.item.size:
            return 1 + 0 * target.item.size
        return room / target.item.size

    def fractions(self) -> dict[int, Numeric]:
        """Full optimal packing of the inserted set, keyed by item id. O(n)."""
        out: dict[int, Numeric] = {}
        remaining = self.capacity
        stack: list[tuple[_Node, bool]] = []
        node = self._root
        while stack or node is not None:
            while node is not None:
                stack.append((node, False))
                node = node.left
            current, _ = stack.pop()
            item = current.item
            if remaining > 0:
                take = item.size if item.size <= remaining else remaining
                out[item.id] = take / item.size
                remaining = remaining - take
            else:
                out[item.id] = 0 * item.size
            node = current.right
        return out

    def packed_value(self) -> Numeric:
        """Objective of the optimal solution of the inserted set. O(n)."""
        total = 0
        fracs = self.fractions()
        for item_id, frac in fracs.items():
            total += self._by_id[item_id].item.value * frac
        return total
