"""
valuation.py -- Exact additive valuations and the symbolic tie-break order.

Every item j carries a second coordinate 2**j. A bundle's symbolic value is
the pair (sum of raw values, sum of 2**j), compared lexicographically. This is
the exact limit of perturbing each item by epsilon * 2**j: raw comparisons
are preserved, and two different item sets never compare equal because their
tie-break codes are different binary numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .model import AgentType, Allocation, Instance, ItemSet


@dataclass(frozen=True, order=True)
class SymbolicValue:
    """(base, tiebreak) compared lexicographically."""

    base: Fraction
    tiebreak: int

    def __add__(self, other: "SymbolicValue") -> "SymbolicValue":
        return SymbolicValue(self.base + other.base, self.tiebreak + other.tiebreak)

    def __sub__(self, other: "SymbolicValue") -> "SymbolicValue":
        return SymbolicValue(self.base - other.base, self.tiebreak - other.tiebreak)


ZERO = SymbolicValue(Fraction(0), 0)


def raw_value(instance: Instance, kind: AgentType, items: Iterable[int]) -> Fraction:
    values = instance.values_for(kind)
    return sum((values[j] for j in items), Fraction(0))


def item_value(instance: Instance, kind: AgentType, item: int) -> SymbolicValue:
    return SymbolicValue(instance.values_for(kind)[item], 1 << item)


def sym_value(instance: Instance, kind: AgentType, items: Iterable[int]) -> SymbolicValue:
    items = tuple(items)
    return SymbolicValue(raw_value(instance, kind, items), sum(1 << j for j in items))


def own_value(instance: Instance, alloc: Allocation, agent: int) -> SymbolicValue:
    """Symbolic value of ``agent``'s bundle under its own type."""
    return sym_value(instance, instance.type_of(agent), alloc.bundles[agent])


def prefers(instance: Instance, kind: AgentType, s: ItemSet, t: ItemSet) -> bool:
    """True iff ``kind`` strictly prefers s to t."""
    return sym_value(instance, kind, s) > sym_value(instance, kind, t)


def envies(instance: Instance, alloc: Allocation, i: int, j: int) -> bool:
    if i == j:
        return False
    return prefers(instance, instance.type_of(i), alloc.bundles[j], alloc.bundles[i])


def least_item(instance: Instance, kind: AgentType, items: ItemSet) -> int:
    return min(items, key=lambda j: item_value(instance, kind, j))


def envies_after_any_removal(
    instance: Instance, kind: AgentType, own: ItemSet, other: ItemSet
) -> bool:
    """True iff ``other`` minus some item still beats ``own`` for ``kind``.

    With additive values it suffices to drop the least valuable item.
    """
    if not other:
        return False
    rest = other - {least_item(instance, kind, other)}
    return prefers(instance, kind, rest, own)
