"""
champion.py -- Minimum preferred sets, kappa values and champions.

For additive values the most valuable k-subset of S is its top-k items, so a
beating k-subset exists iff the top-k items beat the agent's bundle. Symbolic
singleton values are pairwise distinct, which makes the top-k witness unique.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Optional, Tuple

from .errors import PreconditionError
from .model import Allocation, Instance, ItemSet
from .valuation import ZERO, item_value, own_value, sym_value


@dataclass(frozen=True, order=True)
class Kappa:
    """Size of a minimum preferred set, or the explicit infinite variant."""

    infinite: bool
    size: int = 0

    @classmethod
    def finite(cls, size: int) -> "Kappa":
        return cls(False, size)

    def __str__(self) -> str:
        return "inf" if self.infinite else str(self.size)


INFINITE = Kappa(True)


@dataclass(frozen=True)
class PreferredSet:
    items: ItemSet
    kappa: int


def min_preferred_set(
    instance: Instance, alloc: Allocation, i: int, s: ItemSet
) -> Optional[PreferredSet]:
    """Smallest subset of ``s`` that agent ``i`` strictly prefers to its bundle."""
    kind = instance.type_of(i)
    own = own_value(instance, alloc, i)
    if not sym_value(instance, kind, s) > own:
        return None
    ranked = sorted(s, key=lambda j: item_value(instance, kind, j), reverse=True)
    total = ZERO
    for k, item in enumerate(ranked, start=1):
        total = total + item_value(instance, kind, item)
        if total > own:
            return PreferredSet(frozenset(ranked[:k]), k)
    # unreachable: the full set beats own
    raise AssertionError("top-k scan exhausted a beating set")


def kappa(instance: Instance, alloc: Allocation, i: int, s: ItemSet) -> Kappa:
    preferred = min_preferred_set(instance, alloc, i, s)
    return INFINITE if preferred is None else Kappa.finite(preferred.kappa)


def most_envious(
    instance: Instance, alloc: Allocation, s: ItemSet
) -> Tuple[Kappa, FrozenSet[int]]:
    """Global kappa of ``s`` and the agents attaining it."""
    kappas = {i: kappa(instance, alloc, i, s) for i in instance.agents}
    best = min(kappas.values(), default=INFINITE)
    if best.infinite:
        return INFINITE, frozenset()
    return best, frozenset(i for i, k in kappas.items() if k == best)


def champions_of(
    instance: Instance, alloc: Allocation, j: int, g: int
) -> Tuple[Kappa, FrozenSet[int]]:
    """Most envious agents for agent ``j``'s bundle plus the pooled item ``g``."""
    if g not in alloc.pool:
        raise PreconditionError(f"item {g} is already allocated")
    return most_envious(instance, alloc, alloc.bundles[j] | {g})
