"""
model.py -- Core immutable domain types.

Items and agents are 0-indexed integers. An ``ItemSet`` is a plain
``frozenset`` of item indices; ``canonical`` gives its ascending iteration
order. Instances and allocations are frozen dataclasses: nothing mutates
them, new values are built instead.

Construction never validates. ``validate`` and ``allocation_valid`` report
every violation as a list of messages so callers can decide what to do.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Sequence, Tuple

ItemSet = FrozenSet[int]

EMPTY: ItemSet = frozenset()


class AgentType(str, enum.Enum):
    """The two valuation types."""

    ALPHA = "alpha"
    BETA = "beta"

    @property
    def other(self) -> "AgentType":
        return AgentType.BETA if self is AgentType.ALPHA else AgentType.ALPHA


def canonical(items: Iterable[int]) -> Tuple[int, ...]:
    """Return items in ascending index order."""
    return tuple(sorted(items))


@dataclass(frozen=True)
class Instance:
    """m items, n typed agents, one exact value vector per type."""

    item_count: int
    agent_types: Tuple[AgentType, ...]
    values_alpha: Tuple[Fraction, ...]
    values_beta: Tuple[Fraction, ...]

    @classmethod
    def build(
        cls,
        agent_types: Sequence[AgentType | str],
        values_alpha: Sequence[int | str | Fraction],
        values_beta: Sequence[int | str | Fraction],
        item_count: int | None = None,
    ) -> "Instance":
        """Convenience constructor that coerces types and values."""
        alpha = tuple(Fraction(v) for v in values_alpha)
        beta = tuple(Fraction(v) for v in values_beta)
        m = len(alpha) if item_count is None else item_count
        return cls(
            item_count=m,
            agent_types=tuple(AgentType(t) for t in agent_types),
            values_alpha=alpha,
            values_beta=beta,
        )

    @property
    def n(self) -> int:
        return len(self.agent_types)

    @property
    def m(self) -> int:
        return self.item_count

    @property
    def agents(self) -> range:
        return range(len(self.agent_types))

    @property
    def items(self) -> ItemSet:
        return frozenset(range(self.item_count))

    def type_of(self, agent: int) -> AgentType:
        return self.agent_types[agent]

    def values_for(self, kind: AgentType) -> Tuple[Fraction, ...]:
        return self.values_alpha if kind is AgentType.ALPHA else self.values_beta

    def agents_of(self, kind: AgentType) -> List[int]:
        return [i for i, t in enumerate(self.agent_types) if t is kind]

    def with_types(self, agent_types: Sequence[AgentType]) -> "Instance":
        return Instance(self.item_count, tuple(agent_types), self.values_alpha, self.values_beta)


@dataclass(frozen=True)
class Allocation:
    """n bundles over items 0..m-1; unassigned items form the pool."""

    bundles: Tuple[ItemSet, ...]
    item_count: int

    @classmethod
    def empty(cls, n: int, m: int) -> "Allocation":
        return cls(tuple(EMPTY for _ in range(n)), m)

    @classmethod
    def of(cls, bundles: Sequence[Iterable[int]], m: int) -> "Allocation":
        return cls(tuple(frozenset(b) for b in bundles), m)

    @property
    def n(self) -> int:
        return len(self.bundles)

    @property
    def allocated(self) -> ItemSet:
        return frozenset().union(*self.bundles)

    @property
    def pool(self) -> ItemSet:
        return frozenset(range(self.item_count)) - self.allocated

    @property
    def is_complete(self) -> bool:
        return not self.pool

    def bundle(self, agent: int) -> ItemSet:
        return self.bundles[agent]

    def replace(self, changes: Mapping[int, Iterable[int]]) -> "Allocation":
        """Return a copy with the given agents' bundles swapped out."""
        bundles = list(self.bundles)
        for agent, items in changes.items():
            bundles[agent] = frozenset(items)
        return Allocation(tuple(bundles), self.item_count)

    def changed_agents(self, other: "Allocation") -> Dict[int, ItemSet]:
        """Agents whose bundle differs in ``other``, mapped to the new bundle."""
        return {
            i: new
            for i, (old, new) in enumerate(zip(self.bundles, other.bundles))
            if old != new
        }


# ------------------------------------------------------------------------------
# VALIDATION
# ------------------------------------------------------------------------------


def validate(instance: Instance) -> List[str]:
    """Return every invariant violation of ``instance``; empty means ok."""
    problems: List[str] = []
    if instance.item_count < 1:
        problems.append(f"item count must be >= 1, got {instance.item_count}")
    if instance.n < 1:
        problems.append("at least one agent is required")
    for idx, kind in enumerate(instance.agent_types):
        if not isinstance(kind, AgentType):
            problems.append(f"agent {idx} has unknown type {kind!r}")
    for kind in AgentType:
        values = instance.values_for(kind)
        if len(values) != instance.item_count:
            problems.append(
                f"value vector length mismatch: {kind.value} has {len(values)} "
                f"entries, expected {instance.item_count}"
            )
        for j, v in enumerate(values):
            if v < 0:
                problems.append(f"negative value: {kind.value}[{j}] = {v}")
    return problems


def allocation_valid(instance: Instance, alloc: Allocation) -> List[str]:
    """Check disjointness, item range and bundle count of ``alloc``."""
    problems: List[str] = []
    if alloc.n != instance.n:
        problems.append(
            f"bundle count {alloc.n} does not match agent count {instance.n}"
        )
    if alloc.item_count != instance.item_count:
        problems.append(
            f"allocation covers {alloc.item_count} items, instance has {instance.item_count}"
        )
    owner: Dict[int, int] = {}
    for agent, bundle in enumerate(alloc.bundles):
        for item in canonical(bundle):
            if not 0 <= item < instance.item_count:
                problems.append(f"item {item} out of range (agent {agent})")
                continue
            if item in owner:
                problems.append(
                    f"item {item} in two bundles (agents {owner[item]} and {agent})"
                )
            else:
                owner[item] = agent
    return problems
