"""
checker.py -- Independent verification and brute-force oracles.

Everything here is written straight from the definitions and does not import
the solver's valuation, envy or champion code. Values are compared as tuples:
(raw sum,) in RAW mode and (raw sum, sum of 2**j) in SYMBOLIC mode.
"""

from __future__ import annotations

import enum
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

from .errors import OracleTooLarge
from .model import Allocation, Instance, ItemSet

logger = logging.getLogger("efx2.checker")

DEFAULT_ORACLE_CAP = 10**7
DEFAULT_PARTIAL_CAP = 10**5


class Mode(str, enum.Enum):
    RAW = "raw"
    SYMBOLIC = "symbolic"


@dataclass(frozen=True)
class EfxWitness:
    envier: int
    envied: int
    removed: int

    def as_dict(self) -> dict:
        return {"envier": self.envier, "envied": self.envied, "removed": self.removed}


@dataclass(frozen=True)
class EfxReport:
    ok: bool
    witness: Optional[EfxWitness] = None

    def __bool__(self) -> bool:
        return self.ok


def _worth(instance: Instance, agent: int, items: Iterable[int], mode: Mode) -> tuple:
    values = instance.values_for(instance.agent_types[agent])
    items = list(items)
    total = sum((values[j] for j in items), Fraction(0))
    if mode is Mode.RAW:
        return (total,)
    return (total, sum(2**j for j in items))


def _envy_witness(
    instance: Instance, alloc: Allocation, i: int, j: int, mode: Mode
) -> Optional[int]:
    if i == j:
        return None
    own = _worth(instance, i, alloc.bundles[i], mode)
    other = alloc.bundles[j]
    for h in sorted(other):
        if _worth(instance, i, other - {h}, mode) > own:
            return h
    return None


def efx_envies(
    instance: Instance, alloc: Allocation, i: int, j: int, mode: Mode = Mode.RAW
) -> bool:
    """True iff removing some single item from j's bundle still leaves i envious."""
    return _envy_witness(instance, alloc, i, j, mode) is not None


def is_efx(instance: Instance, alloc: Allocation, mode: Mode = Mode.RAW) -> EfxReport:
    for i in range(alloc.n):
        for j in range(alloc.n):
            h = _envy_witness(instance, alloc, i, j, mode)
            if h is not None:
                return EfxReport(False, EfxWitness(i, j, h))
    return EfxReport(True)


def is_ef1(instance: Instance, alloc: Allocation, mode: Mode = Mode.RAW) -> bool:
    """Every envy is removed by dropping the envied bundle's best item."""
    for i in range(alloc.n):
        own = _worth(instance, i, alloc.bundles[i], mode)
        for j in range(alloc.n):
            other = alloc.bundles[j]
            if i == j or not _worth(instance, i, other, mode) > own:
                continue
            best = max(other, key=lambda h: _worth(instance, i, [h], mode))
            if _worth(instance, i, other - {best}, mode) > own:
                return False
    return True


def pareto_dominates(
    instance: Instance, b: Allocation, a: Allocation, mode: Mode = Mode.RAW
) -> bool:
    """Every agent weakly better off in ``b`` and at least one strictly."""
    strict = False
    for agent in range(a.n):
        before = _worth(instance, agent, a.bundles[agent], mode)
        after = _worth(instance, agent, b.bundles[agent], mode)
        if after < before:
            return False
        if after > before:
            strict = True
    return strict


def check_improvement(
    instance: Instance,
    before: Allocation,
    after: Allocation,
    g: Optional[int] = None,
) -> List[str]:
    """Return the failed clauses of one improvement step; empty means ok."""
    problems: List[str] = []
    report = is_efx(instance, after, Mode.SYMBOLIC)
    if not report.ok:
        w = report.witness
        problems.append(
            f"not EFX: agent {w.envier} EFX-envies agent {w.envied} (remove item {w.removed})"
        )
    if not pareto_dominates(instance, after, before, Mode.SYMBOLIC):
        problems.append("not Pareto dominating")
    allowed = before.allocated | ({g} if g is not None else frozenset())
    extra = after.allocated - allowed
    if extra:
        problems.append(
            f"allocated items {sorted(extra)} were neither allocated before nor the inserted item"
        )
    owners = [i for bundle in after.bundles for i in bundle]
    if len(owners) != len(set(owners)):
        problems.append("bundles overlap")
    return problems


# ------------------------------------------------------------------------------
# ORACLES
# ------------------------------------------------------------------------------


def assignment_count(n: int, m: int, include_partial: bool = False) -> int:
    return (n + 1 if include_partial else n) ** m


def enumerate_allocations(
    n: int, m: int, include_partial: bool = False
) -> Iterable[Allocation]:
    """All assignments of items to agents in lexicographic assignment order.

    With ``include_partial`` destination n means "left in the pool".
    """
    destinations = range(n + 1 if include_partial else n)
    for assignment in itertools.product(destinations, repeat=m):
        bundles: List[set] = [set() for _ in range(n)]
        for item, owner in enumerate(assignment):
            if owner < n:
                bundles[owner].add(item)
        yield Allocation(tuple(frozenset(b) for b in bundles), m)


def brute_force_complete_efx(
    instance: Instance,
    mode: Mode = Mode.RAW,
    first_only: bool = False,
    cap: int = DEFAULT_ORACLE_CAP,
    include_partial: bool = False,
    partial_cap: int = DEFAULT_PARTIAL_CAP,
) -> List[Allocation]:
    """Enumerate every (complete, or with the flag also partial) EFX allocation."""
    size = assignment_count(instance.n, instance.m, include_partial)
    limit = min(cap, partial_cap) if include_partial else cap
    if size > limit:
        raise OracleTooLarge(size, limit)
    logger.debug("oracle enumerating %d assignments", size)
    found: List[Allocation] = []
    for alloc in enumerate_allocations(instance.n, instance.m, include_partial):
        if is_efx(instance, alloc, mode).ok:
            found.append(alloc)
            if first_only:
                break
    return found


def brute_force_min_preferred_set(
    instance: Instance, alloc: Allocation, i: int, s: ItemSet
) -> Optional[Tuple[ItemSet, int]]:
    """Exhaustive by-cardinality search for the smallest subset of ``s`` that
    agent ``i`` strictly prefers (symbolically) to its own bundle.

    Among the beating subsets of minimum size the most valuable is returned.
    """
    own = _worth(instance, i, alloc.bundles[i], Mode.SYMBOLIC)
    ordered = sorted(s)
    for k in range(len(ordered) + 1):
        beating = [
            frozenset(c)
            for c in itertools.combinations(ordered, k)
            if _worth(instance, i, c, Mode.SYMBOLIC) > own
        ]
        if beating:
            best = max(beating, key=lambda c: _worth(instance, i, c, Mode.SYMBOLIC))
            return best, k
    return None
