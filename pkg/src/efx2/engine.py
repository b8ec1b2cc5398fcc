"""
engine.py -- Pareto-improvement engine for two-type EFX allocations.

Architecture
------------
``solve`` starts from the empty allocation, which is trivially EFX, and
repeatedly feeds the lowest pooled item ``g`` into ``improvement_step``. Each
step returns an EFX allocation that Pareto dominates its input, so the
potential (sum of own-bundle symbolic values) strictly rises and the loop
ends once the pool is empty.

``improvement_step`` dispatches in a fixed order and exactly one case fires:

    (a) FREE_INSERTION       some agent can take g without being EFX-envied
    (b) CYCLE_ELIMINATION    rotate bundles along envy cycles (g stays pooled)
    (c) SELF_CHAMPION        an agent is most envious of its own bundle plus g
    (d) SINGLE_SOURCE_PATH   shift bundles along a path from the unique source
    (e) TWO_SOURCE_EXCHANGE  swap preferred sets between the two type minima,
                             then trim against the second-poorest agents

Instances where a type has at most one agent never reach the loop: they are
solved by the identical-valuation greedy, optionally followed by the lone
agent picking its favourite bundle.

All comparisons use the symbolic order from ``valuation``; the final result
is certified in RAW mode by the independent ``checker``.
"""

from __future__ import annotations

import collections
import enum
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from . import checker
from .champion import champions_of, min_preferred_set
from .codec import render_rational
from .core import log_event
from .envy import EnvyGraph, build_envy_graph, find_dicycle, rotate_until_acyclic, sources
from .errors import InvariantViolation, PreconditionError, StepLimitExceeded, ValidationError
from .model import AgentType, Allocation, Instance, ItemSet, canonical, validate
from .valuation import (
    ZERO,
    SymbolicValue,
    envies_after_any_removal,
    own_value,
    prefers,
    sym_value,
)

logger = logging.getLogger("efx2.engine")


class StepCase(str, enum.Enum):
    FREE_INSERTION = "FREE_INSERTION"
    CYCLE_ELIMINATION = "CYCLE_ELIMINATION"
    SELF_CHAMPION = "SELF_CHAMPION"
    SINGLE_SOURCE_PATH = "SINGLE_SOURCE_PATH"
    TWO_SOURCE_EXCHANGE = "TWO_SOURCE_EXCHANGE"


class BaseCase(str, enum.Enum):
    IDENTICAL_GREEDY = "IDENTICAL_GREEDY"
    SINGLE_TYPE_PICK = "SINGLE_TYPE_PICK"


@dataclass(frozen=True)
class SolverSettings:
    max_steps: int = 1_000_000
    assert_lemmas: bool = __debug__
    certify_raw: bool = True

    @classmethod
    def from_config(cls, config: Dict[str, Any], **overrides: Any) -> "SolverSettings":
        solver_cfg = dict(config.get("solver", {}))
        solver_cfg.update({k: v for k, v in overrides.items() if v is not None})
        assert_lemmas = solver_cfg.get("assert_lemmas")
        return cls(
            max_steps=int(solver_cfg.get("max_steps", cls.max_steps)),
            assert_lemmas=__debug__ if assert_lemmas is None else bool(assert_lemmas),
            certify_raw=bool(solver_cfg.get("certify_raw", True)),
        )


@dataclass(frozen=True)
class StepOutcome:
    allocation: Allocation
    case: StepCase
    trace: Dict[str, Any] = field(default_factory=dict)


@dataclass
class SolveResult:
    allocation: Allocation
    trace: List[Dict[str, Any]]
    steps: int
    cases: Dict[str, int]


def potential(instance: Instance, alloc: Allocation) -> SymbolicValue:
    total = ZERO
    for agent in instance.agents:
        total = total + own_value(instance, alloc, agent)
    return total


def _efx_envier(instance: Instance, alloc: Allocation, target: int) -> Optional[int]:
    """Lowest agent that EFX-envies ``target``, if any."""
    for k in instance.agents:
        if k != target and envies_after_any_removal(
            instance, instance.type_of(k), alloc.bundles[k], alloc.bundles[target]
        ):
            return k
    return None


def _require_pooled(alloc: Allocation, g: int) -> None:
    if g not in alloc.pool:
        raise PreconditionError(f"item {g} is not in the pool")


# ------------------------------------------------------------------------------
# THE FIVE CASES
# ------------------------------------------------------------------------------


def try_free_insertion(
    instance: Instance, alloc: Allocation, g: int
) -> Optional[StepOutcome]:
    _require_pooled(alloc, g)
    for i in instance.agents:
        candidate = alloc.replace({i: alloc.bundles[i] | {g}})
        if _efx_envier(instance, candidate, i) is None:
            return StepOutcome(candidate, StepCase.FREE_INSERTION, {"agent": i})
    return None


def resolve_self_champion(
    instance: Instance, alloc: Allocation, g: int
) -> Optional[StepOutcome]:
    for i in instance.agents:
        _, champions = champions_of(instance, alloc, i, g)
        if i not in champions:
            continue
        preferred = min_preferred_set(instance, alloc, i, alloc.bundles[i] | {g})
        return StepOutcome(
            alloc.replace({i: preferred.items}),
            StepCase.SELF_CHAMPION,
            {"agent": i, "kappa": preferred.kappa, "preferred": list(canonical(preferred.items))},
        )
    return None


def path_shift(
    instance: Instance,
    alloc: Allocation,
    g: int,
    j: int,
    graph: Optional[EnvyGraph] = None,
) -> StepOutcome:
    """Move bundles one hop back along a path from ``j`` to its champion."""
    graph = graph or build_envy_graph(instance, alloc)
    _, champions = champions_of(instance, alloc, j, g)
    if not champions:
        raise InvariantViolation(f"agent {j} has no champion for item {g}")
    i = min(champions)
    path = graph.path(j, i)
    if path is None:
        raise InvariantViolation(
            f"champion {i} is not reachable from source {j}; edges={graph.edges}"
        )
    preferred = min_preferred_set(instance, alloc, i, alloc.bundles[j] | {g})
    changes: Dict[int, ItemSet] = {
        path[pos]: alloc.bundles[path[pos + 1]] for pos in range(len(path) - 1)
    }
    changes[i] = preferred.items
    return StepOutcome(
        alloc.replace(changes),
        StepCase.SINGLE_SOURCE_PATH,
        {
            "source": j,
            "champion": i,
            "kappa": preferred.kappa,
            "path": path,
            "preferred": list(canonical(preferred.items)),
        },
    )


def _ranked(instance: Instance, alloc: Allocation, kind: AgentType) -> List[int]:
    """Agents of ``kind`` from poorest to richest under their own valuation."""
    return sorted(instance.agents_of(kind), key=lambda a: own_value(instance, alloc, a))


def trim_for_rival(
    instance: Instance, alloc: Allocation, owner: int, rival: int
) -> ItemSet:
    """Shrink ``owner``'s bundle to the rival's minimum preferred set if the
    rival EFX-envies it; otherwise keep it as is."""
    bundle = alloc.bundles[owner]
    if not envies_after_any_removal(
        instance, instance.type_of(rival), alloc.bundles[rival], bundle
    ):
        return bundle
    return min_preferred_set(instance, alloc, rival, bundle).items


def _lemma(ok: bool, message: str) -> None:
    if not ok:
        raise InvariantViolation(message)


def two_source_exchange(
    instance: Instance, alloc: Allocation, g: int, assert_lemmas: bool = True
) -> StepOutcome:
    _require_pooled(alloc, g)
    alphas = _ranked(instance, alloc, AgentType.ALPHA)
    betas = _ranked(instance, alloc, AgentType.BETA)
    if len(alphas) < 2 or len(betas) < 2:
        raise PreconditionError("two-source exchange needs two agents of each type")
    empty = [i for i in instance.agents if not alloc.bundles[i]]
    if empty:
        raise InvariantViolation(f"agents {empty} hold empty bundles at the exchange step")

    a0, a1 = alphas[0], alphas[1]
    b0, b1 = betas[0], betas[1]
    xa, xb = alloc.bundles[a0], alloc.bundles[b0]
    ALPHA, BETA = AgentType.ALPHA, AgentType.BETA

    if assert_lemmas:
        found = sources(build_envy_graph(instance, alloc))
        _lemma(found == {a0, b0}, f"sources {sorted(found)} are not the type minima {a0}, {b0}")
        _lemma(
            prefers(instance, ALPHA, xa, xb) and prefers(instance, BETA, xb, xa),
            "type minima envy each other",
        )
        _lemma(
            a0 in champions_of(instance, alloc, b0, g)[1]
            and b0 in champions_of(instance, alloc, a0, g)[1],
            "type minima do not champion each other",
        )

    pref_a = min_preferred_set(instance, alloc, a0, xb | {g})
    pref_b = min_preferred_set(instance, alloc, b0, xa | {g})
    if pref_a is None or pref_b is None:
        raise InvariantViolation("missing preferred set between the type minima")
    if g not in pref_a.items or g not in pref_b.items:
        raise InvariantViolation(f"item {g} missing from an exchanged preferred set")

    new_a = (xa | pref_a.items) - pref_b.items
    new_b = (xb | pref_b.items) - pref_a.items
    exchanged = alloc.replace({a0: new_a, b0: new_b})

    if assert_lemmas:
        va = [sym_value(instance, ALPHA, s) for s in (new_a, xa, xb, new_b)]
        vb = [sym_value(instance, BETA, s) for s in (new_b, xb, xa, new_a)]
        _lemma(va[0] > va[1] > va[2] > va[3], f"alpha chain broken after exchange: {va}")
        _lemma(vb[0] > vb[1] > vb[2] > vb[3], f"beta chain broken after exchange: {vb}")

    trimmed_a = trim_for_rival(instance, exchanged, a0, a1)
    trimmed_b = trim_for_rival(instance, exchanged, b0, b1)
    result = exchanged.replace({a0: trimmed_a, b0: trimmed_b})

    if assert_lemmas:
        for src, dst in ((a1, a0), (b1, b0), (a1, b0), (b1, a0), (a0, b0), (b0, a0)):
            _lemma(
                not checker.efx_envies(instance, result, src, dst, checker.Mode.SYMBOLIC),
                f"agent {src} EFX-envies agent {dst} after trimming",
            )
        problems = checker.check_improvement(instance, alloc, result, g)
        _lemma(not problems, f"exchange is not an improvement: {problems}")

    return StepOutcome(
        result,
        StepCase.TWO_SOURCE_EXCHANGE,
        {
            "alpha0": a0,
            "alpha1": a1,
            "beta0": b0,
            "beta1": b1,
            "preferred_alpha": list(canonical(pref_a.items)),
            "preferred_beta": list(canonical(pref_b.items)),
            "trimmed_alpha": trimmed_a != new_a,
            "trimmed_beta": trimmed_b != new_b,
        },
    )


# ------------------------------------------------------------------------------
# ONE STEP AND THE OUTER LOOP
# ------------------------------------------------------------------------------


def improvement_step(
    instance: Instance,
    alloc: Allocation,
    g: int,
    settings: Optional[SolverSettings] = None,
) -> StepOutcome:
    settings = settings or SolverSettings()
    _require_pooled(alloc, g)

    outcome = try_free_insertion(instance, alloc, g)
    if outcome is None:
        graph = build_envy_graph(instance, alloc)
        if find_dicycle(graph) is not None:
            rotated, cycles = rotate_until_acyclic(instance, alloc)
            outcome = StepOutcome(
                rotated,
                StepCase.CYCLE_ELIMINATION,
                {"rotations": [{"case": "cycle", "cycle": c} for c in cycles]},
            )
        else:
            outcome = resolve_self_champion(instance, alloc, g)
            if outcome is None:
                found = sources(graph)
                if len(found) == 1:
                    outcome = path_shift(instance, alloc, g, next(iter(found)), graph)
                else:
                    outcome = two_source_exchange(
                        instance, alloc, g, assert_lemmas=settings.assert_lemmas
                    )

    if settings.assert_lemmas:
        _certify_step(instance, alloc, outcome, g)
    return outcome


def _certify_step(instance: Instance, before: Allocation, outcome: StepOutcome, g: int) -> None:
    inserted = None if outcome.case is StepCase.CYCLE_ELIMINATION else g
    problems = checker.check_improvement(instance, before, outcome.allocation, inserted)
    if not potential(instance, outcome.allocation) > potential(instance, before):
        problems.append("potential did not increase")
    if problems:
        raise InvariantViolation(f"{outcome.case.value} step failed: {'; '.join(problems)}")


def greedy_identical(values: Sequence[Fraction | int], n: int) -> Allocation:
    """Hand items, most valuable first, to the currently poorest bundle."""
    values = [Fraction(v) for v in values]
    m = len(values)
    order = sorted(range(m), key=lambda j: (values[j], j), reverse=True)
    bundles: List[set] = [set() for _ in range(n)]
    totals = [ZERO] * n
    for j in order:
        poorest = min(range(n), key=lambda k: totals[k])
        bundles[poorest].add(j)
        totals[poorest] = totals[poorest] + SymbolicValue(values[j], 1 << j)
    return Allocation(tuple(frozenset(b) for b in bundles), m)


def _certified_identical(instance: Instance, kind: AgentType) -> Allocation:
    alloc = greedy_identical(instance.values_for(kind), instance.n)
    uniform = instance.with_types([kind] * instance.n)
    if checker.is_efx(uniform, alloc, checker.Mode.SYMBOLIC).ok:
        return alloc
    logger.warning("greedy allocation failed EFX certification; falling back to oracle")
    fallback = checker.brute_force_complete_efx(
        uniform, checker.Mode.SYMBOLIC, first_only=True
    )
    if not fallback:
        raise InvariantViolation("no EFX allocation found for identical valuations")
    return fallback[0]


def _base_case(instance: Instance) -> tuple[Allocation, BaseCase, Dict[str, Any]]:
    alphas = instance.agents_of(AgentType.ALPHA)
    betas = instance.agents_of(AgentType.BETA)
    if not alphas or not betas:
        kind = AgentType.ALPHA if alphas else AgentType.BETA
        return _certified_identical(instance, kind), BaseCase.IDENTICAL_GREEDY, {"type": kind.value}

    picker = alphas[0] if len(alphas) == 1 else betas[0]
    majority = instance.type_of(picker).other
    identical = _certified_identical(instance, majority)
    picker_kind = instance.type_of(picker)
    best = max(
        range(instance.n),
        key=lambda b: sym_value(instance, picker_kind, identical.bundles[b]),
    )
    rest = [b for b in range(instance.n) if b != best]
    others = [a for a in instance.agents if a != picker]
    bundles = {picker: identical.bundles[best]}
    bundles.update({agent: identical.bundles[b] for agent, b in zip(others, rest)})
    alloc = Allocation(tuple(bundles[a] for a in instance.agents), instance.m)
    return alloc, BaseCase.SINGLE_TYPE_PICK, {"picker": picker, "bundle": best, "type": majority.value}


def _record(
    step: int,
    case: str,
    g: Optional[int],
    instance: Instance,
    before: Allocation,
    after: Allocation,
    detail: Dict[str, Any],
) -> Dict[str, Any]:
    phi = potential(instance, after)
    return {
        "step": step,
        "case": case,
        "g": g,
        "changed_bundles": {
            str(agent): list(canonical(items))
            for agent, items in before.changed_agents(after).items()
        },
        "pool": list(canonical(after.pool)),
        "potential": {"base": render_rational(phi.base), "tiebreak": phi.tiebreak},
        "detail": detail,
    }


def solve(instance: Instance, settings: Optional[SolverSettings] = None) -> SolveResult:
    """Compute a complete EFX allocation together with its run trace."""
    problems = validate(instance)
    if problems:
        raise ValidationError(problems)
    settings = settings or SolverSettings()
    trace: List[Dict[str, Any]] = []
    cases: collections.Counter = collections.Counter()
    empty = Allocation.empty(instance.n, instance.m)

    n_alpha = len(instance.agents_of(AgentType.ALPHA))
    n_beta = instance.n - n_alpha
    if min(n_alpha, n_beta) <= 1:
        if settings.max_steps < 1:
            raise StepLimitExceeded(settings.max_steps, trace)
        alloc, label, detail = _base_case(instance)
        trace.append(_record(0, label.value, None, instance, empty, alloc, detail))
        cases[label.value] += 1
        steps = 1
    else:
        alloc = empty
        steps = 0
        while alloc.pool:
            if steps >= settings.max_steps:
                raise StepLimitExceeded(settings.max_steps, trace)
            g = min(alloc.pool)
            try:
                outcome = improvement_step(instance, alloc, g, settings)
            except InvariantViolation as exc:
                exc.trace = trace
                raise
            record = _record(steps, outcome.case.value, g, instance, alloc, outcome.allocation, outcome.trace)
            logger.debug("step %d %s g=%d potential=%s", steps, outcome.case.value, g, record["potential"])
            trace.append(record)
            cases[outcome.case.value] += 1
            alloc = outcome.allocation
            steps += 1

    if settings.certify_raw:
        report = checker.is_efx(instance, alloc, checker.Mode.RAW)
        if not report.ok or not alloc.is_complete:
            raise InvariantViolation(
                f"final allocation failed certification: {report.witness}", trace
            )

    log_event("solve_finished", n=instance.n, m=instance.m, steps=steps, cases=dict(cases))
    return SolveResult(alloc, trace, steps, dict(cases))
