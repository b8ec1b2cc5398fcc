from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from efx2.model import AgentType, Allocation, Instance
from efx2.valuation import (
    SymbolicValue,
    envies,
    envies_after_any_removal,
    least_item,
    prefers,
    raw_value,
    sym_value,
)

ALPHA = AgentType.ALPHA


def test_raw_value_is_exact_additive_sum():
    inst = Instance.build(["alpha", "beta"], [10, 7, 2, 1], ["1/2", "1/3", 0, 0])
    assert raw_value(inst, ALPHA, {0, 2}) == 12
    assert raw_value(inst, ALPHA, set()) == 0
    assert raw_value(inst, AgentType.BETA, {0, 1}) == Fraction(5, 6)


def test_symbolic_breaks_raw_ties():
    inst = Instance.build(["alpha"], [1, 1, 2], [0, 0, 0])
    assert sym_value(inst, ALPHA, {0, 1}) == SymbolicValue(Fraction(2), 3)
    # raw tie 2 == 2, item 2 has the larger code
    assert prefers(inst, ALPHA, {2}, {0, 1})
    assert not prefers(inst, ALPHA, {0, 1}, {2})
    assert least_item(inst, ALPHA, frozenset({0, 1})) == 0


def test_zero_items_still_order():
    inst = Instance.build(["alpha"], [0, 0], [0, 0])
    assert prefers(inst, ALPHA, {1}, {0})
    assert prefers(inst, ALPHA, {0}, set())


def test_envy_relations():
    inst = Instance.build(["alpha", "alpha"], [1, 5, 1], [0, 0, 0])
    alloc = Allocation.of([{0}, {1, 2}], 3)
    assert envies(inst, alloc, 0, 1)
    assert not envies(inst, alloc, 1, 0)
    assert not envies(inst, alloc, 0, 0)
    # dropping item 2 from {1, 2} still beats {0}
    assert envies_after_any_removal(inst, ALPHA, alloc.bundles[0], alloc.bundles[1])
    assert not envies_after_any_removal(inst, ALPHA, alloc.bundles[1], alloc.bundles[0])
    assert not envies_after_any_removal(inst, ALPHA, frozenset(), frozenset())


@settings(max_examples=200, deadline=None)
@given(
    values=st.lists(st.integers(0, 6), min_size=1, max_size=7),
    data=st.data(),
)
def test_symbolic_order_matches_small_perturbation(values, data):
    m = len(values)
    inst = Instance.build(["alpha"], values, [0] * m)
    s = data.draw(st.frozensets(st.integers(0, m - 1)))
    t = data.draw(st.frozensets(st.integers(0, m - 1)))
    # with integer values every raw gap is at least 1 and the perturbation
    # moves a bundle by less than 1/2
    eps = Fraction(1, 2 ** (m + 1))

    def perturbed(items):
        return sum((Fraction(values[j]) + eps * 2**j for j in items), Fraction(0))

    if s != t:
        assert (sym_value(inst, ALPHA, s) > sym_value(inst, ALPHA, t)) == (perturbed(s) > perturbed(t))
    else:
        assert sym_value(inst, ALPHA, s) == sym_value(inst, ALPHA, t)


def test_symbolic_order_is_total_over_many_pairs():
    rng = np.random.default_rng(2024)
    for _ in range(10_000):
        m = int(rng.integers(1, 9))
        values = [int(v) for v in rng.integers(0, 4, size=m)]
        inst = Instance.build(["alpha", "beta"], values, values[::-1])
        kind = ALPHA if rng.random() < 0.5 else AgentType.BETA
        s = frozenset(int(j) for j in np.flatnonzero(rng.random(m) < 0.5))
        t = frozenset(int(j) for j in np.flatnonzero(rng.random(m) < 0.5))
        if s == t:
            continue
        sv, tv = sym_value(inst, kind, s), sym_value(inst, kind, t)
        assert (sv > tv) != (tv > sv)
        if sv.base != tv.base:
            assert (sv > tv) == (sv.base > tv.base)
        if s < t:
            assert tv > sv
