"""Seeded end-to-end runs: every solve is certified EFX and agrees with the
brute-force oracle on small instances."""

import pytest

from efx2.checker import Mode, brute_force_complete_efx, is_efx
from efx2.engine import SolverSettings, greedy_identical, solve
from efx2.generator import GenSpec, ValueDist, generate, sweep_specs
from efx2.model import AgentType

CHECKED = SolverSettings(assert_lemmas=True)


def test_sweep_of_generated_instances():
    for spec in sweep_specs(500, seed=0):
        inst = generate(spec)
        result = solve(inst, CHECKED)
        assert result.allocation.is_complete, spec
        assert is_efx(inst, result.allocation, Mode.RAW).ok, spec


@pytest.mark.parametrize("dist", [ValueDist.UNIFORM_RATIONAL, ValueDist.CORRELATED])
def test_other_distributions(dist):
    for seed in range(60):
        spec = GenSpec(n_alpha=2 + seed % 2, n_beta=2, m=3 + seed % 6, dist=dist, seed=seed)
        inst = generate(spec)
        result = solve(inst, CHECKED)
        assert is_efx(inst, result.allocation, Mode.RAW).ok, spec


def test_oracle_agreement_on_small_instances():
    shapes = [(1, 1), (1, 2), (2, 1), (0, 2), (0, 3), (3, 0)]
    for seed in range(200):
        n_alpha, n_beta = shapes[seed % len(shapes)]
        spec = GenSpec(n_alpha=n_alpha, n_beta=n_beta, m=1 + seed % 6, hi=5, seed=seed)
        inst = generate(spec)
        found = set(brute_force_complete_efx(inst, Mode.RAW))
        assert found, spec
        assert solve(inst, CHECKED).allocation in found, spec


def test_oracle_agreement_with_two_of_each_type():
    for seed in range(40):
        inst = generate(GenSpec(n_alpha=2, n_beta=2, m=1 + seed % 5, hi=4, seed=seed))
        found = set(brute_force_complete_efx(inst, Mode.RAW))
        assert solve(inst, CHECKED).allocation in found


def test_greedy_is_efx_for_identical_agents():
    for seed in range(1_000):
        inst = generate(GenSpec(n_alpha=1 + seed % 6, n_beta=0, m=1 + seed % 12, seed=seed))
        alloc = greedy_identical(inst.values_alpha, inst.n)
        assert alloc.is_complete
        assert is_efx(inst, alloc, Mode.SYMBOLIC).ok, seed


def test_repeat_runs_give_identical_traces():
    for spec in sweep_specs(30, seed=11):
        inst = generate(spec)
        assert solve(inst).trace == solve(inst).trace


def test_agent_order_follows_instance():
    # beta listed first is still handled: types are read per agent
    inst = generate(GenSpec(n_alpha=2, n_beta=2, m=7, seed=8))
    flipped = inst.with_types([t.other for t in inst.agent_types])
    assert flipped.agent_types[0] is AgentType.BETA
    result = solve(flipped, CHECKED)
    assert is_efx(flipped, result.allocation, Mode.RAW).ok


def test_single_agent_type_pick():
    for seed in range(200):
        n_alpha, n_beta = (1, 1 + seed % 5) if seed % 2 else (1 + seed % 5, 1)
        inst = generate(GenSpec(n_alpha=n_alpha, n_beta=n_beta, m=1 + seed % 10, seed=seed))
        result = solve(inst, CHECKED)
        assert result.cases == {"SINGLE_TYPE_PICK": 1}
        assert is_efx(inst, result.allocation, Mode.RAW).ok, seed
