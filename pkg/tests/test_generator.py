from fractions import Fraction

import pytest

from efx2.errors import FormatError, ValidationError
from efx2.generator import GenSpec, ValueDist, check_spec, generate, sweep_specs
from efx2.model import AgentType, validate


def test_same_seed_same_instance():
    spec = GenSpec(n_alpha=2, n_beta=3, m=6, seed=42)
    assert generate(spec) == generate(spec)
    assert generate(spec) != generate(GenSpec(n_alpha=2, n_beta=3, m=6, seed=43))


def test_layout_and_ranges():
    inst = generate(GenSpec(n_alpha=2, n_beta=1, m=9, lo=2, hi=4, seed=1))
    assert inst.agent_types == (AgentType.ALPHA, AgentType.ALPHA, AgentType.BETA)
    assert validate(inst) == []
    for v in inst.values_alpha + inst.values_beta:
        assert v.denominator == 1 and 2 <= v <= 4


def test_rational_values():
    inst = generate(GenSpec(m=20, dist=ValueDist.UNIFORM_RATIONAL, lo=0, hi=3, den_max=4, seed=5))
    for v in inst.values_alpha + inst.values_beta:
        assert 0 <= v <= 3
        assert v.denominator <= 4


def test_correlated_extremes():
    same = generate(GenSpec(m=10, dist=ValueDist.CORRELATED, rho=Fraction(1), seed=3))
    assert same.values_alpha == same.values_beta
    mixed = generate(GenSpec(m=10, dist=ValueDist.CORRELATED, rho=Fraction(1, 3), seed=3))
    assert all(0 <= v <= 10 for v in mixed.values_beta)


def test_from_dict_accepts_integral_floats():
    assert GenSpec.from_dict({"m": 6.0, "hi": "7"}).m == 6


def test_from_dict_and_back():
    spec = GenSpec.from_dict({"n_alpha": "1", "dist": "correlated", "rho": "0.25", "seed": 9})
    assert spec.n_alpha == 1
    assert spec.rho == Fraction(1, 4)
    assert spec.to_dict()["rho"] == "1/4"
    assert GenSpec.from_dict(spec.to_dict()) == spec


@pytest.mark.parametrize(
    "payload",
    [
        {"colour": "red"},
        {"dist": "gaussian"},
        {"rho": "1/0"},
        {"m": "many"},
        {"m": 6.7},
        {"seed": 1.5},
        {"n_alpha": True},
        {"hi": float("inf")},
    ],
)
def test_from_dict_rejects(payload):
    with pytest.raises(FormatError):
        GenSpec.from_dict(payload)


@pytest.mark.parametrize(
    "spec",
    [
        GenSpec(n_alpha=0, n_beta=0),
        GenSpec(m=0),
        GenSpec(lo=5, hi=2),
        GenSpec(den_max=0),
        GenSpec(rho=Fraction(3, 2)),
    ],
)
def test_invalid_specs(spec):
    assert check_spec(spec)
    with pytest.raises(ValidationError):
        generate(spec)


def test_sweep_specs_are_deterministic():
    first = list(sweep_specs(20, seed=4))
    assert first == list(sweep_specs(20, seed=4))
    assert len({s.seed for s in first}) == 20
    assert all(1 <= s.m <= 10 for s in first)
