"""Seeded random instance generation for tests and experiments."""

from __future__ import annotations

import enum
import logging
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Any, Dict, List, Mapping

import numpy as np

from .codec import render_rational
from .errors import FormatError, ValidationError
from .model import AgentType, Instance

logger = logging.getLogger("efx2.generator")

_SEED_MASK = (1 << 64) - 1


class ValueDist(str, enum.Enum):
    UNIFORM_INT = "uniform_int"
    UNIFORM_RATIONAL = "uniform_rational"
    CORRELATED = "correlated"


def _integral(key: str, value: Any) -> int:
    if isinstance(value, bool):
        raise FormatError(f"{key} must be an integer, got {value!r}")
    number = int(value)
    if isinstance(value, float) and value != number:
        raise FormatError(f"{key} must be an integer, got {value!r}")
    return number


@dataclass(frozen=True)
class GenSpec:
    n_alpha: int = 2
    n_beta: int = 2
    m: int = 8
    dist: ValueDist = ValueDist.UNIFORM_INT
    lo: int = 0
    hi: int = 10
    den_max: int = 6
    rho: Fraction = Fraction(1, 2)
    seed: int = 0

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "GenSpec":
        """Build a spec from JSON or config; unknown keys are rejected."""
        unknown = set(payload) - set(cls.__dataclass_fields__)
        if unknown:
            raise FormatError(f"unknown generator keys: {sorted(unknown)}")
        fields: Dict[str, Any] = dict(payload)
        try:
            if "dist" in fields:
                fields["dist"] = ValueDist(fields["dist"])
            if "rho" in fields:
                rho = fields["rho"]
                fields["rho"] = rho if isinstance(rho, Fraction) else Fraction(str(rho))
            for key in ("n_alpha", "n_beta", "m", "lo", "hi", "den_max", "seed"):
                if key in fields:
                    fields[key] = _integral(key, fields[key])
        except (TypeError, ValueError, OverflowError, ZeroDivisionError) as exc:
            raise FormatError(f"bad generator spec: {exc}") from None
        return cls(**fields)

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["dist"] = self.dist.value
        out["rho"] = render_rational(self.rho)
        return out


def check_spec(spec: GenSpec) -> List[str]:
    problems = []
    if spec.n_alpha < 0 or spec.n_beta < 0:
        problems.append("agent counts must be nonnegative")
    if spec.n_alpha + spec.n_beta < 1:
        problems.append("at least one agent is required")
    if spec.m < 1:
        problems.append("m must be >= 1")
    if spec.lo < 0 or spec.hi < spec.lo:
        problems.append(f"value range [{spec.lo}, {spec.hi}] must satisfy 0 <= lo <= hi")
    if spec.den_max < 1:
        problems.append("den_max must be >= 1")
    if not 0 <= spec.rho <= 1:
        problems.append("rho must lie in [0, 1]")
    return problems


def _ints(rng: np.random.Generator, lo: int, hi: int, m: int) -> List[Fraction]:
    return [Fraction(int(v)) for v in rng.integers(lo, hi, size=m, endpoint=True)]


def _rationals(rng: np.random.Generator, lo: int, hi: int, den_max: int, m: int) -> List[Fraction]:
    values = []
    for _ in range(m):
        den = int(rng.integers(1, den_max, endpoint=True))
        num = int(rng.integers(lo * den, hi * den, endpoint=True))
        values.append(Fraction(num, den))
    return values


def generate(spec: GenSpec) -> Instance:
    problems = check_spec(spec)
    if problems:
        raise ValidationError(problems)
    rng = np.random.default_rng(spec.seed & _SEED_MASK)
    if spec.dist is ValueDist.UNIFORM_INT:
        alpha = _ints(rng, spec.lo, spec.hi, spec.m)
        beta = _ints(rng, spec.lo, spec.hi, spec.m)
    elif spec.dist is ValueDist.UNIFORM_RATIONAL:
        alpha = _rationals(rng, spec.lo, spec.hi, spec.den_max, spec.m)
        beta = _rationals(rng, spec.lo, spec.hi, spec.den_max, spec.m)
    else:
        alpha = _ints(rng, spec.lo, spec.hi, spec.m)
        noise = _ints(rng, spec.lo, spec.hi, spec.m)
        beta = [spec.rho * a + (1 - spec.rho) * z for a, z in zip(alpha, noise)]
    logger.debug("generated instance from %s", spec)
    return Instance(
        item_count=spec.m,
        agent_types=(AgentType.ALPHA,) * spec.n_alpha + (AgentType.BETA,) * spec.n_beta,
        values_alpha=tuple(alpha),
        values_beta=tuple(beta),
    )


# shapes (n_alpha, n_beta) cycled through by sweeps; covers both base cases
# and the general loop
SWEEP_SHAPES = ((0, 3), (0, 5), (1, 2), (1, 4), (2, 2), (2, 3), (3, 3))


def sweep_specs(count: int, seed: int = 0, max_m: int = 10):
    """Deterministic stream of integer-valued specs for batch runs."""
    for idx in range(count):
        n_alpha, n_beta = SWEEP_SHAPES[idx % len(SWEEP_SHAPES)]
        yield GenSpec(
            n_alpha=n_alpha,
            n_beta=n_beta,
            m=1 + (seed + idx) % max_m,
            dist=ValueDist.UNIFORM_INT,
            lo=0,
            hi=10,
            seed=seed * 1_000_003 + idx,
        )
