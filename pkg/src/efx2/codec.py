"""JSON wire formats for instances, allocations and run traces."""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any, Dict, Mapping, Tuple

from .errors import FormatError, ValidationError
from .model import AgentType, Allocation, Instance, ItemSet, canonical

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(token: Any) -> Fraction:
    """Parse an integer or a "p/q" string. Floats are rejected."""
    if isinstance(token, bool):
        raise FormatError(f"not a rational: {token!r}")
    if isinstance(token, int):
        return Fraction(token)
    if isinstance(token, str):
        match = _RATIONAL_RE.match(token)
        if match:
            num, den = match.group(1), match.group(2)
            if den is not None and int(den) == 0:
                raise FormatError(f"zero denominator in {token!r}")
            return Fraction(int(num), int(den) if den is not None else 1)
    raise FormatError(f"not a rational: {token!r} (use an integer or \"p/q\")")


def render_rational(value: Fraction) -> int | str:
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


def _require(payload: Mapping[str, Any], key: str, kind: type) -> Any:
    if key not in payload:
        raise FormatError(f"missing key {key!r}")
    value = payload[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise FormatError(f"key {key!r} must be a {kind.__name__}")
    return value


def parse_instance(payload: Any) -> Instance:
    """Build an Instance from the decoded JSON instance format.

    Structural problems raise FormatError; value-level problems such as
    negative entries are left for ``model.validate``.
    """
    if not isinstance(payload, dict):
        raise FormatError("instance must be a JSON object")
    m = _require(payload, "m", int)
    agents = _require(payload, "agents", list)
    values = _require(payload, "values", dict)
    types = []
    for idx, token in enumerate(agents):
        try:
            types.append(AgentType(token))
        except ValueError:
            raise FormatError(f"agent {idx} has unknown type {token!r}") from None
    vectors = {}
    for kind in AgentType:
        raw = _require(values, kind.value, list)
        vectors[kind] = tuple(parse_rational(v) for v in raw)
    return Instance(
        item_count=m,
        agent_types=tuple(types),
        values_alpha=vectors[AgentType.ALPHA],
        values_beta=vectors[AgentType.BETA],
    )


def render_instance(instance: Instance) -> Dict[str, Any]:
    return {
        "m": instance.item_count,
        "agents": [t.value for t in instance.agent_types],
        "values": {
            kind.value: [render_rational(v) for v in instance.values_for(kind)]
            for kind in AgentType
        },
    }


def _parse_items(raw: Any, where: str) -> ItemSet:
    if not isinstance(raw, list):
        raise FormatError(f"{where} must be a list of item indices")
    for item in raw:
        if not isinstance(item, int) or isinstance(item, bool):
            raise FormatError(f"{where} contains non-integer item {item!r}")
    return frozenset(raw)


def _parse_bundle(raw: Any, where: str) -> ItemSet:
    items = _parse_items(raw, where)
    if len(items) != len(raw):
        dup = next(i for i in raw if raw.count(i) > 1)
        raise ValidationError([f"item {dup} listed twice in {where}"])
    return items


def parse_allocation(payload: Any, m: int) -> Tuple[Allocation, ItemSet]:
    """Return the allocation and the pool it declares.

    The declared pool is redundant; callers compare it against
    ``Allocation.pool`` and report a mismatch as a validation problem.
    """
    if not isinstance(payload, dict):
        raise FormatError("allocation must be a JSON object")
    bundles_raw = _require(payload, "bundles", list)
    bundles = tuple(
        _parse_bundle(b, f"bundle {idx}") for idx, b in enumerate(bundles_raw)
    )
    pool = _parse_items(_require(payload, "pool", list), "pool")
    return Allocation(bundles, m), pool


def render_allocation(alloc: Allocation) -> Dict[str, Any]:
    return {
        "bundles": [list(canonical(b)) for b in alloc.bundles],
        "pool": list(canonical(alloc.pool)),
    }


def render_trace_record(record: Mapping[str, Any]) -> str:
    return json.dumps(record, separators=(",", ":"))


def dumps(document: Any) -> str:
    """Stable pretty JSON used for every document written to stdout or disk."""
    return json.dumps(document, indent=2) + "\n"


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON: {exc}") from None
