import json
from fractions import Fraction

import pytest

from efx2 import codec
from efx2.errors import FormatError, ValidationError
from efx2.model import Allocation, Instance

INSTANCE_DOC = {
    "m": 3,
    "agents": ["alpha", "beta", "alpha"],
    "values": {"alpha": [1, "3/2", 0], "beta": ["2/4", 7, 1]},
}


@pytest.mark.parametrize(
    "token, expected",
    [(3, Fraction(3)), ("7", Fraction(7)), ("3/2", Fraction(3, 2)), (" 4 / 6 ", Fraction(2, 3))],
)
def test_parse_rational(token, expected):
    assert codec.parse_rational(token) == expected


@pytest.mark.parametrize("token", [1.5, True, "1/0", "abc", None, "1.5"])
def test_parse_rational_rejects(token):
    with pytest.raises(FormatError):
        codec.parse_rational(token)


def test_render_rational():
    assert codec.render_rational(Fraction(4, 2)) == 2
    assert codec.render_rational(Fraction(3, 6)) == "1/2"


def test_instance_document():
    inst = codec.parse_instance(INSTANCE_DOC)
    assert inst.values_beta[0] == Fraction(1, 2)
    rendered = codec.render_instance(inst)
    assert rendered["values"]["alpha"] == [1, "3/2", 0]
    assert rendered["values"]["beta"] == ["1/2", 7, 1]
    assert rendered["agents"] == INSTANCE_DOC["agents"]


@pytest.mark.parametrize(
    "doc",
    [
        [],
        {"agents": [], "values": {"alpha": [], "beta": []}},
        {"m": 1, "agents": ["gamma"], "values": {"alpha": [1], "beta": [1]}},
        {"m": 1, "agents": ["alpha"], "values": {"alpha": [1]}},
        {"m": 1, "agents": ["alpha"], "values": {"alpha": [0.5], "beta": [1]}},
    ],
)
def test_parse_instance_structural_errors(doc):
    with pytest.raises(FormatError):
        codec.parse_instance(doc)


def test_allocation_document():
    alloc, pool = codec.parse_allocation({"bundles": [[2, 0], []], "pool": [1]}, 3)
    assert alloc == Allocation.of([{0, 2}, set()], 3)
    assert pool == {1}
    assert codec.render_allocation(alloc) == {"bundles": [[0, 2], []], "pool": [1]}


def test_duplicate_item_in_bundle_is_validation_error():
    with pytest.raises(ValidationError) as info:
        codec.parse_allocation({"bundles": [[1, 1]], "pool": [0]}, 2)
    assert info.value.problems == ["item 1 listed twice in bundle 0"]


def test_loads_maps_json_errors():
    with pytest.raises(FormatError):
        codec.loads("{not json")


def test_dumps_is_stable():
    inst = Instance.build(["alpha"], [1], [2])
    text = codec.dumps(codec.render_instance(inst))
    assert text.endswith("\n")
    assert json.loads(text) == {"m": 1, "agents": ["alpha"], "values": {"alpha": [1], "beta": [2]}}


def test_trace_record_is_single_line():
    line = codec.render_trace_record({"step": 0, "pool": [1, 2]})
    assert "\n" not in line
    assert json.loads(line)["pool"] == [1, 2]
