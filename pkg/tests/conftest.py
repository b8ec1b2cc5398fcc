from __future__ import annotations

import logging
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from efx2.model import Allocation, Instance  # noqa: E402

A, B = "alpha", "beta"


@pytest.fixture(autouse=True, scope="session")
def quiet_logging():
    # setup_logging leaves the logger alone once it has a handler, so tests
    # never write into the project's logs/ directory
    logger = logging.getLogger("efx2")
    handler = logging.NullHandler()
    logger.addHandler(handler)
    yield
    logger.removeHandler(handler)


@pytest.fixture
def exchange_case():
    """Two sources (agents 0 and 2), mutual champions for item 6."""
    inst = Instance.build(
        [A, A, B, B],
        [3, 3, 5, 0, 10, 1, 2],
        [5, 0, 3, 3, 1, 10, 2],
    )
    alloc = Allocation.of([{0, 1}, {4}, {2, 3}, {5}], 7)
    return inst, alloc, 6


@pytest.fixture
def path_case():
    """Unique source 0 whose champion for item 6 is agent 2."""
    inst = Instance.build(
        [A, A, B, B],
        [3, 3, 5, 2, 10, 1, 2],
        [5, 0, 3, 3, 1, 10, 2],
    )
    alloc = Allocation.of([{0, 1}, {4}, {2, 3}, {5}], 7)
    return inst, alloc, 6


@pytest.fixture
def self_champion_case():
    inst = Instance.build([A, A, B, B], [3, 4, 5, 6, 10], [3, 4, 5, 6, 10])
    alloc = Allocation.of([{0}, {1}, {2}, {3}], 5)
    return inst, alloc, 4


@pytest.fixture
def cycle_case():
    """Agents 0 and 1 envy each other's singleton."""
    inst = Instance.build([A, B, A, B], [1, 2, 5, 6, 20], [2, 1, 5, 6, 20])
    alloc = Allocation.of([{0}, {1}, {2}, {3}], 5)
    return inst, alloc, 4


@pytest.fixture
def trimmed_exchange_case():
    """Two sources whose exchanged bundles are then EFX-envied by the
    second-poorest agent of each type, so both sides get trimmed."""
    inst = Instance.build(
        [A, A, B, B],
        [0, 4, 4, 4, 9, 0, 0, 0, 15, 0, 5],
        [9, 0, 0, 0, 0, 4, 4, 4, 0, 15, 5],
    )
    alloc = Allocation.of([{0, 1, 2, 3}, {8}, {4, 5, 6, 7}, {9}], 11)
    return inst, alloc, 10
