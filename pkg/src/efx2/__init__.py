"""efx2: complete EFX allocations for agents of two valuation types."""

from .checker import Mode, is_efx
from .engine import SolveResult, SolverSettings, solve
from .errors import EfxError
from .model import AgentType, Allocation, Instance

__all__ = [
    "AgentType",
    "Allocation",
    "EfxError",
    "Instance",
    "Mode",
    "SolveResult",
    "SolverSettings",
    "is_efx",
    "solve",
]

__version__ = "0.1.0"
