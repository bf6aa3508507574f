"""Cahn-Hilliard dynamics with dynamic boundary conditions on a periodic strip.

Thin re-export of the compiled core; see the C++ headers for the contract.
"""

from ._core import (
    Grid,
    Potential,
    State,
    multipliers,
    potential,
    read_snapshot,
    run,
    solve_stationary,
    step,
    total_energy,
    write_snapshot,
)

__all__ = [
    "Grid",
    "Potential",
    "State",
    "multipliers",
    "potential",
    "read_snapshot",
    "run",
    "solve_stationary",
    "step",
    "total_energy",
    "write_snapshot",
]
