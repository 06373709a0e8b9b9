"""pivotlab: a laboratory for lower-bound constructions against random-edge
pivoting, in two equivalent models.

- :mod:`pivotlab.grid_uso` builds recursive comb orientations of grid graphs
  (acyclic, unique sink in every subgrid), simulates the directed random walk
  and solves its expected duration exactly.
- :mod:`pivotlab.geometry` constructs the exact-integer point families around
  the diagonal requirement line and decides every predicate over the
  rationals.
- :mod:`pivotlab.process` runs the pivoting process on those point sets,
  tracks phases, and solves the finite chain exactly.
- :mod:`pivotlab.analysis` evaluates the closed-form duration bounds,
  estimates expectations by seeded Monte Carlo, and verifies the structural
  and statistical laws the constructions are supposed to obey.
- :mod:`pivotlab.cli` exposes everything as the ``pivotlab`` command.
"""

from . import analysis, cli, geometry, grid_uso, process, seeding
from .errors import (
    DegeneracyError,
    GeneralPositionError,
    InstanceTooLargeError,
    InternalInvariantError,
)

__version__ = "0.1.0"

__all__ = [
    "analysis",
    "cli",
    "geometry",
    "grid_uso",
    "process",
    "seeding",
    "DegeneracyError",
    "GeneralPositionError",
    "InstanceTooLargeError",
    "InternalInvariantError",
    "__version__",
]
