"""Cold atoms in a rectangular waveguide.

Units: k0 = 1 for lengths, gamma0 = 1 for rates and times.
"""

from ._wgqed import (
    ConfigError,
    ConvergenceError,
    DomainError,
    NumericalError,
    __version__,
    collective_spectrum,
    describe,
    effective_hamiltonian,
    green_tensor,
    modes,
    populations,
    radiating_count,
    run,
    transmission,
)

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "NumericalError",
    "__version__",
    "collective_spectrum",
    "describe",
    "effective_hamiltonian",
    "green_tensor",
    "modes",
    "populations",
    "radiating_count",
    "run",
    "transmission",
]
