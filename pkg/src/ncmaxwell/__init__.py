"""Lattice Hamiltonian simulation and Dirac-bracket verification for
theta-deformed (non-commutative space) Maxwell theory."""

__version__ = "0.1.0"

from .lattice import (  # noqa: E402
    LatticeSpec,
    curl,
    div,
    grad,
    inverse_laplacian,
    laplacian,
    transverse_project,
)
from .constitutive import ThetaParams  # noqa: E402
from .dynamics import (  # noqa: E402
    FieldState,
    GaugeMode,
    canonical_energy,
    evolve,
    make_initial_state,
    step_rk4,
    total_energy,
)

__all__ = [
    "LatticeSpec",
    "ThetaParams",
    "FieldState",
    "GaugeMode",
    "curl",
    "div",
    "grad",
    "laplacian",
    "inverse_laplacian",
    "transverse_project",
    "evolve",
    "make_initial_state",
    "step_rk4",
    "total_energy",
    "canonical_energy",
]
