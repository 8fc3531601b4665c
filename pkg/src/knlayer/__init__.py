"""Closed-form Knudsen-layer solutions from even-odd parity moment systems.

The library builds reduced half-space moment systems of arbitrary order,
solves their Maxwell-wall boundary conditions, and evaluates the resulting
temperature-jump and velocity-slip layer profiles analytically.  The
:mod:`knlayer.verification` module carries independent numerical oracles
(quadrature, dense eigensolver, finite-difference BVP) for every step.
"""

from .boundary_solver import (
    StructuralSolveError,
    accommodation_factor,
    kramers_boundary_system,
    solve_wall,
    temperature_boundary_system,
)
from .layer_profiles import (
    TemperatureLayerSolution,
    VelocityLayerSolution,
    chi_zero_limit,
    convergence_order,
    default_profile_grid,
    effective_conductivity,
    jump_coefficient,
    normalized_temperature,
    temperature_defect,
    temperature_solution,
    velocity_solution,
    viscous_slip_coefficient,
)
from .parity_spectral import ParityEigen, assemble_full_R, decompose
from .special_functions import (
    HalfSpaceTable,
    WallMoments,
    ZSequence,
    half_space_I,
    half_space_S,
    half_space_S_normalized,
    hermite_eval,
    linearized_wall_moment,
    wall_J,
    z_value,
)
from .system_builder import (
    ReducedSystem,
    SystemKind,
    build_kramers_system,
    build_temperature_system,
    inner_product_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "HalfSpaceTable",
    "ParityEigen",
    "ReducedSystem",
    "StructuralSolveError",
    "SystemKind",
    "TemperatureLayerSolution",
    "VelocityLayerSolution",
    "WallMoments",
    "ZSequence",
    "accommodation_factor",
    "assemble_full_R",
    "build_kramers_system",
    "build_temperature_system",
    "chi_zero_limit",
    "convergence_order",
    "decompose",
    "default_profile_grid",
    "effective_conductivity",
    "half_space_I",
    "half_space_S",
    "half_space_S_normalized",
    "hermite_eval",
    "inner_product_oracle",
    "jump_coefficient",
    "kramers_boundary_system",
    "linearized_wall_moment",
    "normalized_temperature",
    "solve_wall",
    "temperature_boundary_system",
    "temperature_defect",
    "temperature_solution",
    "velocity_solution",
    "viscous_slip_coefficient",
    "wall_J",
    "z_value",
]
