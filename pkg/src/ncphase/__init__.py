"""Noncommutative phase spaces: extended anisotropic Newton-Hooke
algebras, coadjoint-orbit Poisson structures, magnetic/dual-magnetic
minimal coupling, and trajectory integration."""

from .lie import AlgebraParams, StructureConstants, anh_algebra, bracket, jacobi_residual
from .orbit import (
    DualPoint,
    OrbitParams,
    OrbitStructure,
    casimir_kernel_residual,
    casimir_u,
    kirillov_matrix,
    orbit_structure_2d,
    orbit_structure_3d,
    symplectic_form,
)
from .ncps import (
    PhasePoint,
    PoissonStructure,
    ScalarField,
    coordinate_bracket_table,
    couple,
    decouple,
    invertibility_margin,
    jacobi_conditions,
    nc_bracket,
)
from .dynamics import (
    DerivedParams,
    Scenario,
    ScenarioParams,
    Trajectory,
    build_scenario,
    closed_form_flow_1d,
    derived_params,
    evolve,
    group_action_1d,
    hamiltonian_electron,
    hamiltonian_pendulum,
    hamiltonian_spring,
    integrate,
    newton_residual,
    spring_dual_residual,
)

__version__ = "0.1.0"
