# services/paths/__init__.py
from .models import APath, HomotopyGrid, ASphere, SphereFamily, morphism_residual, grid_tolerance
from .evolution import (
    SteppingEvolutionSolver,
    IntegralEvolutionSolver,
    HomotopyReport,
    SOLVERS,
    default_solver,
    solve_evolution,
    is_homotopy,
)
from .operations import (
    FLATTENING,
    flatten,
    flatten_rate,
    concatenate,
    reverse,
    path_integral,
    reparametrization_homotopy,
    concatenate_homotopies,
)
from .generators import (
    SinePotential,
    homotopy_from_potential,
    sphere_from_potential,
    sphere_family_from_potential,
)
from .geometry import HgeomReport, ThetaReport, verify_hgeom, sphere_theta

__all__ = [
    'APath',
    'HomotopyGrid',
    'ASphere',
    'SphereFamily',
    'morphism_residual',
    'grid_tolerance',
    'SteppingEvolutionSolver',
    'IntegralEvolutionSolver',
    'HomotopyReport',
    'SOLVERS',
    'default_solver',
    'solve_evolution',
    'is_homotopy',
    'FLATTENING',
    'flatten',
    'flatten_rate',
    'concatenate',
    'reverse',
    'path_integral',
    'reparametrization_homotopy',
    'concatenate_homotopies',
    'SinePotential',
    'homotopy_from_potential',
    'sphere_from_potential',
    'sphere_family_from_potential',
    'HgeomReport',
    'ThetaReport',
    'verify_hgeom',
    'sphere_theta'
]
