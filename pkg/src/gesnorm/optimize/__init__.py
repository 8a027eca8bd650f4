"""LP solver and GES-norm projection onto polyhedra."""

from gesnorm.optimize.experiments import ProjectionInstance, alpha_sweep, generate_instance, infeasible_fraction
from gesnorm.optimize.milp import NodeLimitExceeded, project_milp
from gesnorm.optimize.projection import (
    Polyhedron,
    ProjectionResult,
    project_enumerate,
    project_lp,
    projection_value,
)
from gesnorm.optimize.simplex import LpProblem, LpSolution, LpStatus, lp_solve

__all__ = [
    "LpProblem",
    "LpSolution",
    "LpStatus",
    "NodeLimitExceeded",
    "Polyhedron",
    "ProjectionInstance",
    "ProjectionResult",
    "alpha_sweep",
    "generate_instance",
    "infeasible_fraction",
    "lp_solve",
    "project_enumerate",
    "project_lp",
    "project_milp",
    "projection_value",
]
