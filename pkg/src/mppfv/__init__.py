"""High-order finite-volume WENO/RK3 solver with a parametrized maximum-principle-preserving flux limiter."""

from .grid import (BoundaryCondition, CellField, Dirichlet, Grid1D, Grid2D, Periodic,
                   extend_with_ghosts, project_cell_averages, project_cell_averages_2d)
from .harness import (ConvergenceRow, DerivativeAtInterface, PointValue, coefficient_oracle,
                      convergence_orders, error_norms, run_table)
from .integrator import RunReport, StepConfig, StepDiagnostics, integrate, rk3_step
from .limiter import BoundViolation, MarginViolation
from .problems import ProblemSpec, make_problem
from .reconstruct import ReconScheme

__version__ = "0.1.0"

__all__ = [
    "BoundaryCondition", "BoundViolation", "CellField", "ConvergenceRow",
    "DerivativeAtInterface", "Dirichlet", "Grid1D", "Grid2D", "MarginViolation", "Periodic",
    "PointValue", "ProblemSpec", "ReconScheme", "RunReport", "StepConfig", "StepDiagnostics",
    "coefficient_oracle", "convergence_orders", "error_norms", "extend_with_ghosts",
    "integrate", "make_problem", "project_cell_averages", "project_cell_averages_2d",
    "rk3_step", "run_table",
]
