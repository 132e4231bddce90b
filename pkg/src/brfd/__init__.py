"""Relaxation finite difference solvers for ``u_t = u_xx + g(u) u + f`` on an interval."""
from ._backend import BACKEND
from .convergence import RefinementPlan, refinement_study
from .grid import Mesh, TimeGrid
from .problems import Problem, get_problem, manufacture
from .scheme import BRFD, MBRFD, BRFDSuboptimalInit, CrankNicolsonNewton, run

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BRFD", "MBRFD", "BRFDSuboptimalInit", "CrankNicolsonNewton", "Mesh", "Problem",
    "RefinementPlan", "TimeGrid", "get_problem", "manufacture", "refinement_study", "run",
]
