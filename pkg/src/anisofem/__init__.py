"""Anisotropic adaptive linear finite elements for the Poisson equation."""
from .adapt import AdaptParams, adapt_mesh, adaptation_loop, m_uniformity, metric_edge_length
from .estimator import (element_hessian, element_hessians, estimate_energy_norm,
                        gauss_seidel_estimate, assemble_hb_system, hb_estimate)
from .fem import (FemSolution, assemble_load, assemble_stiffness, energy_error, solve_fem)
from .mesh import (Mesh, aspect_ratio, initial_lshape_mesh, max_aspect_ratio, read_mesh,
                   validate, write_mesh)
from .metric import (MetricField, absolute_tensor, calibrate_alpha, metric_tensor,
                     vertex_metrics)
from .problem import TestProblem, get_problem, mitchell_lshape
from .solver import ConditionReport, cg_solve, condition_number, diagonal_scale

__version__ = "0.1.0"
