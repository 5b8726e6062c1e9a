"""Boundary harmonic fields of toroidal domains, their Poincare maps, and shape derivatives."""
from .errors import ConfigError, NumericalError, PoincareShapeError
from .surface import (
    DeformationField,
    FourierSurface,
    MetricData,
    TangentField,
    axisymmetric_surface,
    build_surface,
    compute_metric,
    decompose_deformation,
    perturbed_torus,
)
from .neumann import NeumannProblem, QuadratureOptions, solve_neumann
from .harmonic import check_admissible, compute_harmonic, normalize_toroidal
from .dynamics import CircleMap, IntegratorOptions, poincare_map, rotation_number
from .shape_derivative import PipelineOptions, fd_pi_prime, prepare, shape_derivative
from .cohomology import GOLDEN, check_diophantine, mu_to_Phi, solve_cohomological
from .axisym import AxisymTorus

__all__ = [
    "AxisymTorus",
    "CircleMap",
    "ConfigError",
    "DeformationField",
    "FourierSurface",
    "GOLDEN",
    "IntegratorOptions",
    "MetricData",
    "NeumannProblem",
    "NumericalError",
    "PipelineOptions",
    "PoincareShapeError",
    "QuadratureOptions",
    "TangentField",
    "axisymmetric_surface",
    "build_surface",
    "check_admissible",
    "check_diophantine",
    "compute_harmonic",
    "compute_metric",
    "decompose_deformation",
    "fd_pi_prime",
    "mu_to_Phi",
    "normalize_toroidal",
    "perturbed_torus",
    "poincare_map",
    "prepare",
    "rotation_number",
    "shape_derivative",
    "solve_cohomological",
    "solve_neumann",
]
