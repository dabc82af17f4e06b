"""Averaging of 2D grid diffeomorphisms.

Instead of averaging mapped coordinates directly (which shrinks or folds
cells under opposite local rotations), this package averages the inputs'
Jacobian-determinant and curl fields and reconstructs a fold-free grid
transformation matching the averaged fields by Poisson-constrained
gradient descent.
"""

from .averaging import (
    average_diffeomorphisms,
    average_fields,
    distance_weights,
    euclidean_average,
    fold_check,
)
from .diffops import curl2d, divergence, field_integral, jacobian_det, min_interior_jacobian
from .errors import (
    DiffavgError,
    GridFileError,
    NumericalError,
    SolverError,
    SpecMismatchError,
    ValidationError,
)
from .gridio import read_field, read_grid, write_field, write_grid
from .grids import (
    DomainSpec,
    GridTransform,
    ScalarField,
    VectorField,
    WeightVector,
    grid_axpy,
    grid_rms_distance,
    identity_grid,
    rms_displacement,
)
from .poisson import solve_poisson, solve_poisson_vec
from .reconstruct import (
    ConvergenceReport,
    IterationRecord,
    ReconstructOptions,
    apply_control,
    energy,
    energy_gradient,
    reconstruct,
)
from .synth import resample_compose, rotated_pair, synthetic_phi0, windowed_rotation

__version__ = "0.1.0"

__all__ = [
    "ConvergenceReport",
    "DiffavgError",
    "DomainSpec",
    "GridFileError",
    "GridTransform",
    "IterationRecord",
    "NumericalError",
    "ReconstructOptions",
    "ScalarField",
    "SolverError",
    "SpecMismatchError",
    "ValidationError",
    "VectorField",
    "WeightVector",
    "apply_control",
    "average_diffeomorphisms",
    "average_fields",
    "curl2d",
    "distance_weights",
    "divergence",
    "energy",
    "energy_gradient",
    "euclidean_average",
    "field_integral",
    "fold_check",
    "grid_axpy",
    "grid_rms_distance",
    "identity_grid",
    "jacobian_det",
    "min_interior_jacobian",
    "read_field",
    "read_grid",
    "reconstruct",
    "resample_compose",
    "rms_displacement",
    "rotated_pair",
    "solve_poisson",
    "solve_poisson_vec",
    "synthetic_phi0",
    "windowed_rotation",
    "write_field",
    "write_grid",
]
