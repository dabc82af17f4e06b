"""Averaging of grid diffeomorphisms.

The proposed average of K diffeomorphisms is the map whose Jacobian
determinant and curl equal the weighted means of the inputs' Jacobian
determinants and curls; it is computed by reconstructing from those
averaged fields.  The nodewise Euclidean average is kept as the baseline
it is meant to replace, together with fold diagnostics that expose the
baseline's failure under local rotations.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .diffops import curl2d, jacobian_det
from .errors import SpecMismatchError, ValidationError
from .grids import GridTransform, ScalarField, WeightVector, grid_rms_distance, identity_grid
from .reconstruct import ConvergenceReport, ReconstructOptions, reconstruct


def _check_inputs(grids: Sequence[GridTransform], w: WeightVector) -> None:
    if len(grids) == 0:
        raise ValidationError("need at least one grid")
    if len(w) != len(grids):
        raise ValidationError(f"{len(grids)} grids but {len(w)} weights")
    spec = grids[0].spec
    for g in grids[1:]:
        if g.spec != spec:
            raise SpecMismatchError(f"grid specs differ: {spec} vs {g.spec}")


def average_fields(
    grids: Sequence[GridTransform], w: WeightVector
) -> tuple[ScalarField, ScalarField]:
    """Weighted means of the inputs' Jacobian-determinant and curl fields.

    Summation runs in input order; the weighted mean of positive Jacobian
    fields is positive, so the result is a valid reconstruction target
    whenever every input is fold-free.
    """
    _check_inputs(grids, w)
    spec = grids[0].spec
    f0 = np.zeros(spec.shape)
    g0 = np.zeros(spec.shape)
    for wi, g in zip(w.w, grids):
        f0 += wi * jacobian_det(g).values
        g0 += wi * curl2d(g).values
    return ScalarField(spec, f0), ScalarField(spec, g0)


def average_diffeomorphisms(
    grids: Sequence[GridTransform],
    w: WeightVector,
    opts: ReconstructOptions | None = None,
) -> tuple[GridTransform, ConvergenceReport]:
    """Average by reconstructing from the averaged Jacobian and curl fields."""
    _check_inputs(grids, w)
    for k, g in enumerate(grids):
        if not g.is_diffeomorphic:
            raise ValidationError(
                f"input grid {k} is not diffeomorphic "
                f"(min interior J = {g.min_interior_jacobian:.4g})"
            )
    f0, g0 = average_fields(grids, w)
    return reconstruct(identity_grid(grids[0].spec), f0, g0, opts)


def euclidean_average(grids: Sequence[GridTransform], w: WeightVector) -> GridTransform:
    """Nodewise weighted mean of mapped coordinates.

    No diffeomorphism guarantee: opposite local rotations make cells
    shrink or collapse.  The boundary is re-pinned only when every input
    carries the identity boundary.
    """
    _check_inputs(grids, w)
    spec = grids[0].spec
    coords = np.zeros((spec.nx, spec.ny, 2))
    for wi, g in zip(w.w, grids):
        coords += wi * g.coords
    pin = all(g.has_identity_boundary for g in grids)
    return GridTransform(spec, coords, pin_boundary=pin)


def fold_check(g: GridTransform) -> tuple[float, int]:
    """(minimum interior Jacobian, count of nodes with J <= 0)."""
    jac = jacobian_det(g).values
    return float(np.min(jac[1:-1, 1:-1])), int(np.count_nonzero(jac <= 0.0))


def distance_weights(grids: Sequence[GridTransform]) -> WeightVector:
    """Weights proportional to each input's RMS distance from the uniform
    Euclidean mean; uniform fallback when all inputs coincide with it."""
    if len(grids) < 2:
        raise ValidationError("distance weights need at least two grids")
    mean = euclidean_average(grids, WeightVector.uniform(len(grids)))
    dists = np.array([grid_rms_distance(g, mean) for g in grids])
    if np.all(dists == 0.0):
        return WeightVector.uniform(len(grids))
    if np.any(dists == 0.0):
        raise ValidationError(
            "distance weights undefined: some grids coincide with the mean "
            "while others do not"
        )
    return WeightVector.normalized(dists)
