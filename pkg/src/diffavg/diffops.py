"""Finite-difference differential operators on grid-sampled maps and fields.

Derivatives use second-order central differences at interior nodes and
second-order one-sided stencils (-3/2, 2, -1/2 over h) on the boundary, so
the operators are exact on affine maps and uniformly O(h^2) on smooth ones.
Each 1D derivative is applied as a dense banded matrix, which makes the
transpose used by the adjoint gradient exact by construction.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .grids import DomainSpec, GridTransform, ScalarField, VectorField


@lru_cache(maxsize=32)
def _derivative_matrix(n: int, h: float) -> np.ndarray:
    """Dense n-by-n first-derivative operator along one axis."""
    d = np.zeros((n, n))
    inv2h = 1.0 / (2.0 * h)
    for i in range(1, n - 1):
        d[i, i - 1] = -inv2h
        d[i, i + 1] = inv2h
    d[0, 0], d[0, 1], d[0, 2] = -1.5 / h, 2.0 / h, -0.5 / h
    d[-1, -1], d[-1, -2], d[-1, -3] = 1.5 / h, -2.0 / h, 0.5 / h
    d.flags.writeable = False
    return d


def ddx(values: np.ndarray, spec: DomainSpec) -> np.ndarray:
    """d/dx of nodal values (axis 0)."""
    return _derivative_matrix(spec.nx, spec.hx) @ values


def ddy(values: np.ndarray, spec: DomainSpec) -> np.ndarray:
    """d/dy of nodal values (axis 1)."""
    return values @ _derivative_matrix(spec.ny, spec.hy).T


def ddx_t(values: np.ndarray, spec: DomainSpec) -> np.ndarray:
    """Transpose of ddx under the plain nodewise dot product."""
    return _derivative_matrix(spec.nx, spec.hx).T @ values


def ddy_t(values: np.ndarray, spec: DomainSpec) -> np.ndarray:
    """Transpose of ddy under the plain nodewise dot product."""
    return values @ _derivative_matrix(spec.ny, spec.hy)


def map_partials(g: GridTransform) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """The four nodal partials (dPx/dx, dPy/dy, dPx/dy, dPy/dx) of a map."""
    px = g.coords[:, :, 0]
    py = g.coords[:, :, 1]
    return (
        ddx(px, g.spec),
        ddy(py, g.spec),
        ddy(px, g.spec),
        ddx(py, g.spec),
    )


def jacobian_det(g: GridTransform) -> ScalarField:
    """Nodal Jacobian determinant of a grid transformation."""
    ax, by, cy, dx_ = map_partials(g)
    return ScalarField(g.spec, ax * by - cy * dx_)


def curl2d(g: GridTransform) -> ScalarField:
    """Scalar 2D curl dPy/dx - dPx/dy of a grid transformation."""
    _, _, cy, dx_ = map_partials(g)
    return ScalarField(g.spec, dx_ - cy)


def divergence(v: VectorField) -> ScalarField:
    """Nodal divergence dvx/dx + dvy/dy of a vector field."""
    vx = v.values[:, :, 0]
    vy = v.values[:, :, 1]
    return ScalarField(v.spec, ddx(vx, v.spec) + ddy(vy, v.spec))


def min_interior_jacobian(g: GridTransform) -> float:
    """Minimum Jacobian determinant over interior nodes."""
    return float(np.min(jacobian_det(g).values[1:-1, 1:-1]))


def field_integral(f: ScalarField) -> float:
    """Trapezoid-rule integral of a nodal field over the unit square.

    Diagnostic quadrature only; the reconstruction energy uses the plain
    node sum documented in the reconstruct module.
    """
    w = np.ones(f.spec.shape)
    w[0, :] *= 0.5
    w[-1, :] *= 0.5
    w[:, 0] *= 0.5
    w[:, -1] *= 0.5
    return float(np.sum(w * f.values) * f.spec.hx * f.spec.hy)
