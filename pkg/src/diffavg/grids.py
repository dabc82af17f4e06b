"""Domain types for uniform grids on the unit square.

A transformation of [0,1]x[0,1] is represented by where it sends the nodes
of a uniform nx-by-ny grid.  Node (i, j) sits at (i*hx, j*hy) with
hx = 1/(nx-1), hy = 1/(ny-1); arrays are indexed [i, j] with i running
along x.  All types are immutable after construction and all arithmetic is
64-bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import SpecMismatchError, ValidationError


@dataclass(frozen=True)
class DomainSpec:
    """Node counts of a uniform grid on the unit square.

    Spacings are always derived from the node counts, never stored.
    Central differences need at least one interior layer, hence nx, ny >= 3.
    """

    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 3:
            raise ValidationError(f"nx must be >= 3, got {self.nx}")
        if self.ny < 3:
            raise ValidationError(f"ny must be >= 3, got {self.ny}")

    @property
    def hx(self) -> float:
        return 1.0 / (self.nx - 1)

    @property
    def hy(self) -> float:
        return 1.0 / (self.ny - 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        """1D node coordinates along x and y."""
        return (np.arange(self.nx) * self.hx, np.arange(self.ny) * self.hy)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Node coordinate arrays X[i, j], Y[i, j]."""
        x, y = self.axes()
        return np.meshgrid(x, y, indexing="ij")

    def identity_coords(self) -> np.ndarray:
        """(nx, ny, 2) array of identity node positions."""
        xx, yy = self.mesh()
        return np.stack([xx, yy], axis=-1)

    def boundary_mask(self) -> np.ndarray:
        """Boolean (nx, ny) mask, True on boundary nodes."""
        mask = np.zeros(self.shape, dtype=bool)
        mask[0, :] = mask[-1, :] = True
        mask[:, 0] = mask[:, -1] = True
        return mask


def _require_same_spec(a, b) -> None:
    if a.spec != b.spec:
        raise SpecMismatchError(f"grid specs differ: {a.spec} vs {b.spec}")


def _check_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what} contains non-finite values")


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class GridTransform:
    """Mapped node positions approximating a transformation of the unit square.

    The boundary condition is identity on the edge of the square.  By default
    the constructor re-pins boundary nodes to their exact identity positions
    so descent arithmetic cannot accumulate boundary drift; test fixtures
    that sample unconstrained maps (rotations, affine maps) pass
    ``pin_boundary=False``.
    """

    spec: DomainSpec
    coords: np.ndarray
    pin_boundary: bool = True

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=np.float64)
        if coords.shape != (self.spec.nx, self.spec.ny, 2):
            raise ValidationError(
                f"coords shape {coords.shape} does not match spec "
                f"({self.spec.nx}, {self.spec.ny}, 2)"
            )
        _check_finite(coords, "coords")
        coords = np.array(coords, copy=True)
        if self.pin_boundary:
            ident = self.spec.identity_coords()
            mask = self.spec.boundary_mask()
            coords[mask] = ident[mask]
        coords.flags.writeable = False
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_map(cls, spec: DomainSpec, fn, pin_boundary: bool = True) -> "GridTransform":
        """Sample a callable (X, Y) -> (PX, PY) of coordinate arrays."""
        xx, yy = spec.mesh()
        px, py = fn(xx, yy)
        coords = np.stack([np.broadcast_to(px, spec.shape),
                           np.broadcast_to(py, spec.shape)], axis=-1)
        return cls(spec, coords, pin_boundary=pin_boundary)

    @cached_property
    def has_identity_boundary(self) -> bool:
        ident = self.spec.identity_coords()
        mask = self.spec.boundary_mask()
        return bool(np.array_equal(self.coords[mask], ident[mask]))

    def validate_boundary(self) -> None:
        """Reject any deviation of boundary nodes from identity (bit-exact)."""
        if not self.has_identity_boundary:
            raise ValidationError("boundary nodes deviate from identity positions")

    @cached_property
    def min_interior_jacobian(self) -> float:
        from .diffops import jacobian_det

        return float(np.min(jacobian_det(self).values[1:-1, 1:-1]))

    @property
    def is_diffeomorphic(self) -> bool:
        """True when the Jacobian determinant is positive on all interior nodes."""
        return self.min_interior_jacobian > 0.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridTransform):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.coords, other.coords)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Samples of a scalar function on the grid nodes."""

    spec: DomainSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != self.spec.shape:
            raise ValidationError(
                f"values shape {values.shape} does not match spec {self.spec.shape}"
            )
        _check_finite(values, "field values")
        object.__setattr__(self, "values", _freeze(values))

    @classmethod
    def constant(cls, spec: DomainSpec, value: float) -> "ScalarField":
        return cls(spec, np.full(spec.shape, float(value)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScalarField):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class VectorField:
    """Samples of a 2-vector field on the grid nodes, component-last layout."""

    spec: DomainSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.spec.nx, self.spec.ny, 2):
            raise ValidationError(
                f"values shape {values.shape} does not match spec "
                f"({self.spec.nx}, {self.spec.ny}, 2)"
            )
        _check_finite(values, "field values")
        object.__setattr__(self, "values", _freeze(values))

    @classmethod
    def zero(cls, spec: DomainSpec) -> "VectorField":
        return cls(spec, np.zeros((spec.nx, spec.ny, 2)))

    def is_zero_on_boundary(self) -> bool:
        mask = self.spec.boundary_mask()
        return bool(np.all(self.values[mask] == 0.0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Positive weights summing to one."""

    w: np.ndarray

    SUM_TOL = 1e-12

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise ValidationError("weights must be a non-empty 1D array")
        _check_finite(w, "weights")
        if np.any(w <= 0.0):
            raise ValidationError("all weights must be strictly positive")
        if abs(float(w.sum()) - 1.0) > self.SUM_TOL:
            raise ValidationError(f"weights sum to {w.sum()!r}, expected 1")
        object.__setattr__(self, "w", _freeze(w))

    @classmethod
    def uniform(cls, k: int) -> "WeightVector":
        if k < 1:
            raise ValidationError("need at least one weight")
        return cls(np.full(k, 1.0 / k))

    @classmethod
    def normalized(cls, raw) -> "WeightVector":
        raw = np.asarray(raw, dtype=np.float64)
        total = float(raw.sum())
        if total <= 0.0:
            raise ValidationError("weights must have a positive sum")
        return cls(raw / total)

    def __len__(self) -> int:
        return int(self.w.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightVector):
            return NotImplemented
        return np.array_equal(self.w, other.w)


def identity_grid(spec: DomainSpec) -> GridTransform:
    """The identity transformation sampled on the grid."""
    return GridTransform(spec, spec.identity_coords())


def grid_axpy(a: float, g1: GridTransform, b: float, g2: GridTransform) -> GridTransform:
    """Nodewise a*g1 + b*g2.

    The boundary is re-pinned only when both inputs carry the identity
    boundary; affine combinations with a+b=1 then preserve it exactly.
    Callers combining unpinned fixtures get the raw combination.
    """
    _require_same_spec(g1, g2)
    coords = a * g1.coords + b * g2.coords
    pin = g1.has_identity_boundary and g2.has_identity_boundary
    return GridTransform(g1.spec, coords, pin_boundary=pin)


def grid_rms_distance(g1: GridTransform, g2: GridTransform) -> float:
    """Root-mean-square Euclidean distance between mapped nodes."""
    _require_same_spec(g1, g2)
    d = g1.coords - g2.coords
    return float(np.sqrt(np.mean(np.sum(d * d, axis=-1))))


def rms_displacement(g: GridTransform) -> float:
    """RMS distance of a transformation from the identity."""
    return grid_rms_distance(g, identity_grid(g.spec))
