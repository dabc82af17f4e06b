"""Synthetic grid transformations for experiments and tests.

All generators keep the boundary at identity by construction: the wavy
test map uses sine displacements that vanish on the edge, and in-place
rotations taper their angle to zero before reaching it.
"""

from __future__ import annotations

import numpy as np

from .diffops import min_interior_jacobian
from .errors import SpecMismatchError, ValidationError
from .grids import DomainSpec, GridTransform

DEFAULT_AMPLITUDE = 0.01
DEFAULT_MODES = 10
DEFAULT_SEED = 3
MIX_SCALE = 12.0
DEFAULT_CENTER = (0.5, 0.5)
DEFAULT_R_INNER = 0.2
DEFAULT_R_OUTER = 0.45
DEFAULT_THETA_DEG = 75.0


def _taper(r: np.ndarray, r_inner: float, r_outer: float) -> np.ndarray:
    """1 inside r_inner, 0 outside r_outer, C1 smoothstep falloff between."""
    t = np.clip((r - r_inner) / (r_outer - r_inner), 0.0, 1.0)
    return 1.0 - t * t * (3.0 - 2.0 * t)


def windowed_rotation(
    spec: DomainSpec,
    theta: float,
    center: tuple[float, float] = DEFAULT_CENTER,
    r_inner: float = DEFAULT_R_INNER,
    r_outer: float = DEFAULT_R_OUTER,
) -> GridTransform:
    """In-place rotation by theta (radians, counter-clockwise) about center.

    The rotation is rigid within r_inner of the center and tapers smoothly
    to nothing at r_outer, which must not reach past the nearest boundary
    edge so edge nodes stay put.
    """
    cx, cy = center
    edge_dist = min(cx, 1.0 - cx, cy, 1.0 - cy)
    if not (0.0 < r_inner < r_outer):
        raise ValidationError("need 0 < r_inner < r_outer")
    if r_outer > edge_dist:
        raise ValidationError(
            f"r_outer {r_outer} reaches past the nearest boundary edge ({edge_dist})"
        )

    xx, yy = spec.mesh()
    qx, qy = xx - cx, yy - cy
    r = np.hypot(qx, qy)
    angle = theta * _taper(r, r_inner, r_outer)
    ca, sa = np.cos(angle), np.sin(angle)
    px = cx + ca * qx - sa * qy
    py = cy + sa * qx + ca * qy
    return GridTransform(spec, np.stack([px, py], axis=-1))


def synthetic_phi0(
    spec: DomainSpec,
    amplitude: float = DEFAULT_AMPLITUDE,
    modes: int = DEFAULT_MODES,
    seed: int | None = DEFAULT_SEED,
) -> GridTransform:
    """Smooth wavy test transformation, identity on the boundary.

    The map displaces nodes by a sine product at the given mode count plus,
    when a seed is given, a fixed pseudo-random mixture of low modes
    (wavenumbers up to 3, coefficients decaying as 1/(p+q)^2).  The default
    parameters give a two-scale grid: the low-mode mixture carries most of
    the displacement, the high-mode term most of the Jacobian/curl content.
    Deterministic for fixed (spec, amplitude, modes, seed); raises if the
    sampled map folds.
    """
    if modes < 1:
        raise ValidationError("modes must be >= 1")
    xx, yy = spec.mesh()
    m = modes
    ux = amplitude * np.sin(m * np.pi * xx) * np.sin(np.pi * yy)
    uy = amplitude * np.sin(np.pi * xx) * np.sin(m * np.pi * yy)
    if seed is not None:
        rng = np.random.default_rng(seed)
        for p in range(1, 4):
            for q in range(1, 4):
                cxy = rng.standard_normal(2) * MIX_SCALE * amplitude / (p + q) ** 2
                sxy = np.sin(p * np.pi * xx) * np.sin(q * np.pi * yy)
                ux = ux + cxy[0] * sxy
                uy = uy + cxy[1] * sxy
    g = GridTransform(spec, np.stack([xx + ux, yy + uy], axis=-1))
    min_j = min_interior_jacobian(g)
    if min_j <= 0.0:
        raise ValidationError(
            f"amplitude {amplitude} folds the test map (min interior J = {min_j:.4g})"
        )
    return g


def _bilinear_sample(values: np.ndarray, spec: DomainSpec, px: np.ndarray, py: np.ndarray):
    """Bilinearly interpolate nodal values at unit-square positions.

    Positions outside the square are clamped; the clamp count is returned
    alongside the samples.
    """
    tx = px * (spec.nx - 1)
    ty = py * (spec.ny - 1)
    out_of_range = int(np.count_nonzero(
        (tx < 0.0) | (tx > spec.nx - 1) | (ty < 0.0) | (ty > spec.ny - 1)
    ))
    tx = np.clip(tx, 0.0, spec.nx - 1)
    ty = np.clip(ty, 0.0, spec.ny - 1)
    ix = np.minimum(tx.astype(np.int64), spec.nx - 2)
    iy = np.minimum(ty.astype(np.int64), spec.ny - 2)
    fx = tx - ix
    fy = ty - iy
    v00 = values[ix, iy]
    v10 = values[ix + 1, iy]
    v01 = values[ix, iy + 1]
    v11 = values[ix + 1, iy + 1]
    top = v00 * (1.0 - fx) + v10 * fx
    bot = v01 * (1.0 - fx) + v11 * fx
    return top * (1.0 - fy) + bot * fy, out_of_range


def sample_scalar(field_values: np.ndarray, spec: DomainSpec, positions: np.ndarray):
    """Interpolate a nodal scalar field at (..., 2) unit-square positions."""
    sampled, clamped = _bilinear_sample(field_values, spec, positions[..., 0], positions[..., 1])
    return sampled, clamped


def resample_compose(outer: GridTransform, inner: GridTransform) -> tuple[GridTransform, int]:
    """Composition outer(inner(x)) by bilinear resampling of outer's coordinates.

    Returns the composed grid (boundary re-pinned to identity) and the
    number of inner positions that fell outside the unit square and were
    clamped.
    """
    if outer.spec != inner.spec:
        raise SpecMismatchError(f"grid specs differ: {outer.spec} vs {inner.spec}")
    px = inner.coords[:, :, 0]
    py = inner.coords[:, :, 1]
    cx, n1 = _bilinear_sample(outer.coords[:, :, 0], outer.spec, px, py)
    cy, n2 = _bilinear_sample(outer.coords[:, :, 1], outer.spec, px, py)
    composed = GridTransform(outer.spec, np.stack([cx, cy], axis=-1))
    return composed, max(n1, n2)


def rotated_pair(
    phi0: GridTransform,
    theta: float,
    center: tuple[float, float] = DEFAULT_CENTER,
    r_inner: float = DEFAULT_R_INNER,
    r_outer: float = DEFAULT_R_OUTER,
) -> tuple[GridTransform, GridTransform]:
    """The two opposite windowed rotations of a base map: (W(+theta) o phi0,
    W(-theta) o phi0)."""
    w_pos = windowed_rotation(phi0.spec, theta, center, r_inner, r_outer)
    w_neg = windowed_rotation(phi0.spec, -theta, center, r_inner, r_outer)
    g1, _ = resample_compose(w_pos, phi0)
    g2, _ = resample_compose(w_neg, phi0)
    return g1, g2
