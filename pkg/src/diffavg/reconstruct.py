"""Construction of a grid transformation with prescribed Jacobian determinant
and curl by variational gradient descent.

The map is parameterized as phi = phi_init + u where u solves the
componentwise Dirichlet problem Laplace(u) = F, and the control field F is
the descent variable.  The energy is the discrete squared misfit of the
Jacobian determinant and curl against their targets,

    E(F) = 1/2 * sum_nodes [(J(phi) - f0)^2 + (curl(phi) - g0)^2] * hx * hy,

a plain node sum over all nodes (including the boundary, where the
one-sided stencils still depend on interior displacements).  The gradient
dE/dF is the exact gradient of this discrete energy: the residuals are
pulled back through the transposed Jacobian and curl stencils, and then
through the inverse Laplacian, which is its own transpose.

Steps are accepted only when they both decrease the energy and keep the
minimum interior Jacobian above the configured floor, so with the default
floor of zero a descent that starts fold-free stays fold-free.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import IO

import numpy as np

from .diffops import ddx, ddx_t, ddy, ddy_t
from .errors import SpecMismatchError, ValidationError
from .grids import DomainSpec, GridTransform, ScalarField, VectorField
from .poisson import solve_poisson_vec

REPORT_COLUMNS = ("iter", "energy", "rel_energy", "min_jac", "step")


@dataclass(frozen=True)
class ReconstructOptions:
    """Schedule of the backtracking gradient descent."""

    max_iters: int = 5000
    energy_decrease_target: float = 0.90
    initial_step: float = 1.0
    step_shrink: float = 0.5
    step_grow: float = 1.1
    min_step: float = 1e-12
    jacobian_floor: float = 0.0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValidationError("max_iters must be positive")
        if not (0.0 < self.energy_decrease_target <= 1.0):
            raise ValidationError("energy_decrease_target must lie in (0, 1]")
        if self.initial_step <= 0.0:
            raise ValidationError("initial_step must be positive")
        if not (0.0 < self.step_shrink < 1.0):
            raise ValidationError("step_shrink must lie in (0, 1)")
        if self.step_grow <= 1.0:
            raise ValidationError("step_grow must exceed 1")
        if self.min_step <= 0.0:
            raise ValidationError("min_step must be positive")


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    energy: float
    rel_energy: float
    min_jacobian: float
    step: float


@dataclass
class ConvergenceReport:
    """Accepted-iteration trace of one reconstruction run."""

    records: list[IterationRecord] = field(default_factory=list)
    stopping_reason: str = ""

    STOP_REASONS = ("target_reached", "max_iters", "step_underflow")

    @property
    def final_energy(self) -> float:
        return self.records[-1].energy

    @property
    def energy_decrease(self) -> float:
        """Fraction of the initial energy removed by the run."""
        return 1.0 - self.records[-1].rel_energy

    def write_csv(self, out: IO[str]) -> None:
        writer = csv.writer(out)
        writer.writerow(REPORT_COLUMNS)
        for r in self.records:
            writer.writerow(
                [r.iteration, repr(r.energy), repr(r.rel_energy),
                 repr(r.min_jacobian), repr(r.step)]
            )


def _require_matching(spec: DomainSpec, *others) -> None:
    for o in others:
        if o.spec != spec:
            raise SpecMismatchError(f"grid specs differ: {spec} vs {o.spec}")


def _residuals(coords: np.ndarray, spec: DomainSpec, f0: np.ndarray, g0: np.ndarray):
    """Jacobian/curl residuals plus the four partials of the map."""
    px = coords[:, :, 0]
    py = coords[:, :, 1]
    a = ddx(px, spec)
    b = ddy(py, spec)
    c = ddy(px, spec)
    d = ddx(py, spec)
    r_j = a * b - c * d
    r_j -= f0
    r_c = d - c - g0
    return r_j, r_c, a, b, c, d


def _energy_value(r_j: np.ndarray, r_c: np.ndarray, spec: DomainSpec) -> float:
    return 0.5 * float(np.sum(r_j * r_j) + np.sum(r_c * r_c)) * spec.hx * spec.hy


def energy(g: GridTransform, f0: ScalarField, g0: ScalarField) -> float:
    """Discrete misfit energy of a map against target Jacobian and curl fields."""
    _require_matching(g.spec, f0, g0)
    r_j, r_c, *_ = _residuals(g.coords, g.spec, f0.values, g0.values)
    return _energy_value(r_j, r_c, g.spec)


def apply_control(phi0: GridTransform, F: VectorField) -> GridTransform:
    """phi0 plus the displacement obtained by solving Laplace(u) = F."""
    _require_matching(phi0.spec, F)
    u = solve_poisson_vec(F)
    return GridTransform(phi0.spec, phi0.coords + u.values)


def _gradient_from_residuals(
    spec: DomainSpec,
    r_j: np.ndarray,
    r_c: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    d: np.ndarray,
) -> VectorField:
    """Pull residuals back to the control field through the adjoint chain."""
    w = spec.hx * spec.hy
    de_dpx = w * (ddx_t(r_j * b, spec) - ddy_t(r_j * d, spec) - ddy_t(r_c, spec))
    de_dpy = w * (ddy_t(r_j * a, spec) - ddx_t(r_j * c, spec) + ddx_t(r_c, spec))
    de_du = VectorField(spec, np.stack([de_dpx, de_dpy], axis=-1))
    return solve_poisson_vec(de_du)


def energy_gradient(
    phi0: GridTransform, F: VectorField, f0: ScalarField, g0: ScalarField
) -> VectorField:
    """Exact gradient of the discrete energy with respect to the control field.

    Zero on boundary nodes, consistent with the solver ignoring boundary
    samples of F.
    """
    _require_matching(phi0.spec, F, f0, g0)
    phi = apply_control(phi0, F)
    r_j, r_c, a, b, c, d = _residuals(phi.coords, phi0.spec, f0.values, g0.values)
    return _gradient_from_residuals(phi0.spec, r_j, r_c, a, b, c, d)


def _min_interior(values: np.ndarray) -> float:
    return float(np.min(values[1:-1, 1:-1]))


def reconstruct(
    phi_init: GridTransform,
    f0: ScalarField,
    g0: ScalarField,
    opts: ReconstructOptions | None = None,
) -> tuple[GridTransform, ConvergenceReport]:
    """Gradient descent on the control field from phi_init toward (f0, g0).

    Stops when the energy has decreased by the target fraction, the
    iteration budget is exhausted, or backtracking underflows the minimum
    step.  Returns the final grid and the per-iteration report.
    """
    if opts is None:
        opts = ReconstructOptions()
    _require_matching(phi_init.spec, f0, g0)
    if np.any(f0.values <= 0.0):
        raise ValidationError(
            f"f0 must be strictly positive (min value {float(f0.values.min()):.4g})"
        )

    spec = phi_init.spec
    f0v, g0v = f0.values, g0.values

    coords = phi_init.coords
    r_j, r_c, a, b, c, d = _residuals(coords, spec, f0v, g0v)
    e_current = _energy_value(r_j, r_c, spec)
    e_initial = e_current
    e_target = (1.0 - opts.energy_decrease_target) * e_initial
    min_jac = _min_interior(r_j + f0v)

    def rel(e: float) -> float:
        return e / e_initial if e_initial > 0.0 else 0.0

    report = ConvergenceReport()
    report.records.append(IterationRecord(0, e_current, rel(e_current), min_jac, 0.0))

    if e_current <= e_target:
        report.stopping_reason = "target_reached"
        return phi_init, report

    u = np.zeros((spec.nx, spec.ny, 2))
    step = opts.initial_step
    report.stopping_reason = "max_iters"

    for it in range(1, opts.max_iters + 1):
        grad = _gradient_from_residuals(spec, r_j, r_c, a, b, c, d)
        u_step = solve_poisson_vec(grad).values

        accepted = False
        while step >= opts.min_step:
            u_cand = u - step * u_step
            coords_cand = phi_init.coords + u_cand
            r_j, r_c, a, b, c, d = _residuals(coords_cand, spec, f0v, g0v)
            e_cand = _energy_value(r_j, r_c, spec)
            min_jac = _min_interior(r_j + f0v)
            if e_cand < e_current and min_jac > opts.jacobian_floor:
                accepted = True
                break
            step *= opts.step_shrink

        if not accepted:
            # Re-establish residuals of the last accepted point for callers.
            r_j, r_c, a, b, c, d = _residuals(phi_init.coords + u, spec, f0v, g0v)
            report.stopping_reason = "step_underflow"
            break

        u = u_cand
        e_current = e_cand
        report.records.append(IterationRecord(it, e_current, rel(e_current), min_jac, step))
        if e_current <= e_target:
            report.stopping_reason = "target_reached"
            break
        step *= opts.step_grow

    final = GridTransform(spec, phi_init.coords + u)
    return final, report
