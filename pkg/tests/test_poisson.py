import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import diffavg.poisson as poisson
from diffavg.errors import SolverError, ValidationError
from diffavg.grids import DomainSpec, ScalarField, VectorField
from diffavg.poisson import apply_laplacian, solve_poisson, solve_poisson_vec


def eigenfunction_pair(spec):
    xx, yy = spec.mesh()
    u = np.sin(np.pi * xx) * np.sin(np.pi * yy)
    f = -2 * np.pi**2 * u
    return ScalarField(spec, f), u


class TestSolvePoisson:
    def test_zero_rhs_gives_zero(self):
        spec = DomainSpec(17, 17)
        u = solve_poisson(ScalarField.constant(spec, 0.0))
        assert np.all(u.values == 0.0)

    @pytest.mark.parametrize("method", ["dst", "cg"])
    def test_eigenfunction_accuracy(self, method):
        spec = DomainSpec(33, 33)
        f, exact = eigenfunction_pair(spec)
        u = solve_poisson(f, method=method).values
        assert np.max(np.abs(u - exact)) < 1e-3

    def test_eigenfunction_second_order(self):
        errs = []
        for n in (17, 33, 65):
            spec = DomainSpec(n, n)
            f, exact = eigenfunction_pair(spec)
            u = solve_poisson(f).values
            errs.append(np.max(np.abs(u - exact)))
        for coarse, fine in zip(errs, errs[1:]):
            assert 3.5 <= coarse / fine <= 4.5

    def test_rectangular_grid(self):
        spec = DomainSpec(21, 41)
        f, exact = eigenfunction_pair(spec)
        u = solve_poisson(f).values
        assert np.max(np.abs(u - exact)) < 5e-3
        # residual contract holds on non-square node counts too
        resid = apply_laplacian(u, spec) - f.values[1:-1, 1:-1]
        assert np.max(np.abs(resid)) <= 1e-10 * np.max(np.abs(f.values))

    def test_zero_boundary(self, rng):
        spec = DomainSpec(13, 19)
        f = ScalarField(spec, rng.standard_normal(spec.shape))
        u = solve_poisson(f).values
        assert np.all(u[0, :] == 0) and np.all(u[-1, :] == 0)
        assert np.all(u[:, 0] == 0) and np.all(u[:, -1] == 0)

    def test_boundary_samples_of_rhs_ignored(self, rng):
        spec = DomainSpec(13, 13)
        f1 = rng.standard_normal(spec.shape)
        f2 = np.array(f1)
        f2[0, :] = 99.0
        u1 = solve_poisson(ScalarField(spec, f1)).values
        u2 = solve_poisson(ScalarField(spec, f2)).values
        assert np.array_equal(u1, u2)

    def test_linearity(self, rng):
        spec = DomainSpec(17, 17)
        f1 = ScalarField(spec, rng.standard_normal(spec.shape))
        f2 = ScalarField(spec, rng.standard_normal(spec.shape))
        a, b = 1.7, -0.4
        lhs = solve_poisson(ScalarField(spec, a * f1.values + b * f2.values)).values
        rhs = a * solve_poisson(f1).values + b * solve_poisson(f2).values
        assert np.max(np.abs(lhs - rhs)) <= 1e-12

    def test_dst_and_cg_agree(self, rng):
        spec = DomainSpec(15, 23)
        f = ScalarField(spec, rng.standard_normal(spec.shape))
        u_dst = solve_poisson(f, method="dst").values
        u_cg = solve_poisson(f, method="cg").values
        assert np.max(np.abs(u_dst - u_cg)) < 1e-10

    def test_unknown_method(self):
        with pytest.raises(ValidationError):
            solve_poisson(ScalarField.constant(DomainSpec(5, 5), 0.0), method="jacobi")

    def test_cg_iteration_cap_reported(self, rng, monkeypatch):
        monkeypatch.setattr(poisson, "CG_ITER_FACTOR", 0)
        spec = DomainSpec(17, 17)
        f = ScalarField(spec, rng.standard_normal(spec.shape))
        with pytest.raises(SolverError, match="residual"):
            solve_poisson(f, method="cg")


class TestSelfAdjointness:
    def test_inner_product_identity(self, rng):
        spec = DomainSpec(21, 17)
        for _ in range(5):
            a = np.zeros(spec.shape)
            b = np.zeros(spec.shape)
            a[1:-1, 1:-1] = rng.standard_normal((spec.nx - 2, spec.ny - 2))
            b[1:-1, 1:-1] = rng.standard_normal((spec.nx - 2, spec.ny - 2))
            ua = solve_poisson(ScalarField(spec, a)).values
            ub = solve_poisson(ScalarField(spec, b)).values
            lhs = float(np.sum(ua[1:-1, 1:-1] * b[1:-1, 1:-1]))
            rhs = float(np.sum(a[1:-1, 1:-1] * ub[1:-1, 1:-1]))
            assert abs(lhs - rhs) <= 1e-9 * max(abs(lhs), abs(rhs))


class TestMaximumPrinciple:
    @given(st.integers(0, 2**31 - 1))
    def test_nonpositive_rhs_gives_nonnegative_solution(self, seed):
        rng = np.random.default_rng(seed)
        spec = DomainSpec(int(rng.integers(3, 20)), int(rng.integers(3, 20)))
        f = -np.abs(rng.standard_normal(spec.shape))
        u = solve_poisson(ScalarField(spec, f)).values
        assert np.min(u) >= -1e-12 * max(1.0, float(np.max(np.abs(f))))


class TestVectorSolve:
    def test_zero(self):
        spec = DomainSpec(9, 9)
        u = solve_poisson_vec(VectorField.zero(spec))
        assert np.all(u.values == 0.0)

    def test_componentwise_analytic(self):
        spec = DomainSpec(33, 33)
        f, exact = eigenfunction_pair(spec)
        F = VectorField(spec, np.stack([f.values, np.zeros(spec.shape)], axis=-1))
        u = solve_poisson_vec(F).values
        assert np.max(np.abs(u[:, :, 0] - exact)) < 1e-3
        assert np.all(u[:, :, 1] == 0.0)

    def test_component_swap(self, rng):
        spec = DomainSpec(11, 11)
        F = VectorField(spec, rng.standard_normal((11, 11, 2)))
        swapped = VectorField(spec, F.values[:, :, ::-1])
        u = solve_poisson_vec(F).values
        u_swapped = solve_poisson_vec(swapped).values
        assert np.array_equal(u[:, :, ::-1], u_swapped)

    def test_displacement_invariant(self, rng):
        spec = DomainSpec(11, 15)
        u = solve_poisson_vec(VectorField(spec, rng.standard_normal((11, 15, 2))))
        assert u.is_zero_on_boundary()
