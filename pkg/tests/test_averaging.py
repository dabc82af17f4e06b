import itertools

import numpy as np
import pytest

from diffavg.averaging import (
    average_diffeomorphisms,
    average_fields,
    distance_weights,
    euclidean_average,
    fold_check,
)
from diffavg.diffops import curl2d, field_integral, jacobian_det
from diffavg.errors import SpecMismatchError, ValidationError
from diffavg.grids import (
    DomainSpec,
    GridTransform,
    WeightVector,
    grid_rms_distance,
    identity_grid,
)
from diffavg.reconstruct import ReconstructOptions
from diffavg.synth import rotated_pair, synthetic_phi0


def rotation_fixture(spec, theta):
    """Unpinned global rotation of the whole grid about the domain center."""

    def rot(xx, yy):
        qx, qy = xx - 0.5, yy - 0.5
        c, s = np.cos(theta), np.sin(theta)
        return 0.5 + c * qx - s * qy, 0.5 + s * qx + c * qy

    return GridTransform.from_map(spec, rot, pin_boundary=False)


class TestAverageFields:
    def test_single_grid_passthrough(self):
        g = synthetic_phi0(DomainSpec(17, 17))
        f0, g0 = average_fields([g], WeightVector.uniform(1))
        assert np.array_equal(f0.values, jacobian_det(g).values)
        assert np.array_equal(g0.values, curl2d(g).values)

    def test_idempotence_on_identical_grids(self):
        g = synthetic_phi0(DomainSpec(17, 17))
        f0, g0 = average_fields([g, g], WeightVector.uniform(2))
        assert np.array_equal(f0.values, jacobian_det(g).values)
        assert np.array_equal(g0.values, curl2d(g).values)

    def test_weight_count_mismatch(self):
        g = identity_grid(DomainSpec(9, 9))
        with pytest.raises(ValidationError):
            average_fields([g, g], WeightVector.uniform(3))

    def test_spec_mismatch(self):
        with pytest.raises(SpecMismatchError):
            average_fields(
                [identity_grid(DomainSpec(9, 9)), identity_grid(DomainSpec(9, 11))],
                WeightVector.uniform(2),
            )

    def test_opposite_rotations_of_identity_cancel_exactly(self):
        # Rigid-region curls are equal and opposite and the Jacobians both 1,
        # so the averaged fields reproduce the identity's fields there.
        spec = DomainSpec(65, 65)
        g1, g2 = rotated_pair(identity_grid(spec), np.radians(75.0))
        f0, g0 = average_fields([g1, g2], WeightVector.uniform(2))
        xx, yy = spec.mesh()
        rigid = np.hypot(xx - 0.5, yy - 0.5) <= 0.2 - 2 * spec.hx
        assert np.max(np.abs(f0.values[rigid] - 1.0)) <= 1e-12
        assert np.max(np.abs(g0.values[rigid])) <= 1e-12

    def test_opposite_rotations_of_wavy_base(self):
        # With a wavy base the Jacobian still averages back exactly in the
        # rigid region; the curl does so up to the base's own curl content
        # scaled by 1 - cos(theta).
        spec = DomainSpec(65, 65)
        theta = np.radians(75.0)
        phi0 = synthetic_phi0(spec)
        g1, g2 = rotated_pair(phi0, theta)
        f0, g0 = average_fields([g1, g2], WeightVector.uniform(2))
        jac = jacobian_det(phi0).values
        curl = curl2d(phi0).values
        rigid = np.hypot(phi0.coords[:, :, 0] - 0.5, phi0.coords[:, :, 1] - 0.5) <= 0.2 - 3 * spec.hx
        assert np.max(np.abs((f0.values - jac)[rigid])) <= 1e-12
        curl_bound = (1 - np.cos(theta)) * np.max(np.abs(curl[rigid])) + 1e-12
        assert np.max(np.abs((g0.values - curl)[rigid])) <= curl_bound

    def test_convexity_bounds(self, rng):
        spec = DomainSpec(17, 17)
        grids = [synthetic_phi0(spec, seed=s) for s in (1, 2, 3)]
        w = WeightVector.normalized([0.5, 1.0, 2.0])
        f0, _ = average_fields(grids, w)
        jacs = np.stack([jacobian_det(g).values for g in grids])
        assert np.all(f0.values >= jacs.min(axis=0) - 1e-12)
        assert np.all(f0.values <= jacs.max(axis=0) + 1e-12)
        assert np.all(f0.values > 0.0)

    def test_integral_consistency(self):
        spec = DomainSpec(33, 33)
        grids = [synthetic_phi0(spec, seed=s) for s in (1, 2)]
        w = WeightVector.uniform(2)
        f0, _ = average_fields(grids, w)
        assert field_integral(f0) == pytest.approx(1.0, rel=0.02)
        for g in grids:
            assert field_integral(jacobian_det(g)) == pytest.approx(1.0, rel=0.02)

    def test_permutation_invariance_two_grids(self):
        spec = DomainSpec(17, 17)
        a = synthetic_phi0(spec, seed=1)
        b = synthetic_phi0(spec, seed=2)
        w = WeightVector(np.array([0.25, 0.75]))
        w_swapped = WeightVector(np.array([0.75, 0.25]))
        f0, g0 = average_fields([a, b], w)
        f0s, g0s = average_fields([b, a], w_swapped)
        assert np.array_equal(f0.values, f0s.values)
        assert np.array_equal(g0.values, g0s.values)

    def test_permutation_invariance_three_grids(self):
        spec = DomainSpec(9, 9)
        grids = [synthetic_phi0(spec, seed=s) for s in (1, 2, 3)]
        weights = np.array([0.2, 0.3, 0.5])
        f_ref, g_ref = average_fields(grids, WeightVector(weights))
        for perm in itertools.permutations(range(3)):
            f0, g0 = average_fields(
                [grids[i] for i in perm], WeightVector(weights[list(perm)])
            )
            assert np.max(np.abs(f0.values - f_ref.values)) <= 1e-15
            assert np.max(np.abs(g0.values - g_ref.values)) <= 1e-15


class TestEuclideanAverage:
    def test_identical_grids(self):
        g = synthetic_phi0(DomainSpec(17, 17))
        assert euclidean_average([g, g], WeightVector.uniform(2)) == g

    def test_half_rotation_collapses_to_center(self):
        # A cell and its 180-degree rotation average to a single point.
        spec = DomainSpec(3, 3)
        avg = euclidean_average(
            [identity_grid(spec), rotation_fixture(spec, np.pi)], WeightVector.uniform(2)
        )
        assert np.max(np.abs(avg.coords - 0.5)) <= 1e-12
        assert np.max(np.abs(jacobian_det(avg).values)) <= 1e-12

    def test_quarter_rotation_halves_cell_area(self):
        # Linear size shrinks by cos(45 deg), area by 1/2, uniformly.
        spec = DomainSpec(5, 5)
        avg = euclidean_average(
            [identity_grid(spec), rotation_fixture(spec, np.pi / 2)], WeightVector.uniform(2)
        )
        assert np.max(np.abs(jacobian_det(avg).values - 0.5)) <= 1e-12

    def test_boundary_repinned_for_pinned_inputs(self):
        spec = DomainSpec(17, 17)
        g1, g2 = rotated_pair(identity_grid(spec), 1.0)
        assert euclidean_average([g1, g2], WeightVector.uniform(2)).has_identity_boundary


class TestFoldCheck:
    def test_identity(self):
        min_jac, nonpositive = fold_check(identity_grid(DomainSpec(17, 17)))
        assert min_jac == 1.0
        assert nonpositive == 0

    def test_euclidean_average_of_opposite_rotations_folds(self):
        # Near 90 degrees the averaged window contracts to nothing.
        spec = DomainSpec(65, 65)
        g1, g2 = rotated_pair(synthetic_phi0(spec), np.radians(90.0))
        avg = euclidean_average([g1, g2], WeightVector.uniform(2))
        min_jac, nonpositive = fold_check(avg)
        assert min_jac <= 0.0
        assert nonpositive > 0

    def test_reconstruct_output_is_fold_free(self):
        phi0 = synthetic_phi0(DomainSpec(17, 17))
        out, _ = average_diffeomorphisms(
            [phi0], WeightVector.uniform(1),
            ReconstructOptions(energy_decrease_target=0.9, max_iters=20000),
        )
        _, nonpositive = fold_check(out)
        assert nonpositive == 0


class TestDistanceWeights:
    def test_symmetric_pair(self):
        g1, g2 = rotated_pair(synthetic_phi0(DomainSpec(33, 33)), np.radians(60.0))
        w = distance_weights([g1, g2])
        assert w.w[0] == pytest.approx(0.5, abs=1e-12)
        assert w.w[1] == pytest.approx(0.5, abs=1e-12)

    def test_identical_grids_fall_back_to_uniform(self):
        g = synthetic_phi0(DomainSpec(17, 17))
        assert distance_weights([g, g, g]) == WeightVector.uniform(3)

    def test_distance_ratio_normalization(self):
        # Distances d and 3d normalize to weights 1/4, 3/4.  (A K=2 grid pair
        # cannot realize unequal distances: both sit at the same RMS distance
        # from their midpoint mean, which the symmetric-pair test covers.)
        w = WeightVector.normalized([0.01, 0.03])
        assert w.w[0] == pytest.approx(0.25, abs=1e-12)
        assert w.w[1] == pytest.approx(0.75, abs=1e-12)

    def test_asymmetric_triple(self):
        # Move one node of A in x, of B in y, leave C alone: distances from
        # the uniform mean are d*sqrt(5)/3, d*sqrt(5)/3, d*sqrt(2)/3.
        spec = DomainSpec(9, 9)
        delta = 0.02
        ca = np.array(spec.identity_coords())
        cb = np.array(spec.identity_coords())
        ca[4, 4, 0] += delta
        cb[4, 4, 1] += delta
        grids = [GridTransform(spec, ca), GridTransform(spec, cb), identity_grid(spec)]
        w = distance_weights(grids)
        denom = 2 * np.sqrt(5) + np.sqrt(2)
        assert w.w[0] == pytest.approx(np.sqrt(5) / denom, abs=1e-12)
        assert w.w[1] == pytest.approx(np.sqrt(5) / denom, abs=1e-12)
        assert w.w[2] == pytest.approx(np.sqrt(2) / denom, abs=1e-12)

    def test_needs_two_grids(self):
        with pytest.raises(ValidationError):
            distance_weights([identity_grid(DomainSpec(9, 9))])


class TestAverageDiffeomorphisms:
    def test_single_grid_reconstructs_itself(self):
        phi0 = synthetic_phi0(DomainSpec(17, 17))
        out, report = average_diffeomorphisms(
            [phi0], WeightVector.uniform(1),
            ReconstructOptions(energy_decrease_target=0.99, max_iters=20000),
        )
        assert report.stopping_reason == "target_reached"
        assert grid_rms_distance(out, phi0) < 0.005

    def test_rejects_folded_input(self):
        # Cross two interior columns locally so the map folds there.
        spec = DomainSpec(9, 9)
        coords = np.array(spec.identity_coords())
        coords[4, 4, 0] = 6 * spec.hx
        coords[5, 4, 0] = 4 * spec.hx
        folded = GridTransform(spec, coords)
        assert not folded.is_diffeomorphic
        with pytest.raises(ValidationError, match="not diffeomorphic"):
            average_diffeomorphisms([folded], WeightVector.uniform(1))

    @pytest.mark.parametrize("theta_deg", [60.0, 75.0])
    def test_beats_euclidean_baseline(self, theta_deg):
        spec = DomainSpec(33, 33)
        phi0 = synthetic_phi0(spec)
        g1, g2 = rotated_pair(phi0, np.radians(theta_deg))
        w = WeightVector.uniform(2)
        averaged, report = average_diffeomorphisms(
            [g1, g2], w, ReconstructOptions(energy_decrease_target=0.99, max_iters=40000)
        )
        assert report.stopping_reason == "target_reached"
        assert averaged.min_interior_jacobian > 0.0
        euclid = euclidean_average([g1, g2], w)
        assert grid_rms_distance(averaged, phi0) < grid_rms_distance(euclid, phi0)
