import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from diffavg.grids import DomainSpec, GridTransform, identity_grid

settings.register_profile(
    "diffavg",
    max_examples=25,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("diffavg")


def perturbed_grid(spec: DomainSpec, rng: np.random.Generator, scale: float = 0.02) -> GridTransform:
    """Identity plus interior node noise; pinned boundary, not necessarily fold-free."""
    coords = np.array(spec.identity_coords())
    coords[1:-1, 1:-1, :] += scale * rng.standard_normal((spec.nx - 2, spec.ny - 2, 2))
    return GridTransform(spec, coords)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260810)


@pytest.fixture
def spec9() -> DomainSpec:
    return DomainSpec(9, 9)


@pytest.fixture
def id9(spec9) -> GridTransform:
    return identity_grid(spec9)
