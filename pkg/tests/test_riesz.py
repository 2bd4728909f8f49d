import math

import numpy as np
import pytest
from conftest import central_gradient, central_jacobian, random_unit_points
from hypothesis import given, settings
from hypothesis import strategies as st

from embedded_newton.constraints import embedded_gradient
from embedded_newton.errors import SingularConfiguration
from embedded_newton.families import gen_bipyramid, gen_pentagon, gen_pyramid, solve_pyramid_height
from embedded_newton.riesz import (
    critical_residual,
    energy,
    energy_gradient,
    energy_hessian,
    pair_distances,
    riesz_cost,
)
from embedded_newton.sphere import SPHERE_PRODUCT, all_points, blocks, project_to_tangent

BIPYRAMID_COULOMB = 0.5 + 3 * math.sqrt(2) + math.sqrt(3)


def coulomb_by_hand(x):
    pts = all_points(x)
    return sum(1 / np.linalg.norm(pts[i] - pts[j]) for i in range(5) for j in range(i + 1, 5))


def test_bipyramid_coulomb_energy():
    assert energy(gen_bipyramid(0.0), 1) == pytest.approx(BIPYRAMID_COULOMB, abs=1e-13)


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0, 7.0, 21.0])
def test_bipyramid_energy_any_s(s):
    expected = 3 / math.sqrt(3) ** s + 6 / math.sqrt(2) ** s + 1 / 2**s
    assert energy(gen_bipyramid(0.4), s) == pytest.approx(expected, rel=1e-13)


def test_pentagon_coulomb_energy():
    assert energy(gen_pentagon(0.0), 1) == pytest.approx(6.881909602, abs=1e-9)


def test_pyramid_coulomb_energy():
    assert energy(gen_pyramid(solve_pyramid_height(1.0)), 1) == pytest.approx(6.483660519, abs=2e-9)


def test_energy_counts_ten_pairs(rng):
    x = random_unit_points(rng)
    assert len(pair_distances(x)) == 10
    assert energy(x, 1) == pytest.approx(coulomb_by_hand(x), rel=1e-14)


def test_coincident_points_are_singular():
    x = gen_bipyramid(0.0).ambient.reshape(4, 3)
    x[1] = x[0]
    with pytest.raises(SingularConfiguration):
        energy(x.ravel(), 1)
    with pytest.raises(ValueError):
        energy(gen_bipyramid(0.0), 0.0)


def test_coulomb_gradient_by_hand(rng):
    x = random_unit_points(rng)
    pts = all_points(x)
    expected = np.zeros((4, 3))
    for i in range(4):
        for j in range(5):
            if j != i:
                d = pts[i] - pts[j]
                expected[i] -= d / np.linalg.norm(d) ** 3
    np.testing.assert_allclose(energy_gradient(x, 1), expected.ravel(), rtol=1e-13)


@pytest.mark.parametrize("s", [1.0, 3.0, 12.0])
def test_gradient_matches_finite_differences(rng, s):
    x = random_unit_points(rng) * rng.uniform(0.8, 1.2, 12)
    fd = central_gradient(lambda y: energy(y, s), x, h=1e-6)
    an = energy_gradient(x, s)
    assert np.linalg.norm(fd - an) <= 1e-6 * np.linalg.norm(an)


@pytest.mark.parametrize("s", [1.0, 2.0, 15.0])
def test_hessian_matches_finite_differences(rng, s):
    x = random_unit_points(rng)
    fd = central_jacobian(lambda y: energy_gradient(y, s), x, h=1e-6)
    an = energy_hessian(x, s)
    assert np.linalg.norm(fd - an) <= 1e-4 * np.linalg.norm(an)
    assert np.array_equal(an, an.T)


def test_directional_derivative_along_tangent(rng):
    x = random_unit_points(rng)
    w = project_to_tangent(x, rng.standard_normal(12))
    h = 1e-6
    fd = (energy(x + h * w, 2.5) - energy(x - h * w, 2.5)) / (2 * h)
    an = energy_gradient(x, 2.5) @ w
    assert abs(fd - an) <= 1e-6 * max(1.0, abs(an))


def rot_z(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])


@given(theta=st.floats(0, 2 * math.pi), s=st.floats(0.1, 30), seed=st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_rotation_and_permutation_invariance(theta, s, seed):
    rng = np.random.default_rng(seed)
    x = random_unit_points(rng)
    base = energy(x, s)
    rotated = (blocks(x) @ rot_z(theta).T).ravel()
    assert energy(rotated, s) == pytest.approx(base, rel=1e-12)
    permuted = blocks(x)[rng.permutation(4)].ravel()
    assert energy(permuted, s) == pytest.approx(base, rel=1e-12)


@pytest.mark.parametrize("s", [1.0, 7.0])
def test_bipyramid_is_critical_for_any_s(s):
    for lam in np.linspace(-1, 1, 5):
        x = gen_bipyramid(lam).ambient
        assert np.linalg.norm(embedded_gradient(SPHERE_PRODUCT, riesz_cost(s), x)) < 1e-10
        assert np.max(np.abs(critical_residual(x, s))) < 1e-10


def test_critical_residual_is_proportional_to_embedded_gradient(rng):
    # block i of the embedded gradient equals s * (block i of the residual)
    x = random_unit_points(rng)
    for s in (1.0, 4.0):
        eg = embedded_gradient(SPHERE_PRODUCT, riesz_cost(s), x)
        np.testing.assert_allclose(eg, s * critical_residual(x, s), rtol=1e-10, atol=1e-12)
