import json

import numpy as np
import pytest
from conftest import random_unit_points
from hypothesis import given, settings
from hypothesis import strategies as st

from embedded_newton.constraints import restricted_hessian
from embedded_newton.errors import LeftDomain, NearChartPole, ZeroVector
from embedded_newton.families import gen_bipyramid
from embedded_newton.riesz import riesz_cost
from embedded_newton.sphere import (
    SPHERE_PRODUCT,
    Configuration,
    blocks,
    product_frame,
    project_to_tangent,
    retract,
    stereographic_frame_vectors,
)


def test_frame_vectors_at_south_pole():
    e1, e2 = stereographic_frame_vectors([0.0, 0.0, -1.0])
    np.testing.assert_array_equal(e1, [2, 0, 0])
    np.testing.assert_array_equal(e2, [0, 2, 0])


def test_frame_vectors_on_equator():
    e1, e2 = stereographic_frame_vectors([1.0, 0.0, 0.0])
    np.testing.assert_array_equal(e1, [0, 0, 1])
    np.testing.assert_array_equal(e2, [0, 1, 0])


def test_north_chart_refuses_points_near_its_pole():
    with pytest.raises(NearChartPole):
        stereographic_frame_vectors([0.0, 0.1, np.sqrt(0.99)])
    with pytest.raises(NearChartPole):
        stereographic_frame_vectors([0.0, 0.1, -np.sqrt(0.99)], chart="south")


unit_vectors = st.tuples(*[st.floats(-1, 1)] * 3).map(np.array).filter(lambda v: np.linalg.norm(v) > 0.1).map(
    lambda v: v / np.linalg.norm(v)
)


@given(unit_vectors)
@settings(max_examples=200, deadline=None)
def test_frame_vectors_are_tangent_and_independent(q):
    for chart, ok in (("north", q[2] < 0.9), ("south", q[2] > -0.9)):
        if not ok:
            continue
        e1, e2 = stereographic_frame_vectors(q, chart)
        assert abs(e1 @ q) < 1e-12 and abs(e2 @ q) < 1e-12
        assert np.linalg.norm(np.cross(e1, e2)) > 1e-3


def test_product_frame_uses_north_chart_in_southern_hemisphere(rng):
    pts = blocks(random_unit_points(rng)).copy()
    pts[:, 2] = -np.abs(pts[:, 2])
    x = pts.ravel()
    np.testing.assert_array_equal(product_frame(x).basis, product_frame(x, charts=["north"] * 4).basis)


def test_product_frame_switches_chart_near_north_pole():
    x = gen_bipyramid(0.0).ambient.reshape(4, 3)
    x[0] = [0.0, 0.1, np.sqrt(0.99)]
    frame = product_frame(x.ravel())
    e1, e2 = stereographic_frame_vectors(x[0], "south")
    np.testing.assert_array_equal(frame.basis[0, :3], e1)
    np.testing.assert_array_equal(frame.basis[1, :3], e2)


def test_bipyramid_frame_is_tangent():
    x = gen_bipyramid(0.0).ambient
    frame = product_frame(x)
    assert frame.basis.shape == (8, 12)
    assert np.max(np.abs(frame.basis @ SPHERE_PRODUCT.gradient(x).T)) < 1e-12
    frame.validate(SPHERE_PRODUCT, x)


def test_chart_choice_preserves_inertia_and_operator_spectrum(rng):
    # raw h_ij eigenvalues depend on the frame; inertia and the spectrum of
    # the Hessian operator (h relative to the frame Gram matrix) do not
    cost = riesz_cost(1.0)
    x = random_unit_points(rng, z_max=0.85)
    x = x.reshape(4, 3)
    x[:, 2] = np.clip(x[:, 2], -0.85, 0.85)
    x /= np.linalg.norm(x, axis=1)[:, None]
    x = x.ravel()
    spectra, inertias = [], []
    for charts in (["north"] * 4, ["south"] * 4, ["north", "south", "north", "south"]):
        frame = product_frame(x, charts=charts)
        h = restricted_hessian(SPHERE_PRODUCT, cost, frame, x)
        gram = frame.basis @ frame.basis.T
        chol = np.linalg.cholesky(gram)
        inv = np.linalg.inv(chol)
        spectra.append(np.linalg.eigvalsh(inv @ h @ inv.T))
        ev = np.linalg.eigvalsh(h)
        inertias.append((np.sum(ev < 0), np.sum(ev > 0)))
    for spec in spectra[1:]:
        np.testing.assert_allclose(spec, spectra[0], atol=1e-8)
    assert len(set(inertias)) == 1


def test_retract_zero_is_identity(rng):
    x = random_unit_points(rng)
    np.testing.assert_allclose(retract(x, np.zeros(12)), x, rtol=0, atol=1e-15)
    cfg = Configuration(blocks(x))
    assert isinstance(retract(cfg, np.zeros(12)), Configuration)


def test_retract_normalizes():
    x = gen_bipyramid(0.0).ambient.reshape(4, 3)
    x[0] = [1.0, 0.0, 0.0]
    v = np.zeros((4, 3))
    v[0] = [0.0, 1.0, 0.0]
    out = retract(x.ravel(), v.ravel()).reshape(4, 3)
    np.testing.assert_allclose(out[0], [1 / np.sqrt(2), 1 / np.sqrt(2), 0.0], rtol=0, atol=1e-16)


def test_retract_first_order_agreement(rng):
    x = random_unit_points(rng)
    v = project_to_tangent(x, rng.standard_normal(12))
    t = 1e-6
    deriv = (retract(x, t * v) - retract(x, -t * v)) / (2 * t)
    np.testing.assert_allclose(deriv, v, atol=1e-6)


def test_retract_restores_unit_norm(rng):
    x = random_unit_points(rng)
    out = retract(x, rng.standard_normal(12))
    assert np.max(np.abs(np.linalg.norm(blocks(out), axis=1) - 1.0)) <= 2.5e-16


def test_retract_rejects_origin():
    x = gen_bipyramid(0.0).ambient
    v = np.zeros(12)
    v[:3] = -x[:3]
    with pytest.raises(ZeroVector):
        retract(x, v)


def test_configuration_json_round_trip():
    cfg = gen_bipyramid(0.3)
    back = Configuration.from_json(cfg.to_json())
    np.testing.assert_allclose(back.points, cfg.points, rtol=0, atol=1e-15)
    assert len(json.loads(cfg.to_json())) == 4


def test_configuration_json_renormalizes_within_tolerance():
    pts = gen_bipyramid(0.0).points * (1 + 5e-10)
    cfg = Configuration.from_json(json.dumps(pts.tolist()))
    np.testing.assert_allclose(np.linalg.norm(cfg.points, axis=1), 1.0, atol=1e-15)
    with pytest.raises(ValueError):
        Configuration.from_json(json.dumps((gen_bipyramid(0.0).points * 1.01).tolist()))


def test_configuration_rejects_collisions():
    pts = gen_bipyramid(0.0).points.copy()
    pts[1] = pts[0]
    with pytest.raises(LeftDomain):
        Configuration.from_points(pts)
    pts = gen_bipyramid(0.0).points.copy()
    pts[2] = [0.0, 0.0, 1.0]
    with pytest.raises(LeftDomain):
        Configuration.from_points(pts)
