"""Four free unit vectors plus a point pinned at the north pole.

The ambient space is ``R^12``: the concatenation of the free points
``p_1..p_4``. The fifth point ``p_5 = (0, 0, 1)`` is data, not a variable.
"""
import json
from dataclasses import dataclass

import numpy as np

from .constraints import ConstraintSystem, TangentFrame
from .errors import LeftDomain, NearChartPole, ZeroVector

NUM_FREE = 4
AMBIENT_DIM = 3 * NUM_FREE
NORTH_POLE = np.array([0.0, 0.0, 1.0])
NORTH_POLE.setflags(write=False)

MIN_SEPARATION = 1e-6
CHART_SWITCH_MARGIN = 0.1
UNIT_TOL = 1e-12
LOAD_UNIT_TOL = 1e-9


def blocks(x):
    """View an ambient vector as a ``(4, 3)`` array of free points."""
    return np.asarray(x, dtype=float).reshape(NUM_FREE, 3)


def all_points(x):
    """All five points, free points first and the pole last."""
    return np.vstack([blocks(x), NORTH_POLE])


def min_separation(x):
    pts = all_points(x)
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    return dist[np.triu_indices(len(pts), k=1)].min()


def check_domain(x, min_sep=MIN_SEPARATION):
    """Raise :class:`LeftDomain` if two of the five points nearly coincide."""
    sep = min_separation(x)
    if not sep > min_sep:
        raise LeftDomain(f"points closer than {min_sep:g} (min separation {sep:.3e})")


@dataclass(frozen=True)
class Configuration:
    """Positions of the four free points on the unit sphere.

    Construct with :meth:`from_points` or :meth:`from_ambient` to get
    validation; the raw constructor only stores the array.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(NUM_FREE, 3)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_points(cls, points, tol=UNIT_TOL, normalize=False):
        pts = np.array(points, dtype=float)
        if pts.shape != (NUM_FREE, 3):
            raise ValueError(f"expected {NUM_FREE} points in R^3, got shape {pts.shape}")
        norms = np.linalg.norm(pts, axis=1)
        if np.any(np.abs(norms - 1.0) > tol):
            raise ValueError(f"points are not unit vectors (norms {norms})")
        if normalize:
            pts = pts / norms[:, None]
        check_domain(pts.ravel())
        return cls(pts)

    @classmethod
    def from_ambient(cls, x, tol=UNIT_TOL):
        return cls.from_points(blocks(x), tol=tol)

    @property
    def ambient(self):
        return self.points.ravel().copy()

    @property
    def all_points(self):
        return all_points(self.points)

    def to_json(self):
        return json.dumps(self.points.tolist())

    @classmethod
    def from_json(cls, text):
        """Load a JSON array of four ``[x, y, z]`` triples.

        Each triple must be a unit vector to within ``1e-9``; it is then
        re-normalized to full precision.
        """
        return cls.from_points(json.loads(text), tol=LOAD_UNIT_TOL, normalize=True)


def as_ambient(x):
    if isinstance(x, Configuration):
        return x.ambient
    x = np.asarray(x, dtype=float)
    if x.shape == (NUM_FREE, 3):
        return x.ravel()
    if x.shape != (AMBIENT_DIM,):
        raise ValueError(f"expected an ambient {AMBIENT_DIM}-vector, got shape {x.shape}")
    return x


def _constraint_value(x):
    return 0.5 * np.sum(blocks(x) ** 2, axis=1)


def _constraint_gradient(x):
    grads = np.zeros((NUM_FREE, AMBIENT_DIM))
    for i, p in enumerate(blocks(x)):
        grads[i, 3 * i:3 * i + 3] = p
    return grads


def _constraint_hessian(x):
    hess = np.zeros((NUM_FREE, AMBIENT_DIM, AMBIENT_DIM))
    for i in range(NUM_FREE):
        hess[i, 3 * i:3 * i + 3, 3 * i:3 * i + 3] = np.eye(3)
    return hess


SPHERE_PRODUCT = ConstraintSystem(
    ambient_dim=AMBIENT_DIM,
    num_constraints=NUM_FREE,
    value=_constraint_value,
    gradient=_constraint_gradient,
    hessian=_constraint_hessian,
    level=(0.5,) * NUM_FREE,
)


def sphere_product_constraints():
    """Constraints ``F_i(p) = |p_i|^2 / 2`` at level ``1/2``."""
    return SPHERE_PRODUCT


def stereographic_frame_vectors(q, chart="north", margin=CHART_SWITCH_MARGIN):
    """Coordinate vector fields of a stereographic chart at ``q``.

    The north chart projects from ``(0, 0, 1)`` and gives
    ``e_1 = (1 - z - x^2, -xy, x(1 - z))`` and
    ``e_2 = (-xy, 1 - z - y^2, y(1 - z))``. The south chart is the mirror
    image under ``z -> -z``.

    Raises
    ------
    NearChartPole
        If ``q`` is within ``margin`` (in ``z``) of the chart's pole.
    """
    x, y, z = np.asarray(q, dtype=float)
    if chart == "north":
        if z > 1.0 - margin:
            raise NearChartPole(f"z = {z:.6f} too close to the north pole")
        e1 = np.array([1 - z - x * x, -x * y, x * (1 - z)])
        e2 = np.array([-x * y, 1 - z - y * y, y * (1 - z)])
    elif chart == "south":
        if z < -1.0 + margin:
            raise NearChartPole(f"z = {z:.6f} too close to the south pole")
        e1 = np.array([1 + z - x * x, -x * y, -x * (1 + z)])
        e2 = np.array([-x * y, 1 + z - y * y, -y * (1 + z)])
    else:
        raise ValueError(f"unknown chart {chart!r}")
    return e1, e2


def select_chart(q, margin=CHART_SWITCH_MARGIN):
    return "north" if q[2] <= 1.0 - margin else "south"


def product_frame(x, charts=None):
    """Frame ``b_1..b_8`` on the product of spheres at ``x``.

    ``b_{2i-1}`` and ``b_{2i}`` carry the two stereographic vectors of point
    ``i`` in block ``i`` and zeros elsewhere. Each point uses the north chart
    unless it sits above ``z = 0.9``, in which case the south chart is used.
    ``charts`` overrides the per-point choice.
    """
    x = as_ambient(x)
    pts = blocks(x)
    margin = CHART_SWITCH_MARGIN
    if charts is None:
        charts = [select_chart(p) for p in pts]
    else:
        # explicit charts are honoured anywhere except the projection pole itself
        margin = 0.0
    basis = np.zeros((2 * NUM_FREE, AMBIENT_DIM))
    for i, (p, chart) in enumerate(zip(pts, charts)):
        e1, e2 = stereographic_frame_vectors(p, chart, margin=margin)
        basis[2 * i, 3 * i:3 * i + 3] = e1
        basis[2 * i + 1, 3 * i:3 * i + 3] = e2
    return TangentFrame(basis, x)


def retract(x, v):
    """Blockwise normalization ``(p_i + v_i) / |p_i + v_i|``.

    Returns the same type as ``x`` (a :class:`Configuration` or an array).
    """
    shifted = blocks(as_ambient(x)) + blocks(v)
    norms = np.linalg.norm(shifted, axis=1)
    if np.any(norms == 0.0):
        raise ZeroVector("retraction block landed at the origin")
    out = shifted / norms[:, None]
    if isinstance(x, Configuration):
        return Configuration(out)
    return out.ravel()


def project_to_tangent(x, v):
    """Remove the radial component of each block of ``v``."""
    pts = blocks(as_ambient(x))
    vb = blocks(v).copy()
    vb -= np.sum(vb * pts, axis=1)[:, None] * pts
    return vb.ravel()


def random_configuration(rng, min_sep=MIN_SEPARATION, max_tries=1000):
    """Four independent uniform points on the sphere, rejecting collisions."""
    for _ in range(max_tries):
        pts = rng.standard_normal((NUM_FREE, 3))
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        if min_separation(pts.ravel()) > min_sep:
            return pts.ravel()
    raise LeftDomain("could not draw a configuration satisfying the separation guard")


def distance_signature(x):
    """Sorted multiset of the ten pairwise distances among all five points.

    Invariant under relabeling of the free points and under rotations that
    fix the pole, so it identifies a configuration class.
    """
    pts = all_points(as_ambient(x))
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    return np.sort(dist[np.triu_indices(len(pts), k=1)])
