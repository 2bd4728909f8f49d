"""Riesz s-energy of the five points, with analytic gradient and Hessian.

``G_s(p) = sum_{i<j} |p_i - p_j|^{-s}`` over all ten pairs, including the
pairs with the fixed pole. ``s = 1`` is the Coulomb potential.
"""
import numpy as np

from .constraints import CostFunction
from .errors import SingularConfiguration
from .sphere import MIN_SEPARATION, NUM_FREE, all_points, as_ambient

PAIRS = tuple((i, j) for i in range(NUM_FREE + 1) for j in range(i + 1, NUM_FREE + 1))
_I = np.array([p[0] for p in PAIRS])
_J = np.array([p[1] for p in PAIRS])


def _check_exponent(s):
    if not s > 0:
        raise ValueError(f"Riesz exponent must be positive, got {s}")


def _pair_data(x):
    pts = all_points(as_ambient(x))
    diff = pts[_I] - pts[_J]
    r2 = np.einsum("ij,ij->i", diff, diff)
    if np.any(r2 < MIN_SEPARATION ** 2):
        raise SingularConfiguration("two points collide; energy is singular")
    return diff, r2


def energy(x, s=1.0):
    """Riesz s-energy of a configuration (or ambient 12-vector)."""
    _check_exponent(s)
    _, r2 = _pair_data(x)
    return float(np.sum(r2 ** (-0.5 * s)))


def pair_distances(x):
    """The ten pairwise distances in :data:`PAIRS` order."""
    _, r2 = _pair_data(x)
    return np.sqrt(r2)


def energy_gradient(x, s=1.0):
    """Ambient gradient; block ``i`` is ``-s sum_j (p_i - p_j) / |p_i - p_j|^{s+2}``."""
    _check_exponent(s)
    diff, r2 = _pair_data(x)
    pair_grad = (-s * r2 ** (-0.5 * s - 1.0))[:, None] * diff
    grad = np.zeros((NUM_FREE + 1, 3))
    np.add.at(grad, _I, pair_grad)
    np.add.at(grad, _J, -pair_grad)
    return grad[:NUM_FREE].ravel()


def energy_hessian(x, s=1.0):
    """Ambient ``12 x 12`` Hessian assembled from 3x3 pair blocks."""
    _check_exponent(s)
    diff, r2 = _pair_data(x)
    n = NUM_FREE + 1
    full = np.zeros((3 * n, 3 * n))
    eye = np.eye(3)
    for (i, j), d, rr in zip(PAIRS, diff, r2):
        block = -s * rr ** (-0.5 * s - 1.0) * eye + s * (s + 2.0) * rr ** (-0.5 * s - 2.0) * np.outer(d, d)
        si, sj = slice(3 * i, 3 * i + 3), slice(3 * j, 3 * j + 3)
        full[si, si] += block
        full[sj, sj] += block
        full[si, sj] -= block
        full[sj, si] -= block
    hess = full[:3 * NUM_FREE, :3 * NUM_FREE]
    return 0.5 * (hess + hess.T)


def riesz_cost(s=1.0):
    """:class:`CostFunction` for the Riesz s-energy at fixed exponent."""
    _check_exponent(s)
    return CostFunction(
        value=lambda x: energy(x, s),
        gradient=lambda x: energy_gradient(x, s),
        hessian=lambda x: energy_hessian(x, s),
    )


def critical_residual(x, s=1.0):
    """Residual of ``sum_{j != i} (p_j - <p_j, p_i> p_i) / |p_i - p_j|^{s+2}`` for i=1..4.

    Vanishes exactly at critical configurations; returned as a 12-vector.
    """
    _check_exponent(s)
    pts = all_points(as_ambient(x))
    out = np.zeros((NUM_FREE, 3))
    for i in range(NUM_FREE):
        for j in range(NUM_FREE + 1):
            if j == i:
                continue
            d = pts[i] - pts[j]
            out[i] += (pts[j] - (pts[j] @ pts[i]) * pts[i]) / (d @ d) ** (0.5 * s + 1.0)
    return out.ravel()
