"""Optimization on a level set ``S = F^{-1}(c)`` using ambient coordinates only.

Everything here works with plain ambient vectors. A :class:`ConstraintSystem`
supplies the constraint values, gradients and Hessians, a :class:`CostFunction`
supplies the same for the cost, and a :class:`TangentFrame` is a set of ambient
vectors tangent to the level set at one anchor point.
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateConstraints, FrameMismatch

INDEPENDENCE_TOL = 1e-8
ORTHOGONALITY_TOL = 1e-10


@dataclass(frozen=True)
class ConstraintSystem:
    """Constraint map ``F: R^n -> R^k`` with its first and second derivatives.

    Parameters
    ----------
    ambient_dim : int
        Dimension ``n`` of the ambient Euclidean space.
    num_constraints : int
        Number ``k`` of scalar constraints.
    value : callable
        ``x -> (k,)`` constraint values.
    gradient : callable
        ``x -> (k, n)`` array whose rows are the gradients of ``F_a``.
    hessian : callable
        ``x -> (k, n, n)`` stack of constraint Hessians.
    level : array_like, optional
        Regular value ``c`` defining the level set. Defaults to zeros.
    """

    ambient_dim: int
    num_constraints: int
    value: Callable
    gradient: Callable
    hessian: Callable
    level: tuple = None

    def __post_init__(self):
        if self.ambient_dim < 1 or self.num_constraints < 1:
            raise ValueError("ambient_dim and num_constraints must be positive")
        if self.num_constraints >= self.ambient_dim:
            raise ValueError("need fewer constraints than ambient dimensions")
        if self.level is None:
            object.__setattr__(self, "level", (0.0,) * self.num_constraints)

    @property
    def manifold_dim(self):
        return self.ambient_dim - self.num_constraints

    def residual(self, x):
        """Constraint violation ``F(x) - c``."""
        return np.asarray(self.value(x), dtype=float) - np.asarray(self.level)


@dataclass(frozen=True)
class CostFunction:
    """Smooth ambient prolongation ``G`` of the cost restricted to ``S``."""

    value: Callable
    gradient: Callable
    hessian: Callable


@dataclass(frozen=True)
class TangentFrame:
    """Ambient vectors ``b_1..b_s`` tangent to the level set at ``anchor``.

    ``basis`` has shape ``(s, n)``; row ``i`` is ``b_i``.
    """

    basis: np.ndarray
    anchor: np.ndarray

    def __post_init__(self):
        basis = np.array(self.basis, dtype=float)
        anchor = np.array(self.anchor, dtype=float)
        basis.setflags(write=False)
        anchor.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "anchor", anchor)

    @property
    def size(self):
        return self.basis.shape[0]

    def to_ambient(self, coords):
        """Assemble ``sum_j coords[j] * b_j``."""
        return np.asarray(coords, dtype=float) @ self.basis

    def coordinates_of(self, v):
        """Frame coordinates of an ambient tangent vector (least squares)."""
        coords, *_ = np.linalg.lstsq(self.basis.T, np.asarray(v, dtype=float), rcond=None)
        return coords

    def validate(self, cs, x=None):
        """Raise :class:`FrameMismatch` unless the frame is valid at ``x``.

        Checks the frame size, tangency to every constraint gradient and the
        linear independence of the basis vectors.
        """
        x = self.anchor if x is None else np.asarray(x, dtype=float)
        if self.basis.shape != (cs.manifold_dim, cs.ambient_dim):
            raise FrameMismatch(
                f"frame has shape {self.basis.shape}, expected "
                f"{(cs.manifold_dim, cs.ambient_dim)}"
            )
        if not np.allclose(x, self.anchor, rtol=0.0, atol=1e-14):
            raise FrameMismatch("frame is anchored at a different point")
        sv = np.linalg.svd(self.basis, compute_uv=False)
        if sv[0] == 0.0 or sv[-1] <= INDEPENDENCE_TOL * sv[0]:
            raise FrameMismatch("frame vectors are not linearly independent")
        grads = np.atleast_2d(cs.gradient(x))
        scale = np.linalg.norm(self.basis, axis=1)[:, None] * np.linalg.norm(grads, axis=1)[None, :]
        if np.any(np.abs(self.basis @ grads.T) > ORTHOGONALITY_TOL * scale):
            raise FrameMismatch("frame vectors are not tangent to the level set")


def gramian(cs, x):
    """Gram matrix ``<grad F_a, grad F_b>`` of the constraint gradients."""
    grads = np.atleast_2d(cs.gradient(x))
    return grads @ grads.T


def _check_independent(grads):
    sv = np.linalg.svd(grads, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] <= INDEPENDENCE_TOL * sv[0]:
        raise DegenerateConstraints(
            f"constraint gradients are dependent (singular values {sv[-1]:.3e}/{sv[0]:.3e})"
        )


def lagrange_multipliers(cs, cost, x, method="solve"):
    """Lagrange multiplier functions ``sigma_a(x)``.

    They are the coefficients of the orthogonal projection of ``grad G`` onto
    the span of the constraint gradients, i.e. the solution of
    ``Sigma sigma = (<grad G, grad F_a>)_a`` with ``Sigma`` the Gramian.

    Parameters
    ----------
    cs : ConstraintSystem
    cost : CostFunction
    x : array_like, shape (n,)
    method : {"solve", "determinant"}
        ``"solve"`` uses a linear solve of the Gramian system. ``"determinant"``
        evaluates the ratio of Gramian determinants directly (Cramer's rule);
        it is kept for cross-checking only.

    Returns
    -------
    ndarray, shape (k,)
    """
    x = np.asarray(x, dtype=float)
    grads = np.atleast_2d(cs.gradient(x))
    _check_independent(grads)
    gram = grads @ grads.T
    rhs = grads @ np.asarray(cost.gradient(x), dtype=float)
    if method == "solve":
        return np.linalg.solve(gram, rhs)
    if method == "determinant":
        denom = np.linalg.det(gram)
        sigma = np.empty(len(rhs))
        for a in range(len(rhs)):
            # replace F_a by G in the a-th slot
            swapped = gram.copy()
            swapped[:, a] = rhs
            sigma[a] = np.linalg.det(swapped) / denom
        return sigma
    raise ValueError(f"unknown method {method!r}")


def embedded_gradient(cs, cost, x):
    """Embedded gradient ``grad G - sum_a sigma_a grad F_a``.

    On the level set this is the Riemannian gradient of the restricted cost;
    it is orthogonal to every constraint gradient.
    """
    x = np.asarray(x, dtype=float)
    sigma = lagrange_multipliers(cs, cost, x)
    grads = np.atleast_2d(cs.gradient(x))
    return np.asarray(cost.gradient(x), dtype=float) - sigma @ grads


def frame_gradient_coords(cs, cost, frame, x):
    """Coordinate functions ``g_i = dG(x) . b_i``."""
    x = np.asarray(x, dtype=float)
    frame.validate(cs, x)
    return frame.basis @ np.asarray(cost.gradient(x), dtype=float)


def constrained_ambient_hessian(cs, cost, x, sigma=None):
    """``Hess G - sum_a sigma_a Hess F_a`` as an ``(n, n)`` ambient matrix."""
    x = np.asarray(x, dtype=float)
    if sigma is None:
        sigma = lagrange_multipliers(cs, cost, x)
    hess = np.array(cost.hessian(x), dtype=float)
    hess -= np.tensordot(sigma, np.asarray(cs.hessian(x), dtype=float), axes=1)
    return hess


def restricted_hessian(cs, cost, frame, x):
    """Hessian components ``h_ij`` of the restricted cost in the frame.

    ``h_ij = (Hess G - sum_a sigma_a Hess F_a)(b_i, b_j)``, returned as an
    exactly symmetric ``(s, s)`` matrix.
    """
    x = np.asarray(x, dtype=float)
    frame.validate(cs, x)
    h = frame.basis @ constrained_ambient_hessian(cs, cost, x) @ frame.basis.T
    return 0.5 * (h + h.T)
