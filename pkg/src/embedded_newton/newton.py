"""Embedded Newton iteration on a constraint level set.

Each step solves the frame-coordinate system ``h v = -g``, assembles the
ambient vector ``v = sum_j v^j b_j`` and retracts back onto the level set.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .constraints import embedded_gradient, frame_gradient_coords, restricted_hessian
from .errors import LeftDomain, SingularSystem, ZeroVector

STATUSES = ("converged", "max_iters", "singular_system", "left_domain")
FALLBACKS = ("none", "damped_gradient")


@dataclass(frozen=True)
class NewtonSettings:
    """Stopping and safeguarding parameters.

    ``step_cap`` bounds the Euclidean norm of the frame coordinates of each
    step; ``None`` disables it. ``fallback="damped_gradient"`` replaces a
    Newton step that inflates the gradient norm more than tenfold by a
    backtracking gradient step.
    """

    grad_tol: float = 1e-10
    max_iters: int = 100
    rank_tol: float = 1e-8
    step_cap: Optional[float] = None
    fallback: str = "none"

    def __post_init__(self):
        if not (self.grad_tol > 0 and self.rank_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.step_cap is not None and not self.step_cap > 0:
            raise ValueError("step_cap must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.fallback not in FALLBACKS:
            raise ValueError(f"fallback must be one of {FALLBACKS}")


@dataclass(frozen=True)
class Iterate:
    point: np.ndarray
    grad_norm: float
    step_norm: float
    rank: Optional[int] = None
    kind: str = "newton"
    rank_deficient: bool = False


@dataclass
class NewtonTrace:
    iterates: list = field(default_factory=list)
    status: str = "max_iters"
    message: str = ""

    @property
    def final_point(self):
        return self.iterates[-1].point

    @property
    def grad_norms(self):
        return np.array([it.grad_norm for it in self.iterates])

    @property
    def num_iters(self):
        """Number of steps taken (the final record is the stopping point)."""
        return len(self.iterates) - 1

    @property
    def converged(self):
        return self.status == "converged"

    @property
    def rank_deficient_steps(self):
        """Indices of steps whose Newton system was solved in the least-squares sense."""
        return [n for n, it in enumerate(self.iterates) if it.rank_deficient]


def solve_newton_system(h, g, rank_tol=1e-8, abs_tol=0.0):
    """Minimal-norm least-squares solution of ``h v = -g`` for symmetric ``h``.

    Eigenvalues with ``|lambda| <= rank_tol * max|lambda|`` are treated as
    zero.

    Returns
    -------
    coords : ndarray
    rank : int

    Raises
    ------
    SingularSystem
        If the least-squares residual exceeds both ``rank_tol * |g|`` and
        ``abs_tol`` (the system is inconsistent).
    """
    h = np.asarray(h, dtype=float)
    g = np.asarray(g, dtype=float)
    evals, evecs = np.linalg.eigh(h)
    scale = np.max(np.abs(evals)) if evals.size else 0.0
    keep = np.abs(evals) > rank_tol * scale
    proj = evecs.T @ g
    coords = -evecs[:, keep] @ (proj[keep] / evals[keep])
    residual = np.linalg.norm(h @ coords + g)
    if residual > rank_tol * np.linalg.norm(g) and residual > abs_tol:
        raise SingularSystem(f"inconsistent Newton system (residual {residual:.3e})")
    return coords, int(keep.sum())


def newton_step(cs, cost, frame, x, settings=None):
    """One Newton step in the given frame.

    Returns
    -------
    v : ndarray, shape (n,)
        Ambient tangent vector ``sum_j v^j b_j``.
    coords : ndarray, shape (s,)
        Frame coordinates ``v^j``.
    """
    settings = settings or NewtonSettings()
    g = frame_gradient_coords(cs, cost, frame, x)
    h = restricted_hessian(cs, cost, frame, x)
    coords, _ = solve_newton_system(h, g, settings.rank_tol, settings.grad_tol)
    return frame.to_ambient(coords), coords


def _gradient_step(cost, retract, guard, x, grad, cap):
    """Backtracking step along ``-grad`` that decreases the cost."""
    f0 = cost.value(x)
    gnorm2 = grad @ grad
    t = min(1.0, cap / np.sqrt(gnorm2))
    for _ in range(40):
        try:
            candidate = retract(x, -t * grad)
            guard(candidate)
            if cost.value(candidate) <= f0 - 1e-4 * t * gnorm2:
                return candidate, t * np.sqrt(gnorm2)
        except (LeftDomain, ZeroVector):
            pass
        t *= 0.5
    return None, 0.0


def newton_solve(cs, cost, frame_supplier, x0, settings=None, *, retract, domain_guard=None):
    """Run the embedded Newton iteration from ``x0``.

    Parameters
    ----------
    cs : ConstraintSystem
    cost : CostFunction
    frame_supplier : callable
        ``x -> TangentFrame`` anchored at ``x``.
    x0 : array_like
        Starting point on the level set.
    settings : NewtonSettings, optional
    retract : callable
        ``(x, v) -> x'`` mapping a tangent step back onto the level set.
    domain_guard : callable, optional
        Raises :class:`LeftDomain` for points outside the cost's domain.

    Returns
    -------
    NewtonTrace
        Always returned; failures are reported through ``status``. The final
        record holds the last point and its gradient norm.
    """
    settings = settings or NewtonSettings()
    guard = domain_guard or (lambda _x: None)
    cap = settings.step_cap if settings.step_cap is not None else np.inf
    trace = NewtonTrace()
    x = np.array(x0, dtype=float)
    try:
        guard(x)
    except LeftDomain as exc:
        trace.iterates.append(Iterate(x, np.nan, 0.0, kind="final"))
        trace.status, trace.message = "left_domain", str(exc)
        return trace

    grad = embedded_gradient(cs, cost, x)
    gnorm = float(np.linalg.norm(grad))
    use_fallback = settings.fallback == "damped_gradient"
    for n in range(settings.max_iters + 1):
        if gnorm < settings.grad_tol:
            trace.status = "converged"
            break
        if n == settings.max_iters:
            trace.status = "max_iters"
            break
        frame = frame_supplier(x)
        g = frame_gradient_coords(cs, cost, frame, x)
        h = restricted_hessian(cs, cost, frame, x)
        rank, deficient = None, False
        x_new, failure = None, None
        try:
            coords, rank = solve_newton_system(h, g, settings.rank_tol, settings.grad_tol)
            deficient = rank < len(g)
            cnorm = np.linalg.norm(coords)
            if cnorm > cap:
                coords = coords * (cap / cnorm)
            v = frame.to_ambient(coords)
            step_norm = float(np.linalg.norm(v))
            x_new = retract(x, v)
            guard(x_new)
            grad_new = embedded_gradient(cs, cost, x_new)
            gnorm_new = float(np.linalg.norm(grad_new))
            if use_fallback and gnorm_new > 10.0 * gnorm:
                failure = "growth"
        except SingularSystem as exc:
            failure = ("singular_system", str(exc))
        except (LeftDomain, ZeroVector) as exc:
            failure = ("left_domain", str(exc))

        kind = "newton"
        if failure is not None and use_fallback:
            x_new, step_norm = _gradient_step(cost, retract, guard, x, grad, min(cap, 0.5))
            if x_new is None:
                trace.iterates.append(Iterate(x, gnorm, 0.0, rank, "final", deficient))
                trace.status, trace.message = "max_iters", "gradient fallback failed to decrease the cost"
                return trace
            kind = "gradient"
            grad_new = embedded_gradient(cs, cost, x_new)
            gnorm_new = float(np.linalg.norm(grad_new))
        elif failure is not None:
            status, message = failure
            if status == "left_domain":
                trace.iterates.append(Iterate(x, gnorm, step_norm, rank, kind, deficient))
                x = x if x_new is None else np.asarray(x_new, dtype=float)
                gnorm = np.nan
            trace.status, trace.message = status, message
            break
        trace.iterates.append(Iterate(x, gnorm, step_norm, rank, kind, deficient))
        x, grad, gnorm = np.asarray(x_new, dtype=float), grad_new, gnorm_new
    trace.iterates.append(Iterate(x, gnorm, 0.0, kind="final"))
    return trace


def classify_run_endpoint(trace, references, tol=1e-6, signature=None):
    """Match a converged endpoint against reference configurations.

    Parameters
    ----------
    trace : NewtonTrace
    references : mapping
        ``label -> point`` (or ``label -> list of points``).
    tol : float
        Maximum absolute deviation between sorted pairwise-distance multisets.
    signature : callable, optional
        Invariant used for matching; defaults to the five-point distance
        multiset.

    Returns
    -------
    str
        The first matching label, or ``"unknown"``.
    """
    if signature is None:
        from .sphere import distance_signature as signature
    if not trace.converged:
        return "unknown"
    sig = signature(trace.final_point)
    for label, points in references.items():
        candidates = points if isinstance(points, (list, tuple)) else [points]
        for ref in candidates:
            if np.max(np.abs(signature(ref) - sig)) < tol:
                return label
    return "unknown"
