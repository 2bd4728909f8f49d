"""Named one-parameter families of critical configurations.

Every family is an orbit of rotations about the polar axis, so each
generator takes a curve parameter ``lam`` on top of its shape parameters.
The shape parameters of the pyramid and the double tetrahedron depend on the
Riesz exponent and are obtained from scalar (or 2x2) equations.
"""
import enum
import math

import numpy as np

from .errors import NoRoot, NotPresent
from .sphere import NORTH_POLE, Configuration

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)


class Family(str, enum.Enum):
    BIPYRAMID = "bi-pyramid"
    PYRAMID = "square-right-pyramid"
    PENTAGON = "pentagon"
    DOUBLE_TETRAHEDRON = "double-tetrahedron"


VARIANTS = {
    Family.BIPYRAMID: ("triangle", "axial"),
    Family.PYRAMID: ("apex", "base"),
    Family.PENTAGON: ("plane",),
    Family.DOUBLE_TETRAHEDRON: ("apex",),
}


def _rot_z(lam):
    c, s = math.cos(lam), math.sin(lam)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _rotation_to_pole(u):
    """Rotation matrix taking the unit vector ``u`` to the north pole."""
    u = np.asarray(u, dtype=float)
    axis = np.cross(u, NORTH_POLE)
    sin_a = np.linalg.norm(axis)
    cos_a = float(u @ NORTH_POLE)
    if sin_a < 1e-15:
        return np.eye(3) if cos_a > 0 else np.diag([1.0, -1.0, -1.0])
    k = axis / sin_a
    K = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + sin_a * K + (1.0 - cos_a) * (K @ K)


def _move_to_pole(points, index, lam):
    """Relabel so that free point ``index`` becomes the pole.

    The old pole takes the free slot ``index``; the result is then rotated by
    ``lam`` about the polar axis.
    """
    pts = np.vstack([points, NORTH_POLE])
    R = _rot_z(lam) @ _rotation_to_pole(pts[index])
    moved = pts @ R.T
    free = moved[:4].copy()
    free[index] = moved[4]
    return free


def gen_bipyramid(lam=0.0, variant="triangle"):
    """Triangular bi-pyramid through the pole.

    ``variant="triangle"``: the pole is a vertex of the equatorial triangle
    and ``lam`` in ``[-1, 1]`` is the sine of the rotation angle.
    ``variant="axial"``: the pole is an apex, the opposite apex is the south
    pole and ``lam`` is the rotation angle of the triangle.
    """
    if variant == "triangle":
        if not -1.0 <= lam <= 1.0:
            raise ValueError("lam must lie in [-1, 1]")
        c = math.sqrt(1.0 - lam * lam)
        pts = [
            (SQRT3 / 2 * lam, -SQRT3 / 2 * c, -0.5),
            (-SQRT3 / 2 * lam, SQRT3 / 2 * c, -0.5),
            (c, lam, 0.0),
            (-c, -lam, 0.0),
        ]
    elif variant == "axial":
        pts = [(0.0, 0.0, -1.0)] + [
            (math.cos(lam + 2 * math.pi * k / 3), math.sin(lam + 2 * math.pi * k / 3), 0.0)
            for k in range(3)
        ]
    else:
        raise ValueError(f"unknown bi-pyramid variant {variant!r}")
    return Configuration.from_points(pts)


def _square(height_13, height_24, lam):
    r13 = math.sqrt(1.0 - height_13 ** 2)
    r24 = math.sqrt(1.0 - height_24 ** 2)
    out = []
    for k, (r, z) in enumerate([(r13, height_13), (r24, height_24)] * 2):
        ang = lam + k * math.pi / 2
        out.append((r * math.cos(ang), r * math.sin(ang), z))
    return out


def gen_pyramid(alpha, lam=0.0, variant="apex"):
    """Square right pyramid with base plane at signed height ``alpha``.

    ``variant="apex"`` puts the pole at the apex; ``variant="base"`` relabels
    the same shape so the pole is a base vertex.
    """
    if not -1.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (-1, 1)")
    pts = _square(alpha, alpha, lam)
    if variant == "apex":
        return Configuration.from_points(pts)
    if variant == "base":
        moved = _move_to_pole(_square(alpha, alpha, 0.0), 0, lam)
        return Configuration.from_points(moved / np.linalg.norm(moved, axis=1)[:, None])
    raise ValueError(f"unknown pyramid variant {variant!r}")


def gen_pentagon(lam=0.0):
    """Regular pentagon on a great circle through the pole."""
    c1, s1 = math.cos(math.pi / 10), math.sin(math.pi / 10)
    c3, s3 = math.cos(3 * math.pi / 10), math.sin(3 * math.pi / 10)
    sl, cl = math.sin(lam), math.cos(lam)
    pts = [
        (-sl * c1, -cl * c1, s1),
        (-sl * c3, -cl * c3, -s3),
        (sl * c3, cl * c3, -s3),
        (sl * c1, cl * c1, s1),
    ]
    return Configuration.from_points(pts)


def gen_double_tetrahedron(beta, gamma, lam=0.0):
    """Two perpendicular horizontal chords at heights ``beta`` and ``gamma``.

    Points 1 and 3 sit at height ``beta``, points 2 and 4 at ``gamma``,
    rotated by ``lam`` about the polar axis.
    """
    if not (-1.0 < beta < 1.0 and -1.0 < gamma < 1.0):
        raise ValueError("beta and gamma must lie in (-1, 1)")
    return Configuration.from_points(_square(beta, gamma, lam))


def generate(family, params, lam=0.0, variant=None):
    """Dispatch to the generator of ``family`` with its shape parameters."""
    family = Family(family)
    variant = variant or VARIANTS[family][0]
    if variant not in VARIANTS[family]:
        raise ValueError(f"{variant!r} is not a variant of {family.value}")
    params = tuple(params)
    if family is Family.BIPYRAMID:
        return gen_bipyramid(lam, variant)
    if family is Family.PYRAMID:
        return gen_pyramid(params[0], lam, variant)
    if family is Family.PENTAGON:
        return gen_pentagon(lam)
    return gen_double_tetrahedron(params[0], params[1], lam)


# --- defining equations -------------------------------------------------------


def pyramid_height_equation(alpha, s):
    """``T_s(alpha)``; its roots are the admissible pyramid base heights."""
    a = (2.0 - 2.0 * alpha) ** (-0.5 * s)
    b = (2.0 - 2.0 * alpha * alpha) ** (-0.5 * s)
    c = (4.0 - 4.0 * alpha * alpha) ** (-0.5 * s)
    return a + 2.0 * b * alpha + alpha * c + a * alpha


def _pyramid_height_derivative(alpha, s):
    m = 2.0 - 2.0 * alpha
    q = 2.0 - 2.0 * alpha * alpha
    w = 4.0 - 4.0 * alpha * alpha
    a, b, c = m ** (-0.5 * s), q ** (-0.5 * s), w ** (-0.5 * s)
    da = s * m ** (-0.5 * s - 1.0)
    db = 2.0 * s * alpha * q ** (-0.5 * s - 1.0)
    dc = 4.0 * s * alpha * w ** (-0.5 * s - 1.0)
    return da * (1.0 + alpha) + a + 2.0 * b + 2.0 * alpha * db + c + alpha * dc


def double_tetra_equation(beta, gamma, s):
    """The pair ``(E_s(beta, gamma), E_s(gamma, beta))``."""
    return _E(beta, gamma, s), _E(gamma, beta, s)


def _E(b, g, s):
    a = (2.0 - 2.0 * b) ** (-0.5 * s)
    c = (4.0 - 4.0 * b * b) ** (-0.5 * s)
    d = (2.0 - 2.0 * b * g) ** (-0.5 * s)
    return (
        -a * b
        - a
        - b * c
        + a * b * b * g
        - 2.0 * d * g
        + 2.0 * d * b * b * g
        + a * b * g
        + b * b * g * c
    )


def solve_pyramid_height(s, eps=1e-12):
    """Root of ``T_s`` in ``(-1, 0)``: bisection to 1e-3, then Newton polish.

    Raises
    ------
    NoRoot
        If ``T_s`` does not change sign on ``(-1 + eps, -eps)``.
    """
    if not s > 0:
        raise ValueError("s must be positive")
    lo, hi = -1.0 + 1e-9, -eps
    f_lo, f_hi = pyramid_height_equation(lo, s), pyramid_height_equation(hi, s)
    if not (f_lo < 0.0 < f_hi):
        raise NoRoot(f"T_s has no sign change on (-1, 0) for s={s}")
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        if pyramid_height_equation(mid, s) < 0.0:
            lo = mid
        else:
            hi = mid
    alpha = 0.5 * (lo + hi)
    for _ in range(50):
        f = pyramid_height_equation(alpha, s)
        step = f / _pyramid_height_derivative(alpha, s)
        new = alpha - step
        if not lo <= new <= hi:
            # fall back to bisection if Newton leaves the bracket
            new = 0.5 * (lo + hi)
        if pyramid_height_equation(new, s) < 0.0:
            lo = max(lo, new)
        else:
            hi = min(hi, new)
        if abs(new - alpha) < 1e-16 or f == 0.0:
            alpha = new
            break
        alpha = new
    return alpha


_TRIVIAL_POINTS = ((0.0, -0.5), (-0.5, 0.0))


def _deflation(x):
    """Multiplier that blows up near the known trivial solutions."""
    m = 1.0
    for p in _TRIVIAL_POINTS:
        m *= 1.0 + 1.0 / ((x[0] - p[0]) ** 2 + (x[1] - p[1]) ** 2)
    m *= 1.0 + 2.0 / (x[0] - x[1]) ** 2
    return m


def _residual(x, s):
    return np.array(double_tetra_equation(x[0], x[1], s))


def _jacobian(fun, x, h=1e-7):
    jac = np.empty((2, 2))
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        jac[:, k] = (fun(x + e) - fun(x - e)) / (2 * h)
    return jac


def _inside(x, margin=1e-9):
    return bool(np.all(np.abs(x) < 1.0 - margin))


def _damped_newton(fun, x0, max_iters=60, tol=1e-14):
    x = np.array(x0, dtype=float)
    fx = fun(x)
    for _ in range(max_iters):
        nf = np.linalg.norm(fx)
        if nf < tol:
            return x
        try:
            step = np.linalg.solve(_jacobian(fun, x), -fx)
        except np.linalg.LinAlgError:
            return None
        t = 1.0
        while t > 1e-6:
            cand = x + t * step
            if _inside(cand) and abs(cand[0] - cand[1]) > 1e-12:
                fc = fun(cand)
                if np.all(np.isfinite(fc)) and np.linalg.norm(fc) < (1.0 - 1e-4 * t) * nf:
                    break
            t *= 0.5
        else:
            return x
        x, fx = cand, fc
        if np.linalg.norm(t * step) < 1e-15:
            return x
    return x


def _is_nontrivial(x, tol=1e-6):
    if abs(x[0] - x[1]) <= tol:
        return False
    return all(math.hypot(x[0] - p[0], x[1] - p[1]) > tol for p in _TRIVIAL_POINTS)


def solve_double_tetrahedron(s, guess=None, residual_tol=1e-12):
    """Nontrivial solution ``(beta, gamma)``, ``beta >= gamma``, of the E_s system.

    Seeds a damped Newton iteration on the deflated system (the known
    bi-pyramid roots and the pyramid diagonal are divided out) from ``guess``
    and then from a coarse grid, and polishes every candidate on the plain
    system.

    Raises
    ------
    NotPresent
        If no nontrivial solution is found (the case for ``s`` below about
        13.5205).
    """
    if not s > 0:
        raise ValueError("s must be positive")

    def plain(x):
        return _residual(x, s)

    def deflated(x):
        return _deflation(x) * plain(x)

    seeds = []
    if guess is not None:
        seeds.append(tuple(guess))
    grid = np.linspace(-0.9, 0.9, 10)
    seeds += [(b, g) for b in grid for g in grid if b > g]
    for seed in seeds:
        for fun in (plain, deflated) if guess is not None and seed == seeds[0] else (deflated,):
            x = _damped_newton(fun, seed)
            if x is None or not _inside(x):
                continue
            x = _damped_newton(plain, x)
            if x is None or not _inside(x) or not _is_nontrivial(x):
                continue
            if np.max(np.abs(plain(x))) < residual_tol:
                beta, gamma = max(x), min(x)
                return float(beta), float(gamma)
    raise NotPresent(f"no double-tetrahedron solution found at s={s}")


# --- closed-form energies ------------------------------------------------------


def family_energy_closed_form(family, s, params=()):
    """Riesz s-energy of a family member from its closed-form expression."""
    family = Family(family)
    p = lambda d2: d2 ** (-0.5 * s)  # noqa: E731 - |d|^-s from a squared distance
    if family is Family.BIPYRAMID:
        return 3.0 / SQRT3 ** s + 6.0 / SQRT2 ** s + 1.0 / 2.0 ** s
    if family is Family.PYRAMID:
        (a,) = params
        return 2.0 * p(4 - 4 * a * a) + 4.0 * p(2 - 2 * a * a) + 4.0 * p(2 - 2 * a)
    if family is Family.PENTAGON:
        return (
            3.0 * p(2 - 2 * math.cos(2 * math.pi / 5))
            + 3.0 * p(2 + 2 * math.cos(math.pi / 5))
            + 2.0 * p(2 - 2 * math.sin(math.pi / 10))
            + 2.0 * p(2 + 2 * math.sin(3 * math.pi / 10))
        )
    b, g = params
    return (
        p(4 - 4 * b * b)
        + p(4 - 4 * g * g)
        + 2.0 * p(2 - 2 * b)
        + 2.0 * p(2 - 2 * g)
        + 4.0 * p(2 - 2 * b * g)
    )


def shape_params(family, s):
    """Shape parameters of ``family`` at exponent ``s`` (solving if needed)."""
    family = Family(family)
    if family is Family.PYRAMID:
        return (solve_pyramid_height(s),)
    if family is Family.DOUBLE_TETRAHEDRON:
        return solve_double_tetrahedron(s)
    return ()
