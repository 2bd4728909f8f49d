"""Morse / Morse-Bott classification of critical configurations and s-scans."""
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .constraints import embedded_gradient, restricted_hessian
from .errors import NotCritical, NotPresent
from .families import (
    VARIANTS,
    Family,
    family_energy_closed_form,
    generate,
    shape_params,
    solve_double_tetrahedron,
)
from .newton import classify_run_endpoint
from .riesz import energy, riesz_cost
from .sphere import SPHERE_PRODUCT, as_ambient, product_frame

CRITICAL_TOL = 1e-8
ZERO_TOL_REL = 1e-7
KERNEL_TOL_REL = 1e-6


@dataclass
class CriticalReport:
    eigenvalues: np.ndarray
    morse_index: int
    nullity: int
    morse_bott_verified: bool
    energy: float
    family: str = "unknown"
    variant: Optional[str] = None
    s: float = 1.0
    gradient_residual: float = 0.0
    kernel_residual: Optional[float] = None
    smallest_nontrivial_eigenvalue: Optional[float] = None

    @property
    def positives(self):
        return len(self.eigenvalues) - self.morse_index - self.nullity

    def to_dict(self):
        out = asdict(self)
        out["eigenvalues"] = [float(v) for v in self.eigenvalues]
        return out


def curve_tangent(family, params=(), lam=0.0, variant=None, h=1e-6):
    """Tangent of a family curve, by central differences of its generator."""
    family = Family(family)
    lo, hi = lam - h, lam + h
    if family is Family.BIPYRAMID and (variant or "triangle") == "triangle":
        lo, hi = max(lo, -1.0), min(hi, 1.0)
    plus = generate(family, params, hi, variant).ambient
    minus = generate(family, params, lo, variant).ambient
    return (plus - minus) / (hi - lo)


def _kernel_alignment(evecs, w_coords):
    w = w_coords / np.linalg.norm(w_coords)
    return np.abs(evecs.T @ w)


def classify(cfg, s=1.0, family_curve_tangent=None, family=None, variant=None, references=None):
    """Eigen-classification of the restricted Hessian at a critical point.

    Parameters
    ----------
    cfg : Configuration or array_like
    s : float
        Riesz exponent.
    family_curve_tangent : array_like, optional
        Ambient tangent of the critical curve through ``cfg``. When given, the
        report checks that it spans the Hessian kernel (Morse-Bott condition).
    family, variant : str, optional
        Label to attach. If ``family`` is None the configuration is matched
        against the reference families at ``s``.
    references : mapping, optional
        Precomputed ``label -> point`` table for the matching step.

    Raises
    ------
    NotCritical
        If the embedded gradient norm exceeds 1e-8.
    """
    x = as_ambient(cfg)
    cost = riesz_cost(s)
    grad_res = float(np.linalg.norm(embedded_gradient(SPHERE_PRODUCT, cost, x)))
    if grad_res > CRITICAL_TOL:
        raise NotCritical(f"embedded gradient norm {grad_res:.3e} exceeds {CRITICAL_TOL:g}")
    frame = product_frame(x)
    h = restricted_hessian(SPHERE_PRODUCT, cost, frame, x)
    evals, evecs = np.linalg.eigh(h)
    scale = np.max(np.abs(evals))
    zero_tol = ZERO_TOL_REL * scale
    index = int(np.sum(evals < -zero_tol))
    nullity = int(np.sum(np.abs(evals) <= zero_tol))

    verified = False
    kernel_res = None
    trivial = int(np.argmin(np.abs(evals)))
    if family_curve_tangent is not None:
        w = frame.coordinates_of(family_curve_tangent)
        kernel_res = float(np.linalg.norm(h @ w) / (scale * np.linalg.norm(w)))
        verified = kernel_res < KERNEL_TOL_REL and nullity == 1
        trivial = int(np.argmax(_kernel_alignment(evecs, w)))
    rest = np.delete(evals, trivial)

    if family is None:
        if references is None:
            references = reference_families(s)
        label = classify_run_endpoint(_Converged(x), references)
        family, _, variant = label.partition("/")
        variant = variant or None
    return CriticalReport(
        eigenvalues=evals,
        morse_index=index,
        nullity=nullity,
        morse_bott_verified=bool(verified),
        energy=energy(x, s),
        family=str(Family(family).value) if family != "unknown" else "unknown",
        variant=variant,
        s=float(s),
        gradient_residual=grad_res,
        kernel_residual=kernel_res,
        smallest_nontrivial_eigenvalue=float(rest[0]),
    )


class _Converged:
    """Minimal stand-in for a converged trace."""

    converged = True

    def __init__(self, x):
        self.final_point = x


def reference_families(s=1.0, lam=0.0):
    """``"family/variant" -> ambient point`` for every family present at ``s``."""
    refs = {}
    for family, variants in VARIANTS.items():
        try:
            params = shape_params(family, s)
        except NotPresent:
            continue
        for variant in variants:
            refs[f"{family.value}/{variant}"] = generate(family, params, lam, variant).ambient
    return refs


def family_label(label):
    """Strip the variant tag from a ``"family/variant"`` label."""
    return label.partition("/")[0]


def classify_family(family, s, lam=0.0, variant=None, params=None):
    """Generate a family member at ``s`` and classify it with its curve tangent."""
    family = Family(family)
    variant = variant or VARIANTS[family][0]
    if params is None:
        params = shape_params(family, s)
    cfg = generate(family, params, lam, variant)
    tangent = curve_tangent(family, params, lam, variant)
    report = classify(cfg, s, tangent, family=family.value, variant=variant)
    return report, params


# --- bifurcation scanning -------------------------------------------------------

ENERGY_CROSSING = "energy"


@dataclass
class BifurcationRecord:
    family: str
    s_star: float
    transition: str
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def _monitor(kind, s, lam):
    if kind == ENERGY_CROSSING:
        alpha = shape_params(Family.PYRAMID, s)
        return family_energy_closed_form(Family.BIPYRAMID, s) - family_energy_closed_form(Family.PYRAMID, s, alpha)
    report, _ = classify_family(kind, s, lam)
    return report.smallest_nontrivial_eigenvalue


def _side_info(kind, s, lam):
    if kind == ENERGY_CROSSING:
        return {"s": s, "energy_difference": float(_monitor(kind, s, lam))}
    report, _ = classify_family(kind, s, lam)
    return {
        "s": s,
        "smallest_nontrivial_eigenvalue": report.smallest_nontrivial_eigenvalue,
        "morse_index": report.morse_index,
    }


def _bisect(fun, a, b, fa, tol):
    while b - a > tol:
        mid = 0.5 * (a + b)
        fm = fun(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (fa < 0.0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def scan_grid(s_min, s_max, step):
    if not s_min > 0:
        raise ValueError("s range must lie in (0, inf)")
    if not step > 0:
        raise ValueError("step must be positive")
    if s_max <= s_min:
        return np.array([])
    n = int(np.floor((s_max - s_min) / step + 1e-9))
    grid = s_min + step * np.arange(n + 1)
    if grid[-1] < s_max - 1e-12:
        grid = np.append(grid, s_max)
    return grid


DEFAULT_SCAN = (Family.PYRAMID.value, Family.BIPYRAMID.value, ENERGY_CROSSING)


def scan_bifurcations(s_min, s_max, step, families=DEFAULT_SCAN, tol=1e-8, lam=0.0):
    """Locate index changes and energy-ordering crossings on ``[s_min, s_max]``.

    For each family the smallest eigenvalue other than the Morse-Bott zero
    mode is monitored; ``"energy"`` monitors the energy of the bi-pyramid
    minus that of the square pyramid. Every sign change on the grid is
    refined by bisection to ``tol`` in ``s``.

    Returns
    -------
    list of BifurcationRecord
        Sorted by ``s_star``.
    """
    grid = scan_grid(s_min, s_max, step)
    records = []
    for kind in families:
        if kind != ENERGY_CROSSING:
            kind = Family(kind).value

        def fun(s, kind=kind):
            return _monitor(kind, s, lam)

        values = [fun(s) for s in grid]
        for a, b, fa, fb in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
            if fa == 0.0 or (fa < 0.0) == (fb < 0.0):
                continue
            s_star = _bisect(fun, a, b, fa, tol)
            transition = "energy_crossing" if kind == ENERGY_CROSSING else "index_change"
            label = f"{Family.BIPYRAMID.value}-vs-{Family.PYRAMID.value}" if kind == ENERGY_CROSSING else kind
            records.append(
                BifurcationRecord(
                    family=label,
                    s_star=float(s_star),
                    transition=transition,
                    details={"below": _side_info(kind, float(a), lam), "above": _side_info(kind, float(b), lam)},
                )
            )
    return sorted(records, key=lambda r: r.s_star)


def scan_rows(s_min, s_max, step, lam=0.0):
    """Per-(s, family) table for bifurcation diagrams.

    The double tetrahedron is continued from the previous grid point and only
    listed where it exists.
    """
    rows = []
    guess = None
    for s in scan_grid(s_min, s_max, step):
        for family in Family:
            if family is Family.DOUBLE_TETRAHEDRON:
                try:
                    params = solve_double_tetrahedron(s, guess=guess)
                except NotPresent:
                    guess = None
                    continue
                guess = params
            else:
                params = shape_params(family, s)
            report, _ = classify_family(family, s, lam, params=params)
            rows.append(
                {
                    "s": float(s),
                    "family": family.value,
                    "variant": report.variant,
                    "alpha": params[0] if family is Family.PYRAMID else None,
                    "beta": params[0] if family is Family.DOUBLE_TETRAHEDRON else None,
                    "gamma": params[1] if family is Family.DOUBLE_TETRAHEDRON else None,
                    "energy": report.energy,
                    "morse_index": report.morse_index,
                    "nullity": report.nullity,
                    "smallest_nonzero_eigenvalue": report.smallest_nontrivial_eigenvalue,
                }
            )
    return rows


def rotation_tangent(cfg):
    """Velocity ``e_z x p_i`` of the free points under rotation about the polar axis.

    The energy is invariant under these rotations, so at a critical point the
    orbit is a curve of critical points and this vector lies in the kernel of
    the restricted Hessian.
    """
    pts = as_ambient(cfg).reshape(-1, 3)
    return np.cross(np.array([0.0, 0.0, 1.0]), pts).ravel()
