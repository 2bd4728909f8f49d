"""Newton's method on constraint manifolds in ambient coordinates.

Applied to five points on the unit sphere with Riesz s-energy (the
five-electron Thomson problem at ``s = 1``).
"""
__version__ = "0.1.0"

from .analysis import (
    BifurcationRecord,
    CriticalReport,
    classify,
    classify_family,
    curve_tangent,
    reference_families,
    rotation_tangent,
    scan_bifurcations,
    scan_rows,
)
from .constraints import (
    ConstraintSystem,
    CostFunction,
    TangentFrame,
    embedded_gradient,
    frame_gradient_coords,
    lagrange_multipliers,
    restricted_hessian,
)
from .errors import *  # noqa: F401,F403
from .families import (
    Family,
    double_tetra_equation,
    family_energy_closed_form,
    gen_bipyramid,
    gen_double_tetrahedron,
    gen_pentagon,
    gen_pyramid,
    generate,
    pyramid_height_equation,
    solve_double_tetrahedron,
    solve_pyramid_height,
)
from .newton import NewtonSettings, NewtonTrace, classify_run_endpoint, newton_solve, newton_step
from .riesz import energy, energy_gradient, energy_hessian, riesz_cost
from .sphere import (
    SPHERE_PRODUCT,
    Configuration,
    check_domain,
    product_frame,
    random_configuration,
    retract,
    sphere_product_constraints,
    stereographic_frame_vectors,
)
