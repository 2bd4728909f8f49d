"""
Newton's method for five electrons on the sphere
================================================

One electron is pinned at the north pole; the other four live on the product
of four unit spheres inside R^12. Newton's method is run in ambient
coordinates: at every step the restricted Hessian is assembled in a
stereographic tangent frame, the Newton system is solved, and the step is
pulled back to the spheres by normalizing each point.
"""
import numpy as np

from embedded_newton import (
    SPHERE_PRODUCT,
    NewtonSettings,
    check_domain,
    newton_solve,
    product_frame,
    random_configuration,
    reference_families,
    retract,
    riesz_cost,
    classify_run_endpoint,
    energy,
)

cost = riesz_cost(1.0)
rng = np.random.default_rng(3)

# From a random start the pure Newton iteration may meet a singular system, so
# the solver falls back to a damped gradient step there and caps the step size.
settings = NewtonSettings(step_cap=1.0, fallback="damped_gradient")
x0 = random_configuration(rng)
trace = newton_solve(SPHERE_PRODUCT, cost, product_frame, x0, settings, retract=retract, domain_guard=check_domain)

print("status:", trace.status, "after", trace.num_iters, "iterations")
for k, it in enumerate(trace.iterates):
    print(f"  {k:2d}  |dG| = {it.grad_norm:9.3e}  step = {it.step_norm:9.3e}  ({it.kind})")

# Which of the known critical families did we land on?
refs = reference_families(1.0)
print("family:", classify_run_endpoint(trace, refs))
print("energy:", energy(trace.final_point))

# A few more starts. Every run ends on one of the three families; saddles are
# attracting for Newton just as minima are.
counts = {}
for seed in range(30):
    x0 = random_configuration(np.random.default_rng(seed))
    t = newton_solve(SPHERE_PRODUCT, cost, product_frame, x0, settings, retract=retract, domain_guard=check_domain)
    label = classify_run_endpoint(t, refs).partition("/")[0]
    counts[label] = counts.get(label, 0) + 1
print(counts)
