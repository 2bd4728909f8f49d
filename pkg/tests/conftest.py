import json
from importlib import resources

import numpy as np
import pytest

from embedded_newton.sphere import min_separation


def central_gradient(f, x, h=1e-6):
    """Central-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        out[k] = (f(x + e) - f(x - e)) / (2 * h)
    return out


def central_jacobian(f, x, h=1e-6):
    """Central-difference Jacobian; column ``k`` is the derivative along ``e_k``."""
    x = np.asarray(x, dtype=float)
    cols = []
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        cols.append((np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2 * h))
    return np.stack(cols, axis=-1)


def gram_schmidt(vectors):
    """Classical Gram-Schmidt with re-orthogonalization; rows in, rows out."""
    basis = []
    for v in np.asarray(vectors, dtype=float):
        w = v.copy()
        for _ in range(2):
            for q in basis:
                w -= (q @ w) * q
        basis.append(w / np.linalg.norm(w))
    return np.array(basis)


def random_unit_points(rng, n=4, z_max=None):
    while True:
        pts = rng.standard_normal((n, 3))
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        if z_max is not None and np.any(pts[:, 2] > z_max):
            continue
        if min_separation(pts.ravel()) > 0.2:
            return pts.ravel()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def _schema_registry():
    from referencing import Registry, Resource

    resources_ = []
    folder = resources.files("embedded_newton").joinpath("schemas")
    for entry in folder.iterdir():
        if entry.name.endswith(".schema.json"):
            schema = json.loads(entry.read_text())
            resources_.append((entry.name, Resource.from_contents(schema)))
    return Registry().with_resources(resources_)


@pytest.fixture(scope="session")
def validate():
    from jsonschema import Draft202012Validator

    from embedded_newton.io import load_schema

    registry = _schema_registry()

    def check(instance, name):
        Draft202012Validator(load_schema(name), registry=registry).validate(instance)

    return check


# (number, verdict, title, detail) rows collected by the acceptance suite
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, verdict, title, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"[{verdict}] criterion {number}: {title} | {detail}")
