"""Command-line front end: ``embedded-newton {solve,analyze,scan,generate}``.

Exit codes: 0 on success, 2 on bad flags or arguments, 3 on numerical failure.
"""
import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    classify,
    curve_tangent,
    family_label,
    reference_families,
    rotation_tangent,
    scan_bifurcations,
    scan_rows,
)
from .errors import EmbeddedNewtonError, NotCritical
from .families import Family, generate, shape_params, solve_double_tetrahedron
from .io import dumps, rows_to_csv, timestamp
from .newton import NewtonSettings, classify_run_endpoint, newton_solve
from .riesz import energy, riesz_cost
from .sphere import (
    SPHERE_PRODUCT,
    Configuration,
    check_domain,
    product_frame,
    project_to_tangent,
    random_configuration,
    retract,
)

EXIT_BAD_ARGS = 2
EXIT_NUMERICAL = 3

SCAN_COLUMNS = (
    "s",
    "family",
    "variant",
    "alpha",
    "beta",
    "gamma",
    "energy",
    "morse_index",
    "nullity",
    "smallest_nonzero_eigenvalue",
)

FAMILY_NAMES = {
    "bipyramid": (Family.BIPYRAMID, "triangle"),
    "bipyramid-axial": (Family.BIPYRAMID, "axial"),
    "pyramid": (Family.PYRAMID, "apex"),
    "pyramid-base": (Family.PYRAMID, "base"),
    "pentagon": (Family.PENTAGON, "plane"),
    "doubletetra": (Family.DOUBLE_TETRAHEDRON, "apex"),
}


class UsageError(ValueError):
    pass


def parse_family_spec(text, s):
    """Parse ``name[:params...]`` into ``(family, variant, params, lam)``.

    ``bipyramid:LAM``, ``bipyramid-axial:LAM``, ``pentagon:LAM``,
    ``pyramid:ALPHA|auto[:LAM]``, ``pyramid-base:ALPHA|auto[:LAM]``,
    ``doubletetra:auto[:LAM]`` or ``doubletetra:BETA:GAMMA[:LAM]``.
    """
    name, *fields = text.split(":")
    if name not in FAMILY_NAMES:
        raise UsageError(f"unknown family {name!r}; choose from {sorted(FAMILY_NAMES)}")
    family, variant = FAMILY_NAMES[name]
    try:
        if family in (Family.BIPYRAMID, Family.PENTAGON):
            if len(fields) > 1:
                raise UsageError(f"{name} takes at most one parameter")
            return family, variant, (), float(fields[0]) if fields else 0.0
        if family is Family.PYRAMID:
            if not fields or len(fields) > 2:
                raise UsageError(f"{name} needs ALPHA|auto[:LAM]")
            params = shape_params(family, s) if fields[0] == "auto" else (float(fields[0]),)
            return family, variant, params, float(fields[1]) if len(fields) > 1 else 0.0
        if fields and fields[0] == "auto":
            if len(fields) > 2:
                raise UsageError("doubletetra:auto takes at most one more parameter")
            return family, variant, solve_double_tetrahedron(s), float(fields[1]) if len(fields) > 1 else 0.0
        if len(fields) not in (2, 3):
            raise UsageError("doubletetra needs auto[:LAM] or BETA:GAMMA[:LAM]")
        params = (float(fields[0]), float(fields[1]))
        return family, variant, params, float(fields[2]) if len(fields) > 2 else 0.0
    except ValueError as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"bad family parameters in {text!r}: {exc}") from exc


def manifest(args, command, settings=None):
    snapshot = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
    return {
        "command": command,
        "arguments": snapshot,
        "seed": getattr(args, "seed", None),
        "settings": settings or {},
        "version": __version__,
        "timestamp": timestamp(),
    }


def _settings_dict(settings):
    return {
        "grad_tol": settings.grad_tol,
        "max_iters": settings.max_iters,
        "rank_tol": settings.rank_tol,
        "step_cap": settings.step_cap,
        "fallback": settings.fallback,
    }


def _write(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _perturbed_start(family_name, eps, s, rng):
    family, variant, params, lam = parse_family_spec(
        family_name if ":" in family_name else _default_spec(family_name), s
    )
    x = generate(family, params, lam, variant).ambient
    direction = project_to_tangent(x, rng.standard_normal(x.size))
    direction *= eps / np.linalg.norm(direction)
    return retract(x, direction)


def _default_spec(name):
    if name in ("pyramid", "pyramid-base", "doubletetra"):
        return f"{name}:auto"
    return name


def cmd_solve(args):
    if args.starts < 0:
        raise UsageError("--starts must be non-negative")
    if not args.s > 0:
        raise UsageError("--s must be positive")
    if args.perturb is not None:
        name, eps = args.perturb
        try:
            eps = float(eps)
        except ValueError as exc:
            raise UsageError(f"bad perturbation size {eps!r}") from exc
        if name.split(":")[0] not in FAMILY_NAMES:
            raise UsageError(f"unknown family {name!r}")
        settings = NewtonSettings(max_iters=args.max_iters)
    else:
        name, eps = None, None
        settings = NewtonSettings(max_iters=args.max_iters, step_cap=1.0, fallback="damped_gradient")

    cost = riesz_cost(args.s)
    references = reference_families(args.s) if args.starts else {}
    streams = np.random.SeedSequence(args.seed).spawn(args.starts)
    runs = []
    tally = {}
    for k, stream in enumerate(streams):
        rng = np.random.Generator(np.random.Philox(stream))
        x0 = random_configuration(rng) if name is None else _perturbed_start(name, eps, args.s, rng)
        trace = newton_solve(
            SPHERE_PRODUCT, cost, product_frame, x0, settings, retract=retract, domain_guard=check_domain
        )
        run = {
            "run": k,
            "status": trace.status,
            "iterations": trace.num_iters,
            "grad_norm": trace.iterates[-1].grad_norm,
            "energy": None,
            "family": "unknown",
            "variant": None,
            "morse_index": None,
            "nullity": None,
            "final_configuration": trace.final_point.reshape(4, 3),
        }
        if trace.converged:
            label = classify_run_endpoint(trace, references)
            run["family"] = family_label(label)
            run["variant"] = label.partition("/")[2] or None
            run["energy"] = energy(trace.final_point, args.s)
            try:
                report = classify(trace.final_point, args.s, rotation_tangent(trace.final_point), family="unknown")
                run["morse_index"], run["nullity"] = report.morse_index, report.nullity
            except NotCritical:
                pass
            entry = tally.setdefault(run["family"], {"count": 0, "energy": run["energy"]})
            entry["count"] += 1
        runs.append(run)
    report = {
        "manifest": manifest(args, "solve", _settings_dict(settings)),
        "s": args.s,
        "runs": runs,
        "tally": dict(sorted(tally.items())),
    }
    _write(dumps(report), args.out)
    return 0


def _resolve_config(spec, s):
    """Configuration, curve tangent and descriptive metadata from ``--config``."""
    path = Path(spec)
    if path.suffix == ".json" or path.exists():
        try:
            cfg = Configuration.from_json(path.read_text())
        except OSError as exc:
            raise UsageError(f"cannot read {spec}: {exc}") from exc
        except ValueError as exc:
            raise UsageError(f"invalid configuration file {spec}: {exc}") from exc
        return cfg, rotation_tangent(cfg), {"source": str(spec)}, None, None
    family, variant, params, lam = parse_family_spec(spec, s)
    cfg = generate(family, params, lam, variant)
    meta = {"source": spec, "params": list(params), "lam": lam}
    return cfg, curve_tangent(family, params, lam, variant), meta, family.value, variant


def cmd_analyze(args):
    if not args.s > 0:
        raise UsageError("--s must be positive")
    cfg, tangent, meta, family, variant = _resolve_config(args.config, args.s)
    report = classify(cfg, args.s, tangent, family=family, variant=variant)
    out = {
        "manifest": manifest(args, "analyze"),
        "configuration": cfg.points,
        "config": meta,
        "report": report.to_dict(),
    }
    _write(dumps(out), args.out)
    return 0


def cmd_scan(args):
    if not args.s_min > 0 or args.s_max < args.s_min or not args.step > 0:
        raise UsageError("need 0 < s-min <= s-max and step > 0")
    rows = scan_rows(args.s_min, args.s_max, args.step)
    records = scan_bifurcations(args.s_min, args.s_max, args.step) if args.s_max > args.s_min else []
    csv_text = rows_to_csv(rows, SCAN_COLUMNS)
    if args.out:
        Path(args.out).write_text(csv_text)
    out = {
        "manifest": manifest(args, "scan"),
        "records": [r.to_dict() for r in records],
    }
    _write(dumps(out), args.records)
    return 0


def cmd_generate(args):
    if not args.s > 0:
        raise UsageError("--s must be positive")
    family, variant, params, lam = parse_family_spec(args.family, args.s)
    cfg = generate(family, params, lam, variant)
    _write(cfg.to_json() + "\n", args.out)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="embedded-newton",
        description="Embedded Newton solver for five points with Riesz s-energy on the sphere.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="Newton solves from random or perturbed starts")
    p.add_argument("--s", type=float, default=1.0, help="Riesz exponent (default 1)")
    p.add_argument("--starts", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--perturb", nargs=2, metavar=("FAMILY", "EPS"), help="start near a family member")
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("analyze", help="classify a critical configuration")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--config", required=True, help="JSON file or family[:params]")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("scan", help="sweep s and detect bifurcations")
    p.add_argument("--s-min", type=float, required=True)
    p.add_argument("--s-max", type=float, required=True)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--out", help="CSV table of family data")
    p.add_argument("--records", help="write bifurcation records JSON here instead of stdout")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("generate", help="write a family member as a configuration file")
    p.add_argument("--family", required=True, help="family[:params]")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    except EmbeddedNewtonError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
