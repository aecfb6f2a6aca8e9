"""Command-line front end.

Subcommands build disc domains, check admissibility, run capped Scherk
solves, emit Fatou reports, iterate the example sequence and render
SVG figures.  All artifacts use canonical float formatting so repeated
runs are byte-identical.

Exit codes: 0 success, 2 validation error, 3 solver non-convergence.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import domains, fatou, meshing, solver, svg
from .errors import GeometryError, MalformedPolygonError, MeshError, SolverError
from .geometry import disc as make_disc
from .jsonio import canonical_dumps

WORKERS_ENV = "SCHERKDISC_WORKERS"

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3


def _workers() -> int:
    """Worker count from the environment; results never depend on it."""
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ValueError(f"{WORKERS_ENV} must be >= 1, got {n}")
    return n


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(text)


def _emit_json(path: Path, obj) -> None:
    _write(path, canonical_dumps(obj) + "\n")


def _parse_caps(raw: str) -> tuple:
    try:
        caps = tuple(float(c) for c in raw.split(","))
    except ValueError as exc:
        raise ValueError(f"bad --caps value {raw!r}") from exc
    if not caps or any(c <= 0 for c in caps) or list(caps) != sorted(caps):
        raise ValueError("--caps must be a comma-separated increasing positive list")
    return caps


def _load_domain(path: str) -> domains.ScherkPolygon:
    try:
        return domains.load_domain_json(path)
    except FileNotFoundError as exc:
        raise ValueError(f"no such file: {path}") from exc


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_build_domain(args) -> int:
    disc = make_disc(args.model)
    L = disc.boundary_length
    x0_s = args.x0 * L / (2.0 * np.pi)
    poly = domains.inscribed_quadrilateral(disc, x0_s)
    if args.attach != "none":
        a_side = poly.labels.index("A")
        b_side = poly.labels.index("B")
        # adjacent A/B pair sharing a vertex
        if (a_side + 1) % poly.n_sides != b_side and (b_side + 1) % poly.n_sides != a_side:
            b_side = (a_side + 1) % poly.n_sides
        if args.attach == "unperturbed":
            poly, _, _ = domains.build_attached(poly, a_side, b_side, 0.0, 0.0)
        else:
            grid = domains.default_tau_grid(args.tau_max)
            poly, _tau = domains.attach_and_perturb(poly, a_side, b_side, grid)
    out = Path(args.out)
    _emit_json(out / "domain.json", poly.to_json_dict())
    _write(out / "domain.svg", svg.render_domain(poly))
    print(f"wrote {out / 'domain.json'} and {out / 'domain.svg'}")
    return EXIT_OK


def _cmd_check(args) -> int:
    poly = _load_domain(args.infile)
    report = domains.check_admissible(poly)
    out = Path(args.out)
    _emit_json(out / "admissibility.json", report.to_json_dict())
    print(canonical_dumps(report.to_json_dict()))
    return EXIT_OK


def _solve_domain(poly, args):
    op = solver.operator(args.variant, metric=poly.disc.model)
    caps = _parse_caps(args.caps)
    mesh = meshing.triangulate(poly, args.h)
    fields = solver.solve_scherk(poly, op, caps=caps, h=args.h, tol=args.tol, mesh=mesh)
    return op, mesh, fields


def _cmd_solve(args) -> int:
    poly = _load_domain(args.infile)
    _op, _mesh, fields = _solve_domain(poly, args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    last = fields[-1]
    last.to_csv(out / "field.csv")
    _emit_json(out / "solve_log.json", [f.solve_log() for f in fields])
    print(f"solved {len(fields)} caps; final residual {last.residual_norm:.3e}")
    return EXIT_OK


def _cmd_fatou(args) -> int:
    poly = _load_domain(args.infile)
    op, _mesh, fields = _solve_domain(poly, args)
    out = Path(args.out)
    report = fatou.fatou_report(fields[-1], n_rays=args.rays)
    _emit_json(out / "fatou_report.json", report.to_json_dict())
    # hypothesis checks live on the full disc: probe the same operator there
    disc = poly.disc
    disc_mesh = meshing.triangulate(disc, args.h)
    bc = solver.BoundaryData.from_function(lambda p: p[:, 0] * p[:, 1])
    probe = solver.solve(disc_mesh, op, bc, tol=args.tol)
    hyp = fatou.check_hypotheses(probe, op=op)
    _emit_json(out / "hypotheses.json", hyp.to_json_dict())
    print(f"mu_finite={report.mu_finite:.6f} mu_plus={report.mu_plus:.6f} "
          f"mu_minus={report.mu_minus:.6f} mu_und={report.mu_und:.6f}")
    return EXIT_OK


def _cmd_example(args) -> int:
    disc = make_disc(args.model)
    L = disc.boundary_length
    schedule = domains.ExampleSchedule(
        x0_s=args.x0 * L / (2.0 * np.pi),
        tau_max=args.tau_max,
        caps=_parse_caps(args.caps),
    )
    seq = domains.iterate_example(disc, args.steps, schedule)
    op = solver.operator(args.variant, metric=disc.model)
    out = Path(args.out)
    for step in seq.steps:
        sdir = out / f"step{step.index}"
        sdir.mkdir(parents=True, exist_ok=True)
        mesh = meshing.triangulate(step.polygon, args.h)
        fields = solver.solve_scherk(step.polygon, op, caps=step.caps,
                                     h=args.h, tol=args.tol, mesh=mesh)
        report = fatou.fatou_report(fields[-1], n_rays=args.rays)
        gaps = solver.origin_gaps(fields)
        r_core = args.r_core if args.r_core is not None else step.r_core
        manifest = step.manifest()
        manifest["r_n"] = r_core
        manifest["origin_value"] = fields[-1].value_at_origin()
        manifest["origin_gaps"] = list(gaps)
        manifest["mu_finite"] = report.mu_finite
        _emit_json(sdir / "manifest.json", manifest)
        _emit_json(sdir / "fatou_report.json", report.to_json_dict())
        fields[-1].to_csv(sdir / "field.csv")
        core = domains.compact_core(step.polygon, r_core)
        _write(sdir / "domain.svg", svg.render_domain(step.polygon, core=core))
        print(f"step {step.index}: sides={step.polygon.n_sides} "
              f"mu_finite={report.mu_finite:.6f} origin={fields[-1].value_at_origin():.3e}")
    return EXIT_OK


def _cmd_render(args) -> int:
    out = Path(args.out)
    if args.csv is not None:
        rows = []
        with open(args.csv) as fh:
            header = fh.readline()
            if not header.startswith("x,y,u"):
                raise ValueError(f"{args.csv} is not a field CSV")
            for line in fh:
                parts = line.split(",")
                rows.append((float(parts[0]), float(parts[1]), float(parts[2])))
        if not rows:
            raise ValueError(f"{args.csv} has no data rows")
        doc = svg.render_field_csv(rows)
    else:
        poly = _load_domain(args.infile)
        doc = svg.render_domain(poly)
    _write(out, doc)
    print(f"wrote {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common_solve_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--caps", default="5,10,20,40", help="comma-separated increasing cap list")
    p.add_argument("--h", type=float, default=0.02, help="target mesh edge length")
    p.add_argument("--tol", type=float, default=1e-10, help="Newton tolerance")
    p.add_argument("--variant", default="minimal_hyperbolic",
                   choices=list(solver.VARIANTS), help="operator variant")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scherkdisc",
        description="Scherk-type minimal graphs on a geodesic disc: domains, solves, radial-limit reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-domain", help="construct an admissible polygon domain")
    p.add_argument("--model", default="hyperbolic", choices=["hyperbolic", "euclidean"])
    p.add_argument("--x0", type=float, default=0.0,
                   help="basepoint angle of the quadrilateral (radians)")
    p.add_argument("--attach", default="none", choices=["none", "perturbed", "unperturbed"],
                   help="attach a trapezoid pair to the first adjacent A/B sides")
    p.add_argument("--tau-max", type=float, default=0.05, help="largest perturbation tried")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=_cmd_build_domain)

    p = sub.add_parser("check", help="admissibility report for a domain JSON")
    p.add_argument("--in", dest="infile", required=True, help="domain JSON file")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("solve", help="capped Scherk solve over a domain JSON")
    p.add_argument("--in", dest="infile", required=True, help="domain JSON file")
    _add_common_solve_flags(p)
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("fatou", help="radial-limit and hypothesis reports")
    p.add_argument("--in", dest="infile", required=True, help="domain JSON file")
    _add_common_solve_flags(p)
    p.add_argument("--rays", type=int, default=256, help="number of rays")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=_cmd_fatou)

    p = sub.add_parser("example", help="iterate the example domain sequence")
    p.add_argument("--model", default="hyperbolic", choices=["hyperbolic", "euclidean"])
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--steps", type=int, default=3, help="number of iteration steps")
    _add_common_solve_flags(p)
    p.add_argument("--rays", type=int, default=256)
    p.add_argument("--tau-max", type=float, default=0.05)
    p.add_argument("--r-core", type=float, default=None,
                   help="override the core radius schedule with a fixed value")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=_cmd_example)

    p = sub.add_parser("render", help="render a domain JSON or field CSV as SVG")
    p.add_argument("--in", dest="infile", default=None, help="domain JSON file")
    p.add_argument("--csv", default=None, help="field CSV for a heatmap")
    p.add_argument("--out", required=True, help="output SVG file")
    p.set_defaults(func=_cmd_render)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code not in (0, None) else EXIT_OK
    try:
        _workers()  # validated; execution is deterministic regardless
        if args.command == "render" and args.infile is None and args.csv is None:
            raise ValueError("render needs --in or --csv")
        if getattr(args, "r_core", None) is not None and not (0.5 <= args.r_core < 1.0):
            raise ValueError("--r-core must lie in [0.5, 1)")
        return args.func(args)
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, GeometryError, MalformedPolygonError, MeshError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(run())
