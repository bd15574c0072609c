"""Command-line front-end: computations in, tables/JSON/CSV out.

Exit codes: 0 success, 2 domain error, 3 verification-report failure,
64 usage error.  All numbers print with 12 significant digits; CSV files
carry a versioned header.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field


from . import area_bounds, filler, flat_torus, minimal_graph, sweepout
from . import tube_geometry as tubes
from .errors import DomainError, SolveError
from .flat_torus import FlatTorusLattice
from .warped_metric import spec_from_json

CSV_HEADER = "# thinpart-csv v1"

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_VERIFY = 3
EXIT_USAGE = 64


def fmt(x) -> str:
    return format(float(x), ".12g")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


@dataclass
class ManifoldDescription:
    """Thin-part description: cusp pieces, tube pieces, filler caps."""

    cusps: list = field(default_factory=list)
    tubes: list = field(default_factory=list)
    fillers: list = field(default_factory=list)
    attachments: dict = field(default_factory=dict)

    @classmethod
    def from_json_dict(cls, data: dict) -> "ManifoldDescription":
        desc = cls()
        for entry in data.get("cusps", []):
            lat = FlatTorusLattice.from_json_dict(entry["lattice"])
            desc.cusps.append(tubes.CuspParams(lat, float(entry["t0"]), float(entry["t1"])))
        for entry in data.get("tubes", []):
            length = float(entry["length"])
            radius = entry.get("radius", "meyerhoff")
            if radius == "meyerhoff":
                radius = tubes.meyerhoff_radius(length)
            desc.tubes.append(
                tubes.TubeParams(length, float(entry.get("twist", 0.0)), float(radius))
            )
        for idx, entry in enumerate(data.get("fillers", [])):
            depth = float(entry["L"])
            if "lattice" in entry:
                lat = FlatTorusLattice.from_json_dict(entry["lattice"])
            elif "attach" in entry:
                cusp = desc.cusps[int(entry["attach"])]
                lat = cusp.lattice.scaled(math.exp(-cusp.t1))
            else:
                raise DomainError("filler entry needs 'lattice' or 'attach'")
            desc.fillers.append(filler.build(depth, lat))
            if "attach" in entry:
                desc.attachments[idx] = int(entry["attach"])
        return desc


def parse_lattice_literal(text: str) -> FlatTorusLattice:
    """Lattice literal "a1,a2,b2"."""
    parts = text.split(",")
    if len(parts) != 3:
        raise DomainError(f"lattice literal must be 'a1,a2,b2', got {text!r}")
    try:
        a1, a2, b2 = (float(p) for p in parts)
    except ValueError as exc:
        raise DomainError(f"bad lattice literal {text!r}") from exc
    return FlatTorusLattice(a1, a2, b2)


def _emit(payload: dict, as_json: bool):
    if as_json:
        print(json.dumps(payload, indent=2))
        return
    for key, value in payload.items():
        if isinstance(value, float):
            print(f"{key:28s} {fmt(value)}")
        elif isinstance(value, (list, tuple)) and value and isinstance(value[0], float):
            print(f"{key:28s} " + "  ".join(fmt(v) for v in value))
        else:
            print(f"{key:28s} {value}")


def _write_csv(path, columns, rows):
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        fh.write("# columns: " + ",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(fmt(x) if isinstance(x, float) else str(x) for x in row))
            fh.write("\n")


# ------------------------------------------------------------- subcommands


def _cmd_meyerhoff(args) -> int:
    radius = tubes.meyerhoff_radius(args.length)
    _emit({"length": args.length, "radius": radius}, args.json)
    return EXIT_OK


def _cmd_tube(args) -> int:
    length = args.length
    r_meyerhoff = tubes.meyerhoff_radius(length)
    radius = r_meyerhoff if args.radius is None else args.radius
    params = tubes.TubeParams(length, args.twist, radius)
    lat = tubes.boundary_lattice(params, radius)
    payload = {
        "length": length,
        "twist": args.twist,
        "radius": radius,
        "meyerhoff_radius": r_meyerhoff,
        "boundary_v1": [lat.a1, 0.0],
        "boundary_v2": [lat.a2, lat.b2],
        "systole": flat_torus.systole(lat),
        "diameter": flat_torus.diameter(lat),
        "slice_area": tubes.slice_area(length, radius),
        "mean_curvature": tubes.slice_mean_curvature(radius),
    }
    _emit(payload, args.json)
    return EXIT_OK


def _cmd_lattice(args) -> int:
    lat = parse_lattice_literal(args.lattice)
    red = flat_torus.reduce_basis(lat)
    payload = {
        "input": lat.to_json_dict(),
        "reduced": red.to_json_dict(),
        "systole": flat_torus.systole(lat),
        "diameter": flat_torus.diameter(lat),
        "area": lat.area,
    }
    _emit(payload, args.json)
    return EXIT_OK


def _cmd_bounds(args) -> int:
    if args.bound == "disk":
        _emit({"R": args.R, "area": area_bounds.parallel_disk_area(args.R)}, args.json)
    elif args.bound == "band":
        est = area_bounds.BandEstimate(args.rho1, args.rho2, args.sys, args.RL)
        bound, intermediate = area_bounds.annulus_band_bound(est)
        _emit({"bound": bound, "intermediate": intermediate}, args.json)
    elif args.bound == "crossing":
        cb = area_bounds.crossing_lower_bound(args.R, args.RL, args.sys, args.kpp)
        _emit(
            {
                "chain": cb.chain,
                "simplified": cb.simplified,
                "kappa2": cb.kappa2,
                "kappa3": cb.kappa3,
            },
            args.json,
        )
    else:
        _emit(
            {
                "eps": args.eps,
                "area": area_bounds.margulis_area_bound(args.eps),
                "margulis_epsilon_lower": area_bounds.MARGULIS_EPSILON_LOWER,
            },
            args.json,
        )
    return EXIT_OK


def _cmd_filler(args) -> int:
    if args.action == "build":
        lat = parse_lattice_literal(args.lattice)
        spec = filler.build(args.L, lat)
        filler.save(spec, args.out)
        _emit(
            {
                "out": args.out,
                "depth": spec.depth,
                "collapse_slope": spec.collapse_slope,
                "core_height": spec.core_height,
            },
            args.json,
        )
        return EXIT_OK
    spec = filler.load(args.spec)
    report = filler.verify(spec, grid=args.grid)
    bound = filler.area_lower_bound(spec, args.c)
    payload = {
        "flat_levels": report.flat_levels,
        "diameters_strictly_decreasing": report.diameters_strictly_decreasing,
        "mean_convex": report.mean_convex,
        "boundary_collar_exact": report.boundary_collar_exact,
        "continuous_at_collar": report.continuous_at_collar,
        "profile_cap": report.profile_cap,
        "ramp_flatness_sup": report.ramp_flatness_sup,
        "core_theta_slope": report.core_theta_slope,
        "core_z_slope": report.core_z_slope,
        "core_theta_constant": report.core_theta_constant,
        "core_z_constant": report.core_z_constant,
        "ball_count_note": report.ball_count_note,
        "area_lower_bound": bound.bound,
        "kappa": bound.kappa,
        "monotonicity_constant": bound.monotonicity_constant,
        "ball_count": bound.ball_count,
        "passed": report.passed,
    }
    _emit(payload, args.json)
    return EXIT_OK if report.passed else EXIT_VERIFY


def _parse_grid(text: str):
    try:
        n1, n2 = text.lower().split("x")
        return int(n1), int(n2)
    except ValueError as exc:
        raise DomainError(f"grid must look like 64x64, got {text!r}") from exc


def _parse_extent(text: str):
    try:
        x1, x2 = text.lower().split("x")
        return float(x1), float(x2)
    except ValueError as exc:
        raise DomainError(f"extent must look like 1.0x1.0, got {text!r}") from exc


def _boundary_function(bc: dict):
    kind = bc.get("kind")
    if kind == "affine":
        c0, c1, c2 = (float(c) for c in bc["coeffs"])
        return lambda x, y: c0 + c1 * x + c2 * y
    if kind == "constant":
        v = float(bc["value"])
        return lambda x, y: v + 0.0 * x
    raise DomainError(f"unsupported boundary data kind {kind!r}")


def _cmd_graph(args) -> int:
    with open(args.metric) as fh:
        spec = spec_from_json(json.load(fh))
    with open(args.bc) as fh:
        bc = json.load(fh)
    fn = _boundary_function(bc)
    shape = _parse_grid(args.grid)
    if args.domain == "torus":
        init = minimal_graph.DiscreteGraph.on_torus(spec.lattice, shape, fn)
    else:
        periodic = (True, False) if args.domain == "stripe" else (False, False)
        extent = _parse_extent(args.extent)
        init = minimal_graph.DiscreteGraph.on_rectangle(
            extent, shape, fn, periodic=periodic
        )
    try:
        out, report = minimal_graph.solve(
            spec, init, tol=args.tol, max_iter=args.max_iter
        )
    except SolveError as exc:
        print(f"solve failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    # Row-major grid of u: one CSV line per x1 row.
    rows = [tuple(float(v) for v in out.values[i]) for i in range(out.shape[0])]
    _write_csv(args.out, [f"u[:,{j}]" for j in range(out.shape[1])], rows)
    _emit(
        {
            "out": args.out,
            "iterations": report.iterations,
            "final_residual": report.final_residual,
            "pinned_mean": report.pinned_mean,
            "grid": f"{shape[0]}x{shape[1]}",
        },
        args.json,
    )
    return EXIT_OK


def _cmd_sweepout(args) -> int:
    if args.action == "profile":
        with open(args.manifold) as fh:
            desc = ManifoldDescription.from_json_dict(json.load(fh))
        prof = sweepout.profile(
            cusps=desc.cusps,
            tubes=desc.tubes,
            fillers=desc.fillers,
            attachments=desc.attachments,
            samples=args.samples,
        )
        rows = prof.samples()
        if args.emit == "csv":
            target = args.out or "profile.csv"
            _write_csv(target, ["t", "segment", "area"], rows)
            _emit(
                {"out": target, "width_upper_bound": prof.width_upper_bound},
                args.json,
            )
        else:
            payload = {
                "width_upper_bound": prof.width_upper_bound,
                "samples": [[t, label, a] for t, label, a in rows],
            }
            if args.out:
                with open(args.out, "w") as fh:
                    json.dump(payload, fh)
                _emit({"out": args.out,
                       "width_upper_bound": prof.width_upper_bound}, args.json)
            else:
                print(json.dumps(payload))
        return EXIT_OK
    with open(args.family) as fh:
        data = json.load(fh)
    currents = tuple(
        sweepout.FormalCurrent(
            tuple((p["patch"], int(p["multiplicity"]), float(p["area"]))
                  for p in entry)
        )
        for entry in data["currents"]
    )
    fam = sweepout.DiscreteFamily(int(data["level"]), currents)
    _emit(
        {
            "level": fam.level,
            "fineness": sweepout.fineness(fam),
            "max_mass": sweepout.max_mass(fam),
            "zero_anchored": fam.is_zero_anchored,
        },
        args.json,
    )
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> _Parser:
    p = _Parser(prog="thinpart", description=__doc__)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--tol", type=float, default=1e-8, help="solver tolerance")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for randomized test utilities")
    sub = p.add_subparsers(dest="command", required=True)

    mey = sub.add_parser("meyerhoff", help="guaranteed embedded tube radius")
    mey.add_argument("--length", type=float, required=True)
    mey.set_defaults(func=_cmd_meyerhoff)

    tube = sub.add_parser("tube", help="tube geometry summary")
    tube.add_argument("--length", type=float, required=True)
    tube.add_argument("--twist", type=float, default=0.0)
    tube.add_argument("--radius", type=float, default=None)
    tube.set_defaults(func=_cmd_tube)

    lat = sub.add_parser("lattice", help="reduce a lattice; systole/diameter")
    lat.add_argument("--lattice", required=True, help="literal a1,a2,b2")
    lat.set_defaults(func=_cmd_lattice)

    bounds = sub.add_parser("bounds", help="explicit area bounds")
    bsub = bounds.add_subparsers(dest="bound", required=True)
    disk = bsub.add_parser("disk")
    disk.add_argument("--R", type=float, required=True)
    band = bsub.add_parser("band")
    band.add_argument("--rho1", type=float, required=True)
    band.add_argument("--rho2", type=float, required=True)
    band.add_argument("--sys", type=float, required=True)
    band.add_argument("--RL", type=float, required=True)
    crossing = bsub.add_parser("crossing")
    crossing.add_argument("--R", type=float, required=True)
    crossing.add_argument("--RL", type=float, required=True)
    crossing.add_argument("--sys", type=float, required=True)
    crossing.add_argument("--kpp", type=float, default=1.0)
    margulis = bsub.add_parser("margulis")
    margulis.add_argument("--eps", type=float, required=True)
    bounds.set_defaults(func=_cmd_bounds)

    fil = sub.add_parser("filler", help="build or verify a filler")
    fsub = fil.add_subparsers(dest="action", required=True)
    fbuild = fsub.add_parser("build")
    fbuild.add_argument("--L", type=float, required=True)
    fbuild.add_argument("--lattice", required=True, help="literal a1,a2,b2")
    fbuild.add_argument("--out", required=True)
    fverify = fsub.add_parser("verify")
    fverify.add_argument("spec")
    fverify.add_argument("--grid", type=int, default=200)
    fverify.add_argument("--c", type=float, default=math.pi,
                         help="monotonicity constant")
    fil.set_defaults(func=_cmd_filler)

    graph = sub.add_parser("graph", help="solve the minimal-graph equation")
    gsub = graph.add_subparsers(dest="action", required=True)
    gsolve = gsub.add_parser("solve")
    gsolve.add_argument("--metric", required=True, help="metric spec JSON")
    gsolve.add_argument("--domain", choices=["torus", "rect", "stripe"],
                        default="rect")
    gsolve.add_argument("--grid", required=True, help="N1xN2")
    gsolve.add_argument("--extent", default="1.0x1.0", help="X1xX2 (rect/stripe)")
    gsolve.add_argument("--bc", required=True, help="boundary data JSON")
    gsolve.add_argument("--out", required=True, help="output CSV path")
    gsolve.add_argument("--max-iter", type=int, default=60)
    graph.set_defaults(func=_cmd_graph)

    sw = sub.add_parser("sweepout", help="area profiles and fineness")
    ssub = sw.add_subparsers(dest="action", required=True)
    sprof = ssub.add_parser("profile")
    sprof.add_argument("--manifold", required=True, help="manifold JSON")
    sprof.add_argument("--samples", type=int, default=200)
    sprof.add_argument("--emit", choices=["csv", "json"], default="csv")
    sprof.add_argument("--out", default=None)
    sfine = ssub.add_parser("fineness")
    sfine.add_argument("--family", required=True, help="family JSON")
    sw.set_defaults(func=_cmd_sweepout)

    return p


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
