"""Command line entry point: ``anisofem study ...`` and ``anisofem mesh show ...``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harness
from .adapt import MODES
from .estimator import DEFAULT_GS_MAX_SWEEPS, DEFAULT_GS_TOL
from .fem import DEFAULT_QUAD_DEGREE
from .errors import DegenerateElement
from .mesh import max_aspect_ratio, read_mesh, validate
from .problem import PROBLEMS

EXIT_OK = 0
EXIT_PARTIAL = 2


def _csv_list(conv):
    def parse(text):
        try:
            return [conv(v) for v in text.split(",") if v.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return parse


def _modes(text):
    modes = _csv_list(str.strip)(text)
    bad = [m for m in modes if m not in MODES]
    if bad or not modes:
        raise argparse.ArgumentTypeError(f"modes must be drawn from {','.join(MODES)}")
    return modes


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="anisofem",
                                description="Anisotropic adaptive P1 finite element studies.")
    p.add_argument("-v", "--verbose", action="count", default=0,
                   help="log progress (-v) or debug detail (-vv)")
    sub = p.add_subparsers(dest="command", required=True)

    study = sub.add_parser("study", help="run a convergence or conditioning study")
    study.add_argument("kind", choices=["convergence", "conditioning"])
    study.add_argument("--modes", type=_modes, default=list(MODES),
                       help="comma-separated subset of " + ",".join(MODES))
    study.add_argument("--targets", type=_csv_list(int), default=list(harness.DEFAULT_TARGETS),
                       help="ascending element-count targets, each >= 200")
    study.add_argument("--problem", choices=sorted(PROBLEMS), default="mitchell-lshape")
    study.add_argument("--quad-degree", type=int, default=DEFAULT_QUAD_DEGREE,
                       help="exactness degree of the element quadrature (2..10)")
    study.add_argument("--gs-tol", type=float, default=DEFAULT_GS_TOL,
                       help="relative-change tolerance of the estimator sweeps")
    study.add_argument("--gs-max-sweeps", type=int, default=DEFAULT_GS_MAX_SWEEPS,
                       help="cap on symmetric Gauss-Seidel sweeps")
    study.add_argument("--seed", type=int, default=42, help="seed of the initial mesh jitter")
    study.add_argument("--out", type=Path, required=True, help="output directory")
    study.add_argument("--debug-meshes", action="store_true",
                       help="write intermediate meshes under OUT/meshes")

    mesh = sub.add_parser("mesh", help="mesh file utilities")
    msub = mesh.add_subparsers(dest="mesh_command", required=True)
    show = msub.add_parser("show", help="print the validity report and max aspect ratio")
    show.add_argument("file", type=Path)

    plot = sub.add_parser("plot-data", help="regenerate plot data from a study CSV")
    plot.add_argument("csv", type=Path)
    plot.add_argument("--out", type=Path, required=True)
    return p


def _study(args) -> int:
    if not 2 <= args.quad_degree <= 10:
        raise SystemExit("--quad-degree must lie in 2..10")
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    run = harness.run_convergence_study if args.kind == "convergence" else harness.run_conditioning_study
    records = run(args.modes, args.targets, problem=args.problem, quad_degree=args.quad_degree,
                  gs_tol=args.gs_tol, gs_max_sweeps=args.gs_max_sweeps, seed=args.seed,
                  debug_root=out / "meshes" if args.debug_meshes else None)
    csv_path = out / f"{args.kind}.csv"
    harness.write_records(records, csv_path)
    harness.emit_plot_data(records, out)
    failed = sum(bool(r.error) for r in records)
    print(f"wrote {csv_path} ({len(records)} rows, {failed} failed)")
    return EXIT_PARTIAL if failed else EXIT_OK


def _mesh_show(args) -> int:
    mesh = read_mesh(args.file)
    report = validate(mesh)
    print(f"{args.file}: {mesh.n_vertices} vertices, {mesh.n_triangles} triangles, "
          f"{mesh.n_int} interior")
    if report:
        print(f"{len(report)} violation(s):")
        for v in report:
            print(f"  {v}")
    else:
        print("valid")
    try:
        print(f"max aspect ratio: {max_aspect_ratio(mesh):.6g}")
    except DegenerateElement as exc:
        print(f"max aspect ratio: undefined ({exc})")
    return EXIT_OK if not report else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "study":
        return _study(args)
    if args.command == "mesh":
        return _mesh_show(args)
    harness.emit_plot_data(args.csv, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
