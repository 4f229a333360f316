"""Convergence and conditioning studies on the L-shape benchmark.

Each (mode, target) pair produces one `RunRecord`; records are written to a
CSV file, which is the single source of truth for the derived plot-data files.
"""
from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .adapt import MODES, AdaptParams, adaptation_loop
from .errors import MalformedCsv
from .estimator import DEFAULT_GS_MAX_SWEEPS, DEFAULT_GS_TOL
from .fem import DEFAULT_QUAD_DEGREE, assemble_stiffness, energy_error
from .mesh import max_aspect_ratio
from .problem import get_problem
from .solver import condition_number

log = logging.getLogger(__name__)

DEFAULT_TARGETS = (500, 1000, 2000, 4000, 8000, 16000, 32000)
COLUMNS = ("mode", "N", "n_int", "energy_error", "hb_estimate", "max_aspect",
           "kappa_unscaled", "kappa_scaled", "wall_time", "seed")
MIN_TARGET = 200


@dataclass
class RunRecord:
    mode: str
    N: int
    n_int: int
    energy_error: float
    hb_estimate: float
    max_aspect: float
    kappa_unscaled: float
    kappa_scaled: float
    wall_time: float
    seed: int
    error: str = ""

    def row(self) -> list[str]:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            out.append(format(v, ".17g") if isinstance(v, float) else str(v))
        return out


def _failed(mode, seed, wall, exc) -> RunRecord:
    nan = math.nan
    return RunRecord(mode, 0, 0, nan, nan, nan, nan, nan, wall, seed,
                     f"{type(exc).__name__}: {exc}")


def run_case(mode: str, target: int, *, problem="mitchell-lshape", conditioning=False,
             quad_degree=DEFAULT_QUAD_DEGREE, gs_tol=DEFAULT_GS_TOL,
             gs_max_sweeps=DEFAULT_GS_MAX_SWEEPS, seed=42, params: AdaptParams | None = None,
             debug_dir=None) -> RunRecord:
    """Run the adaptation loop once and measure the final mesh.

    Condition numbers are only computed when ``conditioning`` is set; they
    are reported as NaN otherwise.
    """
    prob = get_problem(problem) if isinstance(problem, str) else problem
    t0 = time.perf_counter()
    steps = adaptation_loop(prob, mode, target, params=params, quad_degree=quad_degree,
                            gs_tol=gs_tol, gs_max_sweeps=gs_max_sweeps,
                            debug_dir=debug_dir, seed=seed)
    final = steps[-1]
    mesh = final.mesh
    err = energy_error(mesh, final.solution, prob, quad_degree)
    k_un = k_sc = math.nan
    if conditioning:
        A = assemble_stiffness(mesh)
        k_un = condition_number(A, seed=seed).kappa
        k_sc = condition_number(A, scale=True, seed=seed).kappa
    wall = time.perf_counter() - t0
    return RunRecord(mode, mesh.n_triangles, mesh.n_int, float(err),
                     float(final.diagnostics["estimate"]), float(max_aspect_ratio(mesh)),
                     float(k_un), float(k_sc), wall, int(seed))


def _check_targets(modes, targets):
    bad = [m for m in modes if m not in MODES]
    if bad:
        raise ValueError(f"unknown modes {bad}; expected a subset of {MODES}")
    targets = list(targets)
    if any(t < MIN_TARGET for t in targets):
        raise ValueError(f"targets must be at least {MIN_TARGET}")
    if targets != sorted(targets):
        raise ValueError("targets must be ascending")
    return targets


def _ordered_modes(modes):
    return [m for m in MODES if m in set(modes)]


def _run_study(modes, targets, out, conditioning, debug_root=None, **kw) -> list[RunRecord]:
    targets = _check_targets(modes, targets)
    records = []
    for mode in _ordered_modes(modes):
        for n in targets:
            t0 = time.perf_counter()
            try:
                dbg = None if debug_root is None else Path(debug_root) / f"{mode}_{n}"
                rec = run_case(mode, n, conditioning=conditioning, debug_dir=dbg, **kw)
            except Exception as exc:  # noqa: BLE001 - failures become rows
                log.warning("%s N=%d failed: %s", mode, n, exc)
                rec = _failed(mode, kw.get("seed", 42), time.perf_counter() - t0, exc)
            log.info("%s target %d: N=%d error %.4g (%.1f s)", mode, n, rec.N,
                     rec.energy_error, rec.wall_time)
            records.append(rec)
    if out is not None:
        write_records(records, out)
    return records


def run_convergence_study(modes, n_targets, out=None, **kw) -> list[RunRecord]:
    """Energy error against element count for each mode and target.

    Keyword arguments are forwarded to `run_case`, except ``debug_root``:
    when given, intermediate meshes of each case go to ``debug_root/<mode>_<target>``.
    """
    return _run_study(modes, n_targets, out, False, **kw)


def run_conditioning_study(modes, n_targets, out=None, **kw) -> list[RunRecord]:
    """As `run_convergence_study`, also recording condition numbers of the
    stiffness matrix with and without diagonal scaling."""
    return _run_study(modes, n_targets, out, True, **kw)


def write_records(records, path) -> None:
    cols = list(COLUMNS)
    has_error = any(r.error for r in records)
    if has_error:
        cols.append("error")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in records:
            row = r.row()
            w.writerow(row if has_error else row[:-1])


def read_records(path) -> list[RunRecord]:
    """Parse a study CSV; raise `MalformedCsv` on a bad header or value."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise MalformedCsv(f"{path}: empty file")
    header = rows[0]
    if tuple(header[:len(COLUMNS)]) != COLUMNS or len(header) > len(COLUMNS) + 1 or \
            (len(header) == len(COLUMNS) + 1 and header[-1] != "error"):
        raise MalformedCsv(f"{path}: unexpected header {header}")
    types = {f.name: f.type for f in fields(RunRecord)}
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise MalformedCsv(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        vals = {}
        try:
            for name, text in zip(header, row):
                t = types[name]
                vals[name] = int(text) if t == "int" else float(text) if t == "float" else text
        except ValueError as exc:
            raise MalformedCsv(f"{path}:{lineno}: {exc}") from None
        if vals["mode"] not in MODES:
            raise MalformedCsv(f"{path}:{lineno}: unknown mode {vals['mode']!r}")
        out.append(RunRecord(**vals))
    return out


def loglog_slope(n, y) -> float:
    """Least-squares slope of ``log y`` against ``log n``."""
    n, y = np.asarray(n, dtype=float), np.asarray(y, dtype=float)
    return float(np.polyfit(np.log(n), np.log(y), 1)[0])


def _fmt(v) -> str:
    return format(float(v), ".17g")


def _write_blocks(path, header, blocks):
    lines = [f"# {header}"]
    for mode, rows in blocks:
        lines.append("")
        lines.append("")
        lines.append(f"# mode {mode}")
        lines.extend(" ".join(_fmt(v) for v in r) for r in rows)
    Path(path).write_text("\n".join(lines) + "\n")


def emit_plot_data(records, out) -> dict[str, Path]:
    """Write gnuplot-style data for the error and conditioning plots.

    ``records`` is a CSV path (or an already parsed list).  Produces
    ``convergence.dat`` with columns ``N energy_error ref_N^-1/2`` and
    ``conditioning.dat`` with ``N kappa_unscaled kappa_scaled ref_N
    ref_NlogN``, one block per mode separated by two blank lines (addressable
    with gnuplot's ``index``).  Reference columns pass through the first
    point of the block: the error line through the first error, the N and
    N log N lines through the first unscaled condition number.  Failed rows
    are skipped.
    """
    if not isinstance(records, list):
        records = read_records(records)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    ok = [r for r in records if not r.error and r.N > 0]
    conv, cond = [], []
    for mode in MODES:
        rs = sorted((r for r in ok if r.mode == mode), key=lambda r: r.N)
        if not rs:
            continue
        n0, e0 = rs[0].N, rs[0].energy_error
        conv.append((mode, [(r.N, r.energy_error, e0 * (r.N / n0) ** -0.5) for r in rs]))
        rk = [r for r in rs if np.isfinite(r.kappa_unscaled)]
        if rk:
            n0, k0 = rk[0].N, rk[0].kappa_unscaled
            cond.append((mode, [(r.N, r.kappa_unscaled, r.kappa_scaled, k0 * r.N / n0,
                                 k0 * (r.N * math.log(r.N)) / (n0 * math.log(n0))) for r in rk]))
    paths = {"convergence": out / "convergence.dat", "conditioning": out / "conditioning.dat"}
    _write_blocks(paths["convergence"], "N energy_error ref_N^-1/2", conv)
    _write_blocks(paths["conditioning"], "N kappa_unscaled kappa_scaled ref_N ref_NlogN", cond)
    return paths


def read_plot_data(path) -> dict[str, np.ndarray]:
    """Parse a file written by `emit_plot_data` into per-mode arrays."""
    blocks: dict[str, list] = {}
    mode = None
    for line in Path(path).read_text().splitlines():
        if line.startswith("# mode "):
            mode = line[7:].strip()
            blocks[mode] = []
        elif line.strip() and not line.startswith("#"):
            blocks[mode].append([float(v) for v in line.split()])
    return {m: np.array(v) for m, v in blocks.items()}


__all__ = ["COLUMNS", "DEFAULT_TARGETS", "RunRecord", "emit_plot_data", "loglog_slope",
           "read_plot_data", "read_records", "run_case", "run_conditioning_study",
           "run_convergence_study", "write_records"]
