"""Command-line interface and export formats.

Subcommands: solve, branches, catastrophe, characteristics, map-scan,
timeline, classify2d, demo, validate.  Problems come from ``--file``
(YAML, see :mod:`eulerhodo.problems`) or, for ``demo``, from the built-in
registry.  Output is plain text by default; ``--format csv`` and
``--format json`` emit machine-readable forms (CSV: header row, %.17g
numerics; JSON: one object with ``schema_version: 1``, arrays row-major).
Given the same problem and seed, output bytes are identical across runs.

Exit codes: 0 success, 1 parse/validation errors, 2 numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import blowup, characteristics, complex2d, mappings
from .expr import EvalDomainError, ParseError
from .hodograph import (
    LeftDomain,
    NoConvergence,
    SingularNearBlowup,
    solve_u,
    real_branches,
    charpoly,
)
from .problems import (
    DEMO_NAMES,
    Problem,
    ProblemFileError,
    builtin_problem,
    load_problem_file,
)

_NUMERICAL_ERRORS = (
    blowup.NoBranch,
    blowup.NotSingular,
    mappings.BlowupTime,
    complex2d.DegenerateDenominator,
    NoConvergence,
    SingularNearBlowup,
    LeftDomain,
    EvalDomainError,
)


def _g(x) -> str:
    return "%.17g" % float(x)


def _fmt_point(p) -> str:
    # display-level cleanup only: full precision goes to csv/json
    vals = [0.0 if abs(float(c)) < 5e-9 else float(c) for c in np.atleast_1d(p)]
    return "(" + ", ".join(f"{v:.8f}" for v in vals) + ")"


# ---------------------------------------------------------------------------
# Export helpers (CSV with RFC-4180 quoting; JSON with schema_version 1)


def _csv_rows(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_g(v) if isinstance(v, (int, float, np.floating)) else str(v) for v in row])
    return buf.getvalue()


def _report_payload(report) -> dict:
    payload = {
        "t_c": report.t_c,
        "u_c": [float(v) for v in report.u_c],
        "x_c": [float(v) for v in report.x_c],
        "branch_kind": report.branch_kind,
        "n_starts": report.n_starts,
        "converged_fraction": report.converged_fraction,
        "boundary": report.boundary,
    }
    if report.x0 is not None:
        payload["x0"] = [float(v) for v in report.x0]
    return payload


def export_json(payload: dict) -> str:
    return json.dumps({"schema_version": 1, **payload}, sort_keys=True)


def _locus_csv(points, t, n):
    header = ["t"] + [f"u{i + 1}" for i in range(n)]
    return _csv_rows(header, [[t] + list(p) for p in points])


def _segments_sidecar(polylines) -> dict:
    segments = []
    start = 0
    for poly in polylines:
        length = len(poly)
        closed = bool(length > 2 and np.all(poly[0] == poly[-1]))
        segments.append({"start": start, "length": length, "closed": closed})
        start += length
    return {"schema_version": 1, "segments": segments}


# ---------------------------------------------------------------------------
# Output plumbing


class _Output:
    def __init__(self, args):
        self.fmt = args.format
        self.out = args.out

    def emit(self, text_lines, csv_text, json_payload, sidecar=None):
        if self.fmt == "text":
            body = "\n".join(text_lines) + "\n"
        elif self.fmt == "csv":
            body = csv_text
        else:
            body = export_json(json_payload) + "\n"
        if self.out:
            with open(self.out, "w", encoding="utf-8") as fh:
                fh.write(body)
            if sidecar is not None and self.fmt == "csv":
                with open(self.out + ".segments.json", "w", encoding="utf-8") as fh:
                    fh.write(json.dumps(sidecar, sort_keys=True) + "\n")
        else:
            sys.stdout.write(body)


def _load(args) -> Problem:
    if getattr(args, "demo_name", None):
        problem = builtin_problem(args.demo_name)
    elif args.file:
        problem = load_problem_file(args.file)
    else:
        raise ProblemFileError("--file is required (or use the demo subcommand)")
    if args.seed is not None:
        problem.settings.seed = args.seed
    if args.starts is not None:
        problem.settings.n_starts = args.starts
    if args.grid is not None:
        problem.settings.grid = args.grid
    return problem


def _need_system(problem: Problem):
    if problem.system is None:
        raise ProblemFileError(
            f"{problem.name!r} provides only initial data; this analysis needs "
            "component functions (hodograph or potential)"
        )
    return problem.system


def _need_field(problem: Problem):
    if problem.field is None:
        raise ProblemFileError(
            f"{problem.name!r} has no initial data; the characteristics side "
            "needs 'initial_data'"
        )
    return problem.field


def _point(arg, n, what):
    if arg is None:
        raise ProblemFileError(f"--at with {n} comma-separated {what}-coordinates is required")
    values = [float(v) for v in str(arg).split(",")]
    if len(values) != n:
        raise ProblemFileError(f"--at expects {n} coordinates, got {len(values)}")
    return np.array(values)


# ---------------------------------------------------------------------------
# Subcommand handlers


def _cmd_solve(args):
    problem = _load(args)
    sys_ = _need_system(problem)
    x = _point(args.at, problem.n, "x")
    if args.t is None:
        raise ProblemFileError("--t is required for solve")
    guess = _point(args.guess, problem.n, "u") if args.guess else sys_.domain.center
    sample = solve_u(sys_, x, args.t, guess)
    payload = {
        "x": [float(v) for v in sample.x],
        "t": sample.t,
        "u": [float(v) for v in sample.u],
        "dudx": [[float(v) for v in row] for row in sample.dudx],
        "dudt": [float(v) for v in sample.dudt],
        "newton_iters": sample.newton_iters,
        "residual": sample.residual,
    }
    n = problem.n
    header = (
        [f"x{i + 1}" for i in range(n)]
        + ["t"]
        + [f"u{i + 1}" for i in range(n)]
        + ["residual", "newton_iters"]
    )
    row = list(sample.x) + [sample.t] + list(sample.u) + [sample.residual, sample.newton_iters]
    text = [
        f"u = {_fmt_point(sample.u)}",
        f"residual = {sample.residual:.3e} ({sample.newton_iters} iterations)",
        f"du/dt = {_fmt_point(sample.dudt)}",
    ]
    _Output(args).emit(text, _csv_rows(header, [row]), payload)
    return 0


def _cmd_branches(args):
    problem = _load(args)
    sys_ = _need_system(problem)
    u = _point(args.at, problem.n, "u")
    branches = real_branches(sys_, u)
    poly = charpoly(sys_, u)
    values = branches.values()
    payload = {
        "u": [float(v) for v in u],
        "roots": [{"t": t, "multiplicity": m} for t, m in branches.roots],
        "charpoly": list(poly.coeffs),
    }
    csv_text = _csv_rows(["t", "multiplicity"], list(branches.roots))
    if values:
        text = ["branches: " + ", ".join(f"{t:.8f}" for t in values)]
    else:
        text = ["branches: none (no real blow-up time at this point)"]
    _Output(args).emit(text, csv_text, payload)
    return 0


def _cmd_catastrophe(args):
    problem = _load(args)
    sys_ = _need_system(problem)
    s = problem.settings
    results = {}
    for key, positive in (("positive", True), ("negative", False)):
        try:
            results[key] = blowup.catastrophe_search(
                sys_, want_positive=positive, n_starts=s.n_starts, seed=s.seed
            )
        except blowup.NoBranch:
            results[key] = None
    if results["positive"] is None and results["negative"] is None:
        raise blowup.NoBranch("no real branch of either sign was found")
    text = []
    pos = results["positive"]
    if pos is not None:
        text += [
            f"t_c = {pos.t_c:.8f}",
            f"u_c = {_fmt_point(pos.u_c)}",
            f"x_c = {_fmt_point(pos.x_c)}",
            f"kind = {pos.branch_kind}" + (" [boundary-adjacent]" if pos.boundary else ""),
        ]
    else:
        text.append("no positive branch (NoBranch)")
    neg = results["negative"]
    if neg is not None:
        text.append(
            f"negative extremum: t = {neg.t_c:.8f} at u = {_fmt_point(neg.u_c)}"
            + (" [boundary-adjacent]" if neg.boundary else "")
        )
    # positive-side keys at top level; the negative extremum nests under it
    payload = dict(_report_payload(pos)) if pos is not None else {
        "t_c": None, "u_c": None, "x_c": None, "branch_kind": None,
    }
    payload["positive"] = None if pos is None else _report_payload(pos)
    payload["negative"] = None if neg is None else _report_payload(neg)
    rows = []
    for key, rep in results.items():
        if rep is not None:
            rows.append([key, rep.t_c, rep.branch_kind] + list(rep.u_c) + list(rep.x_c))
    n = problem.n
    header = (
        ["side", "t_c", "branch_kind"]
        + [f"u{i + 1}" for i in range(n)]
        + [f"x{i + 1}" for i in range(n)]
    )
    _Output(args).emit(text, _csv_rows(header, rows), payload)
    return 0


def _cmd_characteristics(args):
    problem = _load(args)
    field = _need_field(problem)
    s = problem.settings
    if args.t is not None:
        grid = s.grid or 200 if field.n == 2 else s.grid or 60
        region = characteristics.fold_region(field, grid, args.t)
        boundary_points = (
            np.concatenate(region.boundary) if region.boundary else np.empty((0, field.n))
        )
        payload = {
            "t": region.t,
            "empty": region.empty,
            "cells": [list(c) for c in region.cells],
            "boundary": [p.tolist() for p in region.boundary],
        }
        header = ["t"] + [f"x{i + 1}" for i in range(field.n)]
        csv_text = _csv_rows(header, [[region.t] + list(p) for p in boundary_points])
        text = [
            f"fold region at t = {args.t}: "
            + ("empty" if region.empty else f"{len(region.cells)} crossed cells, "
               f"{len(region.boundary)} boundary polyline(s)")
        ]
        _Output(args).emit(text, csv_text, payload, sidecar=_segments_sidecar(region.boundary))
        return 0
    report = characteristics.direct_catastrophe(field, n_starts=s.n_starts, seed=s.seed)
    text = [
        f"t_c = {report.t_c:.8f}",
        f"u_c = {_fmt_point(report.u_c)}",
        f"x_c = {_fmt_point(report.x_c)}",
        f"x0 = {_fmt_point(report.x0)}",
    ]
    n = field.n
    header = (
        ["t_c"]
        + [f"u{i + 1}" for i in range(n)]
        + [f"x{i + 1}" for i in range(n)]
        + [f"x0{i + 1}" for i in range(n)]
    )
    row = [report.t_c] + list(report.u_c) + list(report.x_c) + list(report.x0)
    _Output(args).emit(text, _csv_rows(header, [row]), _report_payload(report))
    return 0


def _cmd_map_scan(args):
    problem = _load(args)
    sys_ = _need_system(problem)
    if args.t is None:
        raise ProblemFileError("--t is required for map-scan")
    locus = mappings.singular_locus(sys_, args.t, grid=problem.settings.grid)
    payload = {
        "t": locus.t,
        "empty": locus.empty,
        "points": locus.points.tolist(),
        "polylines": [p.tolist() for p in locus.polylines],
    }
    csv_text = _locus_csv(locus.points, locus.t, problem.n)
    if locus.empty:
        text = [f"singular locus at t = {args.t}: empty"]
    else:
        text = [
            f"singular locus at t = {args.t}: {len(locus.points)} refined points, "
            f"{len(locus.polylines)} polyline(s)"
        ]
    entry = mappings.catalog().get(problem.name)
    if entry is not None and not locus.empty:
        gap = max(
            abs(entry.closed_form(u, 0.0) + locus.t)
            for u in locus.points[:: max(1, len(locus.points) // 100)]
        )
        text.append(
            f"closed-form check: max |J(u, t=0) + t| on locus = {gap:.2e}"
        )
        payload["closed_form_gap"] = gap
    _Output(args).emit(text, csv_text, payload, sidecar=_segments_sidecar(locus.polylines))
    return 0


def _cmd_timeline(args):
    problem = _load(args)
    sys_ = _need_system(problem)
    if not args.t_range:
        raise ProblemFileError("--t-range a:b is required for timeline")
    try:
        lo, hi = (float(v) for v in args.t_range.split(":"))
    except ValueError:
        raise ProblemFileError("--t-range must look like '-1.5:3.0'") from None
    intervals = mappings.singularity_timeline(
        sys_, (lo, hi), grid=problem.settings.grid, samples=args.samples
    )
    payload = {
        "t_range": [lo, hi],
        "intervals": [
            {"t_lo": iv.t_lo, "t_hi": iv.t_hi, "nonempty": iv.nonempty} for iv in intervals
        ],
    }
    csv_text = _csv_rows(
        ["t_lo", "t_hi", "nonempty"],
        [[iv.t_lo, iv.t_hi, int(iv.nonempty)] for iv in intervals],
    )
    text = [
        f"[{iv.t_lo:.6f}, {iv.t_hi:.6f}] " + ("singular" if iv.nonempty else "regular")
        for iv in intervals
    ]
    _Output(args).emit(text, csv_text, payload)
    return 0


def _cmd_classify2d(args):
    problem = _load(args)
    sys_ = _need_system(problem)
    if problem.n != 2:
        raise ProblemFileError("classify2d needs a 2-dimensional problem")
    sys2d = complex2d.ComplexSystem2D(sys_)
    if args.at is not None:
        points = [_point(args.at, 2, "u")]
    else:
        axes = sys_.domain.axes(args.grid or 11)
        points = [(u, v) for u in axes[0] for v in axes[1]]
    rows = []
    for u, v in points:
        c = complex2d.classify(sys2d, float(u), float(v))
        abs_mu = ""
        if c.t_plus is not None:
            try:
                abs_mu = complex2d.beltrami_mu(sys2d, float(u), float(v), c.t_plus).abs_mu
            except complex2d.DegenerateDenominator:
                abs_mu = ""
        rows.append(
            [u, v, c.delta, "" if c.t_minus is None else c.t_minus,
             "" if c.t_plus is None else c.t_plus, c.label, abs_mu]
        )
    header = ["u", "v", "Delta", "t_minus", "t_plus", "label", "abs_mu_at_tplus"]
    csv_text = _csv_rows(header, rows)
    payload = {
        "rows": [
            {
                "u": float(r[0]),
                "v": float(r[1]),
                "Delta": float(r[2]),
                "t_minus": None if r[3] == "" else float(r[3]),
                "t_plus": None if r[4] == "" else float(r[4]),
                "label": r[5],
                "abs_mu_at_tplus": None if r[6] == "" else float(r[6]),
            }
            for r in rows
        ]
    }
    text = [
        f"u = {float(r[0]):.4f}, v = {float(r[1]):.4f}: {r[5]}, Delta = {float(r[2]):.6g}"
        for r in rows
    ]
    _Output(args).emit(text, csv_text, payload)
    return 0


_DEFAULT_ANALYSIS = {
    "ex61": "catastrophe",
    "ex62": "catastrophe",
    "ex63": "catastrophe",
    "ex64": "characteristics",
    "ex71": "catastrophe",
    "ex72": "timeline",
    "ex73": "timeline",
    "ex81": "catastrophe",
    "ex82": "catastrophe",
    "fold2d": "map-scan",
    "cusp2d": "map-scan",
    "fold3d": "map-scan",
    "cusp3d": "map-scan",
    "swallowtail": "map-scan",
}

_DEFAULT_T_RANGE = {"ex72": "-1.8:4", "ex73": "0:5", "ex71": "0:3"}


def _cmd_demo(args):
    name = args.name
    if name not in DEMO_NAMES:
        raise ProblemFileError(f"unknown demo {name!r}; known: {', '.join(DEMO_NAMES)}")
    analysis = args.analysis or _DEFAULT_ANALYSIS[name]
    args.demo_name = name
    args.file = None
    if analysis == "map-scan" and args.t is None:
        args.t = 1.0
    if analysis == "timeline" and not args.t_range:
        args.t_range = _DEFAULT_T_RANGE.get(name, "-3:3")
    handler = _HANDLERS.get(analysis)
    if handler is None or analysis in ("demo", "validate"):
        raise ProblemFileError(
            f"unknown analysis {analysis!r}; expected one of solve, branches, "
            "catastrophe, characteristics, map-scan, timeline, classify2d"
        )
    return handler(args)


def _cmd_validate(args):
    """Cross-method consistency suite over the built-in problems."""
    checks = []

    def record(name, ok, detail):
        checks.append((name, ok, detail))
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")

    seed = args.seed if args.seed is not None else 0
    for name in ("ex61", "ex62", "ex81"):
        problem = builtin_problem(name)
        hodo = blowup.catastrophe_search(problem.system, n_starts=24, seed=seed)
        direct = characteristics.direct_catastrophe(problem.field, n_starts=24, seed=seed)
        gap = abs(hodo.t_c - direct.t_c)
        record(
            f"{name} hodograph vs characteristics t_c",
            gap <= 1e-5,
            f"|{hodo.t_c:.8f} - {direct.t_c:.8f}| = {gap:.2e}",
        )
    rng = np.random.default_rng(seed)
    for name in ("ex61", "ex72", "ex82"):
        problem = builtin_problem(name)
        worst = 0.0
        for point in problem.system.domain.sample(rng, 25):
            poly = charpoly(problem.system, point)
            det = float(np.linalg.det(problem.system.f.jacobian(point)))
            worst = max(worst, abs(poly.coeffs[0] - det) / (1.0 + abs(det)))
        record(
            f"{name} charpoly constant term vs det J_f",
            worst <= 1e-10,
            f"max relative gap {worst:.2e}",
        )
    problem = builtin_problem("ex61")
    sys2d = complex2d.ComplexSystem2D(problem.system)
    worst = 0.0
    for point in problem.system.domain.sample(rng, 50):
        u, v = float(point[0]), float(point[1])
        t = float(rng.uniform(-3.0, 3.0))
        via_complex = complex2d.det_M_complex(sys2d, u, v, t)
        direct = float(np.linalg.det(problem.system.f.jacobian(point) + t * np.eye(2)))
        worst = max(worst, abs(via_complex - direct) / (1.0 + abs(direct)))
    record("ex61 complex det M factorization", worst <= 1e-10, f"max relative gap {worst:.2e}")
    failures = [c for c in checks if not c[1]]
    print(f"{len(checks) - len(failures)}/{len(checks)} checks passed")
    return 2 if failures else 0


_HANDLERS = {
    "solve": _cmd_solve,
    "branches": _cmd_branches,
    "catastrophe": _cmd_catastrophe,
    "characteristics": _cmd_characteristics,
    "map-scan": _cmd_map_scan,
    "timeline": _cmd_timeline,
    "classify2d": _cmd_classify2d,
    "demo": _cmd_demo,
    "validate": _cmd_validate,
}


def _add_common(sub):
    sub.add_argument("--file", help="YAML problem file")
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--grid", type=int, default=None)
    sub.add_argument("--starts", type=int, default=None)
    sub.add_argument("--t", type=float, default=None)
    sub.add_argument("--t-range", dest="t_range", default=None, help="a:b")
    sub.add_argument("--at", default=None, help="comma-separated coordinates")
    sub.add_argument("--guess", default=None, help="comma-separated initial guess")
    sub.add_argument("--samples", type=int, default=256, help="timeline t samples")
    sub.add_argument("--format", choices=("text", "csv", "json"), default="text")
    sub.add_argument("--out", default=None, help="write output to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eulerhodo",
        description="Blow-ups, gradient catastrophes and mapping singularities "
        "of the homogeneous Euler equation via hodograph relations.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in ("solve", "branches", "catastrophe", "characteristics",
                    "map-scan", "timeline", "classify2d"):
        sub = subparsers.add_parser(command)
        _add_common(sub)
    demo = subparsers.add_parser("demo", help="run a built-in example by name")
    demo.add_argument("name", choices=DEMO_NAMES)
    demo.add_argument("analysis", nargs="?", default=None)
    _add_common(demo)
    validate = subparsers.add_parser("validate", help="cross-method consistency suite")
    _add_common(validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.demo_name = getattr(args, "demo_name", None)
    handler = _HANDLERS[args.command]
    try:
        return handler(args)
    except (ProblemFileError, ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
