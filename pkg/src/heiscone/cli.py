"""Command line entry point: ``heiscone trace | validate | connect``.

Exit codes: 0 success, 1 bad input or I/O, 2 domain breach, 3 solver
non-convergence.  ``validate`` exits 1 when any check fails.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import analysis as an
from . import closed_form as cf
from . import numeric as nm
from .cone import ConePoint, DomainError, FrameVecC
from .heisenberg import FrameVecH, HeisPoint, NonUnitVectorError, normalize, require_unit

EXIT_OK, EXIT_INPUT, EXIT_BREACH, EXIT_SOLVER = 0, 1, 2, 3
EXIT_FAILED_CHECKS = 1
SUITES = ("structures", "geodesics", "embedding", "completeness", "shooting", "all")


class InputError(ValueError):
    pass


def _floats(text: str, n: int, what: str) -> list:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"{what}: expected {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n:
        raise InputError(f"{what}: expected {n} components, got {len(vals)}")
    return vals


def _span(text: str):
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise InputError(f"--s: expected START:END, got {text!r}") from None
    if not lo < hi:
        raise InputError("--s: need s_start < s_end")
    return lo, hi


def _fmt(v) -> str:
    return format(float(v), ".17g")


def _columns(space: str, both: bool) -> list:
    coords = ["x", "y", "t"] + (["r"] if space == "cone" else [])
    frame = ["f", "g", "h"] + (["k"] if space == "cone" else [])
    return ["s", *coords, *frame, "speed_err"] + (["dev"] if both else [])


def _build_ic(args):
    if args.space == "heisenberg":
        point = HeisPoint(*_floats(args.base, 3, "--base"))
        frame = FrameVecH(*_floats(args.dir, 3, "--dir"))
    else:
        x, y, t, r = _floats(args.base, 4, "--base")
        if not r > 0:
            raise InputError(f"--base: cone radius must be positive (r > 0), got r={r!r}")
        point = ConePoint(x, y, t, r)
        frame = FrameVecC(*_floats(args.dir, 4, "--dir"))
    if args.normalize:
        frame = normalize(frame)
    try:
        require_unit(frame)
    except NonUnitVectorError as exc:
        raise InputError(f"--dir: {exc}") from None
    return point, frame


def _closed_rows(space, geo, samples):
    """Closed-form rows for ``samples`` up to the first out-of-domain one."""
    if space == "heisenberg":
        return samples, cf.heis_geodesic_eval_array(geo, samples), cf.heis_geodesic_velocity_array(geo, samples), None
    dom = cf.geodesic_domain(geo)
    lo, hi = dom.s_min + nm.R_MIN_INTEGRATION, dom.s_max - nm.R_MIN_INTEGRATION
    ok = (samples > lo) & (samples < hi)
    breach = None
    if not np.all(ok):
        breach = hi if np.any(samples >= hi) else lo
        samples = samples[ok]
    return samples, cf.cone_geodesic_eval_array(geo, samples), cf.cone_geodesic_velocity_array(geo, samples), breach


def _numeric_rows(system, state0, samples, step):
    lo, hi = float(samples[0]), float(samples[-1])
    traces = []
    breach = None
    ends = ([hi] if hi > 0 else []) + ([lo] if lo < 0 else [])
    for end in ends:
        tr = nm.integrate(system, state0, end, nm.StepPolicy.fixed(step))
        traces.append(tr)
        if tr.breach is not None:
            breach = tr.breach
    covered_lo = min([0.0] + [float(tr.s.min()) for tr in traces])
    covered_hi = max([0.0] + [float(tr.s.max()) for tr in traces])
    keep = (samples >= covered_lo) & (samples <= covered_hi)
    samples = samples[keep]
    states = np.empty((len(samples), system.dim))
    for tr in traces:
        sel = (samples >= min(tr.s[0], tr.s[-1])) & (samples <= max(tr.s[0], tr.s[-1]))
        if np.any(sel):
            states[sel] = nm.resample(tr, samples[sel]).states
    if not traces:
        states[:] = state0
    return samples, states, breach


def cmd_trace(args) -> int:
    point, frame = _build_ic(args)
    s_lo, s_hi = _span(args.s)
    if args.n < 2:
        raise InputError("--n: need at least 2 samples")
    samples = np.linspace(s_lo, s_hi, args.n)
    space = args.space
    if space == "heisenberg":
        geo = cf.heis_geodesic_from_ic(point, frame)
        system, state0 = nm.HEIS, nm.heis_state(point, frame)
    else:
        geo = cf.cone_geodesic_from_ic(point, frame)
        system, state0 = nm.CONE, nm.cone_state(point, frame)
    ncoord = len(system.coord_names)

    breach = None
    if args.method in ("closed", "both"):
        s_c, pts, vel, breach = _closed_rows(space, geo, samples)
        primary_s, primary = s_c, np.concatenate([pts, vel], axis=1)
    if args.method in ("rk4", "both"):
        s_n, states, breach_n = _numeric_rows(system, state0, samples, args.step)
        if args.method == "rk4":
            primary_s, primary, breach = s_n, states, breach_n
        else:
            if breach_n is not None:
                breach = breach_n if breach is None else min(breach, breach_n, key=abs)
            common = np.intersect1d(primary_s, s_n)
            primary = primary[np.isin(primary_s, common)]
            states = states[np.isin(s_n, common)]
            primary_s = common
    speed = np.abs(system.speed2(primary) - 1.0)
    rows = np.column_stack([primary_s, primary, speed])
    if args.method == "both":
        dev = np.linalg.norm(primary[:, :ncoord] - states[:, :ncoord], axis=1)
        rows = np.column_stack([rows, dev])
    columns = _columns(space, args.method == "both")
    if breach is not None:
        marker = np.full((1, len(columns)), np.nan)
        marker[0, 0] = breach
        rows = np.vstack([rows, marker])

    if args.format == "csv":
        lines = [",".join(columns)] + [",".join(_fmt(v) for v in row) for row in rows]
        text = "\n".join(lines) + "\n"
    else:
        payload = {
            "space": space,
            "method": args.method,
            "geodesic": an.geodesic_to_dict(geo),
            "columns": columns,
            "rows": [[None if math.isnan(v) else float(v) for v in row] for row in rows],
            "breach": breach,
        }
        text = json.dumps(payload, indent=2) + "\n"
    _write(args.output, text)
    if breach is not None:
        print(f"domain breach: radius reached r_min at s = {breach!r}", file=sys.stderr)
        return EXIT_BREACH
    return EXIT_OK


def run_suite(suite: str, seed: int, n_points: int = 1000, n_ics: int = 100) -> an.ValidationReport:
    if suite == "structures":
        return an.structure_validate(n_points, seed)
    if suite == "geodesics":
        return an.geodesic_suite(seed, n_ics)
    if suite == "embedding":
        return an.embedding_suite(seed)
    if suite == "completeness":
        return an.completeness_suite()
    if suite == "shooting":
        return an.shooting_suite(seed)
    rep = an.ValidationReport("all", provenance={"seed": seed, "n_points": n_points, "n_ics": n_ics})
    for name in SUITES[:-1]:
        rep.extend(run_suite(name, seed, n_points, n_ics), prefix=f"{name}.")
    return rep


def cmd_validate(args) -> int:
    rep = run_suite(args.suite, args.seed, args.n_points, args.n_ics)
    payload = {"suite": args.suite, "seed": args.seed, **rep.to_dict()}
    _write(args.output, json.dumps(payload, indent=2) + "\n")
    return EXIT_OK if rep.passed else EXIT_FAILED_CHECKS


def cmd_connect(args) -> int:
    x, y, t, r = _floats(args.p, 4, "P")
    p = ConePoint(x, y, t, r)
    q = ConePoint(*_floats(args.q, 4, "Q"))
    res = an.connect_shooting(p, q, args.max_iter, args.tol)
    _write(args.output, json.dumps(res.to_dict(), indent=2) + "\n")
    if not res.converged:
        print(f"shooting did not converge: best endpoint residual {res.residual!r}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heiscone", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("trace", help="sample a geodesic to CSV or JSON")
    tr.add_argument("--space", choices=("heisenberg", "cone"), required=True)
    tr.add_argument("--base", required=True, help="x,y,t (heisenberg) or x,y,t,r (cone)")
    tr.add_argument("--dir", required=True, help="unit frame velocity f,g,h[,k]")
    tr.add_argument("--s", default="0:1", help="parameter range START:END (use --s=-1:1 for negative starts)")
    tr.add_argument("--n", type=int, default=101, help="number of samples")
    tr.add_argument("--method", choices=("closed", "rk4", "both"), default="closed")
    tr.add_argument("--step", type=float, default=1e-3, help="RK4 step")
    tr.add_argument("--format", choices=("csv", "json"), default="csv")
    tr.add_argument("--normalize", action="store_true", help="rescale --dir to unit length")
    tr.add_argument("-o", "--output", default="-")
    tr.set_defaults(func=cmd_trace)

    va = sub.add_parser("validate", help="run a validation suite and write a JSON report")
    va.add_argument("--suite", choices=SUITES, default="all")
    va.add_argument("--seed", type=int, default=42)
    va.add_argument("--n-points", type=int, default=1000)
    va.add_argument("--n-ics", type=int, default=100)
    va.add_argument("--format", choices=("json",), default="json")
    va.add_argument("-o", "--output", default="-")
    va.set_defaults(func=cmd_validate)

    co = sub.add_parser("connect", help="shoot a cone geodesic from P to Q")
    co.add_argument("p", metavar="P", help="x,y,t,r")
    co.add_argument("q", metavar="Q", help="x,y,t,r")
    co.add_argument("--tol", type=float, default=1e-10)
    co.add_argument("--max-iter", type=int, default=50)
    co.add_argument("-o", "--output", default="-")
    co.set_defaults(func=cmd_connect)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, NonUnitVectorError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
