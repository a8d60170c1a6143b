"""Command-line front end: analyze, classify, decompose, returnmap, orbit,
scan, plotdata, embed-unimodal.

Reports are JSON (schema in schemas/map_report.schema.json, versioned);
orbit/return-map/scan outputs are CSV. Runs are deterministic for a fixed
config and seed. The sweep command fans out on a thread pool bounded by
LORENZLAB_THREADS and reassembles rows in input order.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .map_core import (
    BUILTIN_NAMES,
    LorenzMapSpec,
    MapValidationError,
    Side,
    critical_values,
    embed_unimodal,
    load_map,
    logistic,
    quadratic_pair,
    validate_map,
)
from .orbits import iterate_orbit, lyapunov
from .periodic import find_periodic_points
from .renorm import find_renormalizations
from .return_maps import first_return_map, is_nice
from .spectral import (
    Budgets,
    classify_attractor,
    decompose,
    entropy_estimate,
    solenoid_entropy_bound,
)

EXIT_OK = 0
EXIT_BAD_CONFIG = 2
EXIT_INVALID_MAP = 3

SCHEMA_VERSION = "1"


def _worker_count() -> int:
    env = os.environ.get("LORENZLAB_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def _load_budgets(arg: str | None) -> Budgets:
    if not arg:
        return Budgets()
    if os.path.exists(arg):
        with open(arg, "r", encoding="utf-8") as fh:
            return Budgets.from_dict(json.load(fh))
    return Budgets.from_dict(json.loads(arg))


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def build_report(spec: LorenzMapSpec, budgets: Budgets) -> dict:
    """Full analysis pipeline: validate, periodic catalog, renormalization
    sequence, decomposition, Lyapunov samples and entropy."""
    report: dict = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "lorenzlab", "version": __version__},
        "map": spec.to_dict(),
    }
    validation = validate_map(spec)
    report["validation"] = validation.to_dict()
    if not (validation.is_lorenz and validation.is_contracting):
        report["error"] = "map failed validation"
        return report

    catalog = find_periodic_points(spec, budgets.max_period, budgets.grid_resolution)
    report["periodic_catalog"] = [r.to_dict() for r in catalog]
    seq = find_renormalizations(
        spec, budgets.max_period, budgets.max_depth, budgets.horizon, catalog
    )
    report["renorm"] = seq.to_dict()
    dec = decompose(spec, budgets)
    report["decomposition"] = dec.to_dict()

    rng = np.random.default_rng(budgets.seed)
    v0, v1 = critical_values(spec)
    samples = []
    for label, x0 in (
        ("critical_plus", min(max(v0, 0.0), 1.0)),
        ("critical_minus", min(max(v1, 0.0), 1.0)),
        ("random", float(rng.uniform(0.05, 0.95))),
    ):
        est = lyapunov(spec, x0, max(budgets.horizon, 1000))
        samples.append(
            {
                "label": label,
                "x0": x0,
                "value": est.value,
                "steps": est.steps,
                "hit_critical": est.hit_critical,
            }
        )
    report["lyapunov_samples"] = samples

    h = entropy_estimate(spec, 20, max(budgets.samples, 10_000), rng=np.random.default_rng(budgets.seed))
    report["entropy"] = {
        "word_length": 20,
        "samples": max(budgets.samples, 10_000),
        "estimate": h,
        "upper_bound": math.log(2.0) + 2.0 / 20,
        "solenoid_bound": solenoid_entropy_bound(seq.chain()),
    }
    report["provenance"] = {"budgets": budgets.to_dict(), "seed": budgets.seed}
    return report


def _dump_json(obj: dict) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args: argparse.Namespace) -> int:
    spec = load_map(args.map)
    budgets = _load_budgets(args.budgets)
    if args.seed is not None:
        budgets.seed = args.seed
    report = build_report(spec, budgets)
    _emit(_dump_json(report), args.out)
    return EXIT_INVALID_MAP if "error" in report else EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    spec = load_map(args.map)
    budgets = _load_budgets(args.budgets)
    if args.seed is not None:
        budgets.seed = args.seed
    validation = validate_map(spec)
    if not (validation.is_lorenz and validation.is_contracting):
        _emit(_dump_json({"error": "map failed validation", "validation": validation.to_dict()}), args.out)
        return EXIT_INVALID_MAP
    cls = classify_attractor(spec, budgets)
    _emit(_dump_json({"map": spec.to_dict(), "final_class": cls.to_dict()}), args.out)
    return EXIT_OK


def cmd_decompose(args: argparse.Namespace) -> int:
    spec = load_map(args.map)
    budgets = _load_budgets(args.budgets)
    if args.seed is not None:
        budgets.seed = args.seed
    validation = validate_map(spec)
    if not (validation.is_lorenz and validation.is_contracting):
        _emit(_dump_json({"error": "map failed validation"}), args.out)
        return EXIT_INVALID_MAP
    rec = decompose(spec, budgets)
    _emit(_dump_json({"map": spec.to_dict(), "decomposition": rec.to_dict()}), args.out)
    return EXIT_OK


def cmd_returnmap(args: argparse.Namespace) -> int:
    spec = load_map(args.map)
    lo, hi = (float(v) for v in args.interval.split(","))
    nice = is_nice(spec, (lo, hi), args.horizon)
    rec = first_return_map(spec, (lo, hi), args.horizon, args.resolution)
    buf = io.StringIO()
    buf.write("branch_lo,branch_hi,return_time,image_lo,image_hi,is_full\n")
    for b in rec.branches:
        buf.write(
            f"{b.domain[0]!r},{b.domain[1]!r},{b.return_time},{b.image[0]!r},{b.image[1]!r},{int(b.is_full)}\n"
        )
    if not nice.is_nice:
        buf.write(f"# warning: interval failed the niceness probe at horizon {args.horizon}\n")
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_orbit(args: argparse.Namespace) -> int:
    spec = load_map(args.map)
    side = Side(args.side)
    seg = iterate_orbit(spec, args.x0, side, args.steps)
    buf = io.StringIO()
    buf.write("k,x,side,logDf,itin_bit\n")
    from .map_core import derivative

    for k, p in enumerate(seg.points):
        at_c = abs(p.x - spec.c) <= spec.tolerance
        logdf = "" if at_c else repr(math.log(abs(derivative(spec, p.x))))
        bit = "" if (at_c and p.side == Side.NONE) else ("0" if (p.x < spec.c or p.side == Side.MINUS) else "1")
        buf.write(f"{k},{p.x!r},{p.side.value},{logdf},{bit}\n")
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def _scan_cell(a_left: float, a_right: float, budgets: Budgets) -> dict:
    try:
        spec = quadratic_pair(a_left, a_right)
        dec = decompose(spec, budgets)
        est = lyapunov(spec, 0.6180339887498949, max(budgets.horizon, 1000))
        return {
            "a_left": a_left,
            "a_right": a_right,
            "final_class": dec.final_class.kind,
            "n_f": dec.n_f,
            "lyapunov": est.value,
            "status": "ok",
        }
    except Exception as e:  # per-cell failures never abort the sweep
        return {
            "a_left": a_left,
            "a_right": a_right,
            "final_class": "",
            "n_f": "",
            "lyapunov": "",
            "status": f"error: {e}",
        }


def cmd_scan(args: argparse.Namespace) -> int:
    lo_l, hi_l = (float(v) for v in args.a_left.split(":"))
    lo_r, hi_r = (float(v) for v in args.a_right.split(":"))
    for v in (lo_l, hi_l, lo_r, hi_r):
        if not (2.5 <= v <= 4.0):
            raise MapValidationError("sweep ranges must lie within [2.5, 4.0]")
    budgets = _load_budgets(args.budgets)
    if args.seed is not None:
        budgets.seed = args.seed
    lefts = np.linspace(lo_l, hi_l, args.steps)
    rights = np.linspace(lo_r, hi_r, args.steps)
    cells = [(float(al), float(ar)) for al in lefts for ar in rights]
    rows: list[dict] = [None] * len(cells)  # type: ignore[list-item]
    with concurrent.futures.ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        futs = {pool.submit(_scan_cell, al, ar, budgets): i for i, (al, ar) in enumerate(cells)}
        for fut in concurrent.futures.as_completed(futs):
            rows[futs[fut]] = fut.result()
    buf = io.StringIO()
    buf.write("a_left,a_right,final_class,n_f,lyapunov,status\n")
    for r in rows:
        buf.write(
            f"{r['a_left']!r},{r['a_right']!r},{r['final_class']},{r['n_f']},{r['lyapunov']!r},{r['status']}\n"
        )
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_plotdata(args: argparse.Namespace) -> int:
    spec = load_map(args.map)
    buf = io.StringIO()
    if args.kind == "cobweb":
        if args.x0 is None:
            raise MapValidationError("cobweb needs --x0")
        seg = iterate_orbit(spec, args.x0, Side.NONE, args.steps)
        buf.write("x_k,x_k1\n")
        xs = [p.x for p in seg.points]
        for a, b in zip(xs[:-1], xs[1:]):
            buf.write(f"{a!r},{b!r}\n")
    elif args.kind == "returnmap":
        if not args.interval:
            raise MapValidationError("returnmap needs --interval lo,hi")
        lo, hi = (float(v) for v in args.interval.split(","))
        rec = first_return_map(spec, (lo, hi), args.horizon, args.resolution)
        buf.write("branch_lo,branch_hi,return_time,image_lo,image_hi,is_full\n")
        for b in rec.branches:
            buf.write(
                f"{b.domain[0]!r},{b.domain[1]!r},{b.return_time},{b.image[0]!r},{b.image[1]!r},{int(b.is_full)}\n"
            )
    elif args.kind == "strata":
        budgets = _load_budgets(args.budgets)
        rec = decompose(spec, budgets)
        buf.write("n,lo,hi,tag\n")
        for s in rec.strata:
            for (lo, hi) in s.K_n:
                buf.write(f"{s.n},{lo!r},{hi!r},K\n")
            w = 1.0 / s.resolution
            for cell in s.recurrent_cells:
                buf.write(f"{s.n},{cell * w!r},{(cell + 1) * w!r},recurrent\n")
    elif args.kind == "limitset":
        if args.x0 is None:
            raise MapValidationError("limitset needs --x0")
        from .orbits import estimate_omega_limit

        est = estimate_omega_limit(spec, args.x0, 1000, args.steps, args.resolution)
        w = 1.0 / est.resolution
        buf.write("cell_index,cell_lo,cell_hi\n")
        for cell in est.cells:
            buf.write(f"{cell},{cell * w!r},{(cell + 1) * w!r}\n")
    elif args.kind == "phobic":
        if not args.interval:
            raise MapValidationError("phobic needs --interval lo,hi")
        from .return_maps import phobic_measure

        lo, hi = (float(v) for v in args.interval.split(","))
        est = phobic_measure(spec, (lo, hi), args.steps, args.resolution)
        w = 1.0 / est.grid
        buf.write("cell_index,cell_lo,cell_hi\n")
        for cell in est.surviving_cells:
            buf.write(f"{cell},{cell * w!r},{(cell + 1) * w!r}\n")
    else:
        raise MapValidationError(f"unknown plotdata kind {args.kind!r}")
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_embed_unimodal(args: argparse.Namespace) -> int:
    spec = embed_unimodal(logistic(args.logistic))
    _emit(_dump_json(spec.to_dict()), args.out)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lorenzlab",
        description="Contracting Lorenz maps: return maps, renormalization, attractor classification",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(p, with_map=True):
        if with_map:
            p.add_argument("--map", required=True, help=f"map config path or builtin: {', '.join(BUILTIN_NAMES)}")
        p.add_argument("--budgets", default=None, help="budgets JSON (inline or path)")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--format", default=None, help="accepted for compatibility; inferred per command")

    p = sub.add_parser("analyze", help="full report")
    add_common(p)
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("classify", help="attractor class only")
    add_common(p)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("decompose", help="strata decomposition")
    add_common(p)
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("returnmap", help="first-return branch CSV")
    add_common(p)
    p.add_argument("--interval", required=True, help="lo,hi")
    p.add_argument("--horizon", type=int, default=1000)
    p.add_argument("--resolution", type=int, default=1 << 12)
    p.set_defaults(fn=cmd_returnmap)

    p = sub.add_parser("orbit", help="orbit CSV dump")
    add_common(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--side", default="none", choices=["minus", "plus", "none"])
    p.add_argument("--steps", type=int, default=200)
    p.set_defaults(fn=cmd_orbit)

    p = sub.add_parser("scan", help="quadratic-pair parameter sweep CSV")
    add_common(p, with_map=False)
    p.add_argument("--a-left", required=True, help="lo:hi")
    p.add_argument("--a-right", required=True, help="lo:hi")
    p.add_argument("--steps", type=int, default=10)
    p.set_defaults(fn=cmd_scan)

    p = sub.add_parser("plotdata", help="cobweb / returnmap / strata / limitset / phobic CSV")
    add_common(p)
    p.add_argument(
        "--kind", required=True, choices=["cobweb", "returnmap", "strata", "limitset", "phobic"]
    )
    p.add_argument("--x0", type=float, default=None)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--interval", default=None)
    p.add_argument("--horizon", type=int, default=1000)
    p.add_argument("--resolution", type=int, default=1 << 12)
    p.set_defaults(fn=cmd_plotdata)

    p = sub.add_parser("embed-unimodal", help="emit the two-branch embedding of a symmetric unimodal map")
    p.add_argument("--logistic", type=float, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_embed_unimodal)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_BAD_CONFIG if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (MapValidationError, KeyError, ValueError, OSError, json.JSONDecodeError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
