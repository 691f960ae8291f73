"""Command line entry point: analyze, flow, verify, clutch.

Exit codes: 0 success, 2 input error, 3 flow did not converge.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import filtration as F
from .clutching import DEFAULT_TOL, ZeroSampleError, read_loop, winding_number
from .flow import ConfigError, FlowDivergedError, central_residual, jacobian_coordinates, read_config, run_flow
from .lattice import random_connection, write_snapshot
from .slope import BundleSum, atom, is_semistable, is_stable
from .verify import SUITES

EXIT_OK, EXIT_INPUT, EXIT_NOCONV = 0, 2, 3

log = logging.getLogger("stabflow")


class InputError(Exception):
    pass


# ---------------------------------------------------------------- analyze


def parse_bundle_spec(text: str) -> BundleSum:
    """JSON list of {rank, degree, label} records, or {"atoms": [...]}."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    records = data.get("atoms") if isinstance(data, dict) else data
    if not isinstance(records, list):
        raise InputError("bundle spec must be a list of atom records or an object with an 'atoms' list")
    if not records:
        raise InputError("bundle spec has no atoms")
    atoms = []
    for i, rec in enumerate(records, 1):
        if not isinstance(rec, dict):
            raise InputError(f"atom record {i}: expected an object, got {rec!r}")
        unknown = set(rec) - {"rank", "degree", "label"}
        if unknown:
            raise InputError(f"atom record {i}: unknown field(s) {sorted(unknown)}")
        r, d = rec.get("rank"), rec.get("degree")
        for name, v in (("rank", r), ("degree", d)):
            if type(v) is not int:
                raise InputError(f"atom record {i} {rec!r}: {name} must be an integer")
        if r < 1:
            raise InputError(f"atom record {i} {rec!r}: rank must be >= 1")
        label = rec.get("label")
        if label is not None and not isinstance(label, str):
            raise InputError(f"atom record {i} {rec!r}: label must be a string")
        atoms.append(atom(r, d, label))
    return BundleSum(tuple(atoms))


def shatz_svg(poly: F.ShatzPolygon, width: int = 480, height: int = 360, margin: int = 48) -> str:
    xs = [x for x, _ in poly.vertices]
    ys = [y for _, y in poly.vertices]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys + [0]), max(ys + [0])
    sx = (width - 2 * margin) / max(x1 - x0, 1)
    sy = (height - 2 * margin) / max(y1 - y0, 1)

    def px(x, y):
        return margin + (x - x0) * sx, height - margin - (y - y0) * sy

    pts = " ".join(f"{u:.2f},{v:.2f}" for u, v in (px(x, y) for x, y in poly.vertices))
    ax0, ay0 = px(x0, 0)
    ax1, _ = px(x1, 0)
    _, top = px(0, y1)
    _, bottom = px(0, y0)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" width="{width}" height="{height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{ax0:.2f}" y1="{ay0:.2f}" x2="{ax1 + 12:.2f}" y2="{ay0:.2f}" stroke="#888"/>',
        f'<line x1="{ax0:.2f}" y1="{bottom:.2f}" x2="{ax0:.2f}" y2="{top - 12:.2f}" stroke="#888"/>',
        f'<text x="{ax1 + 16:.2f}" y="{ay0 + 4:.2f}" font-size="14">r</text>',
        f'<text x="{ax0 - 4:.2f}" y="{top - 16:.2f}" font-size="14">d</text>',
        f'<polyline points="{pts}" fill="none" stroke="#1f4e9c" stroke-width="2"/>',
    ]
    for x, y in poly.vertices:
        u, v = px(x, y)
        out.append(f'<circle cx="{u:.2f}" cy="{v:.2f}" r="3" fill="#1f4e9c"/>')
        out.append(f'<text x="{u + 5:.2f}" y="{v - 6:.2f}" font-size="11">({x},{y})</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _frac(q) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def cmd_analyze(args) -> int:
    try:
        b = parse_bundle_spec(Path(args.spec).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {args.spec}: {exc.strerror}") from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    hn = F.hn_filtration(b)
    # one row per HN step: rank, degree and slope of the quotient E_i / E_{i-1}
    rows = []
    for i, (r, d) in enumerate(hn.quotient_data(), 1):
        mu = Fraction(d, r)
        rows.append((i, r, d, mu.numerator, mu.denominator))
    _write_csv(out / "hn.csv", ("step", "rank", "degree", "mu_num", "mu_den"), rows)
    poly = F.shatz_polygon(b)
    _write_csv(out / "shatz.csv", ("x", "y"), poly.vertices)
    (out / "shatz.svg").write_text(shatz_svg(poly), encoding="utf-8")

    verdict = "stable" if is_stable(b) else ("semi-stable" if is_semistable(b) else "unstable")
    mu_vec = F.hn_type(b).mu_vec
    summary = {
        "rank": b.rank,
        "degree": b.degree,
        "slope": [b.slope.numerator, b.slope.denominator],
        "semistable": is_semistable(b),
        "stable": is_stable(b),
        "verdict": verdict,
        "hn_type": [[q.numerator, q.denominator] for q in mu_vec],
        "hn_length": len(hn),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    print(f"bundle: rank {b.rank}, degree {b.degree}, slope {_frac(b.slope)}")
    print(f"verdict: {verdict}")
    print("HN type: (" + ", ".join(_frac(q) for q in mu_vec) + ")")
    print(f"wrote {out / 'hn.csv'}, {out / 'shatz.csv'}, {out / 'shatz.svg'}, {out / 'summary.json'}")
    return EXIT_OK


# ---------------------------------------------------------------- flow


def cmd_flow(args) -> int:
    try:
        cfg = read_config(args.config)
    except ConfigError as exc:
        raise InputError(f"invalid config key '{exc.key}': {exc}") from None
    except OSError as exc:
        raise InputError(f"cannot read {args.config}: {exc.strerror}") from None
    if args.seed is not None:
        cfg.seed = args.seed
    if args.tol is not None:
        cfg.tol = args.tol
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    a0 = random_connection(cfg.grid, cfg.seed, cfg.amplitude)
    try:
        res = run_flow(a0, cfg)
    except FlowDivergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    res.trace.write_csv(out / "trace.csv")
    write_snapshot(res.field, out / "field.txt")
    resid = central_residual(res.field)
    print(f"steps: {res.steps}")
    print(f"central_residual: {resid:.6e}")
    g = cfg.grid
    if g.rank == 1 and g.degree == 0:
        try:
            jx, jy = jacobian_coordinates(res.field)
            print(f"jacobian_coordinates: {jx:.8f} {jy:.8f}")
        except ValueError as exc:
            print(f"jacobian_coordinates: unavailable ({exc})")
    if not res.converged:
        print(f"not converged within {cfg.max_steps} steps", file=sys.stderr)
        return EXIT_NOCONV
    return EXIT_OK


# ---------------------------------------------------------------- verify


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    ok = True
    for name in names:
        print(f"[{name}]")
        for check in SUITES[name](seed=args.seed or 0, tol=args.tol):
            print("  " + check.line())
            ok &= check.ok
    print("all checks passed" if ok else "some checks FAILED")
    return EXIT_OK if ok else 1


# ---------------------------------------------------------------- clutch


def cmd_clutch(args) -> int:
    tol = DEFAULT_TOL if args.tol is None else args.tol
    try:
        loop = read_loop(args.samples)
    except OSError as exc:
        raise InputError(f"cannot read {args.samples}: {exc.strerror}") from None
    small = [i for i, z in enumerate(loop.samples) if abs(z) <= tol]
    if small:
        raise ZeroSampleError(small[0])
    print(winding_number(loop))
    return EXIT_OK


# ---------------------------------------------------------------- wiring


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory (default: current)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="stabflow", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="HN filtration, Shatz polygon and verdicts")
    a.add_argument("spec", help="JSON bundle spec")
    a.set_defaults(func=cmd_analyze)

    f = sub.add_parser("flow", parents=[common], help="Yang-Mills descent from a seeded field")
    f.add_argument("config", help="key = value config file")
    f.set_defaults(func=cmd_flow)

    v = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    v.add_argument("suite", choices=[*SUITES, "all"])
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("clutch", parents=[common], help="degree of a clutched line bundle")
    c.add_argument("samples", help="text file of 're im' samples of the transition function")
    c.set_defaults(func=cmd_clutch)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for key, default in (("out", "."), ("seed", None), ("tol", None), ("verbose", False)):
        if not hasattr(args, key):
            setattr(args, key, default)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.tol is not None and not args.tol > 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, ValueError) as exc:
        idx = getattr(exc, "index", None)
        where = f" (sample index {idx})" if idx is not None else ""
        print(f"error: {exc}{where}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
