"""Command-line front end emitting reproducible CSV and SVG artifacts.

Every command writes a JSON manifest next to its primary output; CSV
bodies are pure functions of the flags (and --seed), so reruns are
byte-identical.  Floating-point fields carry 15 significant digits.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__, ball, geometry, mfs, navier, shapeopt
from .errors import DomainError, NoSignChangeError, PlatekitError

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _fmt(x) -> str:
    return "%.15g" % float(x)


def _parse_range(text: str, want_n: bool):
    parts = text.split(":")
    try:
        if want_n:
            if len(parts) == 2:
                lo, hi = float(parts[0]), float(parts[1])
                return lo, hi, 201
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 2:
                raise ValueError
            return lo, hi, n
        if len(parts) != 2:
            raise ValueError
        return float(parts[0]), float(parts[1])
    except (ValueError, IndexError):
        raise argparse.ArgumentTypeError(
            f"expected lo:hi{':n' if want_n else ''}, got {text!r}")


def _alpha_range(text: str):
    return _parse_range(text, want_n=True)


def _window(text: str):
    return _parse_range(text, want_n=False)


def _manifest(args, command: str) -> dict:
    params = {k: v for k, v in sorted(vars(args).items())
              if k != "func" and v is not None}
    return {
        "command": command,
        "parameters": {k: (list(v) if isinstance(v, tuple) else v)
                       for k, v in params.items()},
        "seed": getattr(args, "seed", 0),
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def _write_manifest(out_path: str, manifest: dict):
    with open(out_path + ".manifest.json", "w", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: str, manifest: dict, columns: list[str],
               rows: list[list]):
    """CSV with a deterministic provenance comment and LF endings."""
    params = " ".join(f"{k}={v}" for k, v in
                      sorted(manifest["parameters"].items()))
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# platekit {manifest['command']} {params}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else _fmt(v)
                              for v in row) + "\n")


def _svg_plot(path: str, curves: list[tuple[np.ndarray, np.ndarray]],
              width: int = 640, height: int = 480):
    """Minimal polyline plot: data curves plus zero-axes, no decorations."""
    xs = np.concatenate([c[0] for c in curves])
    ys = np.concatenate([c[1] for c in curves])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    padx = 0.05 * (x1 - x0 or 1.0)
    pady = 0.05 * (y1 - y0 or 1.0)
    x0, x1, y0, y1 = x0 - padx, x1 + padx, y0 + pady, y1 - pady

    def mx(v):
        return (v - x0) / (x1 - x0) * width

    def my(v):
        return (v - y0) / (y1 - y0) * height

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" '
             f'width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>']
    if x0 < 0.0 < x1:
        parts.append(f'<line x1="{mx(0):.2f}" y1="0" x2="{mx(0):.2f}" '
                     f'y2="{height}" stroke="#999" stroke-width="1"/>')
    if min(y0, y1) < 0.0 < max(y0, y1):
        parts.append(f'<line x1="0" y1="{my(0):.2f}" x2="{width}" '
                     f'y2="{my(0):.2f}" stroke="#999" stroke-width="1"/>')
    for i, (cx, cy) in enumerate(curves):
        pts = " ".join(f"{mx(a):.2f},{my(b):.2f}" for a, b in zip(cx, cy))
        color = _PALETTE[i % len(_PALETTE)]
        parts.append(f'<polyline fill="none" stroke="{color}" '
                     f'stroke-width="1.5" points="{pts}"/>')
    parts.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")


def _svg_field(path: str, loc: mfs.EigenLocation, res: int = 96):
    """Raster of the eigenfunction: signed amplitude on a blue-red scale."""
    model = loc.model
    poly = geometry.polygon(model.shape, 512)
    lo = poly.min(axis=0)
    hi = poly.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1]))
    xs = np.linspace(lo[0], lo[0] + span, res)
    ys = np.linspace(lo[1], lo[1] + span, res)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    inside = geometry.point_in_shape(model.shape, pts)
    u = np.zeros(pts.shape[0])
    u[inside] = mfs.evaluate(model, loc.coefficients, pts[inside],
                             loc.lam, check=False)[0]
    amp = np.abs(u).max() or 1.0
    size = 600.0
    cell = size / res
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="600" '
             f'height="600" viewBox="0 0 600 600">',
             '<rect width="600" height="600" fill="white"/>']
    for idx in np.flatnonzero(inside):
        i, j = divmod(int(idx), res)
        v = u[idx] / amp
        if v >= 0:
            r, g, b = 255, int(255 * (1 - v)), int(255 * (1 - v))
        else:
            r, g, b = int(255 * (1 + v)), int(255 * (1 + v)), 255
        x = (X.ravel()[idx] - lo[0]) / span * size
        y = size - (Y.ravel()[idx] - lo[1]) / span * size - cell
        parts.append(f'<rect x="{x:.1f}" y="{y:.1f}" width="{cell:.2f}" '
                     f'height="{cell:.2f}" fill="rgb({r},{g},{b})"/>')
    bd = " ".join(f"{(p[0]-lo[0])/span*size:.2f},"
                  f"{size-(p[1]-lo[1])/span*size:.2f}" for p in poly)
    parts.append(f'<polygon fill="none" stroke="black" stroke-width="1.5" '
                 f'points="{bd}"/>')
    parts.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")


def _shape_from_flag(text: str, P: int = 16) -> geometry.FourierShape:
    """disk[:R] | ellipse[:a:b] | path to a shape file."""
    parts = text.split(":")
    if parts[0] == "disk":
        R = float(parts[1]) if len(parts) > 1 else 1.0 / math.sqrt(math.pi)
        return geometry.FourierShape.circle(R, P=P)
    if parts[0] == "ellipse":
        if len(parts) == 3:
            a, b = float(parts[1]), float(parts[2])
        else:
            a = 1.2 / math.sqrt(math.pi)
            b = 1.0 / (1.2 * math.sqrt(math.pi))
        return geometry.FourierShape.ellipse(a, b, P=P)
    try:
        return geometry.load_shape(text)
    except OSError as exc:
        raise DomainError(f"cannot read shape file {text!r}: {exc}")


# ---------------------------------------------------------------- commands

def cmd_ball_spectrum(args) -> int:
    man = _manifest(args, "ball-spectrum")
    rows = []
    if args.count > 0:
        prob = ball.BallProblem(args.radius, args.dim, args.alpha)
        for i, ev in enumerate(ball.clamped_eigs(prob, args.count), 1):
            rows.append([i, ev.lam, ev.k, ev.multiplicity, ev.regime,
                         ev.residual])
    _write_csv(args.out, man,
               ["index", "lambda", "k", "multiplicity", "regime",
                "residual"], rows)
    _write_manifest(args.out, man)
    return 0


def cmd_branches(args) -> int:
    man = _manifest(args, "branches")
    lo, hi, n = args.alpha_range
    alphas = np.linspace(lo, hi, n)
    rows = []
    curves: dict[int, list[tuple[float, float]]] = {}
    for a in alphas:
        prob = ball.BallProblem(args.radius, args.dim, float(a))
        for j, ev in enumerate(ball.clamped_eigs(prob, args.count), 1):
            if args.k_max is not None and ev.k > args.k_max:
                continue
            shifted = ev.lam + a * a / 4.0
            rows.append([a, j, ev.lam, shifted])
            curves.setdefault(j, []).append(
                (float(a), shifted if args.shifted else ev.lam))
    _write_csv(args.out, man,
               ["alpha", "k_index", "lambda", "shifted_lambda"], rows)
    _write_manifest(args.out, man)
    if args.svg:
        data = [(np.array([p[0] for p in pts]),
                 np.array([p[1] for p in pts]))
                for _, pts in sorted(curves.items())]
        _svg_plot(args.svg, data)
    return 0


def cmd_navier(args) -> int:
    man = _manifest(args, "navier")
    if args.gammas_from == "disk":
        spec = navier.dirichlet_disk_spectrum(args.radius, args.count)
    else:
        g = np.loadtxt(args.gammas_from, ndmin=1)
        spec = navier.DirichletSpectrum(np.sort(g), "file", math.nan, 2)
    lo, hi, n = args.alpha_range
    rows = [["grid", a, lam, k]
            for a, lam, k in navier.navier_lambda1_curve(spec, (lo, hi), n)]
    g = spec.gammas
    for k in range(g.size - 1):
        a_bp = g[k] + g[k + 1]
        if lo <= a_bp <= hi:
            rows.append(["breakpoint", a_bp, -g[k] * g[k + 1], k + 1])
    for k in range(g.size):
        a_t = 2.0 * g[k]
        if lo <= a_t <= hi:
            rows.append(["tangency", a_t, -g[k] * g[k], k + 1])
    rows.sort(key=lambda r: (r[1], r[0]))
    _write_csv(args.out, man, ["kind", "alpha", "lambda", "active_k"], rows)
    _write_manifest(args.out, man)
    return 0


def cmd_mfs_solve(args) -> int:
    man = _manifest(args, "mfs-solve")
    shape = _shape_from_flag(args.shape)
    config = mfs.MfsConfig(m=args.m, p=args.p, rng_seed=args.seed,
                           offset_factor=args.offset_factor,
                           scan_step=args.scan_step)
    model = mfs.place_points(shape, args.alpha, config)
    if args.window is not None:
        window = args.window
    else:
        disk = shapeopt._equivalent_disk_eigs(args.alpha,
                                              geometry.area(shape), 5)
        window = (model.lam_floor, disk[-1] + 0.1 * abs(disk[-1]))
    rows = []
    if window[1] > window[0]:
        locs = mfs.locate_eigenvalues(model, window, count=args.count)
        for i, loc in enumerate(locs, 1):
            res = mfs.boundary_residual(model, loc)
            rows.append([i, loc.lam, loc.sigma1, loc.sigma2,
                         loc.multiplicity, res])
    _write_csv(args.out, man,
               ["index", "lambda", "sigma1", "sigma2", "multiplicity",
                "boundary_residual"], rows)
    _write_manifest(args.out, man)
    if args.trace:
        lo, hi = window
        grid = np.linspace(lo, hi, 400) if hi > lo else np.array([])
        trows = [[x, mfs.sigma1(model, float(x))] for x in grid
                 if abs(x) > model.guard and x > model.lam_floor]
        _write_csv(args.trace, man, ["lambda", "sigma1"], trows)
    return 0


def cmd_optimize(args) -> int:
    man = _manifest(args, "optimize")
    config = mfs.MfsConfig(m=args.m, rng_seed=args.seed,
                           offset_factor=args.offset_factor)
    opts = shapeopt.OptimizeOptions(max_iter=args.iters, gtol=args.gtol,
                                    step0=args.step0)
    if args.seeds == "auto":
        seeds = shapeopt.default_seeds(args.P)
        labels = ["disk"] + [f"mode{j}" for j in (2, 3, 4, 5)]
    else:
        seeds = [geometry.load_shape(args.seeds)]
        labels = ["file"]
    rows = []
    best = None
    for label, seed in zip(labels, seeds):
        traj = shapeopt.optimize(args.alpha, seed, config, opts)
        for st in traj:
            rows.append([label, "descent", st.iteration, st.lambda1,
                         float(np.linalg.norm(st.gradient)),
                         geometry.area(st.shape), st.sigma1,
                         st.multiplicity, int(st.stalled)])
        if best is None or traj[-1].lambda1 < best[1].lambda1:
            best = (label, traj[-1])
    label, final = best
    lam_final = final.lambda1
    if args.polish_m and args.polish_m > args.m:
        loc = shapeopt.polish_lambda1(final.shape, args.alpha,
                                      args.polish_m, final.lambda1,
                                      offset_factor=args.offset_factor)
        lam_final = loc.lam
        rows.append([label, "polish", final.iteration + 1, loc.lam,
                     0.0, geometry.area(final.shape), loc.sigma1,
                     loc.multiplicity, 0])
    _write_csv(args.out + ".traj.csv", man,
               ["seed", "phase", "iteration", "lambda1", "gradient_norm",
                "area", "sigma1", "multiplicity", "stalled"], rows)
    geometry.save_shape(final.shape, args.out + ".shape.txt")
    pts = geometry.polygon(final.shape, 512)
    closed = np.vstack([pts, pts[:1]])
    _svg_plot(args.out + ".svg", [(closed[:, 0], closed[:, 1])],
              width=480, height=480)
    if args.field_svg:
        lam, loc, _ = shapeopt.lambda1_with_eigenfunction(
            final.shape, args.alpha, config, hint=final.lambda1,
            want_gap=False)
        _svg_field(args.out + ".field.svg", loc)
    _write_manifest(args.out, man)
    print(f"best seed {label}: lambda1 = {_fmt(lam_final)}")
    return 0


def cmd_critical_alpha(args) -> int:
    man = _manifest(args, "critical-alpha")
    config = mfs.MfsConfig(m=args.m, rng_seed=args.seed,
                           offset_factor=args.offset_factor)
    opts = shapeopt.OptimizeOptions(max_iter=args.iters)
    log: list = []
    modes = tuple(int(s) for s in args.seed_modes.split(","))
    if args.lo == args.hi:
        # echo mode: evaluate the indicator once at the requested alpha
        R = 1.0 / math.sqrt(math.pi)
        lam_disk = shapeopt._equivalent_disk_eigs(args.lo, 1.0, 1)[0]
        best = math.inf
        for j in modes:
            seed = geometry.rescale_to_unit_area(
                geometry.perturbed_circle(R, j, 0.05, args.P))
            traj = shapeopt.optimize(args.lo, seed, config, opts)
            best = min(best, traj[-1].lambda1)
        beats = best < lam_disk - 1e-5 * abs(lam_disk)
        star = args.lo
        log.append((args.lo, lam_disk, best, beats))
    else:
        star = shapeopt.critical_alpha((args.lo, args.hi), config, opts,
                                       seed_modes=modes, P=args.P,
                                       resolution=args.resolution, log=log)
    rows = [["probe", a, ld, lb, int(b)] for a, ld, lb, b in log]
    rows.append(["result", star, 0.0, 0.0, 0])
    _write_csv(args.out, man,
               ["kind", "alpha", "lambda_disk", "lambda_best", "beats"],
               rows)
    _write_manifest(args.out, man)
    print(f"alpha_star = {_fmt(star)} (resolution {args.resolution})")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="platekit",
        description="clamped-plate spectra, MFS solver, shape optimizer")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("ball-spectrum", help="clamped eigenvalues of a ball")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ball_spectrum)

    p = sub.add_parser("branches", help="lambda_k(alpha) curves for a ball")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--alpha-range", type=_alpha_range, default=(-200.0, 1000.0, 121))
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--shifted", action="store_true",
                   help="plot lambda + alpha^2/4 in the SVG")
    p.add_argument("--out", required=True)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=cmd_branches)

    p = sub.add_parser("navier", help="polygonal Navier lambda_1 curve")
    p.add_argument("--gammas-from", default="disk",
                   help="'disk' or a file of Dirichlet eigenvalues")
    p.add_argument("--radius", type=float,
                   default=1.0 / math.sqrt(math.pi))
    p.add_argument("--count", type=int, default=40)
    p.add_argument("--alpha-range", type=_alpha_range,
                   default=(0.0, 200.0, 201))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_navier)

    p = sub.add_parser("mfs-solve", help="locate eigenvalues on a shape")
    p.add_argument("--shape", default="disk",
                   help="disk[:R] | ellipse[:a:b] | shape file")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--window", type=_window, default=None)
    p.add_argument("--m", type=int, default=300)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--offset-factor", type=float, default=2.0)
    p.add_argument("--scan-step", type=float, default=None)
    p.add_argument("--trace", default=None,
                   help="also write a sigma1(lambda) trace CSV")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mfs_solve)

    p = sub.add_parser("optimize", help="minimize lambda_1 at unit area")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--seeds", default="auto", help="'auto' or a shape file")
    p.add_argument("--P", type=int, default=16)
    p.add_argument("--m", type=int, default=300)
    p.add_argument("--iters", type=int, default=60)
    p.add_argument("--gtol", type=float, default=1e-3)
    p.add_argument("--step0", type=float, default=2e-4)
    p.add_argument("--polish-m", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--offset-factor", type=float, default=2.0)
    p.add_argument("--field-svg", action="store_true",
                   help="also raster the first eigenfunction")
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("critical-alpha",
                       help="bisect the disk-stops-winning threshold")
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--resolution", type=float, default=2.0)
    p.add_argument("--m", type=int, default=160)
    p.add_argument("--P", type=int, default=8)
    p.add_argument("--iters", type=int, default=25)
    p.add_argument("--seed-modes", default="2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--offset-factor", type=float, default=2.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_critical_alpha)
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NoSignChangeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except PlatekitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
