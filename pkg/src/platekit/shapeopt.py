"""Minimization of the first clamped-plate eigenvalue over unit-area shapes.

The Hadamard derivative of a simple first eigenvalue under a boundary
deformation field V is dlambda = -integral over the boundary of
(lap u)^2 (V . nu) ds, with u the L2-normalized eigenfunction (lap u equals
the second normal derivative on a clamped boundary).  The optimizer runs
projected gradient descent on the Fourier coefficients: steps follow the
area-tangent part of the gradient, each candidate is rescaled back to unit
area, and a step is accepted only when lambda1 decreases.
"""
from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from . import ball, geometry, mfs
from .errors import (DegenerateEigenvalueError, DegenerateShapeError,
                     NoSignChangeError, OrientationError,
                     SelfIntersectionError, SolverError,
                     SourcePlacementError)
from .geometry import (FourierShape, area, boundary, centroid,
                       rescale_to_unit_area)

__all__ = [
    "FourierShape", "boundary", "area", "rescale_to_unit_area",
    "OptimizeOptions", "OptState", "default_seeds",
    "lambda1_with_eigenfunction", "shape_gradient", "optimize",
    "polish_lambda1", "critical_alpha", "nodal_count", "serrin_defect",
]


@dataclass(frozen=True)
class OptimizeOptions:
    max_iter: int = 60
    gtol: float = 1e-3          # on the area-tangent gradient norm
    step0: float = 2e-4
    step_max: float = 5e-3
    quad_refine: int = 0        # interior-quadrature refinement in descent


@dataclass(frozen=True)
class OptState:
    iteration: int
    shape: FourierShape
    alpha: float
    lambda1: float
    gradient: np.ndarray        # area-tangent gradient used for the step
    step: float
    sigma1: float
    multiplicity: int
    gap: float | None = None
    stalled: bool = False


def default_seeds(P: int = 16) -> list[FourierShape]:
    """Unit-area disk plus mode-j radial perturbations, j in {2, 3, 4, 5}."""
    R = 1.0 / math.sqrt(math.pi)
    seeds = [geometry.FourierShape.circle(R, P=P)]
    for j in (2, 3, 4, 5):
        seeds.append(rescale_to_unit_area(
            geometry.perturbed_circle(R, j, 0.05, P)))
    return seeds


def _equivalent_disk_eigs(alpha: float, shape_area: float, count: int):
    R = math.sqrt(shape_area / math.pi)
    prob = ball.BallProblem(R, 2, alpha)
    return [e.lam for e in ball.clamped_eigs(prob, count=count)]


def _default_window(shape: FourierShape, alpha: float, count: int):
    a = area(shape)
    disk = _equivalent_disk_eigs(alpha, a, count)
    floor = -0.25 * alpha * alpha
    hi = disk[-1] + 0.5 * (disk[-1] - floor)
    return floor, hi


def _scan_near(model: mfs.MfsModel, hint: float, frac: float,
               count: int = 1, floor: float | None = None):
    """Dips in a window of relative half-width frac around hint."""
    half = max(frac * abs(hint), 40.0 * model.guard, 1.0)
    lo = hint - half
    if floor is not None:
        lo = max(lo, floor)
    step = max(half / 12.0, 1e-7)
    narrow = replace(model, config=replace(model.config, scan_step=step))
    return mfs.locate_eigenvalues(narrow, (lo, hint + half), count=count)


def _locate_first(model: mfs.MfsModel, window, hint=None, count: int = 1,
                  frac: float = 0.12):
    """First `count` sigma1 dips, trying windows around hint first.

    Two hint windows (relative half-widths frac and 3*frac) before the
    full-window scan, so near-miss hints stay cheap.
    """
    if hint is not None:
        for f in (frac, 3.0 * frac):
            locs = _scan_near(model, hint, f, count)
            if len(locs) >= count:
                return locs
    return mfs.locate_eigenvalues(model, window, count=count)


def lambda1_with_eigenfunction(shape: FourierShape, alpha: float,
                               config: mfs.MfsConfig,
                               window: tuple[float, float] | None = None,
                               hint: float | None = None,
                               want_gap: bool = True):
    """(lambda1, EigenLocation, gap to lambda2) on one shape.

    Narrow scans around the same-area disk eigenvalues (or the caller's
    hint) run first; a full scan of [spectral floor, disk value plus
    margin] is the fallback.  gap is None when lambda2 was not requested
    or not found; a double lambda1 reports gap 0.
    """
    model = mfs.place_points(shape, alpha, config)
    disk = _equivalent_disk_eigs(alpha, area(shape), 2)
    if window is None:
        floor = -0.25 * alpha * alpha
        window = (floor, disk[1] + 0.5 * (disk[1] - floor))
    locs = _locate_first(model, window, hint if hint is not None
                         else disk[0], count=1)
    if not locs:
        raise SolverError("no eigenvalue found in the scan window")
    loc = locs[0]
    gap = None
    if want_gap:
        if loc.multiplicity == 2:
            gap = 0.0
        else:
            above = _scan_near(model, disk[1], 0.15, count=1,
                               floor=loc.lam + 2e-9 * max(1, abs(loc.lam)))
            if not above or above[0].lam <= loc.lam + 1e-8 * abs(loc.lam):
                above = mfs.locate_eigenvalues(
                    model, (loc.lam + 1e-6 * max(1, abs(loc.lam)),
                            window[1]), count=1)
            if above:
                gap = above[0].lam - loc.lam
        if gap is not None and gap <= 1e-3 * abs(loc.lam):
            warnings.warn("near-degenerate first eigenvalue "
                          f"(gap {gap:.3e})", RuntimeWarning)
    return loc.lam, loc, gap


def _normalized_sq_lap(model: mfs.MfsModel, loc: mfs.EigenLocation,
                       t: np.ndarray, quad_refine: int):
    """(lap u)^2 on boundary points of parameter t, with u L2-normalized."""
    nodes, w = geometry.interior_quadrature(model.shape,
                                            refine=quad_refine)
    ui = mfs.evaluate(model, loc.coefficients, nodes, loc.lam,
                      check=False)[0]
    nrm2 = float(np.sum(w * ui * ui))
    if nrm2 <= 0.0:
        raise SolverError("eigenfunction quadrature norm vanished")
    pts = geometry.boundary(model.shape, t)[0]
    lap = mfs.evaluate(model, loc.coefficients, pts, loc.lam,
                       check=False)[2]
    return lap * lap / nrm2


def boundary_lap_richardson(model: mfs.MfsModel, loc: mfs.EigenLocation,
                            t: np.ndarray, eps: float = 1e-3) -> np.ndarray:
    """lap u on the boundary by extrapolation from interior offsets.

    Cross-check for the direct boundary evaluation: linear Richardson from
    offsets eps and 2*eps along the inward normal.
    """
    pts, _, nu, _ = geometry.boundary(model.shape, t)
    f1 = mfs.evaluate(model, loc.coefficients, pts - eps * nu, loc.lam,
                      check=False)[2]
    f2 = mfs.evaluate(model, loc.coefficients, pts - 2.0 * eps * nu,
                      loc.lam, check=False)[2]
    return 2.0 * f1 - f2


def _field_normal_components(shape: FourierShape, t: np.ndarray):
    """(V_c . nu)(t) for every coefficient direction c, as a matrix.

    Rows follow the flat layout [a1, b1, a2, b2]; V for a1[j] is
    (cos jt, 0), for b2[j] it is (0, sin jt), and so on.
    """
    _, _, nu, speed = geometry.boundary(shape, t)
    P = shape.P
    j = np.arange(0, P + 1)
    cos = np.cos(np.outer(j, t))          # (P+1, n)
    sin = np.sin(np.outer(j[1:], t))      # (P, n)
    vx = np.concatenate([cos * nu[:, 0], sin * nu[:, 0]], axis=0)
    vy = np.concatenate([cos * nu[:, 1], sin * nu[:, 1]], axis=0)
    return np.concatenate([vx, vy], axis=0), speed


def _gradient_tables(model: mfs.MfsModel, loc: mfs.EigenLocation,
                     quad_refine: int):
    shape = model.shape
    n = 8 * shape.P + 16
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    sq = _normalized_sq_lap(model, loc, t, quad_refine)
    vn, speed = _field_normal_components(shape, t)
    scale = 2.0 * np.pi / n
    grad = -scale * (vn * (sq * speed)[None, :]).sum(axis=1)
    # area and dilation responses reuse the same deformation machinery
    darea = scale * (vn * speed[None, :]).sum(axis=1)
    pts = geometry.boundary(shape, t)[0]
    nu = geometry.boundary(shape, t)[2]
    cen = centroid(shape)
    dil_n = np.einsum("nx,nx->n", pts - cen, nu)
    had_dil = -scale * float(np.sum(sq * dil_n * speed))
    return grad, darea, had_dil


def shape_gradient(shape: FourierShape, alpha: float,
                   config: mfs.MfsConfig,
                   project_area: bool = False,
                   quad_refine: int = 2) -> np.ndarray:
    """Hadamard derivative of lambda1 per Fourier coefficient.

    With project_area=True the dilation response is subtracted so the
    vector differentiates lambda1 along rescale-to-unit-area paths (the
    quantity a finite difference with rescaling measures).
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        lam, loc, gap = lambda1_with_eigenfunction(shape, alpha, config)
    if loc.multiplicity == 2 or (gap is not None
                                 and gap <= 1e-3 * abs(lam)):
        raise DegenerateEigenvalueError(
            "first eigenvalue is not simple enough for shape "
            "differentiation")
    grad, darea, had_dil = _gradient_tables(loc.model, loc, quad_refine)
    if project_area:
        a = area(shape)
        grad = grad - darea * (had_dil / (2.0 * a))
    return grad


def _translation_indices(P: int) -> tuple[int, int]:
    return 0, 2 * P + 1


def optimize(alpha: float, init: FourierShape, config: mfs.MfsConfig,
             opts: OptimizeOptions | None = None) -> list[OptState]:
    """Projected-gradient descent of lambda1 at fixed area 1.

    Returns the trajectory of accepted iterates (entry 0 is the initial
    shape); the final entry carries stalled=True when no descent step was
    found before the iteration cap.
    """
    opts = opts or OptimizeOptions()
    shape = rescale_to_unit_area(init)
    window = _default_window(shape, alpha, 1)

    def solve(s: FourierShape, hint):
        model = mfs.place_points(s, alpha, config)
        locs = _locate_first(model, window, hint, count=1, frac=0.03)
        if not locs:
            raise SolverError("lost the first eigenvalue during descent")
        return locs[0]

    loc = solve(shape, _equivalent_disk_eigs(alpha, 1.0, 1)[0])
    step = opts.step0
    traj: list[OptState] = []

    def record(it, s, lc, g, stalled=False):
        traj.append(OptState(it, s, alpha, lc.lam, g, step, lc.sigma1,
                             lc.multiplicity, stalled=stalled))

    for it in range(opts.max_iter):
        grad, darea, _ = _gradient_tables(loc.model, loc, opts.quad_refine)
        # tangent of the area constraint: drop the component along the
        # area gradient, and the translation directions
        g = grad - darea * (grad @ darea) / (darea @ darea)
        for idx in _translation_indices(shape.P):
            g[idx] = 0.0
        record(it, shape, loc, g)
        gnorm = float(np.linalg.norm(g))
        if gnorm <= opts.gtol:
            break

        accepted = False
        for _ in range(21):
            try:
                cand = rescale_to_unit_area(FourierShape.from_coeffs(
                    shape.P, shape.coeffs() - step * g))
                cloc = solve(cand, loc.lam)
            except (SolverError, DegenerateShapeError, OrientationError,
                    SelfIntersectionError, SourcePlacementError):
                step *= 0.5
                continue
            if cloc.multiplicity == 2:
                warnings.warn("degenerate candidate eigenvalue; halving "
                              "the step (consider a symmetry-breaking "
                              "restart)", RuntimeWarning)
                step *= 0.5
                continue
            if cloc.lam < loc.lam:
                shape, loc = cand, cloc
                accepted = True
                break
            step *= 0.5
        if not accepted:
            traj[-1] = replace(traj[-1], stalled=True)
            break
        step = min(step * 1.5, opts.step_max)

    if not traj or traj[-1].shape is not shape:
        record(opts.max_iter, shape, loc,
               traj[-1].gradient if traj else np.zeros(4 * shape.P + 2))
    return traj


def critical_alpha(search: tuple[float, float], config: mfs.MfsConfig,
                   opts: OptimizeOptions | None = None,
                   seed_modes: tuple[int, ...] = (2,),
                   P: int = 8, rel_tol: float = 1e-5,
                   resolution: float = 2.0,
                   log: list | None = None) -> float:
    """Threshold alpha above which an optimized shape beats the disk.

    Bisection on the indicator "the best optimizer result from the
    perturbed-disk seeds improves on the same-area disk by more than
    rel_tol relative"; the endpoints must disagree.  Each indicator
    evaluation is appended to log as (alpha, disk lambda1, best lambda1,
    beats) when a list is supplied.
    """
    R = 1.0 / math.sqrt(math.pi)
    seeds = [rescale_to_unit_area(geometry.perturbed_circle(R, j, 0.05, P))
             for j in seed_modes]

    def beats_disk(alpha: float) -> bool:
        lam_disk = _equivalent_disk_eigs(alpha, 1.0, 1)[0]
        best = math.inf
        for seed in seeds:
            traj = optimize(alpha, seed, config, opts)
            best = min(best, traj[-1].lambda1)
        beats = best < lam_disk - rel_tol * abs(lam_disk)
        if log is not None:
            log.append((alpha, lam_disk, best, beats))
        return beats

    lo, hi = search
    if lo >= hi:
        raise NoSignChangeError("empty search interval")
    if beats_disk(lo):
        raise NoSignChangeError("optimizer already beats the disk at the "
                                "left endpoint")
    if not beats_disk(hi):
        raise NoSignChangeError("optimizer never beats the disk on the "
                                "interval")
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if beats_disk(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def polish_lambda1(shape: FourierShape, alpha: float, m: int,
                   hint: float, rel_tol: float = 1e-7,
                   offset_factor: float = 2.0) -> mfs.EigenLocation:
    """Refine an already-located lambda1 at a finer discretization.

    Golden-section refinement of sigma1 in a tight window around hint;
    intended for m well beyond the descent resolution, where full scans
    are too expensive.  The hint must come from a converged coarse run.
    """
    config = mfs.MfsConfig(m=m, offset_factor=offset_factor)
    model = mfs.place_points(shape, alpha, config)
    w = max(1e-3 * abs(hint), 60.0 * model.guard, 0.5)
    for _ in range(4):
        lo, hi = hint - w, hint + w
        x, s = mfs._golden_min(lambda y: mfs.sigma1(model, y), lo, hi,
                               rel_tol * max(1.0, abs(hint)))
        # a minimum pinned to an edge means the dip escaped the window
        if min(x - lo, hi - x) > 2.0 * rel_tol * max(1.0, abs(hint)):
            return mfs.solve_at(model, x, (lo, hi))
        w *= 4.0
    raise SolverError("polish window kept missing the sigma1 dip")


def _model_of(loc: mfs.EigenLocation) -> mfs.MfsModel:
    if loc.model is None:
        raise SolverError("EigenLocation does not carry its model")
    return loc.model


def nodal_count(shape: FourierShape, loc: mfs.EigenLocation,
                resolution: int = 128) -> int:
    """Number of nodal domains of the located eigenfunction.

    Flood fill (4-connectivity) of {u > tau} and {u < -tau} on a
    resolution^2 grid clipped to the domain, tau = 1e-6 max|u|.
    """
    model = _model_of(loc)
    poly = geometry.polygon(model.shape, 1024)
    lo = poly.min(axis=0) - 1e-9
    hi = poly.max(axis=0) + 1e-9
    xs = np.linspace(lo[0], hi[0], resolution)
    ys = np.linspace(lo[1], hi[1], resolution)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    inside = geometry.point_in_shape(model.shape, pts).reshape(
        resolution, resolution)
    u = np.zeros(resolution * resolution)
    u[inside.ravel()] = mfs.evaluate(
        model, loc.coefficients, pts[inside.ravel()], loc.lam,
        check=False)[0]
    u = u.reshape(resolution, resolution)
    tau = 1e-6 * np.abs(u).max()
    sign = np.zeros_like(u, dtype=np.int8)
    sign[inside & (u > tau)] = 1
    sign[inside & (u < -tau)] = -1

    seen = np.zeros_like(sign, dtype=bool)
    count = 0
    smallest = math.inf
    for i in range(resolution):
        for j in range(resolution):
            if sign[i, j] == 0 or seen[i, j]:
                continue
            want = sign[i, j]
            cells = 0
            queue = deque([(i, j)])
            seen[i, j] = True
            while queue:
                a, b = queue.popleft()
                cells += 1
                for da, db in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                    x, y = a + da, b + db
                    if (0 <= x < resolution and 0 <= y < resolution
                            and not seen[x, y] and sign[x, y] == want):
                        seen[x, y] = True
                        queue.append((x, y))
            count += 1
            smallest = min(smallest, cells)
    if count and smallest < 10:
        warnings.warn("nodal grid may be too coarse (a component covers "
                      f"only {smallest} cells)", RuntimeWarning)
    return count


def serrin_defect(shape: FourierShape, loc: mfs.EigenLocation,
                  n: int | None = None) -> float:
    """Relative standard deviation of lap u over the boundary.

    Zero at critical shapes, where the second normal derivative of the
    eigenfunction is constant along the boundary.
    """
    model = _model_of(loc)
    n = n if n is not None else 8 * model.shape.P + 16
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    pts = geometry.boundary(model.shape, t)[0]
    lap = mfs.evaluate(model, loc.coefficients, pts, loc.lam,
                       check=False)[2]
    mean = float(np.mean(lap))
    if mean == 0.0:
        raise SolverError("boundary lap u has zero mean")
    return float(np.std(lap)) / abs(mean)
